#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bddclfa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Thrown when a solve meets a pivot below the relative singularity threshold.
class SingularMatrixError : public std::runtime_error {
  public:
    SingularMatrixError(const std::string& what, double pivot_magnitude)
        : std::runtime_error(what), pivot(pivot_magnitude) {}
    double pivot;
};

/// Thrown when an eigenvalue iteration fails to converge.
class EigenFailureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// All eigenvalues of a square matrix, no ordering guaranteed.
struct Spectrum {
    ComplexVector eigenvalues;
    Eigen::Index source_dim = 0;
};

/// Scaled 2-D DFT matrix T = T1 (x) T1 with (T1)_{k,q} = z^{kq}, z = exp(2 pi i / p).
/// Satisfies T T^H = p^2 I, so T^{-1} = T^H / p^2.  Point (k,l) maps to row
/// l*p+k, harmonic (q,r) to column r*p+q.
ComplexMatrix dft_matrix(int p);

/// Full spectrum of a general complex matrix (Schur decomposition).
Spectrum eig(const ComplexMatrix& m);

/// Eigenvalues of a Hermitian matrix, ascending.  The input is symmetrised
/// first; callers must only pass matrices Hermitian up to roundoff.
RealVector eig_hermitian(const ComplexMatrix& m);

/// Solve m x = rhs by partially pivoted LU with a relative pivot check
/// (threshold 1e-12); throws SingularMatrixError carrying the pivot.
ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs);
RealMatrix solve_real_spd(const RealMatrix& m, const RealMatrix& rhs);

/// Explicit inverse via solve() against the identity.
ComplexMatrix inverse(const ComplexMatrix& m);

/// Moore-Penrose pseudo-inverse of a Hermitian matrix, dropping eigenvalues
/// with |lambda| <= rel_tol * max(max|lambda|, scale_hint).  The hint guards
/// blocks that are entirely zero up to roundoff (the zero-frequency coarse
/// scalar), where a purely relative threshold would invert noise.
ComplexMatrix pinv_hermitian(const ComplexMatrix& m, double rel_tol = 1e-10, double scale_hint = 0.0);

/// (m + m^H) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Extreme eigenvalues of a Hermitian operator given only as a matvec,
/// via Lanczos with full reorthogonalisation.  Deterministic for fixed seed.
/// Returns as soon as both Ritz residuals certify tol; the preconditioned
/// spectra handled here accumulate at their lower edge, so when the subspace
/// budget runs out the clustered bottom end is accepted at tol_lo_final
/// (the top must still satisfy 1e-9).
struct LanczosResult {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int iterations = 0;
};
LanczosResult lanczos_extremes(const std::function<void(const ComplexVector&, ComplexVector&)>& apply,
                               Eigen::Index dim, int max_subspace = 700, double tol = 1e-10,
                               double tol_lo_final = 3e-6, std::uint64_t seed = 20240901);

}  // namespace bddclfa
