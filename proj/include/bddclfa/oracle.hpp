#pragma once

#include <Eigen/Cholesky>
#include <cstdint>
#include <memory>

#include "bddclfa/preconditioner.hpp"

namespace bddclfa {

/// Brute-force finite validator: the true periodic-grid operators on an
/// m x m array of p x p subdomains, assembled directly in real arithmetic
/// (no Fourier machinery), so LFA predictions can be checked against it.
class AssembledSystem {
  public:
    /// Throws std::invalid_argument beyond desk scale ((m p)^2 > 1e4).
    AssembledSystem(const Stencil9& s, int p, int m);

    int p() const { return p_; }
    int m() const { return m_; }
    int n_axis() const { return p_ * m_; }
    Eigen::Index n_fine() const { return static_cast<Eigen::Index>(n_axis()) * n_axis(); }
    Eigen::Index n_r() const { return static_cast<Eigen::Index>(m_) * m_ * nr_loc_; }
    Eigen::Index n_pi() const { return static_cast<Eigen::Index>(m_) * m_; }
    Eigen::Index n_broken() const { return n_r() + n_pi(); }
    const Stencil9& stencil() const { return stencil_; }

    /// y = A x by direct stencil application on the torus.
    void apply_a(const RealVector& x, RealVector& y) const;
    RealMatrix dense_a() const;
    RealMatrix dense_ahat() const;
    RealMatrix dense_r1() const;
    RealMatrix dense_r2() const;

    /// Coarse operator: eliminate the r block of the broken matrix (m^2 x m^2).
    const RealMatrix& schur() const { return schur_; }

    // structured pieces used by the preconditioner application
    void apply_arr_inv(const RealVector& xr, RealVector& yr) const;
    void apply_pir(const RealVector& xr, RealVector& ypi) const;
    void apply_pir_t(const RealVector& xpi, RealVector& yr) const;
    void apply_r(bool dirichlet, const RealVector& xfine, RealVector& ybroken) const;
    void apply_r_t(bool dirichlet, const RealVector& xbroken, RealVector& yfine) const;
    void apply_jd(const RealVector& x, RealVector& y) const;

  private:
    struct Entry {
        Eigen::Index pi, r;
        double v;
    };

    Stencil9 stencil_;
    int p_, m_;
    Eigen::Index nr_loc_;
    std::vector<std::pair<int, int>> local_r_;
    std::vector<int> local_lookup_;
    std::vector<int> interior_local_, gamma_local_;
    Eigen::MatrixXd neumann_;
    Eigen::LLT<Eigen::MatrixXd> an_rr_llt_;
    Eigen::MatrixXd hn_;  // -A_II^{-1} A_IG
    std::vector<Eigen::Index> r_node_;
    std::vector<double> r_weight_;
    std::vector<Entry> pir_entries_;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> jd_pairs_;
    RealMatrix schur_;
};

/// Finite preconditioned operator G for one spec, with the exactly singular
/// periodic coarse problems handled by pseudo-inverse and three-level coarse
/// solves built recursively from the Schur stencil (requires p | m).
class FinitePreconditioner {
  public:
    FinitePreconditioner(const AssembledSystem& sys, const PreconditionerSpec& spec);

    void apply_minv(const RealVector& x, RealVector& y) const;
    /// y = G x including any multiplicative fine wrap.
    void apply_g(const RealVector& x, RealVector& y) const;
    RealMatrix dense_minv() const;
    RealMatrix dense_g() const;

  private:
    const AssembledSystem& sys_;
    PreconditionerSpec spec_;
    RealMatrix cinv_;  // coarse block of the factorized solve (m^2 x m^2)
};

/// Sorted-multiset comparison of the finite spectrum against the union of
/// LFA symbol spectra at the torus frequencies 2 pi k / m (2-level) or
/// 2 pi k / (m/p) (3-level), zero modes dropped on both sides.
struct MatchReport {
    double max_deviation = 0.0;
    std::size_t n_compared = 0;
    double finite_kappa = 0.0;  // over nonzero eigenvalues
    double lfa_kappa = 0.0;
    double finite_min = 0.0;
};
MatchReport spectra_match(const AssembledSystem& sys, const PreconditionerSpec& spec,
                          double drop_tol = 1e-6);

/// Arnoldi Ritz estimate of the extreme eigenvalues of G from a seeded
/// zero-mean random start, modified Gram-Schmidt, relative tolerance on the
/// subdiagonal.  Near-zero Ritz values (the periodic constant mode) dropped.
struct RitzResult {
    std::vector<Complex> ritz;
    double ratio = 0.0;  // max|.| / min|.| after dropping the zero mode
    int iterations = 0;
};
RitzResult ritz_estimate(const AssembledSystem& sys, const PreconditionerSpec& spec, int max_iter = 50,
                         double tol = 1e-12, std::uint64_t seed = 1234);

}  // namespace bddclfa
