#pragma once

#include "bddclfa/broken_cell.hpp"
#include "bddclfa/symbols.hpp"

namespace bddclfa {

/// Multiplicative combination applied around the base preconditioner.
enum class MultMode { none, fine, coarse, sym_coarse, fine_coarse };

MultMode mult_mode_from_string(const std::string& s);
std::string to_string(MultMode m);

/// Which preconditioned operator to build: fine variant i (1 lumped,
/// 2 Dirichlet), coarse variant j (0 exact Schur solve, 1/2 recursive
/// lumped/Dirichlet), multiplicative mode and its weights.
///
/// Weight conventions: `fine` and `coarse` use omega; `sym_coarse` uses
/// (omega1, omega2) around the coarse solve; `fine_coarse` uses omega1 for
/// the coarse wrap and omega2 for the fine wrap.
struct PreconditionerSpec {
    int fine_variant = 1;
    int coarse_variant = 0;
    MultMode mult = MultMode::none;
    double omega = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;

    void validate() const;
    int levels() const { return coarse_variant == 0 ? 2 : 3; }
    /// True when the spectrum is provably real (plain and fine-wrapped variants).
    bool real_spectrum() const { return mult == MultMode::none || mult == MultMode::fine; }
    std::string label() const;
};

/// Per-frequency symbol of a preconditioned operator.
struct OperatorSymbol {
    Frequency theta;
    ComplexMatrix g;
    PreconditionerSpec spec;
    int p = 2;
};

/// Preconditioner-inverse symbol M_i^{-1} of the two-level method on one
/// subdomain cell (p^2 x p^2).  With zero_frequency set, the exactly singular
/// Schur scalar at theta = 0 is treated by pseudo-inverse.
ComplexMatrix two_level_minv(const Stencil9& s, int p, const Frequency& theta, int fine_variant,
                             bool zero_frequency = false);

/// G^f = g + omega D^{-1} A (I - g) with D = diag_value * I.
ComplexMatrix multiplicative_fine(const ComplexMatrix& g, const ComplexMatrix& a, double diag_value,
                                  double omega);

/// Coarse-level wraps, expressed as modified coarse-inverse blocks
/// W = G_{c,j} S^{-1} so no exact Schur inverse is ever applied:
///   W   = Minv + (omega/ds) (I - S Minv)
///   W_s = W + omega2 (I - W S) / ds
ComplexMatrix coarse_wrap(const ComplexMatrix& minv_s, const ComplexMatrix& schur, double ds, double omega);
ComplexMatrix coarse_wrap_symmetrized(const ComplexMatrix& minv_s, const ComplexMatrix& schur, double ds,
                                      double omega1, double omega2);

/// P_j coarse block M_{s,j}^{-1} S_Pi (identity for j = 0).
ComplexMatrix coarse_preconditioner_symbol(const SchurStencilCoeffs& schur, int p, const Frequency& theta,
                                           int j, bool zero_frequency = false);

/// Two-level operator symbol G_{i,0} (p^2 x p^2), optionally fine-wrapped.
OperatorSymbol two_level_symbol(const Stencil9& s, int p, const Frequency& theta,
                                const PreconditionerSpec& spec, bool zero_frequency = false);

/// Three-level operator symbol G_{i,j} (p^4 x p^4) over a p x p subdomain
/// array, with any multiplicative mode.  coarse_variant = 0 substitutes the
/// exact Schur inverse (consistency reference).
OperatorSymbol three_level_symbol(const Stencil9& s, int p, const Frequency& theta,
                                  const PreconditionerSpec& spec, bool zero_frequency = false);

/// Dispatch on spec.levels().
OperatorSymbol operator_symbol(const Stencil9& s, int p, const Frequency& theta,
                               const PreconditionerSpec& spec, bool zero_frequency = false);

/// Extreme eigenvalues of a plain (unwrapped) operator via Lanczos on the
/// Hermitian similarity A^{1/2} M^{-1} A^{1/2}, never forming the symbol.
struct SpectrumExtremes {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};
SpectrumExtremes plain_extremes_krylov(const Stencil9& s, int p, const Frequency& theta,
                                       const PreconditionerSpec& spec);

/// Shared per-frequency state for weight sweeps of fine-wrapped operators:
/// spectrum(G^f(omega)) = 1 + eig(P - (omega/d) Sp) with P, Sp Hermitian.
class FineWrapPencil {
  public:
    /// minv: preconditioner-inverse symbol; a: operator symbol (HPD); d: its diagonal value.
    FineWrapPencil(const ComplexMatrix& minv, const ComplexMatrix& a, double diag_value);
    RealVector eigenvalues(double omega) const;

  private:
    ComplexMatrix p_;   // L^H Minv L - I
    ComplexMatrix sp_;  // P^{1/2} L^H L P^{1/2}
    double d_;
};

}  // namespace bddclfa
