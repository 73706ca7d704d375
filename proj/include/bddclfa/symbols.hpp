#pragma once

#include "bddclfa/frequency.hpp"
#include "bddclfa/linalg.hpp"
#include "bddclfa/stencil.hpp"

namespace bddclfa {

/// Basis a symbol matrix is expressed in.
enum class SymbolBasis {
    fine_sparse,   // pointwise basis on one periodic cell of the fine grid
    broken,        // duplicated-interface basis on the partially subassembled cell
    coarse,        // pointwise basis on the coarse (subdomain-corner) grid
};

/// Dense symbol matrix tagged with its basis and cell period.
struct SymbolMatrix {
    ComplexMatrix m;
    SymbolBasis basis = SymbolBasis::fine_sparse;
    int period = 2;
    Frequency theta;
};

/// Fourier representation of a stencil operator on one period x period cell
/// at coarse frequency theta:  T diag(symbol(theta^{(q,r)})) T^{-1} with the
/// harmonics ordered to match dft_matrix().  Hermitian for symmetric stencils.
SymbolMatrix fine_symbol(const Stencil9& s, int period, const Frequency& theta);

/// Diagonal of the harmonic representation: symbol values at all harmonics.
ComplexVector harmonic_values(const Stencil9& s, int period, const Frequency& theta);

/// Matrix-free application of functions of the fine symbol.  Stores only the
/// 1-D transform, applying T and T^H axis-wise in O(period^3).
class FineSymbolApply {
  public:
    FineSymbolApply(const Stencil9& s, int period, const Frequency& theta);

    int period() const { return p_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(p_) * p_; }

    /// y = A x
    void apply(const ComplexVector& x, ComplexVector& y) const;
    /// y = A^{1/2} x  (principal square root; requires nonnegative harmonics)
    void apply_sqrt(const ComplexVector& x, ComplexVector& y) const;
    /// smallest harmonic value (A is singular iff it is zero)
    double min_harmonic() const;

  private:
    void to_harmonic(const ComplexVector& x, ComplexVector& h) const;
    void from_harmonic(const ComplexVector& h, ComplexVector& y) const;

    int p_;
    ComplexMatrix t1_;       // 1-D transform
    RealVector values_;      // harmonic symbol values (real: symmetric stencil)
    RealVector sqrt_values_;
    mutable ComplexMatrix scratch_;
};

}  // namespace bddclfa
