#include "bddclfa/symbols.hpp"

#include <cmath>
#include <stdexcept>

namespace bddclfa {

ComplexVector harmonic_values(const Stencil9& s, int period, const Frequency& theta) {
    HarmonicGrid grid(theta, period);
    ComplexVector d(static_cast<Eigen::Index>(period) * period);
    for (int r = 0; r < period; ++r)
        for (int q = 0; q < period; ++q) d[r * period + q] = s.symbol(grid.member(q, r));
    return d;
}

SymbolMatrix fine_symbol(const Stencil9& s, int period, const Frequency& theta) {
    if (period < 2) throw std::invalid_argument("fine_symbol: period must be >= 2");
    const ComplexMatrix T = dft_matrix(period);
    const ComplexVector d = harmonic_values(s, period, theta);
    const double scale = 1.0 / (static_cast<double>(period) * period);
    ComplexMatrix A = T * d.asDiagonal() * (T.adjoint() * scale);
    return {std::move(A), SymbolBasis::fine_sparse, period, theta};
}

FineSymbolApply::FineSymbolApply(const Stencil9& s, int period, const Frequency& theta) : p_(period) {
    if (period < 2) throw std::invalid_argument("FineSymbolApply: period must be >= 2");
    t1_.resize(p_, p_);
    for (int k = 0; k < p_; ++k)
        for (int q = 0; q < p_; ++q) t1_(k, q) = std::exp(Complex(0.0, 2.0 * M_PI * k * q / p_));
    const ComplexVector d = harmonic_values(s, period, theta);
    values_.resize(d.size());
    sqrt_values_.resize(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        values_[i] = d[i].real();
        sqrt_values_[i] = std::sqrt(std::max(0.0, values_[i]));
    }
    scratch_.resize(p_, p_);
}

void FineSymbolApply::to_harmonic(const ComplexVector& x, ComplexVector& h) const {
    // x indexed l*p+k (point) -> h indexed r*p+q (harmonic): h = (1/p^2) T^H x, axis-wise
    Eigen::Map<const ComplexMatrix> X(x.data(), p_, p_);  // col l holds row l of the cell
    scratch_.noalias() = t1_.adjoint() * X;               // transform point index k -> q
    Eigen::Map<ComplexMatrix> H(h.data(), p_, p_);
    H.noalias() = scratch_ * t1_.conjugate();             // transform l -> r
    H *= 1.0 / (static_cast<double>(p_) * p_);
}

void FineSymbolApply::from_harmonic(const ComplexVector& h, ComplexVector& y) const {
    Eigen::Map<const ComplexMatrix> H(h.data(), p_, p_);
    scratch_.noalias() = t1_ * H;
    Eigen::Map<ComplexMatrix> Y(y.data(), p_, p_);
    Y.noalias() = scratch_ * t1_.transpose();
}

void FineSymbolApply::apply(const ComplexVector& x, ComplexVector& y) const {
    ComplexVector h(dim());
    y.resize(dim());
    to_harmonic(x, h);
    h.array() *= values_.array();
    from_harmonic(h, y);
}

void FineSymbolApply::apply_sqrt(const ComplexVector& x, ComplexVector& y) const {
    ComplexVector h(dim());
    y.resize(dim());
    to_harmonic(x, h);
    h.array() *= sqrt_values_.array();
    from_harmonic(h, y);
}

double FineSymbolApply::min_harmonic() const { return values_.minCoeff(); }

}  // namespace bddclfa
