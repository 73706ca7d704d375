#include "bddclfa/preconditioner.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <sstream>

namespace bddclfa {

MultMode mult_mode_from_string(const std::string& s) {
    if (s == "none") return MultMode::none;
    if (s == "f") return MultMode::fine;
    if (s == "c") return MultMode::coarse;
    if (s == "sc") return MultMode::sym_coarse;
    if (s == "fc") return MultMode::fine_coarse;
    throw std::invalid_argument("unknown multiplicative mode '" + s + "'");
}

std::string to_string(MultMode m) {
    switch (m) {
        case MultMode::none: return "none";
        case MultMode::fine: return "f";
        case MultMode::coarse: return "c";
        case MultMode::sym_coarse: return "sc";
        case MultMode::fine_coarse: return "fc";
    }
    return "?";
}

void PreconditionerSpec::validate() const {
    if (fine_variant != 1 && fine_variant != 2)
        throw std::invalid_argument("PreconditionerSpec: i must be 1 or 2");
    if (coarse_variant < 0 || coarse_variant > 2)
        throw std::invalid_argument("PreconditionerSpec: j must be 0, 1 or 2");
    const bool coarse_mode =
        mult == MultMode::coarse || mult == MultMode::sym_coarse || mult == MultMode::fine_coarse;
    if (coarse_mode && coarse_variant == 0)
        throw std::invalid_argument("PreconditionerSpec: coarse multiplicative modes need j in {1,2}");
    if (mult == MultMode::fine && !(omega > 0.0))
        throw std::invalid_argument("PreconditionerSpec: mode f needs omega > 0");
    if (mult == MultMode::coarse && !(omega > 0.0))
        throw std::invalid_argument("PreconditionerSpec: mode c needs omega > 0");
    if (mult == MultMode::sym_coarse && !(omega1 > 0.0 && omega2 > 0.0))
        throw std::invalid_argument("PreconditionerSpec: mode sc needs omega1, omega2 > 0");
    if (mult == MultMode::fine_coarse && !(omega1 > 0.0 && omega2 > 0.0))
        throw std::invalid_argument("PreconditionerSpec: mode fc needs omega1, omega2 > 0");
}

std::string PreconditionerSpec::label() const {
    std::ostringstream os;
    os << "G_{" << fine_variant << "," << coarse_variant << "}";
    if (mult != MultMode::none) os << "^" << to_string(mult);
    return os.str();
}

namespace {

ComplexMatrix exact_coarse_inverse(const ComplexMatrix& schur, bool zero_frequency, double scale_hint) {
    if (zero_frequency) return pinv_hermitian(schur, 1e-10, scale_hint);
    return inverse(schur);
}

}  // namespace

ComplexMatrix two_level_minv(const Stencil9& s, int p, const Frequency& theta, int fine_variant,
                             bool zero_frequency) {
    BrokenCell cell(s, p, 1, theta);
    const ComplexMatrix S = cell.schur_block();
    return cell.minv_dense(fine_variant == 2, exact_coarse_inverse(S, zero_frequency, s.center()));
}

ComplexMatrix multiplicative_fine(const ComplexMatrix& g, const ComplexMatrix& a, double diag_value,
                                  double omega) {
    if (diag_value == 0.0) throw std::invalid_argument("multiplicative_fine: zero diagonal");
    if (omega == 0.0) return g;
    const ComplexMatrix i = ComplexMatrix::Identity(g.rows(), g.cols());
    return g + (omega / diag_value) * (a * (i - g));
}

ComplexMatrix coarse_wrap(const ComplexMatrix& minv_s, const ComplexMatrix& schur, double ds, double omega) {
    const ComplexMatrix i = ComplexMatrix::Identity(schur.rows(), schur.cols());
    return minv_s + (omega / ds) * (i - schur * minv_s);
}

ComplexMatrix coarse_wrap_symmetrized(const ComplexMatrix& minv_s, const ComplexMatrix& schur, double ds,
                                      double omega1, double omega2) {
    const ComplexMatrix i = ComplexMatrix::Identity(schur.rows(), schur.cols());
    const ComplexMatrix w = coarse_wrap(minv_s, schur, ds, omega1);
    return w + (omega2 / ds) * (i - w * schur);
}

ComplexMatrix coarse_preconditioner_symbol(const SchurStencilCoeffs& schur, int p, const Frequency& theta,
                                           int j, bool zero_frequency) {
    if (j == 0) return ComplexMatrix::Identity(static_cast<Eigen::Index>(p) * p, static_cast<Eigen::Index>(p) * p);
    if (j != 1 && j != 2) throw std::invalid_argument("coarse_preconditioner_symbol: j must be 0, 1 or 2");
    const Stencil9 cs = schur.assembled();
    const ComplexMatrix minv = two_level_minv(cs, p, theta, j, zero_frequency);
    return minv * fine_symbol(cs, p, theta).m;
}

OperatorSymbol two_level_symbol(const Stencil9& s, int p, const Frequency& theta,
                                const PreconditionerSpec& spec, bool zero_frequency) {
    spec.validate();
    if (spec.coarse_variant != 0)
        throw std::invalid_argument("two_level_symbol: spec must have j = 0");
    const SymbolMatrix A = fine_symbol(s, p, theta);
    const ComplexMatrix minv = two_level_minv(s, p, theta, spec.fine_variant, zero_frequency);
    ComplexMatrix g = minv * A.m;
    if (spec.mult == MultMode::fine) g = multiplicative_fine(g, A.m, s.center(), spec.omega);
    return {theta, std::move(g), spec, p};
}

OperatorSymbol three_level_symbol(const Stencil9& s, int p, const Frequency& theta,
                                  const PreconditionerSpec& spec, bool zero_frequency) {
    spec.validate();
    BrokenCell cell(s, p, p, theta);
    const SymbolMatrix A = fine_symbol(s, p * p, theta);
    const SchurStencilCoeffs sc = schur_stencil(s, p);

    ComplexMatrix cinv;
    if (spec.coarse_variant == 0) {
        cinv = exact_coarse_inverse(fine_symbol(sc.assembled(), p, theta).m, zero_frequency, sc.center);
    } else {
        const ComplexMatrix minv_s =
            two_level_minv(sc.assembled(), p, theta, spec.coarse_variant, zero_frequency);
        switch (spec.mult) {
            case MultMode::none:
            case MultMode::fine:
                cinv = minv_s;
                break;
            case MultMode::coarse:
                cinv = coarse_wrap(minv_s, fine_symbol(sc.assembled(), p, theta).m, sc.center, spec.omega);
                break;
            case MultMode::sym_coarse:
                cinv = coarse_wrap_symmetrized(minv_s, fine_symbol(sc.assembled(), p, theta).m, sc.center,
                                               spec.omega1, spec.omega2);
                break;
            case MultMode::fine_coarse:
                cinv = coarse_wrap(minv_s, fine_symbol(sc.assembled(), p, theta).m, sc.center, spec.omega1);
                break;
        }
    }
    const ComplexMatrix minv = cell.minv_dense(spec.fine_variant == 2, cinv);
    ComplexMatrix g = minv * A.m;
    if (spec.mult == MultMode::fine) g = multiplicative_fine(g, A.m, s.center(), spec.omega);
    if (spec.mult == MultMode::fine_coarse) g = multiplicative_fine(g, A.m, s.center(), spec.omega2);
    return {theta, std::move(g), spec, p};
}

OperatorSymbol operator_symbol(const Stencil9& s, int p, const Frequency& theta,
                               const PreconditionerSpec& spec, bool zero_frequency) {
    return spec.levels() == 2 ? two_level_symbol(s, p, theta, spec, zero_frequency)
                              : three_level_symbol(s, p, theta, spec, zero_frequency);
}

SpectrumExtremes plain_extremes_krylov(const Stencil9& s, int p, const Frequency& theta,
                                       const PreconditionerSpec& spec) {
    spec.validate();
    if (spec.mult != MultMode::none)
        throw std::invalid_argument("plain_extremes_krylov: only unwrapped operators");
    const int arr = spec.levels() == 2 ? 1 : p;
    BrokenCell cell(s, p, arr, theta);
    FineSymbolApply fine(s, p * arr, theta);

    ComplexMatrix cinv;
    if (spec.coarse_variant == 0) {
        cinv = inverse(cell.schur_block());
    } else {
        const SchurStencilCoeffs sc = schur_stencil(s, p);
        cinv = two_level_minv(sc.assembled(), p, theta, spec.coarse_variant);
    }
    const bool dirichlet = spec.fine_variant == 2;
    ComplexVector t1(fine.dim()), t2(fine.dim());
    auto apply = [&](const ComplexVector& x, ComplexVector& y) {
        fine.apply_sqrt(x, t1);
        cell.apply_minv(dirichlet, cinv, t1, t2);
        fine.apply_sqrt(t2, y);
    };
    const LanczosResult r = lanczos_extremes(apply, fine.dim());
    return {r.lambda_min, r.lambda_max};
}

FineWrapPencil::FineWrapPencil(const ComplexMatrix& minv, const ComplexMatrix& a, double diag_value)
    : d_(diag_value) {
    Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("FineWrapPencil: operator symbol not positive definite", 0.0);
    const ComplexMatrix L = llt.matrixL();
    p_ = hermitian_part(L.adjoint() * minv * L) - ComplexMatrix::Identity(a.rows(), a.cols());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p_);
    if (es.info() != Eigen::Success) throw EigenFailureError("FineWrapPencil: eigensolve failed");
    RealVector sq = es.eigenvalues();
    for (Eigen::Index i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(std::max(0.0, sq[i]));
    const ComplexMatrix phalf = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().adjoint();
    const ComplexMatrix al = L.adjoint() * L;
    sp_ = hermitian_part(phalf * al * phalf);
}

RealVector FineWrapPencil::eigenvalues(double omega) const {
    const ComplexMatrix m = p_ - (omega / d_) * sp_;
    RealVector ev = eig_hermitian(m);
    return ev.array() + 1.0;
}

}  // namespace bddclfa
