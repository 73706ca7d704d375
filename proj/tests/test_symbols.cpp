#include <algorithm>

#include "bddclfa/symbols.hpp"
#include "doctest.h"

using namespace bddclfa;

namespace {

// Independent route: assemble the symbol entry-wise from the stencil with the
// pointwise-basis phases exp(i theta.kappa / P).
ComplexMatrix fine_symbol_direct(const Stencil9& s, int P, const Frequency& th) {
    ComplexMatrix A = ComplexMatrix::Zero(P * P, P * P);
    for (int y = 0; y < P; ++y)
        for (int x = 0; x < P; ++x)
            for (int k2 = -1; k2 <= 1; ++k2)
                for (int k1 = -1; k1 <= 1; ++k1)
                    A(y * P + x, ((y + k2 + P) % P) * P + (x + k1 + P) % P) +=
                        s.at(k1, k2) * std::exp(Complex(0.0, (th.t1 * k1 + th.t2 * k2) / P));
    return A;
}

std::vector<double> sorted_real(const ComplexVector& v) {
    std::vector<double> re;
    for (Eigen::Index i = 0; i < v.size(); ++i) re.push_back(v[i].real());
    std::sort(re.begin(), re.end());
    return re;
}

}  // namespace

TEST_CASE("fine symbol equals direct phase-shifted assembly") {
    const Stencil9 q1 = Stencil9::q1_laplacian();
    for (int P : {2, 3, 4, 6}) {
        const Frequency th{0.7, -1.3};
        const SymbolMatrix A = fine_symbol(q1, P, th);
        CHECK((A.m - fine_symbol_direct(q1, P, th)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("fine symbol trace, diagonal, hermitian and definite") {
    const Stencil9 q1 = Stencil9::q1_laplacian();
    const SymbolMatrix A0 = fine_symbol(q1, 2, {0.0, 0.0});
    CHECK(std::abs(A0.m.trace() - 32.0 / 3.0) < 1e-12);

    for (const Frequency th : {Frequency{0.9, 0.4}, Frequency{-2.1, 1.7}}) {
        for (int P : {2, 4, 5}) {
            const SymbolMatrix A = fine_symbol(q1, P, th);
            CHECK((A.m - A.m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            for (Eigen::Index i = 0; i < A.m.rows(); ++i)
                CHECK(std::abs(A.m(i, i) - 8.0 / 3.0) < 1e-12);  // pointwise diagonal = stencil center
            const RealVector ev = eig_hermitian(A.m);
            CHECK(ev.minCoeff() > 0.0);  // positive definite away from zero frequency
        }
    }
}

TEST_CASE("fine symbol spectrum equals harmonic multiset") {
    const Stencil9 q1 = Stencil9::q1_laplacian();
    const int P = 4;
    const Frequency th{1.1, -0.6};
    const SymbolMatrix A = fine_symbol(q1, P, th);
    auto got = sorted_real(eig(A.m).eigenvalues);
    const ComplexVector h = harmonic_values(q1, P, th);
    auto want = sorted_real(h);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
}

TEST_CASE("matrix-free application matches the dense symbol") {
    const Stencil9 q1 = Stencil9::q1_laplacian();
    const int P = 6;
    const Frequency th{0.8, 2.0};
    const SymbolMatrix A = fine_symbol(q1, P, th);
    FineSymbolApply op(q1, P, th);
    ComplexVector x(P * P), y, y2;
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = Complex(std::sin(0.3 * i), std::cos(0.7 * i));
    op.apply(x, y);
    CHECK((y - A.m * x).norm() < 1e-12 * y.norm());
    op.apply_sqrt(x, y);
    op.apply_sqrt(y, y2);
    CHECK((y2 - A.m * x).norm() < 1e-11 * y2.norm());
}
