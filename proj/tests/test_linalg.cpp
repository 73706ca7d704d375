#include <algorithm>
#include <random>

#include "bddclfa/linalg.hpp"
#include "doctest.h"

using namespace bddclfa;

namespace {

// Characteristic-polynomial coefficients by Faddeev-LeVerrier; independent of
// any eigenvalue routine.
ComplexVector char_poly(const ComplexMatrix& a) {
    const Eigen::Index n = a.rows();
    ComplexVector c(n + 1);
    c[n] = 1.0;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    Complex ck = 1.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + ck * ComplexMatrix::Identity(n, n);
        ck = -(a * m).trace() / static_cast<double>(k);
        c[n - k] = ck;
    }
    return c;  // p(x) = sum c_k x^k, monic
}

// Durand-Kerner root finder for a monic polynomial.
std::vector<Complex> poly_roots(const ComplexVector& c) {
    const Eigen::Index n = c.size() - 1;
    auto eval = [&](Complex x) {
        Complex v = c[n];
        for (Eigen::Index k = n - 1; k >= 0; --k) v = v * x + c[k];
        return v;
    };
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
        z[static_cast<std::size_t>(k)] = std::pow(Complex(0.4, 0.9), static_cast<double>(k + 1));
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Complex denom = 1.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) denom *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
            const Complex step = eval(z[static_cast<std::size_t>(i)]) / denom;
            z[static_cast<std::size_t>(i)] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

std::vector<double> sorted_abs(const std::vector<Complex>& v) {
    std::vector<double> out;
    for (auto z : v) out.push_back(std::abs(z));
    std::sort(out.begin(), out.end());
    return out;
}

ComplexMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

}  // namespace

TEST_CASE("dft matrix basics") {
    const ComplexMatrix T = dft_matrix(2);
    ComplexMatrix T1(2, 2);
    T1 << 1, 1, 1, -1;
    ComplexMatrix K(4, 4);
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            for (int r = 0; r < 2; ++r)
                for (int q = 0; q < 2; ++q) K(l * 2 + k, r * 2 + q) = T1(l, r) * T1(k, q);
    CHECK((T - K).cwiseAbs().maxCoeff() < 1e-14);

    const ComplexMatrix T4 = dft_matrix(4);
    CHECK(std::abs(T4(1 * 4 + 1, 0 * 4 + 1) - Complex(0, 1)) < 1e-14);  // (T1)_{2,2} = i, row l=1 col r=0

    CHECK_THROWS_AS(dft_matrix(1), std::invalid_argument);
}

TEST_CASE("dft unitarity for p up to 16") {
    for (int p = 2; p <= 16; ++p) {
        const ComplexMatrix T = dft_matrix(p);
        const ComplexMatrix err =
            T * T.adjoint() - static_cast<double>(p) * p * ComplexMatrix::Identity(p * p, p * p);
        CHECK(err.cwiseAbs().maxCoeff() < 1e-12 * p * p);
    }
}

TEST_CASE("eig trivial spectra") {
    CHECK_THROWS_AS(eig(ComplexMatrix::Zero(2, 3)), std::invalid_argument);

    const Spectrum s1 = eig(ComplexMatrix::Identity(3, 3));
    REQUIRE(s1.eigenvalues.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s1.eigenvalues[i] - 1.0) < 1e-14);

    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = Complex(0, 5);
    auto ev = eig(d).eigenvalues;
    std::vector<Complex> got{ev[0], ev[1]};
    std::sort(got.begin(), got.end(), [](Complex a, Complex b) { return a.real() > b.real(); });
    CHECK(std::abs(got[0] - 2.0) < 1e-14);
    CHECK(std::abs(got[1] - Complex(0, 5)) < 1e-14);
}

TEST_CASE("eig of random hermitian matches characteristic-polynomial roots") {
    ComplexMatrix h = random_matrix(8, 7);
    h = (h + h.adjoint()).eval();
    const Spectrum s = eig(h);
    std::vector<Complex> got(s.eigenvalues.data(), s.eigenvalues.data() + 8);
    for (auto z : got) CHECK(std::abs(z.imag()) < 1e-10);

    const auto roots = poly_roots(char_poly(h));
    auto a = sorted_abs(got), b = sorted_abs(roots);
    for (int i = 0; i < 8; ++i) CHECK(a[static_cast<std::size_t>(i)] ==
                                      doctest::Approx(b[static_cast<std::size_t>(i)]).epsilon(1e-8));
}

TEST_CASE("solve basics and residuals") {
    const ComplexMatrix I10 = ComplexMatrix::Identity(10, 10);
    CHECK((solve(2.0 * I10, I10) - 0.5 * I10).cwiseAbs().maxCoeff() < 1e-14);

    const ComplexMatrix T = dft_matrix(2);
    const ComplexMatrix X = solve(T, ComplexMatrix::Identity(4, 4));
    CHECK((X - 0.25 * T.adjoint()).cwiseAbs().maxCoeff() < 1e-13);

    ComplexMatrix m = random_matrix(10, 3) + 8.0 * I10;  // well conditioned
    ComplexMatrix rhs = random_matrix(10, 4);
    ComplexMatrix x = solve(m, rhs);
    CHECK((m * x - rhs).norm() / (m.norm() * x.norm()) < 1e-10);

    ComplexMatrix sing = ComplexMatrix::Zero(3, 3);
    sing(0, 0) = 1.0;
    sing(1, 1) = 1.0;
    CHECK_THROWS_AS(solve(sing, ComplexMatrix::Identity(3, 3)), SingularMatrixError);
    try {
        solve(sing, ComplexMatrix::Identity(3, 3));
    } catch (const SingularMatrixError& e) {
        CHECK(e.pivot <= 1e-12);
    }
}

TEST_CASE("similarity by the dft preserves spectrum and trace") {
    const int p = 3;
    const ComplexMatrix T = dft_matrix(p);
    ComplexVector d(p * p);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = Complex(g(rng), g(rng));
    const ComplexMatrix A = T * d.asDiagonal() * (T.adjoint() / static_cast<double>(p * p));
    auto ev = eig(A).eigenvalues;
    auto a = sorted_abs(std::vector<Complex>(ev.data(), ev.data() + ev.size()));
    auto b = sorted_abs(std::vector<Complex>(d.data(), d.data() + d.size()));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
    CHECK(std::abs(A.trace() - d.sum()) < 1e-10 * std::abs(d.sum()));
}

TEST_CASE("lanczos extremes agree with dense hermitian eigenvalues") {
    ComplexMatrix h = random_matrix(60, 5);
    h = (h + h.adjoint()).eval();
    const RealVector dense = eig_hermitian(h);
    auto apply = [&](const ComplexVector& x, ComplexVector& y) { y = h * x; };
    const LanczosResult r = lanczos_extremes(apply, 60);
    CHECK(r.lambda_min == doctest::Approx(dense.minCoeff()).epsilon(1e-9));
    CHECK(r.lambda_max == doctest::Approx(dense.maxCoeff()).epsilon(1e-9));
}
