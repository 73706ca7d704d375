#include "bddclfa/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace bddclfa {

ComplexMatrix dft_matrix(int p) {
    if (p < 2) throw std::invalid_argument("dft_matrix: p must be >= 2");
    ComplexMatrix T1(p, p);
    for (int k = 0; k < p; ++k)
        for (int q = 0; q < p; ++q)
            T1(k, q) = std::exp(Complex(0.0, 2.0 * M_PI * k * q / p));
    ComplexMatrix T(p * p, p * p);
    for (int l = 0; l < p; ++l)
        for (int k = 0; k < p; ++k)
            for (int r = 0; r < p; ++r)
                for (int q = 0; q < p; ++q) T(l * p + k, r * p + q) = T1(l, r) * T1(k, q);
    return T;
}

Spectrum eig(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eig: matrix must be square");
    if (!m.allFinite()) throw std::invalid_argument("eig: matrix has non-finite entries");
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw EigenFailureError("eig: QR iteration did not converge");
    return {es.eigenvalues(), m.rows()};
}

RealVector eig_hermitian(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eig_hermitian: matrix must be square");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailureError("eig_hermitian: iteration did not converge");
    return es.eigenvalues();
}

ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs) {
    if (m.rows() != m.cols()) throw std::invalid_argument("solve: matrix must be square");
    if (m.rows() != rhs.rows()) throw std::invalid_argument("solve: dimension mismatch");
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const auto& U = lu.matrixLU();
    double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
        const double d = std::abs(U(i, i));
        pmax = std::max(pmax, d);
        pmin = std::min(pmin, d);
    }
    if (pmin <= 1e-12 * pmax)
        throw SingularMatrixError("solve: matrix singular to tolerance (pivot " + std::to_string(pmin) + ")", pmin);
    return lu.solve(rhs);
}

RealMatrix solve_real_spd(const RealMatrix& m, const RealMatrix& rhs) {
    Eigen::LLT<RealMatrix> llt(m);
    if (llt.info() != Eigen::Success) throw SingularMatrixError("solve_real_spd: factorization failed", 0.0);
    return llt.solve(rhs);
}

ComplexMatrix inverse(const ComplexMatrix& m) {
    return solve(m, ComplexMatrix::Identity(m.rows(), m.cols()));
}

ComplexMatrix pinv_hermitian(const ComplexMatrix& m, double rel_tol, double scale_hint) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
    if (es.info() != Eigen::Success) throw EigenFailureError("pinv_hermitian: iteration did not converge");
    const RealVector& d = es.eigenvalues();
    const double scale = std::max(d.cwiseAbs().maxCoeff(), scale_hint);
    RealVector dinv = RealVector::Zero(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (std::abs(d[i]) > rel_tol * scale) dinv[i] = 1.0 / d[i];
    return es.eigenvectors() * dinv.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

LanczosResult lanczos_extremes(const std::function<void(const ComplexVector&, ComplexVector&)>& apply,
                               Eigen::Index dim, int max_subspace, double tol, double tol_lo_final,
                               std::uint64_t seed) {
    const int mmax = static_cast<int>(std::min<Eigen::Index>(dim, max_subspace));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
    v /= v.norm();

    std::vector<ComplexVector> basis;
    basis.reserve(mmax);
    std::vector<double> alpha, beta;  // tridiagonal entries
    ComplexVector w(dim);
    LanczosResult res;

    // Ritz extremes of the current tridiagonal plus their residual bounds
    // b * |last eigenvector component|, with b the fresh subdiagonal entry.
    auto tridiag_extremes = [&](double b, double& lo, double& hi, double& res_lo, double& res_hi) {
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        lo = es.eigenvalues()(0);
        hi = es.eigenvalues()(m - 1);
        res_lo = std::abs(b * es.eigenvectors()(m - 1, 0));
        res_hi = std::abs(b * es.eigenvectors()(m - 1, m - 1));
    };

    for (int m = 0; m < mmax; ++m) {
        basis.push_back(v);
        apply(v, w);
        if (m > 0) w -= beta.back() * basis[static_cast<std::size_t>(m - 1)];
        alpha.push_back(std::real(basis.back().dot(w)));
        w -= alpha.back() * basis.back();
        // full reorthogonalisation keeps the tridiagonal trustworthy
        for (const auto& q : basis) w -= q.dot(w) * q;
        const double b = w.norm();
        if (m >= 1 && (m % 4 == 0 || b <= 1e-14 || m + 1 == mmax)) {
            double lo, hi, rl, rh;
            tridiag_extremes(b, lo, hi, rl, rh);
            const double scale = std::max(std::abs(lo), std::abs(hi));
            if ((rl <= tol * scale && rh <= tol * scale) || b <= 1e-14) {
                res.lambda_min = lo;
                res.lambda_max = hi;
                res.iterations = m + 1;
                return res;
            }
        }
        if (b <= 1e-14) break;  // invariant subspace
        beta.push_back(b);
        v = w / b;
    }
    double lo, hi, rl, rh;
    tridiag_extremes(beta.empty() ? 0.0 : beta.back(), lo, hi, rl, rh);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (rl > tol_lo_final * scale || rh > 1e-9 * scale)
        throw EigenFailureError("lanczos_extremes: no convergence within subspace limit");
    res.lambda_min = lo;
    res.lambda_max = hi;
    res.iterations = static_cast<int>(alpha.size());
    return res;
}

}  // namespace bddclfa
