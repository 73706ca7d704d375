#include "bddclfa/stencil.hpp"

#include <cmath>
#include <stdexcept>

#include "bddclfa/linalg.hpp"

namespace bddclfa {

Stencil9 Stencil9::q1_laplacian() {
    Stencil9 s;
    for (int k2 = -1; k2 <= 1; ++k2)
        for (int k1 = -1; k1 <= 1; ++k1) s.set(k1, k2, (k1 == 0 && k2 == 0) ? 8.0 / 3.0 : -1.0 / 3.0);
    return s;
}

Stencil9 Stencil9::from_coefficients(const std::array<double, 9>& row_major) {
    Stencil9 s;
    s.c_ = row_major;
    if (!s.is_symmetric()) throw std::invalid_argument("Stencil9: coefficients not symmetric under offset negation");
    return s;
}

std::complex<double> Stencil9::symbol(const Frequency& theta) const {
    std::complex<double> acc(0.0, 0.0);
    for (int k2 = -1; k2 <= 1; ++k2)
        for (int k1 = -1; k1 <= 1; ++k1)
            acc += at(k1, k2) * std::exp(std::complex<double>(0.0, theta.t1 * k1 + theta.t2 * k2));
    return acc;
}

double Stencil9::symbol_real(const Frequency& theta) const {
    // Symmetric stencil: the imaginary parts cancel in conjugate pairs.
    return at(0, 0) + 2.0 * at(1, 0) * std::cos(theta.t1) + 2.0 * at(0, 1) * std::cos(theta.t2) +
           2.0 * at(1, 1) * std::cos(theta.t1 + theta.t2) + 2.0 * at(-1, 1) * std::cos(theta.t1 - theta.t2);
}

bool Stencil9::is_symmetric(double tol) const {
    for (int k2 = -1; k2 <= 1; ++k2)
        for (int k1 = -1; k1 <= 1; ++k1)
            if (std::abs(at(k1, k2) - at(-k1, -k2)) > tol) return false;
    return true;
}

Eigen::Matrix4d element_matrix(const Stencil9& s) {
    const double ks = s.center() / 4.0;
    const double ka = s.at(1, 0) / 2.0;
    const double kb = s.at(0, 1) / 2.0;
    const double kd = s.at(1, 1);
    Eigen::Matrix4d K;
    // nodes (0,0), (1,0), (0,1), (1,1)
    K << ks, ka, kb, kd,
         ka, ks, kd, kb,
         kb, kd, ks, ka,
         kd, kb, ka, ks;
    return K;
}

Eigen::MatrixXd neumann_matrix(const Stencil9& s, int p) {
    if (p < 1) throw std::invalid_argument("neumann_matrix: p must be >= 1");
    const int n = p + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
    const Eigen::Matrix4d Ke = element_matrix(s);
    for (int ey = 0; ey < p; ++ey) {
        for (int ex = 0; ex < p; ++ex) {
            const int nodes[4] = {ey * n + ex, ey * n + ex + 1, (ey + 1) * n + ex, (ey + 1) * n + ex + 1};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) A(nodes[a], nodes[b]) += Ke(a, b);
        }
    }
    return A;
}

Stencil9 SchurStencilCoeffs::assembled() const {
    Stencil9 out;
    out.set(0, 0, center);
    out.set(1, 0, -2.0 * s2);
    out.set(-1, 0, -2.0 * s2);
    out.set(0, 1, -2.0 * s2);
    out.set(0, -1, -2.0 * s2);
    out.set(1, 1, -s3);
    out.set(-1, -1, -s3);
    out.set(1, -1, -s3);
    out.set(-1, 1, -s3);
    return out;
}

SchurStencilCoeffs schur_stencil(const Stencil9& s, int p) {
    if (p < 2) throw std::invalid_argument("schur_stencil: p must be >= 2");
    const int n = p + 1;
    const Eigen::MatrixXd A = neumann_matrix(s, p);
    const int corners[4] = {0, p, p * n, p * n + p};
    std::vector<int> rdofs;
    rdofs.reserve(n * n - 4);
    for (int i = 0; i < n * n; ++i)
        if (i != corners[0] && i != corners[1] && i != corners[2] && i != corners[3]) rdofs.push_back(i);

    Eigen::MatrixXd Arr(rdofs.size(), rdofs.size());
    Eigen::MatrixXd Apr(4, rdofs.size());
    for (std::size_t a = 0; a < rdofs.size(); ++a) {
        for (std::size_t b = 0; b < rdofs.size(); ++b) Arr(a, b) = A(rdofs[a], rdofs[b]);
        for (int c = 0; c < 4; ++c) Apr(c, a) = A(corners[c], rdofs[a]);
    }
    const Eigen::MatrixXd S0 = Apr * solve_real_spd(Arr, Apr.transpose());
    SchurStencilCoeffs out;
    out.s1 = S0(0, 0);
    out.s2 = S0(0, 1);
    out.s3 = S0(0, 3);
    out.center = s.center() - 4.0 * out.s1;
    return out;
}

}  // namespace bddclfa
