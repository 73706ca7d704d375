#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "bddclfa/frequency.hpp"

namespace bddclfa {

/// A 3x3 symmetric constant-coefficient stencil.  Coefficient c(k1,k2)
/// multiplies the neighbour at offset (k1,k2), k in {-1,0,1}^2.
class Stencil9 {
  public:
    Stencil9() = default;

    /// Bilinear (Q1) finite-element Laplacian: (1/3) [-1 -1 -1; -1 8 -1; -1 -1 -1].
    static Stencil9 q1_laplacian();

    /// Build from row-major coefficients c(-1,-1), c(0,-1), ..., c(1,1).
    /// Throws std::invalid_argument unless symmetric under negation of the offset.
    static Stencil9 from_coefficients(const std::array<double, 9>& row_major);

    double at(int k1, int k2) const { return c_[idx(k1, k2)]; }
    void set(int k1, int k2, double v) { c_[idx(k1, k2)] = v; }
    double center() const { return at(0, 0); }

    /// Classical scalar symbol sum_k c_k exp(i theta.k); real for symmetric stencils.
    std::complex<double> symbol(const Frequency& theta) const;
    double symbol_real(const Frequency& theta) const;

    bool is_symmetric(double tol = 1e-12) const;

  private:
    static int idx(int k1, int k2) { return (k2 + 1) * 3 + (k1 + 1); }
    std::array<double, 9> c_{};
};

/// 4x4 element matrix whose assembly over a uniform grid reproduces the
/// stencil: corner self-coupling c00/4, edge-adjacent c(1,0)/2, diagonal c(1,1).
/// Node order (0,0), (1,0), (0,1), (1,1).
Eigen::Matrix4d element_matrix(const Stencil9& s);

/// Neumann matrix of one p x p element subdomain: (p+1)^2 nodes, assembled
/// from element matrices, node (k,l) at index l*(p+1)+k.
Eigen::MatrixXd neumann_matrix(const Stencil9& s, int p);

/// Coefficients of the coarse Schur-complement stencil: S0 couplings of one
/// subdomain macroelement (self s1, adjacent s2, opposite corner s3) and the
/// assembled 9-point stencil with center c00 - 4 s1.
struct SchurStencilCoeffs {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    double center = 0.0;

    Stencil9 assembled() const;
};

/// Eliminate the non-corner degrees of freedom of one subdomain Neumann
/// matrix and read off the macroelement couplings.  Frequency independent.
SchurStencilCoeffs schur_stencil(const Stencil9& s, int p);

}  // namespace bddclfa
