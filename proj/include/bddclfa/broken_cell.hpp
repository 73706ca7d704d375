#pragma once

#include <Eigen/Cholesky>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "bddclfa/frequency.hpp"
#include "bddclfa/linalg.hpp"
#include "bddclfa/stencil.hpp"

namespace bddclfa {

/// Classification of a degree of freedom on the partially subassembled cell.
enum class DofClass { interior, interface_edge, coarse_corner };

/// Index bookkeeping for a periodic cell of arr x arr subdomains, each of
/// p x p elements.  Every subdomain owns the dofs (k,l) in {0..p}^2 minus its
/// four corners (the r block); the subdomain corners are identified
/// periodically into arr^2 assembled coarse dofs (the Pi block).
/// With arr = 1 this is the single-subdomain set S*_{I,J}: (p+1)^2 - 3 dofs,
/// one coarse corner, r block of size (p+1)^2 - 4.
class BrokenIndexMap {
  public:
    BrokenIndexMap(int p, int arr);

    int p() const { return p_; }
    int arr() const { return arr_; }
    int fine_period() const { return p_ * arr_; }

    const std::vector<std::pair<int, int>>& local_r() const { return local_r_; }
    Eigen::Index n_r_local() const { return static_cast<Eigen::Index>(local_r_.size()); }
    Eigen::Index n_r() const { return n_r_local() * arr_ * arr_; }
    Eigen::Index n_pi() const { return static_cast<Eigen::Index>(arr_) * arr_; }
    Eigen::Index n_broken() const { return n_r() + n_pi(); }
    Eigen::Index n_fine() const { return static_cast<Eigen::Index>(fine_period()) * fine_period(); }

    Eigen::Index r_index(int u, int v, int local) const;
    Eigen::Index pi_index(int u, int v) const;

    /// Position of (k,l) in local_r(); -1 for corners.
    int local_index(int k, int l) const;

    /// Classify a local dof (k,l) on {0..p}^2 (corners classify as coarse).
    DofClass classify(int k, int l) const;

    /// Fine-grid class index of local dof (k,l) in subdomain (u,v).
    Eigen::Index fine_class(int u, int v, int k, int l) const;

  private:
    int p_, arr_;
    std::vector<std::pair<int, int>> local_r_;
    std::vector<int> local_lookup_;  // (p+1)^2 -> local index or -1
};

/// Per-frequency symbol machinery of the partially subassembled problem on
/// one periodic cell.  Couplings carry the phase exp(i theta.offset/P) of the
/// pointwise Fourier basis, so the scaled injection R1 and the jump operator
/// J_D are their own (real) Fourier representations.
///
/// Provides both structured applications (used by the Krylov engine on large
/// cells) and dense blocks assembled on demand (used by the explicit engine
/// and by tests).
class BrokenCell {
  public:
    BrokenCell(const Stencil9& s, int p, int arr, const Frequency& theta);

    const BrokenIndexMap& map() const { return map_; }
    const Frequency& theta() const { return theta_; }
    const Stencil9& stencil() const { return stencil_; }

    // ---- structured operations ----
    void apply_arr_inv(const ComplexVector& xr, ComplexVector& yr) const;
    void apply_pir(const ComplexVector& xr, ComplexVector& ypi) const;
    void apply_pir_adj(const ComplexVector& xpi, ComplexVector& yr) const;
    void apply_r(bool dirichlet, const ComplexVector& xfine, ComplexVector& ybroken) const;
    void apply_r_adj(bool dirichlet, const ComplexVector& xbroken, ComplexVector& yfine) const;
    void apply_jd(const ComplexVector& x, ComplexVector& y) const;

    /// y = R'^H K_U^{-1} blkdiag(A_rr^{-1}, coarse_inv) K_U^{-H} R' x,
    /// the preconditioner-inverse symbol applied to a fine-basis vector.
    void apply_minv(bool dirichlet, const ComplexMatrix& coarse_inv, const ComplexVector& x,
                    ComplexVector& y) const;

    /// Schur block S_Pi = A_PiPi - A_Pir A_rr^{-1} A_Pir^H (n_pi x n_pi).
    ComplexMatrix schur_block() const;
    ComplexMatrix a_pipi() const;

    // ---- dense blocks (assembled on demand; sizes must stay at desk scale) ----
    const ComplexMatrix& ahat_dense() const;
    ComplexMatrix arr_dense() const;
    ComplexMatrix pir_dense() const;
    ComplexMatrix r1_dense() const;
    ComplexMatrix jd_dense() const;
    ComplexMatrix h_dense() const;   // n_fine x n_broken harmonic-extension symbol
    ComplexMatrix r2_dense() const;
    ComplexMatrix kld_dense() const;
    ComplexMatrix ku_dense() const;

    /// Dense preconditioner-inverse symbol M^{-1} (n_fine x n_fine).
    ComplexMatrix minv_dense(bool dirichlet, const ComplexMatrix& coarse_inv) const;

    /// Split M^{-1} = m0 + zpi^H coarse_inv zpi: m0 collects the
    /// coarse-independent r-block part, zpi the coarse rows of K_U^{-H} R'.
    /// Lets weight sweeps swap the coarse block without reassembly.
    struct MinvParts {
        ComplexMatrix m0;   // n_fine x n_fine, Hermitian
        ComplexMatrix zpi;  // n_pi x n_fine
    };
    MinvParts minv_parts(bool dirichlet) const;

  private:
    struct PirEntry {
        Eigen::Index pi, r;
        Complex v;
    };

    void require_arr_factor() const;
    ComplexVector phases_r(int u, int v) const;

    Stencil9 stencil_;
    BrokenIndexMap map_;
    Frequency theta_;

    Eigen::MatrixXd neumann_;                  // (p+1)^2 Neumann matrix
    Eigen::LLT<Eigen::MatrixXd> an_rr_llt_;    // factor of the constant r block
    Eigen::LLT<Eigen::MatrixXd> an_ii_llt_;    // factor of the interior block
    Eigen::MatrixXd hn_;                       // -A_II^{-1} A_IG (local, real)
    Eigen::MatrixXd hn_pi_;                    // -A_II^{-1} A_IPi (corner columns)
    std::vector<int> interior_local_, gamma_local_;  // indices into local_r
    std::vector<PirEntry> pir_entries_;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> jd_pairs_;
    std::vector<Eigen::Index> r_class_;        // fine class per r dof
    std::vector<double> r_weight_;             // injection weight per r dof
    std::vector<ComplexVector> psi_r_;         // per-subdomain phases on local_r

    mutable std::optional<ComplexMatrix> ahat_;
};

}  // namespace bddclfa
