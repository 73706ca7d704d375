#include "bddclfa/broken_cell.hpp"

#include <cmath>
#include <stdexcept>

namespace bddclfa {

namespace {
bool is_corner(int k, int l, int p) { return (k == 0 || k == p) && (l == 0 || l == p); }
}  // namespace

BrokenIndexMap::BrokenIndexMap(int p, int arr) : p_(p), arr_(arr) {
    if (p < 2) throw std::invalid_argument("BrokenIndexMap: p must be >= 2");
    if (arr < 1) throw std::invalid_argument("BrokenIndexMap: arr must be >= 1");
    local_r_.reserve(static_cast<std::size_t>((p + 1) * (p + 1) - 4));
    local_lookup_.assign(static_cast<std::size_t>((p + 1) * (p + 1)), -1);
    for (int l = 0; l <= p; ++l) {
        for (int k = 0; k <= p; ++k) {
            if (is_corner(k, l, p)) continue;
            local_lookup_[static_cast<std::size_t>(l * (p + 1) + k)] = static_cast<int>(local_r_.size());
            local_r_.emplace_back(k, l);
        }
    }
}

int BrokenIndexMap::local_index(int k, int l) const {
    return local_lookup_[static_cast<std::size_t>(l * (p_ + 1) + k)];
}

Eigen::Index BrokenIndexMap::r_index(int u, int v, int local) const {
    return (static_cast<Eigen::Index>(v) * arr_ + u) * n_r_local() + local;
}

Eigen::Index BrokenIndexMap::pi_index(int u, int v) const {
    return n_r() + static_cast<Eigen::Index>(v) * arr_ + u;
}

DofClass BrokenIndexMap::classify(int k, int l) const {
    if (is_corner(k, l, p_)) return DofClass::coarse_corner;
    if (k == 0 || k == p_ || l == 0 || l == p_) return DofClass::interface_edge;
    return DofClass::interior;
}

Eigen::Index BrokenIndexMap::fine_class(int u, int v, int k, int l) const {
    const int P = fine_period();
    const int x = (p_ * u + k) % P;
    const int y = (p_ * v + l) % P;
    return static_cast<Eigen::Index>(y) * P + x;
}

BrokenCell::BrokenCell(const Stencil9& s, int p, int arr, const Frequency& theta)
    : stencil_(s), map_(p, arr), theta_(theta) {
    const int n = p + 1;
    neumann_ = neumann_matrix(s, p);
    const auto& lr = map_.local_r();
    const Eigen::Index nrl = map_.n_r_local();

    // constant local blocks and factors
    Eigen::MatrixXd an_rr(nrl, nrl);
    for (Eigen::Index a = 0; a < nrl; ++a)
        for (Eigen::Index b = 0; b < nrl; ++b)
            an_rr(a, b) = neumann_(lr[a].second * n + lr[a].first, lr[b].second * n + lr[b].first);
    an_rr_llt_.compute(an_rr);
    if (an_rr_llt_.info() != Eigen::Success)
        throw SingularMatrixError("BrokenCell: subdomain r block not positive definite", 0.0);

    for (Eigen::Index i = 0; i < nrl; ++i) {
        if (map_.classify(lr[i].first, lr[i].second) == DofClass::interior)
            interior_local_.push_back(static_cast<int>(i));
        else
            gamma_local_.push_back(static_cast<int>(i));
    }
    const auto ni = static_cast<Eigen::Index>(interior_local_.size());
    const auto ng = static_cast<Eigen::Index>(gamma_local_.size());
    Eigen::MatrixXd an_ii(ni, ni), an_ig(ni, ng);
    for (Eigen::Index a = 0; a < ni; ++a) {
        for (Eigen::Index b = 0; b < ni; ++b) an_ii(a, b) = an_rr(interior_local_[a], interior_local_[b]);
        for (Eigen::Index g = 0; g < ng; ++g) an_ig(a, g) = an_rr(interior_local_[a], gamma_local_[g]);
    }
    an_ii_llt_.compute(an_ii);
    if (an_ii_llt_.info() != Eigen::Success)
        throw SingularMatrixError("BrokenCell: interior block not positive definite", 0.0);
    hn_ = -an_ii_llt_.solve(an_ig);
    {
        // interior-to-corner couplings, for the harmonic extension from the
        // full subdomain boundary (corners included)
        const int cr[4] = {0, p, p * n, p * n + p};
        Eigen::MatrixXd an_ipi(ni, 4);
        for (Eigen::Index a = 0; a < ni; ++a)
            for (int c = 0; c < 4; ++c) {
                const auto [k, l] = lr[interior_local_[a]];
                an_ipi(a, c) = neumann_(l * n + k, cr[c]);
            }
        hn_pi_ = -an_ii_llt_.solve(an_ipi);
    }

    // per-subdomain phases, injection weights, fine classes
    const int P = map_.fine_period();
    auto psi = [&](int u, int v, int k, int l) {
        const double a1 = theta_.t1 * (p * u + k) / P;
        const double a2 = theta_.t2 * (p * v + l) / P;
        return std::exp(Complex(0.0, a1 + a2));
    };
    psi_r_.resize(static_cast<std::size_t>(arr) * arr);
    r_class_.resize(static_cast<std::size_t>(map_.n_r()));
    r_weight_.resize(static_cast<std::size_t>(map_.n_r()));
    for (int v = 0; v < arr; ++v) {
        for (int u = 0; u < arr; ++u) {
            ComplexVector ph(nrl);
            for (Eigen::Index i = 0; i < nrl; ++i) {
                const auto [k, l] = lr[i];
                ph[i] = psi(u, v, k, l);
                const Eigen::Index g = map_.r_index(u, v, static_cast<int>(i));
                r_class_[static_cast<std::size_t>(g)] = map_.fine_class(u, v, k, l);
                r_weight_[static_cast<std::size_t>(g)] =
                    map_.classify(k, l) == DofClass::interface_edge ? 0.5 : 1.0;
            }
            psi_r_[static_cast<std::size_t>(v) * arr + u] = std::move(ph);
        }
    }

    // couplings of subdomain corners into the assembled Pi dofs
    const int corners[4][2] = {{0, 0}, {p, 0}, {0, p}, {p, p}};
    for (int v = 0; v < arr; ++v) {
        for (int u = 0; u < arr; ++u) {
            for (const auto& c : corners) {
                const int kc = c[0], lc = c[1];
                const Eigen::Index pi = map_.pi_index((u + kc / p) % arr, (v + lc / p) % arr);
                const Complex pc = psi(u, v, kc, lc);
                const int crow = lc * n + kc;
                for (Eigen::Index i = 0; i < nrl; ++i) {
                    const double w = neumann_(crow, lr[i].second * n + lr[i].first);
                    if (w == 0.0) continue;
                    const Complex val = std::conj(pc) * w * psi(u, v, lr[i].first, lr[i].second);
                    pir_entries_.push_back({pi, map_.r_index(u, v, static_cast<int>(i)), val});
                }
            }
        }
    }

    // duplicated-interface pairs (left/right, bottom/top), each stored once
    for (int v = 0; v < arr; ++v) {
        for (int u = 0; u < arr; ++u) {
            for (int l = 1; l < p; ++l)
                jd_pairs_.emplace_back(map_.r_index(u, v, map_.local_index(0, l)),
                                       map_.r_index((u + arr - 1) % arr, v, map_.local_index(p, l)));
            for (int k = 1; k < p; ++k)
                jd_pairs_.emplace_back(map_.r_index(u, v, map_.local_index(k, 0)),
                                       map_.r_index(u, (v + arr - 1) % arr, map_.local_index(k, p)));
        }
    }
}

ComplexVector BrokenCell::phases_r(int u, int v) const {
    return psi_r_[static_cast<std::size_t>(v) * map_.arr() + u];
}

void BrokenCell::apply_arr_inv(const ComplexVector& xr, ComplexVector& yr) const {
    const Eigen::Index nrl = map_.n_r_local();
    yr.resize(map_.n_r());
    Eigen::MatrixXd rhs(nrl, 2);
    for (int v = 0; v < map_.arr(); ++v) {
        for (int u = 0; u < map_.arr(); ++u) {
            const auto& ph = psi_r_[static_cast<std::size_t>(v) * map_.arr() + u];
            const Eigen::Index off = map_.r_index(u, v, 0);
            // (Phi^H A Phi)^{-1} x = Phi^H A^{-1} Phi x
            for (Eigen::Index i = 0; i < nrl; ++i) {
                const Complex t = ph[i] * xr[off + i];
                rhs(i, 0) = t.real();
                rhs(i, 1) = t.imag();
            }
            const Eigen::MatrixXd sol = an_rr_llt_.solve(rhs);
            for (Eigen::Index i = 0; i < nrl; ++i)
                yr[off + i] = std::conj(ph[i]) * Complex(sol(i, 0), sol(i, 1));
        }
    }
}

void BrokenCell::apply_pir(const ComplexVector& xr, ComplexVector& ypi) const {
    ypi = ComplexVector::Zero(map_.n_pi());
    for (const auto& e : pir_entries_) ypi[e.pi - map_.n_r()] += e.v * xr[e.r];
}

void BrokenCell::apply_pir_adj(const ComplexVector& xpi, ComplexVector& yr) const {
    yr = ComplexVector::Zero(map_.n_r());
    for (const auto& e : pir_entries_) yr[e.r] += std::conj(e.v) * xpi[e.pi - map_.n_r()];
}

void BrokenCell::apply_jd(const ComplexVector& x, ComplexVector& y) const {
    y = ComplexVector::Zero(x.size());
    for (const auto& [a, b] : jd_pairs_) {
        const Complex d = 0.5 * (x[a] - x[b]);
        y[a] += d;
        y[b] -= d;
    }
}

void BrokenCell::apply_r(bool dirichlet, const ComplexVector& xfine, ComplexVector& ybroken) const {
    ybroken = ComplexVector::Zero(map_.n_broken());
    for (Eigen::Index g = 0; g < map_.n_r(); ++g)
        ybroken[g] = r_weight_[static_cast<std::size_t>(g)] * xfine[r_class_[static_cast<std::size_t>(g)]];
    for (int v = 0; v < map_.arr(); ++v)
        for (int u = 0; u < map_.arr(); ++u)
            ybroken[map_.pi_index(u, v)] = xfine[map_.fine_class(u, v, 0, 0)];
    if (!dirichlet) return;
    // R2 = R1 - J_D H^H : subtract the jump of the harmonic extension adjoint
    const Eigen::Index ni = static_cast<Eigen::Index>(interior_local_.size());
    const Eigen::Index ng = static_cast<Eigen::Index>(gamma_local_.size());
    ComplexVector hv = ComplexVector::Zero(map_.n_broken());
    ComplexVector ti(ni), tg(ng);
    for (int v = 0; v < map_.arr(); ++v) {
        for (int u = 0; u < map_.arr(); ++u) {
            const auto& ph = psi_r_[static_cast<std::size_t>(v) * map_.arr() + u];
            const Eigen::Index off = map_.r_index(u, v, 0);
            // H^H x = Phi_G^H H_N^T Phi_I x  restricted to this subdomain
            for (Eigen::Index a = 0; a < ni; ++a)
                ti[a] = ph[interior_local_[a]] * xfine[r_class_[static_cast<std::size_t>(off + interior_local_[a])]];
            tg.noalias() = hn_.transpose() * ti;
            for (Eigen::Index g = 0; g < ng; ++g)
                hv[off + gamma_local_[g]] = std::conj(ph[gamma_local_[g]]) * tg[g];
        }
    }
    ComplexVector jv;
    apply_jd(hv, jv);
    ybroken -= jv;
}

void BrokenCell::apply_r_adj(bool dirichlet, const ComplexVector& xbroken, ComplexVector& yfine) const {
    yfine = ComplexVector::Zero(map_.n_fine());
    ComplexVector x = xbroken;
    if (dirichlet) {
        // R2^H y = R1^T y - H (J_D y): handle the correction on the broken side
        ComplexVector jv;
        apply_jd(xbroken, jv);
        const Eigen::Index ni = static_cast<Eigen::Index>(interior_local_.size());
        const Eigen::Index ng = static_cast<Eigen::Index>(gamma_local_.size());
        ComplexVector ti(ni), tg(ng);
        for (int v = 0; v < map_.arr(); ++v) {
            for (int u = 0; u < map_.arr(); ++u) {
                const auto& ph = psi_r_[static_cast<std::size_t>(v) * map_.arr() + u];
                const Eigen::Index off = map_.r_index(u, v, 0);
                for (Eigen::Index g = 0; g < ng; ++g) tg[g] = ph[gamma_local_[g]] * jv[off + gamma_local_[g]];
                ti.noalias() = hn_ * tg;
                for (Eigen::Index a = 0; a < ni; ++a)
                    yfine[r_class_[static_cast<std::size_t>(off + interior_local_[a])]] -=
                        std::conj(ph[interior_local_[a]]) * ti[a];
            }
        }
    }
    for (Eigen::Index g = 0; g < map_.n_r(); ++g)
        yfine[r_class_[static_cast<std::size_t>(g)]] += r_weight_[static_cast<std::size_t>(g)] * x[g];
    for (int v = 0; v < map_.arr(); ++v)
        for (int u = 0; u < map_.arr(); ++u)
            yfine[map_.fine_class(u, v, 0, 0)] += x[map_.pi_index(u, v)];
}

void BrokenCell::apply_minv(bool dirichlet, const ComplexMatrix& coarse_inv, const ComplexVector& x,
                            ComplexVector& y) const {
    ComplexVector b;
    apply_r(dirichlet, x, b);
    ComplexVector br = b.head(map_.n_r());
    ComplexVector bpi = b.tail(map_.n_pi());
    // z = K_U^{-H} b
    ComplexVector t, spi;
    apply_arr_inv(br, t);
    apply_pir(t, spi);
    bpi -= spi;
    // w = blkdiag(Arr^{-1}, cinv) z ; reuse t = Arr^{-1} br
    ComplexVector wpi = coarse_inv * bpi;
    // v = K_U^{-1} w : v_r = w_r - Arr^{-1} A_pir^H w_pi
    ComplexVector s, s2;
    apply_pir_adj(wpi, s);
    apply_arr_inv(s, s2);
    ComplexVector vr = t - s2;
    ComplexVector out(map_.n_broken());
    out.head(map_.n_r()) = vr;
    out.tail(map_.n_pi()) = wpi;
    apply_r_adj(dirichlet, out, y);
}

ComplexMatrix BrokenCell::a_pipi() const {
    return stencil_.center() * ComplexMatrix::Identity(map_.n_pi(), map_.n_pi());
}

ComplexMatrix BrokenCell::schur_block() const {
    // RHS = A_pir^H columns, solved block-wise through the r factor
    ComplexMatrix rhs = ComplexMatrix::Zero(map_.n_r(), map_.n_pi());
    for (const auto& e : pir_entries_) rhs(e.r, e.pi - map_.n_r()) += std::conj(e.v);
    ComplexMatrix sol(map_.n_r(), map_.n_pi());
    ComplexVector col, out;
    for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
        col = rhs.col(j);
        apply_arr_inv(col, out);
        sol.col(j) = out;
    }
    ComplexMatrix S = a_pipi();
    for (const auto& e : pir_entries_) S.row(e.pi - map_.n_r()) -= e.v * sol.row(e.r);
    return S;
}

void BrokenCell::require_arr_factor() const {
    if (map_.n_broken() > 4200)
        throw std::invalid_argument("BrokenCell: dense blocks requested beyond desk scale");
}

const ComplexMatrix& BrokenCell::ahat_dense() const {
    if (ahat_) return *ahat_;
    require_arr_factor();
    const int p = map_.p(), arr = map_.arr(), n = p + 1;
    const int P = map_.fine_period();
    ComplexMatrix A = ComplexMatrix::Zero(map_.n_broken(), map_.n_broken());
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n) * n);
    ComplexVector ps(static_cast<Eigen::Index>(n) * n);
    const auto& lr = map_.local_r();
    for (int v = 0; v < arr; ++v) {
        for (int u = 0; u < arr; ++u) {
            for (int l = 0; l <= p; ++l) {
                for (int k = 0; k <= p; ++k) {
                    const int d = l * n + k;
                    ps[d] = std::exp(Complex(0.0, (theta_.t1 * (p * u + k) + theta_.t2 * (p * v + l)) / P));
                    if (is_corner(k, l, p)) {
                        idx[static_cast<std::size_t>(d)] = map_.pi_index((u + k / p) % arr, (v + l / p) % arr);
                    } else {
                        idx[static_cast<std::size_t>(d)] = map_.r_index(u, v, map_.local_index(k, l));
                    }
                }
            }
            for (int a = 0; a < n * n; ++a)
                for (int b = 0; b < n * n; ++b)
                    if (neumann_(a, b) != 0.0)
                        A(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) +=
                            std::conj(ps[a]) * neumann_(a, b) * ps[b];
        }
    }
    ahat_ = std::move(A);
    return *ahat_;
}

ComplexMatrix BrokenCell::arr_dense() const {
    return ahat_dense().topLeftCorner(map_.n_r(), map_.n_r());
}

ComplexMatrix BrokenCell::pir_dense() const {
    return ahat_dense().bottomLeftCorner(map_.n_pi(), map_.n_r());
}

ComplexMatrix BrokenCell::r1_dense() const {
    ComplexMatrix R = ComplexMatrix::Zero(map_.n_broken(), map_.n_fine());
    for (Eigen::Index g = 0; g < map_.n_r(); ++g)
        R(g, r_class_[static_cast<std::size_t>(g)]) = r_weight_[static_cast<std::size_t>(g)];
    for (int v = 0; v < map_.arr(); ++v)
        for (int u = 0; u < map_.arr(); ++u) R(map_.pi_index(u, v), map_.fine_class(u, v, 0, 0)) = 1.0;
    return R;
}

ComplexMatrix BrokenCell::jd_dense() const {
    ComplexMatrix J = ComplexMatrix::Zero(map_.n_broken(), map_.n_broken());
    for (const auto& [a, b] : jd_pairs_) {
        J(a, a) += 0.5;
        J(a, b) -= 0.5;
        J(b, b) += 0.5;
        J(b, a) -= 0.5;
    }
    return J;
}

ComplexMatrix BrokenCell::h_dense() const {
    ComplexMatrix H = ComplexMatrix::Zero(map_.n_fine(), map_.n_broken());
    const Eigen::Index ni = static_cast<Eigen::Index>(interior_local_.size());
    const Eigen::Index ng = static_cast<Eigen::Index>(gamma_local_.size());
    const int p = map_.p(), arr = map_.arr();
    const int corners[4][2] = {{0, 0}, {p, 0}, {0, p}, {p, p}};
    const int P = map_.fine_period();
    for (int v = 0; v < arr; ++v) {
        for (int u = 0; u < arr; ++u) {
            const auto& ph = psi_r_[static_cast<std::size_t>(v) * arr + u];
            const Eigen::Index off = map_.r_index(u, v, 0);
            for (Eigen::Index a = 0; a < ni; ++a) {
                const Eigen::Index row = r_class_[static_cast<std::size_t>(off + interior_local_[a])];
                const Complex pa = std::conj(ph[interior_local_[a]]);
                for (Eigen::Index g = 0; g < ng; ++g)
                    H(row, off + gamma_local_[g]) += pa * hn_(a, g) * ph[gamma_local_[g]];
                // corner columns: extension from the full subdomain boundary
                for (int c = 0; c < 4; ++c) {
                    const Eigen::Index pi = map_.pi_index((u + corners[c][0] / p) % arr,
                                                          (v + corners[c][1] / p) % arr);
                    const Complex pc = std::exp(Complex(
                        0.0, (theta_.t1 * (p * u + corners[c][0]) + theta_.t2 * (p * v + corners[c][1])) / P));
                    H(row, pi) += pa * hn_pi_(a, c) * pc;
                }
            }
        }
    }
    return H;
}

ComplexMatrix BrokenCell::r2_dense() const {
    return r1_dense() - jd_dense().transpose() * h_dense().adjoint();
}

ComplexMatrix BrokenCell::kld_dense() const {
    ComplexMatrix K = ComplexMatrix::Zero(map_.n_broken(), map_.n_broken());
    K.topLeftCorner(map_.n_r(), map_.n_r()) = arr_dense();
    K.bottomLeftCorner(map_.n_pi(), map_.n_r()) = pir_dense();
    K.bottomRightCorner(map_.n_pi(), map_.n_pi()) = schur_block();
    return K;
}

ComplexMatrix BrokenCell::ku_dense() const {
    ComplexMatrix K = ComplexMatrix::Identity(map_.n_broken(), map_.n_broken());
    ComplexMatrix rhs = pir_dense().adjoint();
    ComplexMatrix sol(map_.n_r(), map_.n_pi());
    ComplexVector col, out;
    for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
        col = rhs.col(j);
        apply_arr_inv(col, out);
        sol.col(j) = out;
    }
    K.topRightCorner(map_.n_r(), map_.n_pi()) = sol;
    return K;
}

ComplexMatrix BrokenCell::minv_dense(bool dirichlet, const ComplexMatrix& coarse_inv) const {
    ComplexMatrix M(map_.n_fine(), map_.n_fine());
    ComplexVector e = ComplexVector::Zero(map_.n_fine());
    ComplexVector y;
    for (Eigen::Index j = 0; j < map_.n_fine(); ++j) {
        e[j] = 1.0;
        apply_minv(dirichlet, coarse_inv, e, y);
        M.col(j) = y;
        e[j] = 0.0;
    }
    // Hermitian symbol only when the coarse block is Hermitian (it is not for
    // the multiplicatively wrapped coarse solves).
    const double dev = (coarse_inv - coarse_inv.adjoint()).cwiseAbs().sum();
    if (dev <= 1e-12 * (1.0 + coarse_inv.cwiseAbs().sum())) return hermitian_part(M);
    return M;
}

BrokenCell::MinvParts BrokenCell::minv_parts(bool dirichlet) const {
    const Eigen::Index nf = map_.n_fine();
    const ComplexMatrix r = dirichlet ? r2_dense() : r1_dense();
    ComplexMatrix w(map_.n_r(), nf);  // Arr^{-1} R'_r
    {
        ComplexVector col, out;
        for (Eigen::Index j = 0; j < nf; ++j) {
            col = r.col(j).head(map_.n_r());
            apply_arr_inv(col, out);
            w.col(j) = out;
        }
    }
    MinvParts parts;
    parts.m0 = hermitian_part(r.topRows(map_.n_r()).adjoint() * w);
    parts.zpi = r.bottomRows(map_.n_pi());
    for (Eigen::Index j = 0; j < nf; ++j) {
        ComplexVector col = w.col(j), s;
        apply_pir(col, s);
        parts.zpi.col(j) -= s;
    }
    return parts;
}

}  // namespace bddclfa
