#include "bddclfa/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "bddclfa/spectrum.hpp"

namespace bddclfa {

namespace {
bool is_corner(int k, int l, int p) { return (k == 0 || k == p) && (l == 0 || l == p); }

RealMatrix pinv_symmetric(const RealMatrix& m, double rel_tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()));
    const RealVector& d = es.eigenvalues();
    const double dmax = d.cwiseAbs().maxCoeff();
    RealVector dinv = RealVector::Zero(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (std::abs(d[i]) > rel_tol * dmax) dinv[i] = 1.0 / d[i];
    return es.eigenvectors() * dinv.asDiagonal() * es.eigenvectors().transpose();
}
}  // namespace

AssembledSystem::AssembledSystem(const Stencil9& s, int p, int m) : stencil_(s), p_(p), m_(m) {
    if (p < 2 || m < 2) throw std::invalid_argument("AssembledSystem: need p >= 2 and m >= 2");
    if (static_cast<long>(p) * m * p * m > 10000)
        throw std::invalid_argument("AssembledSystem: mesh beyond desk scale (> 1e4 dofs)");
    const int n = p + 1;
    neumann_ = neumann_matrix(s, p);

    local_lookup_.assign(static_cast<std::size_t>(n * n), -1);
    for (int l = 0; l <= p; ++l) {
        for (int k = 0; k <= p; ++k) {
            if (is_corner(k, l, p)) continue;
            local_lookup_[static_cast<std::size_t>(l * n + k)] = static_cast<int>(local_r_.size());
            local_r_.emplace_back(k, l);
        }
    }
    nr_loc_ = static_cast<Eigen::Index>(local_r_.size());

    Eigen::MatrixXd an_rr(nr_loc_, nr_loc_);
    for (Eigen::Index a = 0; a < nr_loc_; ++a)
        for (Eigen::Index b = 0; b < nr_loc_; ++b)
            an_rr(a, b) = neumann_(local_r_[a].second * n + local_r_[a].first,
                                   local_r_[b].second * n + local_r_[b].first);
    an_rr_llt_.compute(an_rr);
    if (an_rr_llt_.info() != Eigen::Success)
        throw SingularMatrixError("AssembledSystem: r block not positive definite", 0.0);

    for (Eigen::Index i = 0; i < nr_loc_; ++i) {
        const auto [k, l] = local_r_[i];
        if (k == 0 || k == p || l == 0 || l == p)
            gamma_local_.push_back(static_cast<int>(i));
        else
            interior_local_.push_back(static_cast<int>(i));
    }
    const auto ni = static_cast<Eigen::Index>(interior_local_.size());
    const auto ng = static_cast<Eigen::Index>(gamma_local_.size());
    Eigen::MatrixXd an_ii(ni, ni), an_ig(ni, ng);
    for (Eigen::Index a = 0; a < ni; ++a) {
        for (Eigen::Index b = 0; b < ni; ++b) an_ii(a, b) = an_rr(interior_local_[a], interior_local_[b]);
        for (Eigen::Index g = 0; g < ng; ++g) an_ig(a, g) = an_rr(interior_local_[a], gamma_local_[g]);
    }
    Eigen::LLT<Eigen::MatrixXd> ii_llt(an_ii);
    if (ii_llt.info() != Eigen::Success)
        throw SingularMatrixError("AssembledSystem: interior block not positive definite", 0.0);
    hn_ = -ii_llt.solve(an_ig);

    const int N = n_axis();
    auto rix = [&](int u, int v, int local) {
        return (static_cast<Eigen::Index>(v) * m_ + u) * nr_loc_ + local;
    };
    r_node_.resize(static_cast<std::size_t>(n_r()));
    r_weight_.resize(static_cast<std::size_t>(n_r()));
    for (int v = 0; v < m_; ++v) {
        for (int u = 0; u < m_; ++u) {
            for (Eigen::Index i = 0; i < nr_loc_; ++i) {
                const auto [k, l] = local_r_[i];
                const Eigen::Index g = rix(u, v, static_cast<int>(i));
                r_node_[static_cast<std::size_t>(g)] =
                    static_cast<Eigen::Index>((p_ * v + l) % N) * N + (p_ * u + k) % N;
                r_weight_[static_cast<std::size_t>(g)] = (k == 0 || k == p || l == 0 || l == p) ? 0.5 : 1.0;
            }
        }
    }

    const int corners[4][2] = {{0, 0}, {p, 0}, {0, p}, {p, p}};
    for (int v = 0; v < m_; ++v) {
        for (int u = 0; u < m_; ++u) {
            for (const auto& c : corners) {
                const Eigen::Index pi =
                    n_r() + static_cast<Eigen::Index>((v + c[1] / p) % m_) * m_ + (u + c[0] / p) % m_;
                const int crow = c[1] * n + c[0];
                for (Eigen::Index i = 0; i < nr_loc_; ++i) {
                    const double w = neumann_(crow, local_r_[i].second * n + local_r_[i].first);
                    if (w != 0.0) pir_entries_.push_back({pi, rix(u, v, static_cast<int>(i)), w});
                }
            }
        }
    }

    for (int v = 0; v < m_; ++v) {
        for (int u = 0; u < m_; ++u) {
            for (int l = 1; l < p; ++l)
                jd_pairs_.emplace_back(rix(u, v, local_lookup_[static_cast<std::size_t>(l * n)]),
                                       rix((u + m_ - 1) % m_, v, local_lookup_[static_cast<std::size_t>(l * n + p)]));
            for (int k = 1; k < p; ++k)
                jd_pairs_.emplace_back(rix(u, v, local_lookup_[static_cast<std::size_t>(k)]),
                                       rix(u, (v + m_ - 1) % m_, local_lookup_[static_cast<std::size_t>(p * n + k)]));
        }
    }

    // coarse operator by elimination of the r block
    RealMatrix rhs = RealMatrix::Zero(n_r(), n_pi());
    for (const auto& e : pir_entries_) rhs(e.r, e.pi - n_r()) += e.v;
    RealMatrix sol(n_r(), n_pi());
    RealVector col(n_r()), out(n_r());
    for (Eigen::Index j = 0; j < n_pi(); ++j) {
        col = rhs.col(j);
        apply_arr_inv(col, out);
        sol.col(j) = out;
    }
    schur_ = stencil_.center() * RealMatrix::Identity(n_pi(), n_pi());
    for (const auto& e : pir_entries_) schur_.row(e.pi - n_r()) -= e.v * sol.row(e.r);
}

void AssembledSystem::apply_a(const RealVector& x, RealVector& y) const {
    const int N = n_axis();
    y.resize(n_fine());
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int k2 = -1; k2 <= 1; ++k2)
                for (int k1 = -1; k1 <= 1; ++k1)
                    acc += stencil_.at(k1, k2) *
                           x[static_cast<Eigen::Index>((j + k2 + N) % N) * N + (i + k1 + N) % N];
            y[static_cast<Eigen::Index>(j) * N + i] = acc;
        }
    }
}

RealMatrix AssembledSystem::dense_a() const {
    RealMatrix A = RealMatrix::Zero(n_fine(), n_fine());
    const int N = n_axis();
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i)
            for (int k2 = -1; k2 <= 1; ++k2)
                for (int k1 = -1; k1 <= 1; ++k1)
                    A(static_cast<Eigen::Index>(j) * N + i,
                      static_cast<Eigen::Index>((j + k2 + N) % N) * N + (i + k1 + N) % N) +=
                        stencil_.at(k1, k2);
    return A;
}

RealMatrix AssembledSystem::dense_ahat() const {
    const int n = p_ + 1;
    RealMatrix A = RealMatrix::Zero(n_broken(), n_broken());
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n) * n);
    for (int v = 0; v < m_; ++v) {
        for (int u = 0; u < m_; ++u) {
            for (int l = 0; l <= p_; ++l) {
                for (int k = 0; k <= p_; ++k) {
                    const int d = l * n + k;
                    if (is_corner(k, l, p_))
                        idx[static_cast<std::size_t>(d)] =
                            n_r() + static_cast<Eigen::Index>((v + l / p_) % m_) * m_ + (u + k / p_) % m_;
                    else
                        idx[static_cast<std::size_t>(d)] =
                            (static_cast<Eigen::Index>(v) * m_ + u) * nr_loc_ + local_lookup_[static_cast<std::size_t>(d)];
                }
            }
            for (int a = 0; a < n * n; ++a)
                for (int b = 0; b < n * n; ++b)
                    if (neumann_(a, b) != 0.0)
                        A(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) += neumann_(a, b);
        }
    }
    return A;
}

RealMatrix AssembledSystem::dense_r1() const {
    RealMatrix R = RealMatrix::Zero(n_broken(), n_fine());
    for (Eigen::Index g = 0; g < n_r(); ++g)
        R(g, r_node_[static_cast<std::size_t>(g)]) = r_weight_[static_cast<std::size_t>(g)];
    const int N = n_axis();
    for (int v = 0; v < m_; ++v)
        for (int u = 0; u < m_; ++u)
            R(n_r() + static_cast<Eigen::Index>(v) * m_ + u,
              static_cast<Eigen::Index>(p_ * v % N) * N + p_ * u % N) = 1.0;
    return R;
}

RealMatrix AssembledSystem::dense_r2() const {
    RealMatrix R(n_broken(), n_fine());
    RealVector e = RealVector::Zero(n_fine()), y;
    for (Eigen::Index j = 0; j < n_fine(); ++j) {
        e[j] = 1.0;
        apply_r(true, e, y);
        R.col(j) = y;
        e[j] = 0.0;
    }
    return R;
}

void AssembledSystem::apply_arr_inv(const RealVector& xr, RealVector& yr) const {
    yr.resize(n_r());
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(m_) * m_; ++b)
        yr.segment(b * nr_loc_, nr_loc_) = an_rr_llt_.solve(xr.segment(b * nr_loc_, nr_loc_));
}

void AssembledSystem::apply_pir(const RealVector& xr, RealVector& ypi) const {
    ypi = RealVector::Zero(n_pi());
    for (const auto& e : pir_entries_) ypi[e.pi - n_r()] += e.v * xr[e.r];
}

void AssembledSystem::apply_pir_t(const RealVector& xpi, RealVector& yr) const {
    yr = RealVector::Zero(n_r());
    for (const auto& e : pir_entries_) yr[e.r] += e.v * xpi[e.pi - n_r()];
}

void AssembledSystem::apply_jd(const RealVector& x, RealVector& y) const {
    y = RealVector::Zero(x.size());
    for (const auto& [a, b] : jd_pairs_) {
        const double d = 0.5 * (x[a] - x[b]);
        y[a] += d;
        y[b] -= d;
    }
}

void AssembledSystem::apply_r(bool dirichlet, const RealVector& xfine, RealVector& ybroken) const {
    ybroken = RealVector::Zero(n_broken());
    for (Eigen::Index g = 0; g < n_r(); ++g)
        ybroken[g] = r_weight_[static_cast<std::size_t>(g)] * xfine[r_node_[static_cast<std::size_t>(g)]];
    const int N = n_axis();
    for (int v = 0; v < m_; ++v)
        for (int u = 0; u < m_; ++u)
            ybroken[n_r() + static_cast<Eigen::Index>(v) * m_ + u] =
                xfine[static_cast<Eigen::Index>(p_ * v % N) * N + p_ * u % N];
    if (!dirichlet) return;
    const auto ni = static_cast<Eigen::Index>(interior_local_.size());
    const auto ng = static_cast<Eigen::Index>(gamma_local_.size());
    RealVector hv = RealVector::Zero(n_broken());
    RealVector ti(ni), tg(ng);
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(m_) * m_; ++b) {
        const Eigen::Index off = b * nr_loc_;
        for (Eigen::Index a = 0; a < ni; ++a)
            ti[a] = xfine[r_node_[static_cast<std::size_t>(off + interior_local_[a])]];
        tg.noalias() = hn_.transpose() * ti;
        for (Eigen::Index g = 0; g < ng; ++g) hv[off + gamma_local_[g]] = tg[g];
    }
    RealVector jv;
    apply_jd(hv, jv);
    ybroken -= jv;
}

void AssembledSystem::apply_r_t(bool dirichlet, const RealVector& xbroken, RealVector& yfine) const {
    yfine = RealVector::Zero(n_fine());
    if (dirichlet) {
        RealVector jv;
        apply_jd(xbroken, jv);
        const auto ni = static_cast<Eigen::Index>(interior_local_.size());
        const auto ng = static_cast<Eigen::Index>(gamma_local_.size());
        RealVector ti(ni), tg(ng);
        for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(m_) * m_; ++b) {
            const Eigen::Index off = b * nr_loc_;
            for (Eigen::Index g = 0; g < ng; ++g) tg[g] = jv[off + gamma_local_[g]];
            ti.noalias() = hn_ * tg;
            for (Eigen::Index a = 0; a < ni; ++a)
                yfine[r_node_[static_cast<std::size_t>(off + interior_local_[a])]] -= ti[a];
        }
    }
    for (Eigen::Index g = 0; g < n_r(); ++g)
        yfine[r_node_[static_cast<std::size_t>(g)]] +=
            r_weight_[static_cast<std::size_t>(g)] * xbroken[g];
    const int N = n_axis();
    for (int v = 0; v < m_; ++v)
        for (int u = 0; u < m_; ++u)
            yfine[static_cast<Eigen::Index>(p_ * v % N) * N + p_ * u % N] +=
                xbroken[n_r() + static_cast<Eigen::Index>(v) * m_ + u];
}

FinitePreconditioner::FinitePreconditioner(const AssembledSystem& sys, const PreconditionerSpec& spec)
    : sys_(sys), spec_(spec) {
    spec.validate();
    if (spec.coarse_variant == 0) {
        cinv_ = pinv_symmetric(sys.schur());
    } else {
        if (sys.m() % sys.p() != 0)
            throw std::invalid_argument("FinitePreconditioner: three-level needs p | m");
        const SchurStencilCoeffs sc = schur_stencil(sys.stencil(), sys.p());
        AssembledSystem coarse(sc.assembled(), sys.p(), sys.m() / sys.p());
        PreconditionerSpec cs;
        cs.fine_variant = spec.coarse_variant;
        FinitePreconditioner cpre(coarse, cs);
        RealMatrix minv_s = cpre.dense_minv();
        if (spec.mult == MultMode::coarse) {
            const RealMatrix i = RealMatrix::Identity(minv_s.rows(), minv_s.cols());
            cinv_ = minv_s + (spec.omega / sc.center) * (i - sys.schur() * minv_s);
        } else if (spec.mult == MultMode::sym_coarse) {
            const RealMatrix i = RealMatrix::Identity(minv_s.rows(), minv_s.cols());
            RealMatrix w = minv_s + (spec.omega1 / sc.center) * (i - sys.schur() * minv_s);
            cinv_ = w + (spec.omega2 / sc.center) * (i - w * sys.schur());
        } else if (spec.mult == MultMode::fine_coarse) {
            const RealMatrix i = RealMatrix::Identity(minv_s.rows(), minv_s.cols());
            cinv_ = minv_s + (spec.omega1 / sc.center) * (i - sys.schur() * minv_s);
        } else {
            cinv_ = std::move(minv_s);
        }
    }
}

void FinitePreconditioner::apply_minv(const RealVector& x, RealVector& y) const {
    const bool dirichlet = spec_.fine_variant == 2;
    RealVector b;
    sys_.apply_r(dirichlet, x, b);
    RealVector br = b.head(sys_.n_r());
    RealVector bpi = b.tail(sys_.n_pi());
    RealVector t, spi;
    sys_.apply_arr_inv(br, t);
    sys_.apply_pir(t, spi);
    bpi -= spi;
    RealVector wpi = cinv_ * bpi;
    RealVector s, s2;
    sys_.apply_pir_t(wpi, s);
    sys_.apply_arr_inv(s, s2);
    RealVector out(sys_.n_broken());
    out.head(sys_.n_r()) = t - s2;
    out.tail(sys_.n_pi()) = wpi;
    sys_.apply_r_t(dirichlet, out, y);
}

void FinitePreconditioner::apply_g(const RealVector& x, RealVector& y) const {
    RealVector ax;
    sys_.apply_a(x, ax);
    apply_minv(ax, y);
    const bool fwrap = spec_.mult == MultMode::fine || spec_.mult == MultMode::fine_coarse;
    if (!fwrap) return;
    const double om = spec_.mult == MultMode::fine ? spec_.omega : spec_.omega2;
    // G^f x = G x + (om/d) A (x - G x)
    RealVector corr;
    sys_.apply_a(x - y, corr);
    y += (om / sys_.stencil().center()) * corr;
}

RealMatrix FinitePreconditioner::dense_minv() const {
    RealMatrix M(sys_.n_fine(), sys_.n_fine());
    RealVector e = RealVector::Zero(sys_.n_fine()), y;
    for (Eigen::Index j = 0; j < sys_.n_fine(); ++j) {
        e[j] = 1.0;
        apply_minv(e, y);
        M.col(j) = y;
        e[j] = 0.0;
    }
    return M;
}

RealMatrix FinitePreconditioner::dense_g() const {
    RealMatrix G(sys_.n_fine(), sys_.n_fine());
    RealVector e = RealVector::Zero(sys_.n_fine()), y;
    for (Eigen::Index j = 0; j < sys_.n_fine(); ++j) {
        e[j] = 1.0;
        apply_g(e, y);
        G.col(j) = y;
        e[j] = 0.0;
    }
    return G;
}

namespace {

std::vector<double> sorted_nonzero_real(const ComplexVector& ev, double drop_tol, double* max_imag) {
    double amax = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) amax = std::max(amax, std::abs(ev[i]));
    std::vector<double> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i]) <= drop_tol * amax) continue;
        if (max_imag) *max_imag = std::max(*max_imag, std::abs(ev[i].imag()));
        out.push_back(ev[i].real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

MatchReport spectra_match(const AssembledSystem& sys, const PreconditionerSpec& spec, double drop_tol) {
    FinitePreconditioner pre(sys, spec);
    const RealMatrix G = pre.dense_g();
    const Spectrum fin = eig(G.cast<Complex>());

    std::vector<Complex> lfa;
    const int cells = spec.levels() == 2 ? sys.m() : sys.m() / sys.p();
    for (int k2 = 0; k2 < cells; ++k2) {
        for (int k1 = 0; k1 < cells; ++k1) {
            const Frequency th = wrap_frequency({2.0 * M_PI * k1 / cells, 2.0 * M_PI * k2 / cells});
            const bool zero = (k1 == 0 && k2 == 0);
            const OperatorSymbol sym = operator_symbol(sys.stencil(), sys.p(), th, spec, zero);
            const Spectrum sp = eig(sym.g);
            lfa.insert(lfa.end(), sp.eigenvalues.data(), sp.eigenvalues.data() + sp.eigenvalues.size());
        }
    }
    ComplexVector lfa_v = Eigen::Map<ComplexVector>(lfa.data(), static_cast<Eigen::Index>(lfa.size()));

    double im = 0.0;
    const auto a = sorted_nonzero_real(fin.eigenvalues, drop_tol, &im);
    const auto b = sorted_nonzero_real(lfa_v, drop_tol, &im);
    MatchReport rep;
    rep.n_compared = std::min(a.size(), b.size());
    if (a.size() != b.size())
        rep.max_deviation = std::numeric_limits<double>::infinity();  // count mismatch is a failure
    for (std::size_t i = 0; i < rep.n_compared; ++i)
        rep.max_deviation = std::max(rep.max_deviation, std::abs(a[i] - b[i]));
    if (!a.empty()) {
        rep.finite_kappa = a.back() / a.front();
        rep.finite_min = a.front();
    }
    if (!b.empty()) rep.lfa_kappa = b.back() / b.front();
    return rep;
}

RitzResult ritz_estimate(const AssembledSystem& sys, const PreconditionerSpec& spec, int max_iter,
                         double tol, std::uint64_t seed) {
    FinitePreconditioner pre(sys, spec);
    const Eigen::Index n = sys.n_fine();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RealVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
    v.array() -= v.mean();  // zero-mean start
    v /= v.norm();

    std::vector<RealVector> basis{v};
    const int kmax = static_cast<int>(std::min<Eigen::Index>(max_iter, n));
    RealMatrix h = RealMatrix::Zero(kmax + 1, kmax);
    int k = 0;
    RealVector w;
    for (; k < kmax; ++k) {
        pre.apply_g(basis[static_cast<std::size_t>(k)], w);
        for (int i = 0; i <= k; ++i) {  // modified Gram-Schmidt
            h(i, k) = basis[static_cast<std::size_t>(i)].dot(w);
            w -= h(i, k) * basis[static_cast<std::size_t>(i)];
        }
        h(k + 1, k) = w.norm();
        if (h(k + 1, k) <= tol * h.topLeftCorner(k + 2, k + 1).norm()) {
            ++k;
            break;
        }
        basis.push_back(w / h(k + 1, k));
    }
    if (k == 0) throw EigenFailureError("ritz_estimate: breakdown at first step");
    const RealMatrix hk = h.topLeftCorner(k, k);
    Eigen::EigenSolver<RealMatrix> es(hk);
    if (es.info() != Eigen::Success) throw EigenFailureError("ritz_estimate: Hessenberg eigensolve failed");

    RitzResult res;
    res.iterations = k;
    double amax = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        amax = std::max(amax, std::abs(es.eigenvalues()[i]));
    double amin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const Complex z = es.eigenvalues()[i];
        if (std::abs(z) <= 1e-6 * amax) continue;  // periodic zero mode, ignored
        res.ritz.push_back(z);
        amin = std::min(amin, std::abs(z));
    }
    res.ratio = amax / amin;
    return res;
}

}  // namespace bddclfa
