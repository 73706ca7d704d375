#include "bddclfa/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace bddclfa {

std::vector<double> Histogram::densities() const {
    std::vector<double> d(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) d[i] = static_cast<double>(counts[i]) / bin_width;
    return d;
}

std::size_t Histogram::total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

std::size_t SpectrumReport::total_count() const {
    std::size_t t = 0;
    for (const auto& ts : per_theta) {
        const std::size_t n = full ? ts.eigenvalues.size()
                                   : static_cast<std::size_t>(p) * p * (spec.levels() == 3 ? p * p : 1);
        t += n * static_cast<std::size_t>(ts.multiplicity);
    }
    return t;
}

double SpectrumReport::lambda_min() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& ts : per_theta) v = std::min(v, ts.lambda_min);
    return v;
}

double SpectrumReport::lambda_max() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& ts : per_theta) v = std::max(v, ts.lambda_max);
    return v;
}

double SpectrumReport::abs_min() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& ts : per_theta) v = std::min(v, ts.abs_min);
    return v;
}

double SpectrumReport::abs_max() const {
    double v = 0.0;
    for (const auto& ts : per_theta) v = std::max(v, ts.abs_max);
    return v;
}

double SpectrumReport::max_imag() const {
    double v = 0.0;
    for (const auto& ts : per_theta) v = std::max(v, ts.max_imag);
    return v;
}

double SpectrumReport::kappa() const { return lambda_max() / lambda_min(); }

double SpectrumReport::ratio() const { return abs_max() / abs_min(); }

double SpectrumReport::objective() const {
    if (mode == SpectrumMode::real) {
        const double lo = lambda_min();
        if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
        return lambda_max() / lo;
    }
    return ratio();
}

Histogram SpectrumReport::histogram(double bin_width) const {
    if (mode != SpectrumMode::magnitude && full) {
        Histogram h;
        h.bin_width = bin_width;
        h.lo = std::min(0.0, lambda_min());
        const double hi = lambda_max();
        const auto nbins = static_cast<std::size_t>(std::floor((hi - h.lo) / bin_width)) + 1;
        h.counts.assign(nbins, 0);
        for (const auto& ts : per_theta) {
            for (const auto& ev : ts.eigenvalues) {
                auto b = static_cast<std::size_t>(std::floor((ev.real() - h.lo) / bin_width));
                if (b >= nbins) b = nbins - 1;
                h.counts[b] += static_cast<std::size_t>(ts.multiplicity);
            }
        }
        return h;
    }
    throw std::logic_error("histogram: requires a full real-mode report");
}

double upsilon(int variant, int p) {
    const double lg = 1.0 + std::log(static_cast<double>(p));
    if (variant == 1) return p * lg;
    if (variant == 2) return lg * lg;
    throw std::invalid_argument("upsilon: variant must be 1 or 2");
}

double fit_constant(double kappa, int p, BoundKind kind, int i, int j) {
    switch (kind) {
        case BoundKind::upsilon1: return kappa / upsilon(1, p);
        case BoundKind::upsilon2: return kappa / upsilon(2, p);
        case BoundKind::product: return kappa / (upsilon(i, p) * upsilon(j, p));
    }
    throw std::invalid_argument("fit_constant: unknown bound");
}

namespace {

ThetaSpectrum reduce_eigenvalues(const Frequency& th, int mult, const ComplexVector& ev) {
    ThetaSpectrum ts;
    ts.theta = th;
    ts.multiplicity = mult;
    ts.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    ts.lambda_min = std::numeric_limits<double>::infinity();
    ts.lambda_max = -std::numeric_limits<double>::infinity();
    ts.abs_min = std::numeric_limits<double>::infinity();
    ts.abs_max = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        const double re = ev[k].real(), ab = std::abs(ev[k]);
        ts.lambda_min = std::min(ts.lambda_min, re);
        ts.lambda_max = std::max(ts.lambda_max, re);
        ts.abs_min = std::min(ts.abs_min, ab);
        ts.abs_max = std::max(ts.abs_max, ab);
        ts.max_imag = std::max(ts.max_imag, std::abs(ev[k].imag()));
    }
    return ts;
}

ThetaSpectrum reduce_real(const Frequency& th, int mult, const RealVector& ev, bool keep) {
    ThetaSpectrum ts;
    ts.theta = th;
    ts.multiplicity = mult;
    if (keep) {
        ts.eigenvalues.reserve(static_cast<std::size_t>(ev.size()));
        for (Eigen::Index k = 0; k < ev.size(); ++k) ts.eigenvalues.emplace_back(ev[k], 0.0);
    }
    ts.lambda_min = ev.minCoeff();
    ts.lambda_max = ev.maxCoeff();
    ts.abs_min = ev.cwiseAbs().minCoeff();
    ts.abs_max = ev.cwiseAbs().maxCoeff();
    ts.max_imag = 0.0;
    return ts;
}

void check_reality(const ThetaSpectrum& ts, const PreconditionerSpec& spec) {
    if (ts.max_imag > 1e-8 * std::max(1e-300, ts.abs_max))
        throw SweepError("sweep: nonreal spectrum for " + spec.label() + " at theta = (" +
                             std::to_string(ts.theta.t1) + ", " + std::to_string(ts.theta.t2) + ")",
                         ts.theta);
}

void run_parallel(std::size_t njobs, int threads, const std::function<void(std::size_t)>& work) {
    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nt < 1) nt = 1;
    nt = std::min<int>(nt, static_cast<int>(njobs));
    if (nt <= 1) {
        for (std::size_t k = 0; k < njobs; ++k) work(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto body = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= njobs) return;
            try {
                work(k);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

std::vector<SpectrumReport> sweep_weights(const Stencil9& s, int p,
                                          const std::vector<PreconditionerSpec>& specs,
                                          const SamplingPlan& plan, const SweepOptions& opt) {
    if (specs.empty()) throw std::invalid_argument("sweep_weights: no specs");
    for (const auto& sp : specs) {
        sp.validate();
        if (sp.fine_variant != specs.front().fine_variant || sp.coarse_variant != specs.front().coarse_variant ||
            sp.mult != specs.front().mult)
            throw std::invalid_argument("sweep_weights: specs must share (i, j, mode)");
    }
    const PreconditionerSpec& base = specs.front();
    const int levels = base.levels();
    const Eigen::Index dim = levels == 2 ? static_cast<Eigen::Index>(p) * p
                                         : static_cast<Eigen::Index>(p) * p * p * p;
    const SpectrumMode mode = base.real_spectrum() ? SpectrumMode::real : SpectrumMode::magnitude;

    const bool use_krylov =
        opt.engine == SweepEngine::krylov ||
        (opt.engine == SweepEngine::automatic && base.mult == MultMode::none && !opt.full_spectrum &&
         dim >= opt.krylov_threshold);

    const auto jobs = opt.fold ? fold_dihedral(plan) : unfolded(plan);
    std::vector<std::vector<ThetaSpectrum>> results(specs.size(),
                                                    std::vector<ThetaSpectrum>(jobs.size()));

    run_parallel(jobs.size(), opt.threads, [&](std::size_t k) {
        const Frequency th = jobs[k].theta;
        const int mult = jobs[k].multiplicity;
        if (use_krylov) {
            const SpectrumExtremes ex = plain_extremes_krylov(s, p, th, base);
            ThetaSpectrum ts;
            ts.theta = th;
            ts.multiplicity = mult;
            ts.lambda_min = ex.lambda_min;
            ts.lambda_max = ex.lambda_max;
            ts.abs_min = std::min(std::abs(ex.lambda_min), std::abs(ex.lambda_max));
            ts.abs_max = std::max(std::abs(ex.lambda_min), std::abs(ex.lambda_max));
            for (std::size_t si = 0; si < specs.size(); ++si) results[si][k] = ts;
            return;
        }
        if (mode == SpectrumMode::real) {
            // shared pencil: spectrum(G^f(omega)) = 1 + eig(P - (omega/d) Sp)
            ComplexMatrix minv;
            SymbolMatrix A = fine_symbol(s, levels == 2 ? p : p * p, th);
            if (levels == 2) {
                minv = two_level_minv(s, p, th, base.fine_variant);
            } else {
                BrokenCell cell(s, p, p, th);
                const SchurStencilCoeffs sc = schur_stencil(s, p);
                const ComplexMatrix cinv =
                    base.coarse_variant == 0
                        ? inverse(fine_symbol(sc.assembled(), p, th).m)
                        : two_level_minv(sc.assembled(), p, th, base.coarse_variant);
                minv = cell.minv_dense(base.fine_variant == 2, cinv);
            }
            FineWrapPencil pencil(minv, A.m, s.center());
            for (std::size_t si = 0; si < specs.size(); ++si) {
                const double om = specs[si].mult == MultMode::fine ? specs[si].omega : 0.0;
                results[si][k] = reduce_real(th, mult, pencil.eigenvalues(om), opt.full_spectrum);
            }
            return;
        }
        // magnitude mode: coarse-wrapped three-level variants
        BrokenCell cell(s, p, p, th);
        const SymbolMatrix A = fine_symbol(s, p * p, th);
        const SchurStencilCoeffs sc = schur_stencil(s, p);
        const ComplexMatrix S = fine_symbol(sc.assembled(), p, th).m;
        const ComplexMatrix minv_s = two_level_minv(sc.assembled(), p, th, base.coarse_variant);
        const BrokenCell::MinvParts parts = cell.minv_parts(base.fine_variant == 2);
        for (std::size_t si = 0; si < specs.size(); ++si) {
            const auto& sp = specs[si];
            ComplexMatrix cinv;
            if (sp.mult == MultMode::coarse)
                cinv = coarse_wrap(minv_s, S, sc.center, sp.omega);
            else if (sp.mult == MultMode::sym_coarse)
                cinv = coarse_wrap_symmetrized(minv_s, S, sc.center, sp.omega1, sp.omega2);
            else
                cinv = coarse_wrap(minv_s, S, sc.center, sp.omega1);  // fc
            const ComplexMatrix minv = parts.m0 + parts.zpi.adjoint() * cinv * parts.zpi;
            ComplexMatrix g = minv * A.m;
            if (sp.mult == MultMode::fine_coarse) g = multiplicative_fine(g, A.m, s.center(), sp.omega2);
            results[si][k] = reduce_eigenvalues(th, mult, eig(g).eigenvalues);
        }
    });

    std::vector<SpectrumReport> out;
    out.reserve(specs.size());
    for (std::size_t si = 0; si < specs.size(); ++si) {
        SpectrumReport rep;
        rep.mode = mode;
        rep.p = p;
        rep.sample_n = plan.n;
        rep.spec = specs[si];
        rep.full = opt.full_spectrum && !use_krylov;
        rep.per_theta = std::move(results[si]);
        if (mode == SpectrumMode::real && !use_krylov)
            for (const auto& ts : rep.per_theta) check_reality(ts, rep.spec);
        out.push_back(std::move(rep));
    }
    return out;
}

SpectrumReport sweep(const Stencil9& s, int p, const PreconditionerSpec& spec, const SamplingPlan& plan,
                     const SweepOptions& opt) {
    return sweep_weights(s, p, {spec}, plan, opt).front();
}

}  // namespace bddclfa
