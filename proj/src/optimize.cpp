#include "bddclfa/optimize.hpp"

#include <cmath>

namespace bddclfa {

void SweepGrid::validate() const {
    if (!(lo > 0.0)) throw std::invalid_argument("SweepGrid: lower bound must be positive");
    if (!(step > 0.0)) throw std::invalid_argument("SweepGrid: step must be positive");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
        throw std::invalid_argument("SweepGrid: invalid range");
}

std::vector<double> SweepGrid::values() const {
    validate();
    std::vector<double> v;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    v.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) v.push_back(lo + k * step);
    return v;
}

namespace {

OptimizationResult pick_best(std::vector<CurvePoint> curve) {
    OptimizationResult res;
    res.curve = std::move(curve);
    double best = std::numeric_limits<double>::infinity();
    const CurvePoint* who = nullptr;
    for (const auto& pt : res.curve) {
        if (pt.objective < best) {  // strict: earlier (smaller omega) wins ties
            best = pt.objective;
            who = &pt;
        }
    }
    if (!who || !std::isfinite(best))
        throw std::runtime_error("optimize: every grid point failed or was invalid");
    res.best_omega1 = who->omega1;
    res.best_omega2 = who->omega2;
    res.best_objective = best;
    return res;
}

}  // namespace

OptimizationResult optimize_1d(const Stencil9& s, int p, const PreconditionerSpec& spec_template,
                               const SweepGrid& grid, const SamplingPlan& plan, const SweepOptions& opt) {
    if (spec_template.mult != MultMode::fine && spec_template.mult != MultMode::coarse &&
        spec_template.mult != MultMode::sym_coarse)
        throw std::invalid_argument("optimize_1d: mode must be f, c or sc");
    const auto omegas = grid.values();
    std::vector<PreconditionerSpec> specs;
    specs.reserve(omegas.size());
    for (double w : omegas) {
        PreconditionerSpec sp = spec_template;
        if (sp.mult == MultMode::fine || sp.mult == MultMode::coarse) {
            sp.omega = w;
        } else {
            sp.omega1 = sp.omega2 = w;  // symmetrized coarse wrap scans a single weight
        }
        specs.push_back(sp);
    }
    const auto reports = sweep_weights(s, p, specs, plan, opt);
    std::vector<CurvePoint> curve(reports.size());
    for (std::size_t k = 0; k < reports.size(); ++k)
        curve[k] = {omegas[k], 0.0, reports[k].objective(), reports[k].max_imag()};
    return pick_best(std::move(curve));
}

OptimizationResult optimize_2d(const Stencil9& s, int p, const PreconditionerSpec& spec_template,
                               const SweepGrid& grid1, const SweepGrid& grid2, const SamplingPlan& plan,
                               const SweepOptions& opt) {
    if (spec_template.mult != MultMode::sym_coarse && spec_template.mult != MultMode::fine_coarse)
        throw std::invalid_argument("optimize_2d: mode must be sc or fc");
    const auto w1s = grid1.values();
    const auto w2s = grid2.values();
    std::vector<CurvePoint> curve;
    curve.reserve(w1s.size() * w2s.size());
    for (double w1 : w1s) {
        std::vector<PreconditionerSpec> specs;
        specs.reserve(w2s.size());
        for (double w2 : w2s) {
            PreconditionerSpec sp = spec_template;
            sp.omega1 = w1;
            sp.omega2 = w2;
            specs.push_back(sp);
        }
        const auto reports = sweep_weights(s, p, specs, plan, opt);
        for (std::size_t k = 0; k < reports.size(); ++k)
            curve.push_back({w1, w2s[k], reports[k].objective(), reports[k].max_imag()});
    }
    return pick_best(std::move(curve));
}

}  // namespace bddclfa
