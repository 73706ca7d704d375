#pragma once

#include "bddclfa/spectrum.hpp"

namespace bddclfa {

/// Uniform weight grid; the paper's optima are all bracketed on a 0.1 grid.
struct SweepGrid {
    double lo = 0.1;
    double hi = 3.0;
    double step = 0.1;

    void validate() const;
    std::vector<double> values() const;
};

struct CurvePoint {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double objective = 0.0;  // kappa or magnitude ratio; +inf marks invalid points
    double max_imag = 0.0;
};

struct OptimizationResult {
    double best_omega1 = 0.0;
    double best_omega2 = 0.0;
    double best_objective = 0.0;
    std::vector<CurvePoint> curve;  // full curve (1-D) or surface (2-D), grid order
};

/// Scan omega over the grid for a single-weight mode (f or c); ties break
/// toward the smaller omega.  Throws if every grid point failed.
OptimizationResult optimize_1d(const Stencil9& s, int p, const PreconditionerSpec& spec_template,
                               const SweepGrid& grid, const SamplingPlan& plan,
                               const SweepOptions& opt = {});

/// Scan (omega1, omega2) for the two-weight modes (sc, fc); the full surface
/// is retained for sensitivity plots.
OptimizationResult optimize_2d(const Stencil9& s, int p, const PreconditionerSpec& spec_template,
                               const SweepGrid& grid1, const SweepGrid& grid2, const SamplingPlan& plan,
                               const SweepOptions& opt = {});

}  // namespace bddclfa
