#include "bddclfa/frequency.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace bddclfa {

bool Frequency::is_zero(double tol) const {
    return std::abs(t1) <= tol && std::abs(t2) <= tol;
}

double wrap_angle(double t) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(t + M_PI, two_pi);
    if (w < 0) w += two_pi;
    return w - M_PI;
}

Frequency wrap_frequency(const Frequency& th) {
    return {wrap_angle(th.t1), wrap_angle(th.t2)};
}

HarmonicGrid::HarmonicGrid(const Frequency& coarse_theta, int period)
    : base{coarse_theta.t1 / period, coarse_theta.t2 / period}, p(period) {
    if (period < 2) throw std::invalid_argument("HarmonicGrid: period must be >= 2");
}

Frequency HarmonicGrid::member(int q, int r) const {
    return {base.t1 + 2.0 * M_PI * q / p, base.t2 + 2.0 * M_PI * r / p};
}

std::vector<Frequency> HarmonicGrid::members() const {
    std::vector<Frequency> out;
    out.reserve(static_cast<std::size_t>(p) * p);
    for (int r = 0; r < p; ++r)
        for (int q = 0; q < p; ++q) out.push_back(member(q, r));
    return out;
}

SamplingPlan::SamplingPlan(int half_resolution) : n(half_resolution) {
    if (n < 1) throw std::invalid_argument("SamplingPlan: n must be >= 1");
}

double SamplingPlan::step() const { return M_PI / n; }

std::vector<double> SamplingPlan::axis() const {
    std::vector<double> v(static_cast<std::size_t>(2 * n));
    const double dt = step();
    for (int k = 0; k < 2 * n; ++k) v[static_cast<std::size_t>(k)] = -M_PI + (k + 0.5) * dt;
    return v;
}

std::vector<Frequency> SamplingPlan::frequencies() const {
    const auto a = axis();
    std::vector<Frequency> out;
    out.reserve(a.size() * a.size());
    for (double t2 : a)
        for (double t1 : a) out.push_back({t1, t2});
    return out;
}

std::vector<FoldedFrequency> fold_dihedral(const SamplingPlan& plan) {
    // Axis index k negates to 2n-1-k, so orbits can be tracked on index pairs.
    const int m = 2 * plan.n;
    const auto a = plan.axis();
    std::map<std::pair<int, int>, int> orbit_count;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            int ci = std::min(i, m - 1 - i);
            int cj = std::min(j, m - 1 - j);
            if (ci > cj) std::swap(ci, cj);
            ++orbit_count[{ci, cj}];
        }
    }
    std::vector<FoldedFrequency> out;
    out.reserve(orbit_count.size());
    for (const auto& [key, count] : orbit_count)
        out.push_back({{a[static_cast<std::size_t>(key.first)], a[static_cast<std::size_t>(key.second)]}, count});
    return out;
}

std::vector<FoldedFrequency> unfolded(const SamplingPlan& plan) {
    std::vector<FoldedFrequency> out;
    for (const auto& th : plan.frequencies()) out.push_back({th, 1});
    return out;
}

}  // namespace bddclfa
