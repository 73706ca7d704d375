#pragma once

#include <vector>

namespace bddclfa {

/// A Fourier frequency theta = (t1, t2) with components in [-pi, pi).
struct Frequency {
    double t1 = 0.0;
    double t2 = 0.0;

    bool is_zero(double tol = 0.0) const;
};

/// Wrap an angle into the principal interval [-pi, pi).
double wrap_angle(double t);
Frequency wrap_frequency(const Frequency& th);

/// The p^2 harmonics theta^{(q,r)} = (theta + 2*pi*(q,r)) / p of a coarse
/// frequency theta under coarsening by factor p.  Harmonic (q,r) is stored
/// at index r*p + q, matching the column convention of dft_matrix().
struct HarmonicGrid {
    Frequency base;     // theta^{(0,0)} = theta / p, in T^low
    int p = 2;

    HarmonicGrid(const Frequency& coarse_theta, int period);
    Frequency member(int q, int r) const;
    std::vector<Frequency> members() const;
};

/// Frequency sampling of [-pi, pi)^2 at 2n points per axis, offset by half a
/// step so the singular zero frequency is never sampled.
struct SamplingPlan {
    int n = 2;          // half-resolution; step is pi/n

    explicit SamplingPlan(int half_resolution);
    double step() const;
    std::vector<double> axis() const;            // 2n values
    std::vector<Frequency> frequencies() const;  // (2n)^2 pairs, row-major
};

/// One representative frequency of a symmetry orbit together with the orbit
/// size.  The spectra of all operators built here are invariant under
/// negation and swap of the frequency components, so a sweep may evaluate
/// canonical representatives only and weight counts by multiplicity.
struct FoldedFrequency {
    Frequency theta;
    int multiplicity = 1;
};

/// Fold the sampling grid by the dihedral symmetry group of the square
/// (sign flips and component swap).  Multiplicities sum to (2n)^2.
std::vector<FoldedFrequency> fold_dihedral(const SamplingPlan& plan);

/// Unfolded plan wrapped in the same interface (multiplicity 1 everywhere).
std::vector<FoldedFrequency> unfolded(const SamplingPlan& plan);

}  // namespace bddclfa
