#pragma once

#include <vector>

#include "bddclfa/preconditioner.hpp"

namespace bddclfa {

/// How eigenvalues are aggregated: real-mode kappa for variants with provably
/// real spectra, magnitude ratio otherwise.
enum class SpectrumMode { real, magnitude };

enum class SweepEngine { automatic, dense, krylov };

/// Per-frequency failure, reported with the offending theta.
class SweepError : public std::runtime_error {
  public:
    SweepError(const std::string& what, const Frequency& th) : std::runtime_error(what), theta(th) {}
    Frequency theta;
};

struct ThetaSpectrum {
    Frequency theta;
    int multiplicity = 1;
    std::vector<Complex> eigenvalues;  // empty when only extremes were computed
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double abs_min = 0.0;
    double abs_max = 0.0;
    double max_imag = 0.0;
};

struct Histogram {
    double bin_width = 0.1;
    double lo = 0.0;  // left edge of the first bin
    std::vector<std::size_t> counts;
    std::vector<double> densities() const;
    std::size_t total() const;
};

/// Aggregated eigenvalue data of one preconditioned operator over a sweep.
struct SpectrumReport {
    SpectrumMode mode = SpectrumMode::real;
    int p = 2;
    int sample_n = 2;
    PreconditionerSpec spec;
    bool full = false;  // eigenvalues retained per frequency
    std::vector<ThetaSpectrum> per_theta;

    std::size_t total_count() const;
    double lambda_min() const;
    double lambda_max() const;
    double abs_min() const;
    double abs_max() const;
    double max_imag() const;
    /// lambda_max / lambda_min (real mode).
    double kappa() const;
    /// max|lambda| / min|lambda|.
    double ratio() const;
    /// Optimization objective: kappa when real-mode and positive, +inf when
    /// the spectrum leaves the positive axis, magnitude ratio otherwise.
    double objective() const;

    /// Real-mode density histogram; bins of the given width starting at
    /// min(0, lambda_min).  Throws std::logic_error in magnitude mode.
    Histogram histogram(double bin_width = 0.1) const;
};

struct SweepOptions {
    int threads = 0;           // 0 = hardware concurrency
    bool fold = true;          // use the dihedral frequency symmetry
    bool full_spectrum = false;
    SweepEngine engine = SweepEngine::automatic;
    /// dense-symbol dimension above which plain sweeps switch to Krylov
    Eigen::Index krylov_threshold = 200;
};

/// Sweep all sampled frequencies for one operator.
SpectrumReport sweep(const Stencil9& s, int p, const PreconditionerSpec& spec, const SamplingPlan& plan,
                     const SweepOptions& opt = {});

/// Evaluate many weight settings sharing (i, j, mode) in a single pass over
/// the frequency grid, reusing per-frequency factorizations.
std::vector<SpectrumReport> sweep_weights(const Stencil9& s, int p,
                                          const std::vector<PreconditionerSpec>& specs,
                                          const SamplingPlan& plan, const SweepOptions& opt = {});

/// Condition-number bounds: Upsilon_1 = p (1 + ln p), Upsilon_2 = (1 + ln p)^2.
double upsilon(int variant, int p);

enum class BoundKind { upsilon1, upsilon2, product };

/// Fitted constant: kappa divided by the named bound at H/h = p (natural log).
double fit_constant(double kappa, int p, BoundKind kind, int i = 1, int j = 1);

}  // namespace bddclfa
