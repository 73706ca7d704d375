#include <cmath>

#include "bddclfa/spectrum.hpp"
#include "doctest.h"

using namespace bddclfa;

namespace {
const Stencil9 q1 = Stencil9::q1_laplacian();

PreconditionerSpec plain(int i, int j = 0) {
    PreconditionerSpec sp;
    sp.fine_variant = i;
    sp.coarse_variant = j;
    return sp;
}
}  // namespace

TEST_CASE("sampling plan layout") {
    CHECK_THROWS_AS(SamplingPlan(0), std::invalid_argument);
    const SamplingPlan plan(4);
    const auto f = plan.frequencies();
    CHECK(f.size() == 64);
    for (const auto& th : f) {
        CHECK(std::abs(th.t1) > 1e-12);
        CHECK(th.t1 >= -M_PI);
        CHECK(th.t1 < M_PI);
    }
    // folding covers the grid with the right multiplicity
    std::size_t total = 0;
    for (const auto& ff : fold_dihedral(plan)) total += static_cast<std::size_t>(ff.multiplicity);
    CHECK(total == 64);
}

TEST_CASE("two-level sweep reproduces coarse-sampling table entries") {
    const SamplingPlan plan(2);
    const SpectrumReport r1 = sweep(q1, 4, plain(1), plan);
    CHECK(r1.kappa() == doctest::Approx(4.14).epsilon(0.005));
    CHECK(r1.lambda_min() == doctest::Approx(1.0).epsilon(1e-8));
    const SpectrumReport r2 = sweep(q1, 4, plain(2), plan);
    CHECK(r2.kappa() == doctest::Approx(2.23).epsilon(0.005));
}

TEST_CASE("folding and thread count do not change the report") {
    const SamplingPlan plan(2);
    SweepOptions a;
    a.fold = true;
    a.threads = 2;
    SweepOptions b;
    b.fold = false;
    b.threads = 1;
    const double ka = sweep(q1, 4, plain(1), plan, a).kappa();
    const double kb = sweep(q1, 4, plain(1), plan, b).kappa();
    CHECK(ka == doctest::Approx(kb).epsilon(1e-12));
}

TEST_CASE("krylov engine matches the dense engine") {
    const SamplingPlan plan(2);
    SweepOptions dense;
    dense.engine = SweepEngine::dense;
    SweepOptions krylov;
    krylov.engine = SweepEngine::krylov;
    for (int i : {1, 2}) {
        const double kd = sweep(q1, 8, plain(i), plan, dense).kappa();
        const double kk = sweep(q1, 8, plain(i), plan, krylov).kappa();
        CHECK(kd == doctest::Approx(kk).epsilon(1e-8));
    }
}

TEST_CASE("histogram counting") {
    SpectrumReport rep;
    rep.mode = SpectrumMode::real;
    rep.full = true;
    rep.p = 2;
    ThetaSpectrum ts;
    ts.multiplicity = 3;
    ts.eigenvalues = {Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(1.04, 0.0)};
    ts.lambda_min = 1.0;
    ts.lambda_max = 1.04;
    rep.per_theta.push_back(ts);
    const Histogram h = rep.histogram(0.1);
    CHECK(h.total() == 9);
    // every value sits in the single bin [1.0, 1.1)
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        if (h.counts[i] > 0) {
            ++nonzero;
            CHECK(h.counts[i] == 9);
            CHECK(h.lo + h.bin_width * static_cast<double>(i) == doctest::Approx(1.0));
        }
    CHECK(nonzero == 1);
    CHECK(h.densities()[10] == doctest::Approx(90.0));

    rep.mode = SpectrumMode::magnitude;
    CHECK_THROWS_AS(rep.histogram(0.1), std::logic_error);
}

TEST_CASE("full sweep count matches block size times frequencies") {
    const SamplingPlan plan(2);
    SweepOptions opt;
    opt.full_spectrum = true;
    const SpectrumReport r = sweep(q1, 4, plain(1), plan, opt);
    CHECK(r.total_count() == 16 * 16);  // (2n)^2 frequencies x p^2 eigenvalues
}

TEST_CASE("fitted constants use the natural logarithm") {
    CHECK(fit_constant(4.44, 4, BoundKind::upsilon1) == doctest::Approx(0.47).epsilon(0.011));
    CHECK(fit_constant(2.35, 4, BoundKind::upsilon2) == doctest::Approx(0.41).epsilon(0.011));
    CHECK(fit_constant(upsilon(1, 8), 8, BoundKind::upsilon1) == doctest::Approx(1.0));
    CHECK(fit_constant(9.83, 4, BoundKind::product, 1, 1) == doctest::Approx(0.11).epsilon(0.05));
}
