#include <algorithm>

#include "bddclfa/oracle.hpp"
#include "doctest.h"

using namespace bddclfa;

namespace {
const Stencil9 q1 = Stencil9::q1_laplacian();

PreconditionerSpec make_spec(int i, int j = 0, MultMode mode = MultMode::none, double om = 0.0) {
    PreconditionerSpec sp;
    sp.fine_variant = i;
    sp.coarse_variant = j;
    sp.mult = mode;
    sp.omega = om;
    return sp;
}
}  // namespace

TEST_CASE("assembly counts and null space") {
    CHECK_THROWS_AS(AssembledSystem(q1, 2, 64), std::invalid_argument);  // beyond desk scale
    const AssembledSystem sys(q1, 2, 2);
    CHECK(sys.n_fine() == 16);
    CHECK(sys.n_broken() == 24);  // 4 * ((3^2) - 3)

    RealVector ones = RealVector::Ones(sys.n_fine()), y;
    sys.apply_a(ones, y);
    CHECK(y.cwiseAbs().maxCoeff() < 1e-13);

    const RealMatrix A = sys.dense_a();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-14);

    const RealMatrix Ahat = sys.dense_ahat();
    CHECK((Ahat - Ahat.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((Ahat * RealVector::Ones(sys.n_broken())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("partition of unity of the scaled injection") {
    const AssembledSystem sys(q1, 4, 4);
    const RealMatrix R1 = sys.dense_r1();
    const RealVector rowsum = R1.transpose() * RealVector::Ones(sys.n_broken());
    // R1^T gathers every fine dof with total weight one
    CHECK((rowsum.array() - 1.0).abs().maxCoeff() < 1e-13);
}

TEST_CASE("coarse operator equals the assembled schur stencil on the torus") {
    const AssembledSystem sys(q1, 2, 4);
    const SchurStencilCoeffs sc = schur_stencil(q1, 2);
    const AssembledSystem coarse_direct(sc.assembled(), 2, 2);  // same 4x4 coarse torus
    CHECK((sys.schur() - coarse_direct.dense_a()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("finite spectra match the lfa harmonic unions") {
    for (const auto& [p, m] : std::vector<std::pair<int, int>>{{2, 2}, {2, 4}, {4, 4}}) {
        const AssembledSystem sys(q1, p, m);
        for (const auto& spec :
             {make_spec(1), make_spec(2), make_spec(1, 0, MultMode::fine, 1.4),
              make_spec(2, 0, MultMode::fine, 1.4)}) {
            const MatchReport rep = spectra_match(sys, spec);
            INFO("p=", p, " m=", m, " spec=", spec.label());
            CHECK(rep.max_deviation <= 1e-8);
            CHECK(rep.n_compared > 0);
        }
    }
}

TEST_CASE("finite eigenvalues after deflation satisfy the lower bound") {
    const AssembledSystem sys(q1, 4, 4);
    for (int i : {1, 2}) {
        const MatchReport rep = spectra_match(sys, make_spec(i));
        CHECK(rep.finite_min >= 1.0 - 1e-8);
    }
}

TEST_CASE("three-level finite spectra match the lfa union") {
    const AssembledSystem sys(q1, 2, 4);
    const MatchReport rep = spectra_match(sys, make_spec(1, 1), 1e-6);
    CHECK(rep.max_deviation <= 1e-6);
}

TEST_CASE("ritz determinism and krylov exactness") {
    const AssembledSystem sys(q1, 2, 2);
    const RitzResult a = ritz_estimate(sys, make_spec(1), 50, 1e-12, 77);
    const RitzResult b = ritz_estimate(sys, make_spec(1), 50, 1e-12, 77);
    REQUIRE(a.ritz.size() == b.ritz.size());
    for (std::size_t k = 0; k < a.ritz.size(); ++k) CHECK(a.ritz[k] == b.ritz[k]);  // bit-identical

    // full-dimension Krylov space reproduces the exact nonzero spectrum
    const MatchReport exact = spectra_match(sys, make_spec(1));
    const RitzResult full = ritz_estimate(sys, make_spec(1), 16, 1e-14, 3);
    CHECK(full.ratio == doctest::Approx(exact.finite_kappa).epsilon(1e-6));
}

TEST_CASE("ritz estimate tracks the dense ratio at moderate size") {
    const AssembledSystem sys(q1, 4, 4);
    const PreconditionerSpec spec = make_spec(1, 0, MultMode::fine, 1.4);
    const MatchReport dense = spectra_match(sys, spec);
    const RitzResult ritz = ritz_estimate(sys, spec, 50, 1e-12, 1234);
    CHECK(ritz.ratio == doctest::Approx(dense.finite_kappa).epsilon(0.02));
}
