#include <algorithm>

#include "bddclfa/preconditioner.hpp"
#include "doctest.h"

using namespace bddclfa;

namespace {
const Stencil9 q1 = Stencil9::q1_laplacian();

std::vector<double> sorted_real_parts(const ComplexVector& ev, double* max_imag = nullptr) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        out.push_back(ev[i].real());
        if (max_imag) *max_imag = std::max(*max_imag, std::abs(ev[i].imag()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> sorted_abs(const ComplexVector& ev) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) out.push_back(std::abs(ev[i]));
    std::sort(out.begin(), out.end());
    return out;
}

PreconditionerSpec plain(int i, int j = 0) {
    PreconditionerSpec sp;
    sp.fine_variant = i;
    sp.coarse_variant = j;
    return sp;
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(plain(3).validate(), std::invalid_argument);
    PreconditionerSpec sp = plain(1, 0);
    sp.mult = MultMode::coarse;
    sp.omega = 1.0;
    CHECK_THROWS_AS(sp.validate(), std::invalid_argument);  // coarse wrap needs j in {1,2}
    sp.coarse_variant = 1;
    CHECK_NOTHROW(sp.validate());
    sp.mult = MultMode::fine;
    sp.omega = 0.0;
    CHECK_THROWS_AS(sp.validate(), std::invalid_argument);
}

TEST_CASE("two-level spectra are real and bounded below by one") {
    for (int i : {1, 2}) {
        for (const Frequency th : {Frequency{0.9, 0.4}, Frequency{-2.2, 2.8}, Frequency{0.05, -0.03}}) {
            const OperatorSymbol g = two_level_symbol(q1, 2, th, plain(i));
            double mi = 0.0;
            const auto ev = sorted_real_parts(eig(g.g).eigenvalues, &mi);
            CHECK(mi <= 1e-8 * std::abs(ev.back()));
            CHECK(ev.front() >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("fine-wrap pencil equals explicit eigenvalues") {
    for (int i : {1, 2}) {
        for (double om : {0.0, 0.7, 1.4, 2.6}) {
            const Frequency th{1.3, -0.8};
            const int p = 4;
            const SymbolMatrix A = fine_symbol(q1, p, th);
            const ComplexMatrix minv = two_level_minv(q1, p, th, i);
            FineWrapPencil pencil(minv, A.m, q1.center());
            const RealVector fast = pencil.eigenvalues(om);

            ComplexMatrix g = minv * A.m;
            if (om > 0) g = multiplicative_fine(g, A.m, q1.center(), om);
            double mi = 0.0;
            const auto slow = sorted_real_parts(eig(g).eigenvalues, &mi);
            CHECK(mi <= 1e-8 * std::abs(slow.back()));
            RealVector f = fast;
            std::sort(f.data(), f.data() + f.size());
            for (Eigen::Index k = 0; k < f.size(); ++k)
                CHECK(f[k] == doctest::Approx(slow[static_cast<std::size_t>(k)]).epsilon(1e-8));
        }
    }
}

TEST_CASE("multiplicative fine wrap with zero weight is the identity map") {
    const Frequency th{0.4, 0.9};
    const OperatorSymbol g = two_level_symbol(q1, 2, th, plain(1));
    const SymbolMatrix A = fine_symbol(q1, 2, th);
    CHECK((multiplicative_fine(g.g, A.m, q1.center(), 0.0) - g.g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("krylov extremes agree with dense spectra") {
    for (int i : {1, 2}) {
        const Frequency th{0.77, -1.21};
        const OperatorSymbol g = two_level_symbol(q1, 8, th, plain(i));
        const auto ev = sorted_real_parts(eig(g.g).eigenvalues);
        const SpectrumExtremes ex = plain_extremes_krylov(q1, 8, th, plain(i));
        CHECK(ex.lambda_min == doctest::Approx(ev.front()).epsilon(1e-8));
        CHECK(ex.lambda_max == doctest::Approx(ev.back()).epsilon(1e-8));
    }
    // three-level
    const Frequency th{2.0, 0.6};
    const PreconditionerSpec sp = plain(1, 1);
    const OperatorSymbol g3 = three_level_symbol(q1, 2, th, sp);
    const auto ev3 = sorted_real_parts(eig(g3.g).eigenvalues);
    const SpectrumExtremes ex3 = plain_extremes_krylov(q1, 2, th, sp);
    CHECK(ex3.lambda_min == doctest::Approx(ev3.front()).epsilon(1e-8));
    CHECK(ex3.lambda_max == doctest::Approx(ev3.back()).epsilon(1e-8));
}

TEST_CASE("three-level with exact coarse solve equals the two-level harmonic union") {
    for (int i : {1, 2}) {
        for (int p : {2, 4}) {
            const Frequency th{0.8, -0.5};
            const OperatorSymbol g3 = three_level_symbol(q1, p, th, plain(i, 0));
            auto got = sorted_real_parts(eig(g3.g).eigenvalues);
            std::vector<double> want;
            for (int b = 0; b < p; ++b) {
                for (int a = 0; a < p; ++a) {
                    const Frequency t2 =
                        wrap_frequency({(th.t1 + 2 * M_PI * a) / p, (th.t2 + 2 * M_PI * b) / p});
                    const OperatorSymbol g2 = two_level_symbol(q1, p, t2, plain(i));
                    for (double v : sorted_real_parts(eig(g2.g).eigenvalues)) want.push_back(v);
                }
            }
            std::sort(want.begin(), want.end());
            REQUIRE(got.size() == want.size());
            for (std::size_t k = 0; k < got.size(); ++k)
                CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-8));
        }
    }
}

TEST_CASE("three-level spectra are real and bounded below by one") {
    for (int i : {1, 2}) {
        for (int j : {1, 2}) {
            PreconditionerSpec sp = plain(i, j);
            const OperatorSymbol g = three_level_symbol(q1, 2, {1.9, -2.3}, sp);
            double mi = 0.0;
            const auto ev = sorted_real_parts(eig(g.g).eigenvalues, &mi);
            CHECK(mi <= 1e-8 * std::abs(ev.back()));
            CHECK(ev.front() >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("coarse preconditioner block") {
    const SchurStencilCoeffs sc = schur_stencil(q1, 4);
    const Frequency th{0.9, 1.7};
    const ComplexMatrix p0 = coarse_preconditioner_symbol(sc, 4, th, 0);
    CHECK((p0 - ComplexMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
    for (int j : {1, 2}) {
        const ComplexMatrix pj = coarse_preconditioner_symbol(sc, 4, th, j);
        double mi = 0.0;
        const auto ev = sorted_real_parts(eig(pj).eigenvalues, &mi);
        CHECK(mi <= 1e-8 * std::abs(ev.back()));
        CHECK(ev.front() >= 1.0 - 1e-8);
    }
}

TEST_CASE("coarse wraps reduce to the plain operator at zero weight") {
    const Frequency th{-1.4, 0.3};
    const int p = 2;
    const OperatorSymbol base = three_level_symbol(q1, p, th, plain(1, 1));
    PreconditionerSpec spc = plain(1, 1);
    spc.mult = MultMode::coarse;
    spc.omega = 1e-300;  // validation requires > 0; the limit case
    OperatorSymbol gc = three_level_symbol(q1, p, th, spc);
    CHECK((gc.g - base.g).cwiseAbs().maxCoeff() < 1e-10);

    // fc with omega2 -> 0 reduces to the coarse-wrapped operator
    PreconditionerSpec spfc = plain(1, 1);
    spfc.mult = MultMode::fine_coarse;
    spfc.omega1 = 1.3;
    spfc.omega2 = 1e-300;
    PreconditionerSpec spc2 = plain(1, 1);
    spc2.mult = MultMode::coarse;
    spc2.omega = 1.3;
    const OperatorSymbol a = three_level_symbol(q1, p, th, spfc);
    const OperatorSymbol b = three_level_symbol(q1, p, th, spc2);
    CHECK((a.g - b.g).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("symmetrized coarse wrap with equal weights has a near-real spectrum") {
    PreconditionerSpec sp = plain(2, 2);
    sp.mult = MultMode::sym_coarse;
    sp.omega1 = sp.omega2 = 1.1;
    const OperatorSymbol g = three_level_symbol(q1, 2, {0.9, -2.0}, sp);
    const auto ev = eig(g.g).eigenvalues;
    double mi = 0.0, ma = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        mi = std::max(mi, std::abs(ev[k].imag()));
        ma = std::max(ma, std::abs(ev[k]));
    }
    CHECK(mi <= 1e-6 * ma);
}

TEST_CASE("spectra are invariant under frequency reflection and swap") {
    // justifies the dihedral folding used by sweeps
    const Frequency th{0.83, -0.47};
    auto spectra = [&](const PreconditionerSpec& sp, const Frequency& t) {
        const OperatorSymbol g = operator_symbol(q1, 2, t, sp);
        return sorted_abs(eig(g.g).eigenvalues);
    };
    std::vector<PreconditionerSpec> specs{plain(1), plain(2), plain(1, 1)};
    PreconditionerSpec c = plain(1, 1);
    c.mult = MultMode::coarse;
    c.omega = 1.4;
    specs.push_back(c);
    PreconditionerSpec f = plain(1);
    f.mult = MultMode::fine;
    f.omega = 1.2;
    specs.push_back(f);
    for (const auto& sp : specs) {
        const auto ref = spectra(sp, th);
        for (const Frequency t :
             {Frequency{-th.t1, th.t2}, Frequency{th.t1, -th.t2}, Frequency{th.t2, th.t1},
              Frequency{-th.t2, -th.t1}}) {
            const auto got = spectra(sp, t);
            REQUIRE(got.size() == ref.size());
            for (std::size_t k = 0; k < got.size(); ++k)
                CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-9));
        }
    }
}
