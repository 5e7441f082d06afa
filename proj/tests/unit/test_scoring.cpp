#include <doctest.h>

#include <cmath>
#include <random>

#include "milde/errors.hpp"
#include "milde/scoring.hpp"
#include "../support/oracles.hpp"

using namespace milde;

TEST_CASE("gate endpoints are exact and the interior is strictly increasing") {
    for (const double tau : {0.1, 0.3, 0.5, 0.9}) {
        for (const double k : {0.5, 1.0, 10.0, 100.0}) {
            CHECK(std::abs(gate(0.0, tau, k)) <= 1e-12);
            CHECK(std::abs(gate(1.0, tau, k) - 1.0) <= 1e-12);
        }
    }
    double previous = gate(0.0, 0.3, 10.0);
    for (int i = 1; i <= 1000; ++i) {
        const double value = gate(i / 1000.0, 0.3, 10.0);
        CHECK(value > previous);
        previous = value;
    }
}

TEST_CASE("gate interior value against a high-precision evaluation") {
    // sigma(10*(0.2546-0.3)) etc., evaluated independently and frozen
    CHECK(gate(0.2546, 0.3, 10.0) == doctest::Approx(0.3583035716467062).epsilon(1e-9));
}

TEST_CASE("milde_score reproduces the published composite scores") {
    const MildeWeights w;
    // closed-source rows
    CHECK(std::abs(100.0 * milde_score({25.46, 36.24, 39.67, 4.66}, w) - 25.60) < 0.05);
    CHECK(std::abs(100.0 * milde_score({24.04, 58.42, 40.32, 4.52}, w) - 27.10) < 0.05);
    // agent rows
    CHECK(std::abs(100.0 * milde_score({13.29, 90.15, 27.52, 4.32}, w) - 16.10) < 0.10);
    CHECK(std::abs(100.0 * milde_score({20.71, 93.24, 36.75, 4.19}, w) - 25.90) < 0.10);
}

TEST_CASE("milde_score degenerate and ceiling points") {
    const MildeWeights w;
    // IF=LC=TR=0 with the aesthetics floor: the gate kills every non-core term
    CHECK(milde_score({0, 0, 0, 1.0}, w) == 0.0);
    // all-ones ceiling: 0.3 + 0.3 + g(1)*(0.3 + 0.1) + 0.15*1*1 = 1.15
    CHECK(milde_score({100, 100, 100, 10}, w) == doctest::Approx(1.15).epsilon(1e-12));
}

TEST_CASE("milde_score is monotone in each criterion") {
    const MildeWeights w;
    const RawScores base{40, 50, 30, 5};
    for (double step : {5.0, 20.0, 50.0}) {
        CHECK(milde_score({base.if_pct + step, base.lc_pct, base.tr_pct, base.aes}, w) >=
              milde_score(base, w));
        CHECK(milde_score({base.if_pct, base.lc_pct + step, base.tr_pct, base.aes}, w) >=
              milde_score(base, w));
        CHECK(milde_score({base.if_pct, base.lc_pct, base.tr_pct + step, base.aes}, w) >=
              milde_score(base, w));
    }
    CHECK(milde_score({base.if_pct, base.lc_pct, base.tr_pct, 9.0}, w) >= milde_score(base, w));

    // IF monotonicity on a grid (all other criteria held at the base point)
    double previous = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double value =
            milde_score({static_cast<double>(i), base.lc_pct, base.tr_pct, base.aes}, w);
        CHECK(value >= previous);
        previous = value;
    }
}

TEST_CASE("dw_sum") {
    const MildeWeights w;
    CHECK(dw_sum({100, 100, 100, 10}, w) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dw_sum({0, 0, 0, 0}, w) == 0.0);
    // row #15 inputs, by hand: .3*.2546 + .3*.3967 + .3*.3624 + .1*.466
    CHECK(dw_sum({25.46, 36.24, 39.67, 4.66}, w) == doctest::Approx(0.35071).epsilon(1e-9));
}

TEST_CASE("geo_mean") {
    const MildeWeights w;
    CHECK(geo_mean({100, 100, 100, 10}, w) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(geo_mean({0, 50, 50, 5}, w) == 0.0);
    CHECK(geo_mean({50, 0, 50, 5}, w) == 0.0);
    // equal normalized inputs x come back as x (weights sum to 1)
    CHECK(geo_mean({40, 40, 40, 4}, w) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("hcore_sup") {
    const MildeWeights w;
    CHECK(hcore_sup({100, 100, 100, 10}, w) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hcore_sup({0, 80, 0, 8}, w) == 0.0);
    // core = 1, sup = (0.3*0.5 + 0.1*0.5)/0.4 = 0.5 -> harmonic mean 2/3
    CHECK(hcore_sup({100, 50, 100, 5}, w) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("all four aggregators vanish together at the all-zero point") {
    const MildeWeights w;
    const RawScores zero{0, 0, 0, 0};
    CHECK(milde_score(zero, w) == 0.0);
    CHECK(dw_sum(zero, w) == 0.0);
    CHECK(geo_mean(zero, w) == 0.0);
    CHECK(hcore_sup(zero, w) == 0.0);
}

TEST_CASE("weight validation") {
    MildeWeights w;
    w.w_if = 0.5; // sum now 1.2
    CHECK_THROWS_AS(w.validate(), PreconditionError);
    w = MildeWeights{};
    w.k = 0.0;
    CHECK_THROWS_AS(w.validate(), PreconditionError);
    w = MildeWeights{};
    w.tau = 1.0;
    CHECK_THROWS_AS(w.validate(), PreconditionError);

    CHECK_THROWS_AS(milde_score({120, 0, 0, 5}, MildeWeights{}), PreconditionError);
    CHECK_THROWS_AS(milde_score({0, 0, 0, 11}, MildeWeights{}), PreconditionError);
}

TEST_CASE("spearman basics and tie handling") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spearman({1, 2, 3, 4}, {40, 30, 20, 10}) == doctest::Approx(-1.0).epsilon(1e-12));

    // ties get average ranks; value cross-checked with an independent
    // rank-then-Pearson computation
    const std::vector<double> a{1, 2, 2, 3}, b{1, 3, 2, 4};
    CHECK(spearman(a, b) == doctest::Approx(oracle::rank_correlation(a, b)).epsilon(1e-12));
    CHECK(spearman(a, b) == doctest::Approx(0.9486832980505138).epsilon(1e-9));

    CHECK_THROWS_AS(spearman({1, 2}, {1}), PreconditionError);
    CHECK_THROWS_AS(spearman({1}, {1}), PreconditionError);
    CHECK_THROWS_AS(spearman({2, 2, 2}, {1, 2, 3}), PreconditionError);
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    for (int round = 0; round < 30; ++round) {
        std::vector<double> a(12), b(12);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = value(rng);
            b[i] = value(rng);
        }
        const double base = spearman(a, b);

        std::vector<double> ta = a, tb = b;
        for (double& v : ta) v = std::exp(v);
        for (double& v : tb) v = v * v * v + 2.0 * v; // strictly increasing
        CHECK(spearman(ta, tb) == doctest::Approx(base).epsilon(1e-12));
    }
}
