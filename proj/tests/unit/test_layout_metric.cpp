#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "milde/errors.hpp"
#include "milde/layout_metric.hpp"
#include "../support/fixtures.hpp"

using namespace milde;
using testing::rect_mask;

TEST_CASE("position_consistency closed forms") {
    const Mask a = rect_mask(10, 10, Rect{2, 3, 4, 4});
    CHECK(position_consistency(a, a, 10, 10) == doctest::Approx(1.0).epsilon(1e-12));

    // single pixels at opposite corners of a 10x10 canvas
    Mask c0(10, 10), c1(10, 10);
    c0.set(0, 0, true);
    c1.set(9, 9, true);
    CHECK(position_consistency(c0, c1, 10, 10) ==
          doctest::Approx(1.0 - std::sqrt(162.0) / std::sqrt(200.0)).epsilon(1e-12));

    // (3,4) shift on a 100x100 canvas: displacement 5, diagonal sqrt(20000)
    const Mask base = rect_mask(100, 100, Rect{10, 10, 20, 20});
    const Mask shifted = rect_mask(100, 100, Rect{13, 14, 20, 20});
    CHECK(position_consistency(base, shifted, 100, 100) ==
          doctest::Approx(1.0 - 5.0 / std::sqrt(20000.0)).epsilon(1e-12));

    CHECK_THROWS_AS(position_consistency(Mask(10, 10), c1, 10, 10), PreconditionError);
}

TEST_CASE("area_consistency ratios") {
    const Mask a = rect_mask(10, 10, Rect{0, 0, 4, 5}); // 20 px
    const Mask b = rect_mask(10, 10, Rect{0, 0, 8, 5}); // 40 px
    CHECK(area_consistency(a, a) == 1.0);
    CHECK(area_consistency(a, b) == doctest::Approx(0.5).epsilon(1e-12));

    const Mask seven = rect_mask(10, 10, Rect{0, 0, 7, 1});
    const Mask three = rect_mask(10, 10, Rect{0, 0, 3, 1});
    CHECK(area_consistency(seven, three) == doctest::Approx(3.0 / 7.0).epsilon(1e-12));

    CHECK_THROWS_AS(area_consistency(Mask(10, 10), Mask(10, 10)), PreconditionError);
}

TEST_CASE("layout_consistency: identical mask sets score the positive-weight sum") {
    std::vector<Mask> masks = {rect_mask(40, 30, Rect{0, 0, 10, 10}),
                               rect_mask(40, 30, Rect{20, 5, 8, 12}),
                               rect_mask(40, 30, Rect{5, 20, 20, 6})};
    const LayoutReport report = layout_consistency(masks, masks);
    CHECK(report.match_rate == 1.0);
    CHECK(report.penalty_disappeared == 0.0);
    CHECK(report.penalty_new == 0.0);
    CHECK(report.score == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(report.score_normalized == doctest::Approx(1.0).epsilon(1e-12));
    for (const MatchedPairDetail& pair : report.matched_pairs) {
        CHECK(pair.c_pos == doctest::Approx(1.0));
        CHECK(pair.c_shape == doctest::Approx(1.0));
        CHECK(pair.c_area == doctest::Approx(1.0));
    }
}

TEST_CASE("layout_consistency: everything deleted clamps at zero") {
    // two originals covering 50% of the canvas in total, nothing on the edited side
    std::vector<Mask> original = {rect_mask(20, 10, Rect{0, 0, 10, 10}),
                                  rect_mask(20, 10, Rect{10, 0, 10, 5})};
    const LayoutReport report = layout_consistency(original, {});
    CHECK(report.match_rate == 0.0);
    CHECK(report.penalty_disappeared == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(report.score == 0.0);
}

TEST_CASE("layout_consistency: below-threshold overlap leaves both sides unmatched") {
    // 10% of the canvas each, far apart so IoU = 0 < 0.05
    std::vector<Mask> original = {rect_mask(100, 10, Rect{0, 0, 10, 10})};
    std::vector<Mask> edited = {rect_mask(100, 10, Rect{50, 0, 10, 10})};
    const LayoutReport report = layout_consistency(original, edited);
    CHECK(report.matched_pairs.empty());
    CHECK(report.penalty_disappeared == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(report.penalty_new == doctest::Approx(0.07).epsilon(1e-12));
    // max(0, -0.15 * (0.1 + 0.07)) clamps to zero
    CHECK(report.score == 0.0);
}

TEST_CASE("layout_consistency: degenerate empty/empty pairs are dropped") {
    std::vector<Mask> original = {Mask(20, 20), rect_mask(20, 20, Rect{0, 0, 10, 10})};
    std::vector<Mask> edited = {Mask(20, 20), rect_mask(20, 20, Rect{0, 0, 10, 10})};
    const LayoutReport report = layout_consistency(original, edited);
    // the empty/empty pair (IoU 1) is excluded; the solid pair matches
    CHECK(report.matched_pairs.size() == 1);
    CHECK(report.match_rate == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.penalty_disappeared == 0.0); // empty masks carry no area
    CHECK(report.penalty_new == 0.0);
}

TEST_CASE("layout_consistency: invariant to edited-mask order") {
    std::mt19937 rng(59);
    std::uniform_int_distribution<int> count(1, 5), coord(0, 20), size(2, 10);
    for (int round = 0; round < 50; ++round) {
        std::vector<Mask> original, edited;
        const int n = count(rng), m = count(rng);
        for (int i = 0; i < n; ++i)
            original.push_back(
                rect_mask(32, 32, Rect{coord(rng), coord(rng), size(rng), size(rng)}));
        for (int j = 0; j < m; ++j)
            edited.push_back(
                rect_mask(32, 32, Rect{coord(rng), coord(rng), size(rng), size(rng)}));

        const double score = layout_consistency(original, edited).score;
        std::shuffle(edited.begin(), edited.end(), rng);
        CHECK(layout_consistency(original, edited).score ==
              doctest::Approx(score).epsilon(1e-12));
    }
}

TEST_CASE("layout_consistency: growing displacement never helps") {
    const std::vector<Mask> original = {rect_mask(50, 50, Rect{5, 5, 10, 10}),
                                        rect_mask(50, 50, Rect{30, 30, 10, 10})};
    double previous = 2.0;
    for (int shift = 0; shift <= 4; ++shift) {
        const std::vector<Mask> edited = {rect_mask(50, 50, Rect{5 + shift, 5, 10, 10}),
                                          rect_mask(50, 50, Rect{30, 30, 10, 10})};
        const double score = layout_consistency(original, edited).score;
        CHECK(score <= previous + 1e-12);
        previous = score;
    }
}

TEST_CASE("layout_consistency: score ceiling and weight validation") {
    LayoutWeights weights;
    weights.w_match = 1.2;
    CHECK_THROWS_AS(weights.validate(), StructuralError);

    std::mt19937 rng(61);
    std::uniform_int_distribution<int> coord(0, 20), size(2, 10);
    for (int round = 0; round < 30; ++round) {
        std::vector<Mask> original = {
            rect_mask(32, 32, Rect{coord(rng), coord(rng), size(rng), size(rng)})};
        std::vector<Mask> edited = {
            rect_mask(32, 32, Rect{coord(rng), coord(rng), size(rng), size(rng)})};
        const double score = layout_consistency(original, edited).score;
        CHECK(score >= 0.0);
        CHECK(score <= 0.85 + 1e-12);
    }
}

TEST_CASE("layout_consistency document overload uses per-layer alpha masks") {
    using testing::solid_layer;
    std::vector<Layer> layers = {
        solid_layer("a", 0, LayerKind::image, 20, 20, Rect{0, 0, 8, 8}, Rgba{1, 2, 3, 255}),
        solid_layer("b", 1, LayerKind::text, 20, 20, Rect{10, 10, 6, 6}, Rgba{4, 5, 6, 255})};
    const Document doc(20, 20, std::move(layers));

    std::vector<Mask> edited;
    for (const Layer& layer : doc.layers()) edited.push_back(alpha_mask(layer, 0.5));

    const LayoutReport report = layout_consistency(doc, edited);
    CHECK(report.score == doctest::Approx(0.85).epsilon(1e-12));
    REQUIRE(report.matched_pairs.size() == 2);
    CHECK(report.matched_pairs[0].original_id == "a");
    CHECK(report.matched_pairs[1].original_id == "b");
}
