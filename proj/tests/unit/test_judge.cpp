#include <doctest.h>

#include <thread>

#include "milde/errors.hpp"
#include "milde/judge.hpp"
#include "../support/fixtures.hpp"

using namespace milde;
using testing::make_fixture_instance;
using testing::solid_layer;

namespace {

Raster any_image() { return Raster(8, 8, Rgba{1, 2, 3, 255}); }

} // namespace

TEST_CASE("backend validation") {
    JudgeBackend remote;
    remote.kind = BackendKind::remote_http;
    CHECK_THROWS_AS(JudgeClient{remote}, PreconditionError); // endpoint missing

    JudgeBackend bad;
    bad.max_in_flight = 0;
    CHECK_THROWS_AS(JudgeClient{bad}, PreconditionError);
}

TEST_CASE("binary verdicts normalize case and punctuation") {
    JudgeScript script;
    script.binary["q1"] = "yes";
    script.binary["q2"] = "Yes.";
    script.binary["q3"] = "NO";
    script.binary["q4"] = "maybe";
    JudgeClient judge(JudgeBackend{}, script);

    CHECK(judge.answer_binary(any_image(), "q1").yes);
    CHECK(judge.answer_binary(any_image(), "q2").yes);
    CHECK_FALSE(judge.answer_binary(any_image(), "q3").yes);
    CHECK_FALSE(judge.answer_binary(any_image(), "unknown question").yes); // default "no"

    CHECK_THROWS_AS(judge.answer_binary(any_image(), "q4"), ProtocolError);
    try {
        judge.answer_binary(any_image(), "q4");
    } catch (const ProtocolError& e) {
        CHECK(e.raw_response() == "maybe"); // raw response survives the error
    }
}

TEST_CASE("tristate verdicts") {
    JudgeScript script;
    script.ocr["0,0,4,4"] = "1";
    script.ocr["4,0,4,4"] = "0.5";
    script.ocr["0,4,4,4"] = "0";
    script.ocr["4,4,4,4"] = "0.7";
    JudgeClient judge(JudgeBackend{}, script);

    CHECK(judge.ocr_and_verify(any_image(), Rect{0, 0, 4, 4}, "i").number == 1.0);
    CHECK(judge.ocr_and_verify(any_image(), Rect{4, 0, 4, 4}, "i").number == 0.5);
    CHECK(judge.ocr_and_verify(any_image(), Rect{0, 4, 4, 4}, "i").number == 0.0);
    CHECK_THROWS_AS(judge.ocr_and_verify(any_image(), Rect{4, 4, 4, 4}, "i"), ProtocolError);
    CHECK_THROWS_AS(judge.ocr_and_verify(any_image(), Rect{5, 5, 10, 10}, "i"),
                    PreconditionError);
}

TEST_CASE("aesthetics clamps out-of-range scores") {
    {
        JudgeScript script;
        script.aesthetics = "4.5";
        JudgeClient judge(JudgeBackend{}, script);
        const Verdict v = judge.aesthetics(any_image());
        CHECK(v.number == 4.5);
        CHECK_FALSE(v.clamped);
    }
    {
        JudgeScript script;
        script.aesthetics = "12.3";
        JudgeClient judge(JudgeBackend{}, script);
        const Verdict v = judge.aesthetics(any_image());
        CHECK(v.number == 10.0);
        CHECK(v.clamped);
    }
    {
        JudgeScript script;
        script.aesthetics = "gorgeous";
        JudgeClient judge(JudgeBackend{}, script);
        CHECK_THROWS_AS(judge.aesthetics(any_image()), ProtocolError);
    }
}

TEST_CASE("layer classification") {
    JudgeScript script;
    script.kinds["a"] = "decoration";
    script.kinds["weird"] = "sculpture";
    JudgeClient judge(JudgeBackend{}, script);

    const Layer a = solid_layer("a", 0, LayerKind::image, 4, 4, Rect{0, 0, 2, 2}, Rgba{1, 1, 1, 255});
    CHECK(judge.classify_layer(a).label == LayerKind::decoration);

    // unscripted ids echo the layer's kind; an empty layer is still classified
    const Layer empty = solid_layer("empty", 1, LayerKind::text, 4, 4, Rect{}, Rgba{});
    CHECK(judge.classify_layer(empty).label == LayerKind::text);

    const Layer weird = solid_layer("weird", 2, LayerKind::image, 4, 4, Rect{}, Rgba{});
    CHECK_THROWS_AS(judge.classify_layer(weird), ProtocolError);
}

TEST_CASE("step classification and applicability") {
    JudgeScript script;
    script.steps["recolor the title"] = "text";
    script.steps["swap the photo"] = "image";
    script.steps["confusing"] = "both";
    script.applies["s\x1f" "L"] = "yes";
    JudgeClient judge(JudgeBackend{}, script);

    CHECK(judge.classify_step("recolor the title") == StepCategory::text_edit);
    CHECK(judge.classify_step("swap the photo") == StepCategory::image_edit);
    CHECK(judge.classify_step("anything else") == StepCategory::image_edit); // default
    CHECK_THROWS_AS(judge.classify_step("confusing"), ProtocolError);

    const Layer layer = solid_layer("L", 0, LayerKind::text, 4, 4, Rect{}, Rgba{});
    CHECK(judge.step_applies("s", layer).yes);
    CHECK_FALSE(judge.step_applies("t", layer).yes); // default "no"
}

TEST_CASE("generate_qa: precomputed pairs pass through verbatim") {
    const auto fixture = make_fixture_instance("inst-1");
    JudgeClient judge(JudgeBackend{});
    const std::vector<QAPair> pairs = judge.generate_qa(fixture.instance);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].question == "Has the title been changed to 'Winter Camp'?");
    CHECK(pairs[0].expected_yes);
    CHECK(judge.calls() == 0); // no backend call on the precomputed path
}

TEST_CASE("generate_qa: one scripted pair per gold layer") {
    auto fixture = make_fixture_instance("inst-1");
    fixture.instance.qa_pairs.reset();
    fixture.instance.gold_relevant = {"title", "badge"};
    fixture.instance.gold_layer_instructions = {{"title", "retitle it"},
                                                {"badge", "recolor the badge"}};

    JudgeScript script;
    script.qa["title"] = "yes\nIs the title retitled?";
    script.qa["badge"] = "no\nIs the badge unchanged?";
    JudgeClient judge(JudgeBackend{}, script);

    const std::vector<QAPair> pairs = judge.generate_qa(fixture.instance);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].target_layer == "title"); // document z order
    CHECK(pairs[0].expected_yes);
    CHECK(pairs[1].target_layer == "badge");
    CHECK_FALSE(pairs[1].expected_yes);
    CHECK(pairs[1].question == "Is the badge unchanged?");
}

TEST_CASE("generate_qa: malformed script surfaces a protocol error") {
    auto fixture = make_fixture_instance("inst-1");
    fixture.instance.qa_pairs.reset();

    JudgeScript script;
    script.qa["title"] = "perhaps\nIs anything true?";
    JudgeClient judge(JudgeBackend{}, script);
    CHECK_THROWS_AS(judge.generate_qa(fixture.instance), ProtocolError);

    JudgeScript no_question;
    no_question.qa["title"] = "yes";
    JudgeClient judge2(JudgeBackend{}, no_question);
    CHECK_THROWS_AS(judge2.generate_qa(fixture.instance), ProtocolError);
}

TEST_CASE("scripted mock is deterministic") {
    JudgeScript script;
    script.binary["q"] = "yes";
    JudgeClient judge(JudgeBackend{}, script);
    const Verdict a = judge.answer_binary(any_image(), "q");
    const Verdict b = judge.answer_binary(any_image(), "q");
    CHECK(a.yes == b.yes);
    CHECK(a.raw_response == b.raw_response);
}

TEST_CASE("in-flight calls never exceed max_in_flight") {
    JudgeBackend backend;
    backend.max_in_flight = 2;
    JudgeScript script;
    script.binary_default = "yes";
    script.latency_ms = 5;
    JudgeClient judge(backend, script);

    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&judge] {
            const Raster image = any_image();
            for (int i = 0; i < 3; ++i) judge.answer_binary(image, "q");
        });
    for (std::thread& t : threads) t.join();

    CHECK(judge.calls() == 24);
    CHECK(judge.peak_in_flight() <= 2);
    CHECK(judge.peak_in_flight() >= 1);
}
