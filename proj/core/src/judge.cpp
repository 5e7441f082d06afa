#include "milde/judge.hpp"

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "milde/errors.hpp"
#include "wire.hpp"

namespace milde {

void JudgeBackend::validate() const {
    if (kind == BackendKind::remote_http && endpoint.empty())
        throw PreconditionError("remote_http backend requires an endpoint");
    if (max_in_flight < 1) throw PreconditionError("max_in_flight must be >= 1");
    if (retry_budget < 0) throw PreconditionError("retry_budget must be >= 0");
}

// Counting admission gate; lets at most max_in_flight calls run concurrently.
struct JudgeClient::Gate {
    explicit Gate(int n) : available(n) {}

    void acquire() {
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return available > 0; });
        --available;
    }
    void release() {
        {
            std::lock_guard lock(m);
            ++available;
        }
        cv.notify_one();
    }

    std::mutex m;
    std::condition_variable cv;
    int available;
};

struct JudgeClient::FlightGuard {
    explicit FlightGuard(JudgeClient& client) : c(client) {
        c.gate_->acquire();
        const int now = ++c.in_flight_;
        int peak = c.peak_in_flight_.load();
        while (now > peak && !c.peak_in_flight_.compare_exchange_weak(peak, now)) {
        }
        ++c.calls_;
    }
    ~FlightGuard() {
        --c.in_flight_;
        c.gate_->release();
    }

    JudgeClient& c;
};

JudgeClient::JudgeClient(JudgeBackend backend, JudgeScript script, PromptTemplates templates)
    : backend_(std::move(backend)), script_(std::move(script)), templates_(std::move(templates)),
      gate_(std::make_unique<Gate>(std::max(1, backend_.max_in_flight))) {
    backend_.validate();
}

JudgeClient::~JudgeClient() = default;

std::string JudgeClient::transact(const std::string& scripted_raw, const std::string& prompt,
                                  const std::vector<const Raster*>& images) {
    FlightGuard guard(*this);
    if (backend_.kind == BackendKind::scripted_mock) {
        if (script_.latency_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(script_.latency_ms));
        return scripted_raw;
    }
    return wire::chat_call(backend_, prompt, images);
}

namespace {

template <typename F>
Verdict timed(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v = f();
    v.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);
    return v;
}

Verdict parse_binary(const std::string& raw) {
    const std::string token = wire::first_line_token(raw);
    Verdict v;
    v.kind = Verdict::Kind::binary;
    v.raw_response = raw;
    if (token == "yes")
        v.yes = true;
    else if (token == "no")
        v.yes = false;
    else
        throw ProtocolError("expected yes/no, got '" + token + "'", raw);
    return v;
}

double parse_number(const std::string& token, const std::string& raw) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
        throw ProtocolError("expected a number, got '" + token + "'", raw);
    return value;
}

Verdict parse_tristate(const std::string& raw) {
    const std::string token = wire::first_line_token(raw);
    const double value = parse_number(token, raw);
    if (value != 0.0 && value != 0.5 && value != 1.0)
        throw ProtocolError("expected one of 0 / 0.5 / 1, got '" + token + "'", raw);
    Verdict v;
    v.kind = Verdict::Kind::tristate;
    v.number = value;
    v.raw_response = raw;
    return v;
}

Verdict parse_score(const std::string& raw) {
    const std::string token = wire::first_line_token(raw);
    const double value = parse_number(token, raw);
    Verdict v;
    v.kind = Verdict::Kind::score;
    v.raw_response = raw;
    v.number = std::clamp(value, 1.0, 10.0);
    v.clamped = v.number != value;
    return v;
}

Verdict parse_label(const std::string& raw) {
    const std::string token = wire::first_line_token(raw);
    Verdict v;
    v.kind = Verdict::Kind::label;
    v.raw_response = raw;
    if (token == "text")
        v.label = LayerKind::text;
    else if (token == "decoration")
        v.label = LayerKind::decoration;
    else if (token == "image")
        v.label = LayerKind::image;
    else
        throw ProtocolError("expected text/decoration/image, got '" + token + "'", raw);
    return v;
}

} // namespace

std::vector<QAPair> JudgeClient::generate_qa(const BenchmarkInstance& instance) {
    if (instance.gold_layer_instructions.empty() && !instance.qa_pairs)
        throw PreconditionError("generate_qa: instance has no gold layer instructions");
    if (instance.qa_pairs) return *instance.qa_pairs; // precomputed path

    std::vector<QAPair> pairs;
    for (const Layer& layer : instance.document.layers()) {
        if (!instance.gold_relevant.count(layer.id)) continue;
        const auto it = instance.gold_layer_instructions.find(layer.id);
        const std::string layer_instruction =
            it != instance.gold_layer_instructions.end() ? it->second : instance.instruction;

        std::string raw;
        if (backend_.kind == BackendKind::scripted_mock) {
            const auto scripted = script_.qa.find(layer.id);
            raw = scripted != script_.qa.end()
                      ? scripted->second
                      : "yes\nHas layer '" + layer.id +
                            "' been edited as required: " + layer_instruction + "?";
            raw = transact(raw, "", {});
        } else {
            const std::string prompt = render_template(
                templates_.qa_generate, {{"layer_id", layer.id},
                                         {"instruction", instance.instruction},
                                         {"layer_instruction", layer_instruction}});
            const Raster render = composite(instance.document);
            raw = transact("", prompt, {&render, &layer.pixels});
        }

        const std::string expected = wire::first_line_token(raw);
        if (expected != "yes" && expected != "no")
            throw ProtocolError("qa generation: first line must be yes/no", raw);
        const std::string question = wire::rest_after_first_line(raw);
        if (question.empty())
            throw ProtocolError("qa generation: empty question", raw);
        pairs.push_back(QAPair{question, expected == "yes", layer.id});
    }
    return pairs;
}

Verdict JudgeClient::answer_binary(const Raster& image, const std::string& question) {
    return timed([&] {
        const auto scripted = script_.binary.find(question);
        const std::string raw = transact(
            scripted != script_.binary.end() ? scripted->second : script_.binary_default,
            render_template(templates_.answer_binary, {{"question", question}}), {&image});
        return parse_binary(raw);
    });
}

Verdict JudgeClient::ocr_and_verify(const Raster& image, const Rect& region,
                                    const std::string& instruction) {
    if (!region.within(image.width(), image.height()))
        throw PreconditionError("ocr_and_verify: region outside image bounds");
    return timed([&] {
        const std::string key = std::to_string(region.x) + "," + std::to_string(region.y) + "," +
                                std::to_string(region.w) + "," + std::to_string(region.h);
        const auto scripted = script_.ocr.find(key);
        const std::string raw = transact(
            scripted != script_.ocr.end() ? scripted->second : script_.ocr_default,
            render_template(templates_.ocr_verify, {{"instruction", instruction},
                                                    {"x", std::to_string(region.x)},
                                                    {"y", std::to_string(region.y)},
                                                    {"w", std::to_string(region.w)},
                                                    {"h", std::to_string(region.h)}}),
            {&image});
        return parse_tristate(raw);
    });
}

Verdict JudgeClient::classify_layer(const Layer& layer) {
    return timed([&] {
        const auto scripted = script_.kinds.find(layer.id);
        const std::string raw = transact(
            scripted != script_.kinds.end() ? scripted->second : to_string(layer.kind),
            render_template(templates_.classify_layer, {{"layer_id", layer.id}}), {&layer.pixels});
        return parse_label(raw);
    });
}

Verdict JudgeClient::aesthetics(const Raster& image) {
    return timed([&] {
        const std::string raw =
            transact(script_.aesthetics, templates_.aesthetics, {&image});
        return parse_score(raw);
    });
}

Verdict JudgeClient::step_applies(const std::string& step_text, const Layer& layer) {
    return timed([&] {
        const auto scripted = script_.applies.find(step_text + '\x1f' + layer.id);
        const std::string raw = transact(
            scripted != script_.applies.end() ? scripted->second : script_.applies_default,
            render_template(templates_.step_applies,
                            {{"step", step_text}, {"layer_id", layer.id}}),
            {&layer.pixels});
        return parse_binary(raw);
    });
}

StepCategory JudgeClient::classify_step(const std::string& step_text) {
    const auto scripted = script_.steps.find(step_text);
    const std::string raw =
        transact(scripted != script_.steps.end() ? scripted->second : script_.step_default,
                 render_template(templates_.classify_step, {{"step", step_text}}), {});
    const std::string token = wire::first_line_token(raw);
    if (token == "text") return StepCategory::text_edit;
    if (token == "image") return StepCategory::image_edit;
    throw ProtocolError("expected text/image step label, got '" + token + "'", raw);
}

std::string JudgeClient::reason_layer(const Raster& document_render, const Layer& layer,
                                      const std::string& instruction) {
    const auto scripted = script_.reason.find(layer.id);
    return transact(
        scripted != script_.reason.end() ? scripted->second : script_.reason_default,
        render_template(templates_.reason,
                        {{"instruction", instruction}, {"layer_id", layer.id}}),
        {&document_render, &layer.pixels});
}

} // namespace milde
