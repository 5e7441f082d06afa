#include "milde/agent.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <mutex>

#include "milde/errors.hpp"
#include "milde/png_io.hpp"
#include "wire.hpp"

namespace milde {

const char* to_string(ReasonFormatError e) {
    switch (e) {
        case ReasonFormatError::none: return "none";
        case ReasonFormatError::missing_tag: return "missing_tag";
        case ReasonFormatError::duplicate_tag: return "duplicate_tag";
        case ReasonFormatError::wrong_order: return "wrong_order";
        case ReasonFormatError::stray_text: return "stray_text";
        case ReasonFormatError::bad_decision_token: return "bad_decision_token";
        case ReasonFormatError::prompt_mismatch: return "prompt_mismatch";
    }
    return "none";
}

namespace {

struct TagHits {
    std::vector<std::size_t> positions;
};

TagHits find_all(std::string_view text, std::string_view tag) {
    TagHits hits;
    std::size_t pos = 0;
    while ((pos = text.find(tag, pos)) != std::string_view::npos) {
        hits.positions.push_back(pos);
        pos += tag.size();
    }
    return hits;
}

bool whitespace_only(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

ReasonerParse fail(ReasonFormatError error, std::string message) {
    ReasonerParse p;
    p.error = error;
    p.message = std::move(message);
    return p;
}

std::string lower_trim(std::string_view s) {
    std::string out = wire::trim(std::string(s));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

ReasonerParse parse_reasoner(std::string_view text, std::string layer_id) {
    struct TagSpec {
        const char* open;
        const char* close;
        bool required;
    };
    static constexpr TagSpec kTags[] = {
        {"<think>", "</think>", true},
        {"<decision>", "</decision>", true},
        {"<prompt>", "</prompt>", false},
    };

    TagHits open_hits[3], close_hits[3];
    for (int i = 0; i < 3; ++i) {
        open_hits[i] = find_all(text, kTags[i].open);
        close_hits[i] = find_all(text, kTags[i].close);
        const std::size_t opens = open_hits[i].positions.size();
        const std::size_t closes = close_hits[i].positions.size();
        if (opens > 1 || closes > 1)
            return fail(ReasonFormatError::duplicate_tag,
                        std::string("duplicated ") + kTags[i].open + " segment");
        if (kTags[i].required && (opens == 0 || closes == 0))
            return fail(ReasonFormatError::missing_tag,
                        std::string("missing ") + kTags[i].open + " segment");
        if (opens != closes)
            return fail(ReasonFormatError::missing_tag,
                        std::string("unbalanced ") + kTags[i].open + " segment");
    }

    const bool has_prompt = !open_hits[2].positions.empty();

    // Strict tag order: think, decision, then the optional prompt.
    std::vector<std::size_t> order;
    for (int i = 0; i < (has_prompt ? 3 : 2); ++i) {
        order.push_back(open_hits[i].positions[0]);
        order.push_back(close_hits[i].positions[0]);
    }
    if (!std::is_sorted(order.begin(), order.end()))
        return fail(ReasonFormatError::wrong_order, "tags out of order");

    // Only whitespace may appear outside the tagged segments.
    std::size_t cursor = 0;
    for (int i = 0; i < (has_prompt ? 3 : 2); ++i) {
        const std::size_t open = open_hits[i].positions[0];
        if (!whitespace_only(text.substr(cursor, open - cursor)))
            return fail(ReasonFormatError::stray_text, "unexpected text outside tags");
        cursor = close_hits[i].positions[0] + std::string_view(kTags[i].close).size();
    }
    if (!whitespace_only(text.substr(cursor)))
        return fail(ReasonFormatError::stray_text, "unexpected text after tags");

    auto segment = [&](int i) {
        const std::size_t begin =
            open_hits[i].positions[0] + std::string_view(kTags[i].open).size();
        return text.substr(begin, close_hits[i].positions[0] - begin);
    };

    const std::string decision_token = lower_trim(segment(1));
    bool decision = false;
    if (decision_token == "yes" || decision_token == "1")
        decision = true;
    else if (decision_token == "no" || decision_token == "0")
        decision = false;
    else
        return fail(ReasonFormatError::bad_decision_token,
                    "decision token '" + decision_token + "' not in yes|no|1|0");

    if (decision && !has_prompt)
        return fail(ReasonFormatError::prompt_mismatch, "decision yes without a prompt");
    if (!decision && has_prompt)
        return fail(ReasonFormatError::prompt_mismatch, "prompt present with decision no");

    ReasonerParse parse;
    ReasonerOutput out;
    out.layer_id = std::move(layer_id);
    out.think = std::string(segment(0));
    out.decision = decision;
    if (has_prompt) out.prompt = wire::trim(std::string(segment(2)));
    parse.output = std::move(out);
    return parse;
}

void EditorBackend::validate() const {
    if (kind == EditorKind::remote_http && endpoint.empty())
        throw PreconditionError("remote_http editor requires an endpoint");
    if (max_in_flight < 1) throw PreconditionError("max_in_flight must be >= 1");
}

EditorClient::EditorClient(EditorBackend backend, EditorScript script, PromptTemplates templates)
    : backend_(std::move(backend)), script_(std::move(script)), templates_(std::move(templates)) {
    backend_.validate();
}

Raster EditorClient::edit(const Layer& layer, const std::string& prompt, const Mask& mask) {
    switch (backend_.kind) {
        case EditorKind::identity_mock:
            return layer.pixels;

        case EditorKind::scripted_mock: {
            const auto canned = script_.canned.find(layer.id);
            if (canned != script_.canned.end()) {
                if (!canned->second.same_size(layer.pixels))
                    throw StructuralError("scripted editor raster for '" + layer.id +
                                          "' has wrong dimensions");
                return canned->second;
            }
            const auto fill = script_.fill.find(layer.id);
            if (fill != script_.fill.end())
                return Raster(layer.pixels.width(), layer.pixels.height(), fill->second);
            if (script_.fill_default)
                return Raster(layer.pixels.width(), layer.pixels.height(), *script_.fill_default);
            return layer.pixels;
        }

        case EditorKind::remote_http: {
            JudgeBackend wire_backend;
            wire_backend.kind = BackendKind::remote_http;
            wire_backend.endpoint = backend_.endpoint;
            wire_backend.auth_env = backend_.auth_env;
            wire_backend.model_name = backend_.model_name;
            wire_backend.timeout_s = backend_.timeout_s;
            wire_backend.retry_budget = backend_.retry_budget;

            Raster mask_raster(mask.width, mask.height);
            for (int y = 0; y < mask.height; ++y)
                for (int x = 0; x < mask.width; ++x) {
                    const std::uint8_t v = mask.get(x, y) ? 255 : 0;
                    mask_raster.at(x, y) = Rgba{v, v, v, 255};
                }

            const std::string content = wire::chat_call(
                wire_backend, render_template(templates_.editor, {{"prompt", prompt}}),
                {&layer.pixels, &mask_raster});

            constexpr std::string_view kPrefix = "data:image/png;base64,";
            const std::string trimmed = wire::trim(content);
            if (trimmed.rfind(kPrefix, 0) != 0)
                throw ProtocolError("editor response is not a png data url", content);
            Raster edited =
                decode_png_rgba(wire::base64_decode(trimmed.substr(kPrefix.size())));
            if (!edited.same_size(layer.pixels))
                throw ProtocolError("editor returned wrong image dimensions", content);
            return edited;
        }
    }
    throw PreconditionError("unknown editor kind");
}

std::set<std::string> AgentResult::predicted_relevant() const {
    std::set<std::string> ids;
    for (const AgentLayerTrace& trace : traces)
        if (trace.parse.ok() && trace.parse.output->decision) ids.insert(trace.layer_id);
    return ids;
}

AgentResult run_agent(const BenchmarkInstance& instance, JudgeClient& reasoner,
                      EditorClient& editor, const AgentOptions& options) {
    instance.validate();
    const Raster render = composite(instance.document);

    std::map<std::string, Layer> edits;
    std::vector<AgentLayerTrace> traces;
    traces.reserve(instance.document.layers().size());

    for (const Layer& layer : instance.document.layers()) {
        AgentLayerTrace trace;
        trace.layer_id = layer.id;
        trace.raw_reasoner_text = reasoner.reason_layer(render, layer, instance.instruction);
        trace.parse = parse_reasoner(trace.raw_reasoner_text, layer.id);

        if (trace.parse.ok() && trace.parse.output->decision) {
            const Mask mask = alpha_mask(layer, options.alpha_threshold);
            const Raster edited = editor.edit(layer, trace.parse.output->prompt.value_or(""), mask);
            edits.emplace(layer.id, apply_layer_edit(layer, edited));
            trace.edited = true;
        }
        traces.push_back(std::move(trace));
    }

    AgentResult result{replace_layers(instance.document, edits), std::move(traces)};
    return result;
}

} // namespace milde
