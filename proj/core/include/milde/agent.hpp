#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "milde/doc_model.hpp"
#include "milde/judge.hpp"

namespace milde {

/// Parsed reasoner response for one layer.
struct ReasonerOutput {
    std::string layer_id;
    std::string think;
    bool decision = false;
    std::optional<std::string> prompt; // present iff decision is true
};

enum class ReasonFormatError {
    none,
    missing_tag,
    duplicate_tag,
    wrong_order,
    stray_text,
    bad_decision_token,
    prompt_mismatch, // prompt present with decision no, or absent with decision yes
};

const char* to_string(ReasonFormatError e);

struct ReasonerParse {
    std::optional<ReasonerOutput> output; // set iff the text was well-formed
    ReasonFormatError error = ReasonFormatError::none;
    std::string message;

    bool ok() const { return output.has_value(); }
};

/// Strict grammar over <think>...</think><decision>...</decision>[<prompt>...</prompt>]:
/// exactly one think and one decision in that order, prompt present iff the
/// decision is affirmative, nothing but whitespace between and around tags.
/// Decision tokens: yes | no | 1 | 0 (case-insensitive, trimmed).
ReasonerParse parse_reasoner(std::string_view text, std::string layer_id);

enum class EditorKind { remote_http, identity_mock, scripted_mock };

struct EditorBackend {
    EditorKind kind = EditorKind::identity_mock;
    std::string endpoint;
    std::string auth_env;
    std::string model_name = "identity";
    int timeout_s = 120;
    int max_in_flight = 2;
    int retry_budget = 2;

    void validate() const;
};

/// Canned outputs for the scripted editor: a full raster per layer id, or a
/// solid fill color (alpha restoration later confines it to the layer support).
struct EditorScript {
    std::map<std::string, Raster> canned;
    std::map<std::string, Rgba> fill;
    std::optional<Rgba> fill_default;
};

/// Layer editor client. remote_http mirrors the judge wire protocol with one
/// text part (the layer-conditioned prompt) and two image parts (layer, mask);
/// the response content must be a data:image/png;base64 URL of the edited
/// raster at the same dimensions.
class EditorClient {
public:
    explicit EditorClient(EditorBackend backend, EditorScript script = {},
                          PromptTemplates templates = PromptTemplates::defaults());
    ~EditorClient();

    EditorClient(const EditorClient&) = delete;
    EditorClient& operator=(const EditorClient&) = delete;

    Raster edit(const Layer& layer, const std::string& prompt, const Mask& mask);

    const EditorBackend& backend() const { return backend_; }

private:
    EditorBackend backend_;
    EditorScript script_;
    PromptTemplates templates_;

    struct Gate; // admission control, same contract as the judge client
    std::unique_ptr<Gate> gate_;
};

/// What happened on one layer during an agent run.
struct AgentLayerTrace {
    std::string layer_id;
    std::string raw_reasoner_text;
    ReasonerParse parse;
    bool edited = false; // reasoner said yes and the editor output was applied
};

struct AgentResult {
    Document document;
    std::vector<AgentLayerTrace> traces; // in z order

    /// Layers the reasoner decided to edit (format errors count as no).
    std::set<std::string> predicted_relevant() const;
};

struct AgentOptions {
    double alpha_threshold = 0.5;
};

/// The edit pipeline: for every layer, ask the reasoner (full render + the
/// layer + the document instruction); on an affirmative decision extract the
/// layer's alpha mask, call the editor, and re-anchor the output with
/// apply_layer_edit. Format errors fall back to no-op and are recorded in the
/// trace. Editor transport errors abort the instance.
AgentResult run_agent(const BenchmarkInstance& instance, JudgeClient& reasoner,
                      EditorClient& editor, const AgentOptions& options = {});

} // namespace milde
