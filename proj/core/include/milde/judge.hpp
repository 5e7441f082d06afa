#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "milde/doc_model.hpp"
#include "milde/prompts.hpp"

namespace milde {

enum class BackendKind { remote_http, scripted_mock };

/// Which kind of edit an atomic step performs; gates which layers it may
/// be matched against.
enum class StepCategory { text_edit, image_edit };

/// Connection settings for one external model endpoint. Auth tokens are never
/// stored; auth_env names the environment variable that holds the token.
struct JudgeBackend {
    BackendKind kind = BackendKind::scripted_mock;
    std::string endpoint;  // required for remote_http, e.g. http://host:8000/v1/chat/completions
    std::string auth_env;
    std::string model_name = "scripted";
    int timeout_s = 60;
    int max_in_flight = 4;
    int retry_budget = 2;

    void validate() const;
};

struct Verdict {
    enum class Kind { binary, tristate, score, label };

    Kind kind = Kind::binary;
    bool yes = false;          // binary
    double number = 0.0;       // tristate or score
    LayerKind label = LayerKind::image;
    bool clamped = false;      // score was pulled back into [1,10]
    std::string raw_response;
    std::chrono::microseconds latency{0};
};

/// Canned responses for the scripted mock. Every scripted answer is parsed by
/// the same response grammar as a remote reply, so malformed scripts surface
/// protocol errors exactly like a misbehaving model would.
struct JudgeScript {
    std::map<std::string, std::string> binary;  // question -> raw response
    std::string binary_default = "no";

    std::map<std::string, std::string> ocr;     // "x,y,w,h" -> raw response
    std::string ocr_default = "1";

    std::map<std::string, std::string> kinds;   // layer id -> raw label; absent: echo layer.kind

    std::map<std::string, std::string> steps;   // step text -> "text" | "image"
    std::string step_default = "image";

    std::map<std::string, std::string> applies; // step + '\x1f' + layer id -> raw yes/no
    std::string applies_default = "no";

    std::string aesthetics = "5";

    std::map<std::string, std::string> qa;      // layer id -> "yes|no\n<question>"; absent: templated
    std::map<std::string, std::string> reason;  // layer id -> raw tagged reasoner text
    std::string reason_default = "<think>no change needed</think><decision>no</decision>";

    int latency_ms = 0; // synthetic delay, for concurrency tests
};

/// Client for every model the protocol consults: VQA judge, OCR/text judge,
/// layer-kind classifier, aesthetics predictor, applicability matcher and the
/// agent's reasoner. remote_http speaks a chat-completions-style protocol with
/// base64 PNG image parts; scripted_mock serves the JudgeScript. Calls from
/// any number of threads are admitted up to backend.max_in_flight at a time.
class JudgeClient {
public:
    explicit JudgeClient(JudgeBackend backend, JudgeScript script = {},
                         PromptTemplates templates = PromptTemplates::defaults());
    ~JudgeClient();

    JudgeClient(const JudgeClient&) = delete;
    JudgeClient& operator=(const JudgeClient&) = delete;

    /// One QA pair per gold-edited layer. When the instance ships precomputed
    /// qa_pairs they are returned verbatim and no backend call is made.
    std::vector<QAPair> generate_qa(const BenchmarkInstance& instance);

    Verdict answer_binary(const Raster& image, const std::string& question);
    Verdict ocr_and_verify(const Raster& image, const Rect& region, const std::string& instruction);
    Verdict classify_layer(const Layer& layer);
    Verdict aesthetics(const Raster& image);

    /// Whether an editing step semantically applies to a layer.
    Verdict step_applies(const std::string& step_text, const Layer& layer);

    /// text-editing vs image-editing classification of a step.
    StepCategory classify_step(const std::string& step_text);

    /// Raw (unparsed) reasoner response for one layer of the document.
    std::string reason_layer(const Raster& document_render, const Layer& layer,
                             const std::string& instruction);

    const JudgeBackend& backend() const { return backend_; }
    const PromptTemplates& templates() const { return templates_; }

    /// Instrumentation: highest number of concurrently in-flight calls and
    /// total calls, observable on mock and remote alike.
    int peak_in_flight() const { return peak_in_flight_.load(); }
    long long calls() const { return calls_.load(); }

private:
    struct FlightGuard;

    std::string transact(const std::string& scripted_raw, const std::string& prompt,
                         const std::vector<const Raster*>& images);

    JudgeBackend backend_;
    JudgeScript script_;
    PromptTemplates templates_;

    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_in_flight_{0};
    std::atomic<long long> calls_{0};

    struct Gate; // admission control
    std::unique_ptr<Gate> gate_;
};

} // namespace milde
