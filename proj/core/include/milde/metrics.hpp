#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "milde/doc_model.hpp"
#include "milde/judge.hpp"
#include "milde/layout_metric.hpp"

namespace milde {

struct QADetail {
    std::string question;
    bool expected_yes = true;
    bool answered_yes = false;
    bool correct = false;
    std::string target_layer;
};

struct MetricReport {
    double instruction_following = 0.0;        // percent
    std::optional<double> text_rendering;      // percent; nullopt = not applicable
    double aesthetics = 1.0;                   // [1,10]
    double layout_consistency = 0.0;           // percent
    std::optional<double> layer_decision_accuracy; // percent; agent runs only
    LayoutReport layout_detail;
    std::vector<QADetail> qa_details;
    std::vector<double> tr_verdicts;
};

/// Percent of VQA answers that match the expected answer, over the instance's
/// QA pairs (precomputed or judge-generated).
double instruction_following(const BenchmarkInstance& instance, const Raster& edited,
                             JudgeClient& judge, std::vector<QADetail>* details = nullptr);

/// Mean tristate OCR verdict over the text regions, as a percent. Returns
/// nullopt (not applicable) when the instance edits no text layer. Throws
/// PreconditionError when text layers are edited but no regions are supplied.
std::optional<double> text_rendering(const BenchmarkInstance& instance, const Raster& edited,
                                     const std::vector<Rect>& regions, JudgeClient& judge,
                                     std::vector<double>* verdicts = nullptr);

/// Per-layer micro accuracy of edit/no-edit decisions: the percent of layers
/// on which predicted and gold membership agree.
double layer_decision_accuracy(const std::set<std::string>& gold,
                               const std::set<std::string>& predicted,
                               const std::set<std::string>& all_layers);

/// Default text regions: alpha-support bounding boxes of the gold-edited text
/// layers, in z order (stand-in for an external text detector).
std::vector<Rect> default_text_regions(const BenchmarkInstance& instance,
                                       double alpha_threshold = 0.5);

/// True when at least one gold-edited layer has kind text.
bool edits_text_layer(const BenchmarkInstance& instance);

} // namespace milde
