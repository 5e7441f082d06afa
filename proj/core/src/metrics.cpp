#include "milde/metrics.hpp"

#include "milde/errors.hpp"

namespace milde {

double instruction_following(const BenchmarkInstance& instance, const Raster& edited,
                             JudgeClient& judge, std::vector<QADetail>* details) {
    const std::vector<QAPair> pairs = judge.generate_qa(instance);
    if (pairs.empty())
        throw PreconditionError("instruction_following: no QA pairs for instance '" +
                                instance.id + "'");

    std::size_t correct = 0;
    for (const QAPair& qa : pairs) {
        const Verdict verdict = judge.answer_binary(edited, qa.question);
        const bool ok = verdict.yes == qa.expected_yes;
        correct += ok;
        if (details)
            details->push_back(
                QADetail{qa.question, qa.expected_yes, verdict.yes, ok, qa.target_layer});
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(pairs.size());
}

std::optional<double> text_rendering(const BenchmarkInstance& instance, const Raster& edited,
                                     const std::vector<Rect>& regions, JudgeClient& judge,
                                     std::vector<double>* verdicts) {
    if (!edits_text_layer(instance)) return std::nullopt;
    if (regions.empty())
        throw PreconditionError("text_rendering: instance edits text layers but no regions given");

    double sum = 0.0;
    for (const Rect& region : regions) {
        const Verdict verdict = judge.ocr_and_verify(edited, region, instance.instruction);
        sum += verdict.number;
        if (verdicts) verdicts->push_back(verdict.number);
    }
    return 100.0 * sum / static_cast<double>(regions.size());
}

double layer_decision_accuracy(const std::set<std::string>& gold,
                               const std::set<std::string>& predicted,
                               const std::set<std::string>& all_layers) {
    if (all_layers.empty())
        throw PreconditionError("layer_decision_accuracy: empty layer set");
    for (const std::string& id : gold)
        if (!all_layers.count(id))
            throw PreconditionError("layer_decision_accuracy: gold id '" + id +
                                    "' not in layer set");
    for (const std::string& id : predicted)
        if (!all_layers.count(id))
            throw PreconditionError("layer_decision_accuracy: predicted id '" + id +
                                    "' not in layer set");

    std::size_t agree = 0;
    for (const std::string& id : all_layers)
        agree += (gold.count(id) != 0) == (predicted.count(id) != 0);
    return 100.0 * static_cast<double>(agree) / static_cast<double>(all_layers.size());
}

std::vector<Rect> default_text_regions(const BenchmarkInstance& instance, double alpha_threshold) {
    std::vector<Rect> regions;
    for (const Layer& layer : instance.document.layers()) {
        if (layer.kind != LayerKind::text || !instance.gold_relevant.count(layer.id)) continue;
        const Rect box = support_bbox(alpha_mask(layer, alpha_threshold));
        if (!box.empty()) regions.push_back(box);
    }
    return regions;
}

bool edits_text_layer(const BenchmarkInstance& instance) {
    for (const Layer& layer : instance.document.layers())
        if (layer.kind == LayerKind::text && instance.gold_relevant.count(layer.id)) return true;
    return false;
}

} // namespace milde
