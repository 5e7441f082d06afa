#include "milde/report.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "milde/errors.hpp"

namespace milde {

using nlohmann::ordered_json;

CorpusSummary summarize(const std::vector<InstanceReport>& instances) {
    CorpusSummary s;
    s.instances = static_cast<int>(instances.size());

    double sum_if = 0, sum_tr = 0, sum_aes = 0, sum_lc = 0, sum_lda = 0;
    double sum_milde = 0, sum_dw = 0, sum_geo = 0, sum_hc = 0;
    int ok = 0, lda_count = 0;

    for (const InstanceReport& r : instances) {
        if (r.failed) {
            ++s.failures;
            continue;
        }
        ++ok;
        sum_if += r.metrics.instruction_following;
        sum_aes += r.metrics.aesthetics;
        sum_lc += r.metrics.layout_consistency;
        sum_milde += r.milde;
        sum_dw += r.dw_sum;
        sum_geo += r.geo_mean;
        sum_hc += r.hcore_sup;
        if (r.metrics.text_rendering) {
            sum_tr += *r.metrics.text_rendering;
            ++s.tr_applicable;
        }
        if (r.metrics.layer_decision_accuracy) {
            sum_lda += *r.metrics.layer_decision_accuracy;
            ++lda_count;
        }
    }

    if (ok > 0) {
        s.mean_if = sum_if / ok;
        s.mean_aes = sum_aes / ok;
        s.mean_lc = sum_lc / ok;
        s.mean_milde = sum_milde / ok;
        s.mean_dw_sum = sum_dw / ok;
        s.mean_geo_mean = sum_geo / ok;
        s.mean_hcore_sup = sum_hc / ok;
    }
    if (s.tr_applicable > 0) s.mean_tr = sum_tr / s.tr_applicable;
    if (lda_count > 0) s.mean_lda = sum_lda / lda_count;
    return s;
}

namespace {

ordered_json layout_json(const LayoutReport& layout) {
    ordered_json j;
    j["match_rate"] = layout.match_rate;
    j["penalty_disappeared"] = layout.penalty_disappeared;
    j["penalty_new"] = layout.penalty_new;
    j["score"] = layout.score;
    j["score_normalized"] = layout.score_normalized;
    j["iou_threshold"] = layout.iou_threshold;
    j["matched_pairs"] = ordered_json::array();
    for (const MatchedPairDetail& p : layout.matched_pairs)
        j["matched_pairs"].push_back({{"original", p.original_id},
                                      {"edited", p.edited_id},
                                      {"c_pos", p.c_pos},
                                      {"c_shape", p.c_shape},
                                      {"c_area", p.c_area}});
    return j;
}

ordered_json instance_json(const InstanceReport& r) {
    ordered_json j;
    j["id"] = r.id;
    j["failed"] = r.failed;
    if (r.failed) {
        j["failure"] = r.failure;
        return j;
    }
    ordered_json metrics;
    metrics["instruction_following"] = r.metrics.instruction_following;
    metrics["text_rendering"] =
        r.metrics.text_rendering ? ordered_json(*r.metrics.text_rendering) : ordered_json(nullptr);
    metrics["aesthetics"] = r.metrics.aesthetics;
    metrics["layout_consistency"] = r.metrics.layout_consistency;
    metrics["layer_decision_accuracy"] = r.metrics.layer_decision_accuracy
                                             ? ordered_json(*r.metrics.layer_decision_accuracy)
                                             : ordered_json(nullptr);
    j["metrics"] = std::move(metrics);

    ordered_json scores;
    scores["milde"] = r.milde;
    scores["milde_x100"] = r.milde * 100.0;
    scores["dw_sum"] = r.dw_sum;
    scores["geo_mean"] = r.geo_mean;
    scores["hcore_sup"] = r.hcore_sup;
    j["scores"] = std::move(scores);

    j["layout"] = layout_json(r.metrics.layout_detail);

    j["qa"] = ordered_json::array();
    for (const QADetail& qa : r.metrics.qa_details)
        j["qa"].push_back({{"question", qa.question},
                           {"expected", qa.expected_yes ? "yes" : "no"},
                           {"answered", qa.answered_yes ? "yes" : "no"},
                           {"correct", qa.correct},
                           {"target_layer", qa.target_layer}});
    j["tr_verdicts"] = r.metrics.tr_verdicts;
    return j;
}

ordered_json config_json(const ConfigEcho& c) {
    ordered_json j;
    j["milde_weights"] = {{"tau", c.milde.tau},   {"k", c.milde.k},
                          {"w_if", c.milde.w_if}, {"w_lc", c.milde.w_lc},
                          {"w_tr", c.milde.w_tr}, {"w_a", c.milde.w_a},
                          {"w_sy", c.milde.w_sy}};
    j["layout_weights"] = {{"w_match", c.layout.w_match},
                           {"w_pos", c.layout.w_pos},
                           {"w_shape", c.layout.w_shape},
                           {"w_area", c.layout.w_area},
                           {"w_penalty", c.layout.w_penalty},
                           {"iou_threshold", c.layout.iou_threshold},
                           {"new_layer_coeff", c.layout.new_layer_coeff}};
    j["alpha_threshold"] = c.alpha_threshold;
    j["normalize_layout"] = c.normalize_layout;
    j["mask_source"] = c.mask_source;
    j["workers"] = c.workers;
    j["template_fingerprint"] = c.template_fingerprint;
    j["judge"] = c.judge;
    j["reasoner"] = c.reasoner;
    j["editor"] = c.editor;
    return j;
}

} // namespace

std::string report_to_json_string(const RunReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config"] = config_json(report.config);

    std::vector<const InstanceReport*> sorted;
    sorted.reserve(report.instances.size());
    for (const InstanceReport& r : report.instances) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const InstanceReport* a, const InstanceReport* b) { return a->id < b->id; });

    j["instances"] = ordered_json::array();
    for (const InstanceReport* r : sorted) j["instances"].push_back(instance_json(*r));

    const CorpusSummary& s = report.summary;
    ordered_json summary;
    summary["instances"] = s.instances;
    summary["failures"] = s.failures;
    summary["tr_applicable"] = s.tr_applicable;
    summary["mean_instruction_following"] = s.mean_if;
    summary["mean_text_rendering"] = s.mean_tr ? ordered_json(*s.mean_tr) : ordered_json(nullptr);
    summary["mean_aesthetics"] = s.mean_aes;
    summary["mean_layout_consistency"] = s.mean_lc;
    summary["mean_layer_decision_accuracy"] =
        s.mean_lda ? ordered_json(*s.mean_lda) : ordered_json(nullptr);
    summary["mean_milde"] = s.mean_milde;
    summary["mean_milde_x100"] = s.mean_milde * 100.0;
    summary["mean_dw_sum"] = s.mean_dw_sum;
    summary["mean_geo_mean"] = s.mean_geo_mean;
    summary["mean_hcore_sup"] = s.mean_hcore_sup;
    j["summary"] = std::move(summary);

    return j.dump(2) + "\n";
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ManifestError("cannot write report " + path.string());
    out << report_to_json_string(report);
}

} // namespace milde
