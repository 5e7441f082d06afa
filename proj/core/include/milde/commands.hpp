#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "milde/agent.hpp"
#include "milde/judge.hpp"
#include "milde/report.hpp"
#include "milde/scoring.hpp"

namespace milde {

enum class MaskSource { alpha, external };

/// Run configuration shared by the batch subcommands. Loadable from a JSON
/// config file; CLI flags override file values, which override defaults.
struct RunConfig {
    LayoutWeights layout;
    MildeWeights milde;
    double alpha_threshold = 0.5;
    bool normalize_layout = false; // divide the layout score by its 0.85-style ceiling
    MaskSource mask_source = MaskSource::alpha;
    int workers = 1;
    std::string template_dir;

    JudgeBackend judge;
    JudgeScript judge_script;
    JudgeBackend reasoner;
    JudgeScript reasoner_script;
    EditorBackend editor;
    EditorScript editor_script;

    PromptTemplates templates() const;
    ConfigEcho echo() const;
};

RunConfig load_config(const std::filesystem::path& path);

/// Overlays the milde/layout weight blocks from a weights JSON file.
void apply_weights_file(RunConfig& config, const std::filesystem::path& path);

/// Black-box evaluation: one edited PNG per instance (<id>.png under
/// outputs_dir). Missing outputs mark the instance failed; the run continues.
RunReport cmd_evaluate(const std::filesystem::path& manifest_dir,
                       const std::filesystem::path& outputs_dir, const RunConfig& config);

/// Agent run: per-layer reasoning + editing per instance; edited layers and
/// the composite land under out_dir/<id>/, then the result is evaluated like
/// cmd_evaluate plus layer decision accuracy.
RunReport cmd_agent(const std::filesystem::path& manifest_dir,
                    const std::filesystem::path& out_dir, const RunConfig& config);

struct ScoreRow {
    std::string label;
    RawScores raw;
    std::optional<double> rating;
    double milde = 0.0;
    double dw_sum = 0.0;
    double geo_mean = 0.0;
    double hcore_sup = 0.0;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;
    /// Spearman of the milde column against the rating column, when present.
    std::optional<double> spearman_vs_rating;
};

/// Recomputes composite scores from a CSV of raw metrics. Required columns
/// (case-insensitive header): if, lc, aes, tr. Optional: label, rating.
ScoreTable cmd_score(const std::filesystem::path& csv_path, const MildeWeights& weights);

struct DatagenInstanceResult {
    std::string id;
    int layers_before = 0;
    int layers_after = 0;
    std::vector<std::string> unmatched_steps;
};

struct DatagenResult {
    std::vector<DatagenInstanceResult> instances;
};

/// Consolidates raw documents and aligns their steps to layers, emitting
/// benchmark manifests under out_dir plus an unmatched-steps sidecar report.
DatagenResult cmd_datagen(const std::filesystem::path& raw_dir,
                          const std::filesystem::path& out_dir, const RunConfig& config);

} // namespace milde
