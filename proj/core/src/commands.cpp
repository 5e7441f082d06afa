#include "milde/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "milde/datagen.hpp"
#include "milde/errors.hpp"
#include "milde/manifest.hpp"
#include "milde/metrics.hpp"
#include "milde/png_io.hpp"

namespace milde {

using nlohmann::json;

PromptTemplates RunConfig::templates() const {
    return template_dir.empty() ? PromptTemplates::defaults()
                                : PromptTemplates::load_dir(template_dir);
}

namespace {

std::string describe(const JudgeBackend& b) {
    if (b.kind == BackendKind::scripted_mock) return "scripted_mock:" + b.model_name;
    return "remote_http:" + b.model_name + "@" + b.endpoint;
}

std::string describe(const EditorBackend& b) {
    switch (b.kind) {
        case EditorKind::identity_mock: return "identity_mock";
        case EditorKind::scripted_mock: return "scripted_mock:" + b.model_name;
        case EditorKind::remote_http: return "remote_http:" + b.model_name + "@" + b.endpoint;
    }
    return "unknown";
}

} // namespace

ConfigEcho RunConfig::echo() const {
    ConfigEcho e;
    e.milde = milde;
    e.layout = layout;
    e.alpha_threshold = alpha_threshold;
    e.normalize_layout = normalize_layout;
    e.mask_source = mask_source == MaskSource::alpha ? "alpha" : "external";
    e.workers = workers;
    e.template_fingerprint = templates().fingerprint();
    e.judge = describe(judge);
    e.reasoner = describe(reasoner);
    e.editor = describe(editor);
    return e;
}

namespace {

void read_into(const json& j, const char* key, double& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
}
void read_into(const json& j, const char* key, int& slot) {
    if (j.contains(key)) slot = j.at(key).get<int>();
}
void read_into(const json& j, const char* key, bool& slot) {
    if (j.contains(key)) slot = j.at(key).get<bool>();
}
void read_into(const json& j, const char* key, std::string& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::string>();
}
void read_map(const json& j, const char* key, std::map<std::string, std::string>& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::map<std::string, std::string>>();
}

void read_milde_weights(const json& j, MildeWeights& w) {
    read_into(j, "tau", w.tau);
    read_into(j, "k", w.k);
    read_into(j, "w_if", w.w_if);
    read_into(j, "w_lc", w.w_lc);
    read_into(j, "w_tr", w.w_tr);
    read_into(j, "w_a", w.w_a);
    read_into(j, "w_sy", w.w_sy);
}

void read_layout_weights(const json& j, LayoutWeights& w) {
    read_into(j, "w_match", w.w_match);
    read_into(j, "w_pos", w.w_pos);
    read_into(j, "w_shape", w.w_shape);
    read_into(j, "w_area", w.w_area);
    read_into(j, "w_penalty", w.w_penalty);
    read_into(j, "iou_threshold", w.iou_threshold);
    read_into(j, "new_layer_coeff", w.new_layer_coeff);
}

JudgeScript read_judge_script(const json& j) {
    JudgeScript s;
    read_map(j, "binary", s.binary);
    read_into(j, "binary_default", s.binary_default);
    read_map(j, "ocr", s.ocr);
    read_into(j, "ocr_default", s.ocr_default);
    read_map(j, "kinds", s.kinds);
    read_map(j, "steps", s.steps);
    read_into(j, "step_default", s.step_default);
    read_map(j, "applies", s.applies);
    read_into(j, "applies_default", s.applies_default);
    read_into(j, "aesthetics", s.aesthetics);
    read_map(j, "qa", s.qa);
    read_map(j, "reason", s.reason);
    read_into(j, "reason_default", s.reason_default);
    read_into(j, "latency_ms", s.latency_ms);
    return s;
}

void read_judge_backend(const json& j, JudgeBackend& b, JudgeScript& script) {
    std::string kind;
    read_into(j, "kind", kind);
    if (kind == "remote_http")
        b.kind = BackendKind::remote_http;
    else if (kind == "scripted_mock" || kind.empty())
        b.kind = BackendKind::scripted_mock;
    else
        throw ManifestError("unknown judge backend kind '" + kind + "'");
    read_into(j, "endpoint", b.endpoint);
    read_into(j, "auth_env", b.auth_env);
    read_into(j, "model", b.model_name);
    read_into(j, "timeout_s", b.timeout_s);
    read_into(j, "max_in_flight", b.max_in_flight);
    read_into(j, "retry_budget", b.retry_budget);
    if (j.contains("script")) script = read_judge_script(j.at("script"));
}

Rgba rgba_from(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw ManifestError("editor fill colors must be [r,g,b,a] arrays");
    return Rgba{j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(), j[2].get<std::uint8_t>(),
                j[3].get<std::uint8_t>()};
}

void read_editor_backend(const json& j, const std::filesystem::path& base, EditorBackend& b,
                         EditorScript& script) {
    std::string kind;
    read_into(j, "kind", kind);
    if (kind == "remote_http")
        b.kind = EditorKind::remote_http;
    else if (kind == "scripted_mock")
        b.kind = EditorKind::scripted_mock;
    else if (kind == "identity_mock" || kind.empty())
        b.kind = EditorKind::identity_mock;
    else
        throw ManifestError("unknown editor backend kind '" + kind + "'");
    read_into(j, "endpoint", b.endpoint);
    read_into(j, "auth_env", b.auth_env);
    read_into(j, "model", b.model_name);
    read_into(j, "timeout_s", b.timeout_s);
    read_into(j, "max_in_flight", b.max_in_flight);
    read_into(j, "retry_budget", b.retry_budget);
    if (j.contains("script")) {
        const json& sj = j.at("script");
        if (sj.contains("fill"))
            for (const auto& [id, color] : sj.at("fill").items())
                script.fill[id] = rgba_from(color);
        if (sj.contains("fill_default")) script.fill_default = rgba_from(sj.at("fill_default"));
        if (sj.contains("canned"))
            for (const auto& [id, png] : sj.at("canned").items())
                script.canned[id] = read_png_rgba(base / png.get<std::string>());
    }
}

// Runs f(i) for i in [0,count) on up to `workers` threads. Exceptions must be
// handled inside f; instance isolation happens at the call site.
template <typename F>
void parallel_for(std::size_t count, int workers, F&& f) {
    const int n = static_cast<int>(std::min<std::size_t>(std::max(workers, 1), count));
    if (n <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                f(i);
            }
        });
    for (std::thread& t : pool) t.join();
}

Mask mask_from_raster(const Raster& raster, double threshold, const std::string& label) {
    Mask mask(raster.width(), raster.height());
    mask.source_layer = label;
    const std::span<const Rgba> px = raster.pixels();
    const double cutoff = threshold * 255.0;
    for (std::size_t i = 0; i < px.size(); ++i)
        mask.bits[i] = static_cast<double>(px[i].a) >= cutoff ? 1 : 0;
    return mask;
}

std::vector<Mask> per_layer_masks(const Document& document, double threshold) {
    std::vector<Mask> masks;
    masks.reserve(document.layers().size());
    for (const Layer& layer : document.layers()) masks.push_back(alpha_mask(layer, threshold));
    return masks;
}

std::vector<Rect> regions_for(const BenchmarkInstance& instance, const ManifestData& manifest,
                              const std::filesystem::path& manifest_dir, double alpha_threshold) {
    if (manifest.regions_file) {
        std::vector<Rect> regions;
        for (auto& [id, rect] : load_regions(manifest_dir / *manifest.regions_file))
            regions.push_back(rect);
        return regions;
    }
    return default_text_regions(instance, alpha_threshold);
}

// Metrics + composite scores for one already-edited instance.
InstanceReport evaluate_one(const BenchmarkInstance& instance, const Raster& edited,
                            const std::vector<Mask>& original_masks,
                            const std::vector<Mask>& edited_masks,
                            const std::vector<Rect>& regions,
                            const std::optional<std::set<std::string>>& predicted,
                            JudgeClient& judge, const RunConfig& config) {
    InstanceReport report;
    report.id = instance.id;

    MetricReport& m = report.metrics;
    m.instruction_following = instruction_following(instance, edited, judge, &m.qa_details);
    m.text_rendering = text_rendering(instance, edited, regions, judge, &m.tr_verdicts);
    m.aesthetics = judge.aesthetics(edited).number;
    m.layout_detail = layout_consistency(original_masks, edited_masks, config.layout);
    m.layout_consistency =
        100.0 * (config.normalize_layout ? m.layout_detail.score_normalized
                                         : m.layout_detail.score);
    if (predicted)
        m.layer_decision_accuracy = layer_decision_accuracy(instance.gold_relevant, *predicted,
                                                            instance.document.layer_ids());

    // Composite scores; a not-applicable text-rendering enters as 0 so the
    // gated sum stays defined (the corpus mean still excludes it).
    RawScores raw{m.instruction_following, m.layout_consistency, m.text_rendering.value_or(0.0),
                  m.aesthetics};
    report.milde = milde_score(raw, config.milde);
    report.dw_sum = dw_sum(raw, config.milde);
    report.geo_mean = geo_mean(raw, config.milde);
    report.hcore_sup = hcore_sup(raw, config.milde);
    return report;
}

struct LoadedInstance {
    ManifestData manifest;
    BenchmarkInstance instance;
    std::filesystem::path manifest_dir;
};

std::vector<LoadedInstance> load_corpus(const std::filesystem::path& manifest_dir) {
    const std::vector<std::filesystem::path> paths = list_manifests(manifest_dir);
    if (paths.empty())
        throw PreconditionError("no manifests found in " + manifest_dir.string());

    std::vector<LoadedInstance> corpus;
    corpus.reserve(paths.size());
    for (const std::filesystem::path& path : paths) {
        ManifestData manifest = load_manifest(path); // malformed manifest aborts the run
        BenchmarkInstance instance = load_instance(manifest, path.parent_path());
        corpus.push_back(LoadedInstance{std::move(manifest), std::move(instance),
                                        path.parent_path()});
    }
    return corpus;
}

InstanceReport failed_instance(const std::string& id, const std::string& why) {
    InstanceReport r;
    r.id = id;
    r.failed = true;
    r.failure = why;
    return r;
}

} // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open config " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ManifestError("invalid JSON in config " + path.string());

    RunConfig config;
    if (j.contains("milde_weights")) read_milde_weights(j.at("milde_weights"), config.milde);
    if (j.contains("layout_weights")) read_layout_weights(j.at("layout_weights"), config.layout);
    read_into(j, "alpha_threshold", config.alpha_threshold);
    read_into(j, "normalize_layout", config.normalize_layout);
    read_into(j, "workers", config.workers);
    read_into(j, "template_dir", config.template_dir);
    std::string mask_source;
    read_into(j, "mask_source", mask_source);
    if (mask_source == "external")
        config.mask_source = MaskSource::external;
    else if (!mask_source.empty() && mask_source != "alpha")
        throw ManifestError("mask_source must be alpha or external");

    const std::filesystem::path base = path.parent_path();
    if (j.contains("judge"))
        read_judge_backend(j.at("judge"), config.judge, config.judge_script);
    if (j.contains("reasoner"))
        read_judge_backend(j.at("reasoner"), config.reasoner, config.reasoner_script);
    if (j.contains("editor"))
        read_editor_backend(j.at("editor"), base, config.editor, config.editor_script);

    config.milde.validate();
    config.layout.validate();
    return config;
}

void apply_weights_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open weights file " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ManifestError("invalid JSON in weights file " + path.string());
    if (j.contains("milde_weights")) read_milde_weights(j.at("milde_weights"), config.milde);
    if (j.contains("layout_weights")) read_layout_weights(j.at("layout_weights"), config.layout);
    config.milde.validate();
    config.layout.validate();
}

RunReport cmd_evaluate(const std::filesystem::path& manifest_dir,
                       const std::filesystem::path& outputs_dir, const RunConfig& config) {
    const std::vector<LoadedInstance> corpus = load_corpus(manifest_dir);
    JudgeClient judge(config.judge, config.judge_script, config.templates());

    std::vector<InstanceReport> reports(corpus.size());
    parallel_for(corpus.size(), config.workers, [&](std::size_t i) {
        const LoadedInstance& item = corpus[i];
        const std::filesystem::path edited_path = outputs_dir / (item.instance.id + ".png");
        try {
            if (!std::filesystem::exists(edited_path)) {
                reports[i] = failed_instance(item.instance.id,
                                             "missing edited output " + edited_path.string());
                return;
            }
            const Raster edited = read_png_rgba(edited_path);

            std::vector<Mask> original_masks, edited_masks;
            if (config.mask_source == MaskSource::external) {
                if (!item.manifest.external_masks_index)
                    throw PreconditionError("mask_source=external but the manifest has no "
                                            "external_masks_index");
                original_masks =
                    load_mask_set(item.manifest_dir / *item.manifest.external_masks_index);
                const std::filesystem::path edited_index =
                    outputs_dir / (item.instance.id + "_masks.txt");
                if (!std::filesystem::exists(edited_index))
                    throw PreconditionError("mask_source=external but " + edited_index.string() +
                                            " is missing");
                edited_masks = load_mask_set(edited_index);
            } else {
                // Black-box fallback: treat both sides as flat images and
                // compare their alpha supports symmetrically.
                original_masks.push_back(mask_from_raster(composite(item.instance.document),
                                                          config.alpha_threshold, "document"));
                edited_masks.push_back(
                    mask_from_raster(edited, config.alpha_threshold, "edited"));
            }

            reports[i] = evaluate_one(
                item.instance, edited, original_masks, edited_masks,
                regions_for(item.instance, item.manifest, item.manifest_dir,
                            config.alpha_threshold),
                std::nullopt, judge, config);
        } catch (const Error& e) {
            reports[i] = failed_instance(item.instance.id, e.what());
        }
    });

    RunReport report;
    report.config = config.echo();
    report.instances = std::move(reports);
    report.summary = summarize(report.instances);
    return report;
}

RunReport cmd_agent(const std::filesystem::path& manifest_dir,
                    const std::filesystem::path& out_dir, const RunConfig& config) {
    const std::vector<LoadedInstance> corpus = load_corpus(manifest_dir);
    std::filesystem::create_directories(out_dir);

    JudgeClient judge(config.judge, config.judge_script, config.templates());
    JudgeClient reasoner(config.reasoner, config.reasoner_script, config.templates());
    EditorClient editor(config.editor, config.editor_script, config.templates());

    std::vector<InstanceReport> reports(corpus.size());
    parallel_for(corpus.size(), config.workers, [&](std::size_t i) {
        const LoadedInstance& item = corpus[i];
        try {
            AgentOptions options;
            options.alpha_threshold = config.alpha_threshold;
            const AgentResult result = run_agent(item.instance, reasoner, editor, options);

            const std::filesystem::path instance_dir = out_dir / item.instance.id;
            write_layers(result.document, instance_dir / "layers", "layers");
            const Raster edited = composite(result.document);
            write_png_rgba(out_dir / (item.instance.id + ".png"), edited);

            // Layered output on both sides: per-layer alpha masks.
            reports[i] = evaluate_one(
                item.instance, edited,
                per_layer_masks(item.instance.document, config.alpha_threshold),
                per_layer_masks(result.document, config.alpha_threshold),
                regions_for(item.instance, item.manifest, item.manifest_dir,
                            config.alpha_threshold),
                result.predicted_relevant(), judge, config);
        } catch (const Error& e) {
            reports[i] = failed_instance(item.instance.id, e.what());
        }
    });

    RunReport report;
    report.config = config.echo();
    report.instances = std::move(reports);
    report.summary = summarize(report.instances);
    return report;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

ScoreTable cmd_score(const std::filesystem::path& csv_path, const MildeWeights& weights) {
    weights.validate();
    std::ifstream in(csv_path);
    if (!in) throw ManifestError("cannot open " + csv_path.string());

    std::string line;
    if (!std::getline(in, line)) throw ManifestError("empty CSV " + csv_path.string());
    const std::vector<std::string> header = split_csv_line(line);

    int col_if = -1, col_lc = -1, col_aes = -1, col_tr = -1, col_label = -1, col_rating = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = lower(header[c]);
        if (name == "if") col_if = static_cast<int>(c);
        else if (name == "lc") col_lc = static_cast<int>(c);
        else if (name == "aes" || name == "a") col_aes = static_cast<int>(c);
        else if (name == "tr") col_tr = static_cast<int>(c);
        else if (name == "label" || name == "model") col_label = static_cast<int>(c);
        else if (name == "rating") col_rating = static_cast<int>(c);
    }
    if (col_if < 0 || col_lc < 0 || col_aes < 0 || col_tr < 0)
        throw ManifestError(csv_path.string() + ": header must name if, lc, aes and tr columns");

    ScoreTable table;
    int row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        auto cell_value = [&](int col) {
            if (col < 0 || static_cast<std::size_t>(col) >= cells.size())
                throw ManifestError(csv_path.string() + ": row " + std::to_string(row_number) +
                                    " is missing columns");
            try {
                return std::stod(cells[static_cast<std::size_t>(col)]);
            } catch (const std::exception&) {
                throw ManifestError(csv_path.string() + ": row " + std::to_string(row_number) +
                                    ": bad number '" + cells[static_cast<std::size_t>(col)] + "'");
            }
        };

        ScoreRow row;
        row.label = col_label >= 0 && static_cast<std::size_t>(col_label) < cells.size()
                        ? cells[static_cast<std::size_t>(col_label)]
                        : "row" + std::to_string(row_number - 1);
        row.raw = RawScores{cell_value(col_if), cell_value(col_lc), cell_value(col_tr),
                            cell_value(col_aes)};
        if (col_rating >= 0 && static_cast<std::size_t>(col_rating) < cells.size() &&
            !cells[static_cast<std::size_t>(col_rating)].empty())
            row.rating = cell_value(col_rating);

        row.milde = milde_score(row.raw, weights);
        row.dw_sum = dw_sum(row.raw, weights);
        row.geo_mean = geo_mean(row.raw, weights);
        row.hcore_sup = hcore_sup(row.raw, weights);
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw ManifestError(csv_path.string() + ": no data rows");

    std::vector<double> milde_col, rating_col;
    for (const ScoreRow& row : table.rows)
        if (row.rating) {
            milde_col.push_back(row.milde);
            rating_col.push_back(*row.rating);
        }
    if (rating_col.size() == table.rows.size() && rating_col.size() >= 2)
        table.spearman_vs_rating = spearman(milde_col, rating_col);
    return table;
}

DatagenResult cmd_datagen(const std::filesystem::path& raw_dir,
                          const std::filesystem::path& out_dir, const RunConfig& config) {
    const std::vector<LoadedInstance> corpus = load_corpus(raw_dir);
    std::filesystem::create_directories(out_dir);

    JudgeClient judge(config.judge, config.judge_script, config.templates());

    DatagenResult result;
    for (const LoadedInstance& item : corpus) {
        const Document consolidated = consolidate(item.instance.document, judge);
        std::vector<EditStep> steps = classify_steps(item.manifest.steps, judge);
        steps = match_steps(std::move(steps), consolidated, judge);

        DatagenInstanceResult instance_result;
        instance_result.id = item.instance.id;
        instance_result.layers_before = static_cast<int>(item.instance.document.layers().size());
        instance_result.layers_after = static_cast<int>(consolidated.layers().size());

        std::vector<std::string> gold_relevant;
        std::map<std::string, std::string> gold_instructions;
        for (const EditStep& step : steps) {
            if (!step.assigned_layer) {
                instance_result.unmatched_steps.push_back(step.text);
                continue;
            }
            const std::string& id = *step.assigned_layer;
            if (std::find(gold_relevant.begin(), gold_relevant.end(), id) == gold_relevant.end())
                gold_relevant.push_back(id);
            std::string& slot = gold_instructions[id];
            if (!slot.empty()) slot += '\n'; // several steps may land on one layer
            slot += step.text;
        }

        ManifestData manifest;
        manifest.id = item.instance.id;
        manifest.width = consolidated.width();
        manifest.height = consolidated.height();
        manifest.instruction = item.instance.instruction;
        manifest.layers = write_layers(consolidated, out_dir / item.instance.id / "layers",
                                       std::filesystem::path(item.instance.id) / "layers");
        manifest.gold_relevant = std::move(gold_relevant);
        manifest.gold_layer_instructions = std::move(gold_instructions);
        write_manifest(manifest, out_dir / (item.instance.id + ".json"));

        result.instances.push_back(std::move(instance_result));
    }

    // Sidecar report: what was consolidated and which steps stayed unmatched.
    json sidecar;
    sidecar["instances"] = json::array();
    for (const DatagenInstanceResult& r : result.instances)
        sidecar["instances"].push_back({{"id", r.id},
                                        {"layers_before", r.layers_before},
                                        {"layers_after", r.layers_after},
                                        {"unmatched_steps", r.unmatched_steps}});
    std::ofstream sidecar_out(out_dir / "datagen_report.json");
    sidecar_out << sidecar.dump(2) << '\n';

    return result;
}

} // namespace milde
