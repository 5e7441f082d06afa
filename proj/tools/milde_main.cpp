// milde: batch front-end for layered-document editing evaluation.
//
// Subcommands: evaluate, agent, score, datagen, report.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "milde/commands.hpp"
#include "milde/errors.hpp"
#include "milde/report.hpp"

namespace {

using milde::RunConfig;

struct CommonFlags {
    std::string config_path;
    std::string weights_path;
    int workers = 0; // 0 = not set on the command line
    bool normalize_layout = false;
    bool normalize_layout_set = false;
    std::string mask_source;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration");
    cmd->add_option("--weights", flags.weights_path, "JSON weights override");
    cmd->add_option("--workers", flags.workers, "instance-level parallelism");
    cmd->add_flag("--normalize-layout", flags.normalize_layout,
                  "report the layout score divided by its positive-weight ceiling")
        ->trigger_on_parse();
    cmd->add_option("--mask-source", flags.mask_source, "alpha|external")
        ->check(CLI::IsMember({"alpha", "external"}));
}

// Precedence: command-line flags > config file > defaults.
RunConfig resolve_config(const CommonFlags& flags, const CLI::App* cmd) {
    RunConfig config;
    if (!flags.config_path.empty()) config = milde::load_config(flags.config_path);
    if (!flags.weights_path.empty()) milde::apply_weights_file(config, flags.weights_path);
    if (flags.workers > 0) config.workers = flags.workers;
    if (cmd->count("--normalize-layout") > 0) config.normalize_layout = true;
    if (flags.mask_source == "alpha") config.mask_source = milde::MaskSource::alpha;
    if (flags.mask_source == "external") config.mask_source = milde::MaskSource::external;
    return config;
}

void write_outputs(const milde::RunReport& report, const std::string& report_path,
                   double wall_seconds) {
    milde::write_report(report, report_path);
    // Timing lives in a sidecar so the report itself stays byte-stable.
    nlohmann::ordered_json timing;
    timing["wall_seconds"] = wall_seconds;
    timing["instances"] = report.summary.instances;
    std::ofstream out(report_path + ".timing.json");
    out << timing.dump(2) << '\n';

    std::cout << "instances: " << report.summary.instances
              << "  failures: " << report.summary.failures << '\n'
              << "mean IF " << report.summary.mean_if << "  mean LC "
              << report.summary.mean_lc << "  mean milde(x100) "
              << report.summary.mean_milde * 100.0 << '\n'
              << "report written to " << report_path << '\n';
}

void print_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw milde::ManifestError("cannot open report " + path);
    nlohmann::json j = nlohmann::json::parse(in);

    std::cout << std::left << std::setw(20) << "instance" << std::right << std::setw(8) << "IF"
              << std::setw(8) << "LC" << std::setw(8) << "TR" << std::setw(7) << "A"
              << std::setw(10) << "milde" << '\n';
    for (const auto& inst : j.at("instances")) {
        if (inst.value("failed", false)) {
            std::cout << std::left << std::setw(20) << inst.at("id").get<std::string>()
                      << "  FAILED: " << inst.value("failure", "") << '\n';
            continue;
        }
        const auto& m = inst.at("metrics");
        std::cout << std::left << std::setw(20) << inst.at("id").get<std::string>() << std::right
                  << std::fixed << std::setprecision(2) << std::setw(8)
                  << m.at("instruction_following").get<double>() << std::setw(8)
                  << m.at("layout_consistency").get<double>() << std::setw(8)
                  << (m.at("text_rendering").is_null() ? -1.0
                                                       : m.at("text_rendering").get<double>())
                  << std::setw(7) << m.at("aesthetics").get<double>() << std::setw(10)
                  << inst.at("scores").at("milde_x100").get<double>() << '\n';
    }
    const auto& s = j.at("summary");
    std::cout << "-- corpus means: IF " << s.at("mean_instruction_following").get<double>()
              << "  LC " << s.at("mean_layout_consistency").get<double>() << "  milde(x100) "
              << s.at("mean_milde_x100").get<double>() << "  (" << s.at("failures").get<int>()
              << " failures)\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered-document editing: evaluation, agent pipeline and dataset tooling"};
    app.require_subcommand(1);

    std::string manifests, outputs, report_path, csv_path, raw_docs;

    CommonFlags eval_flags;
    CLI::App* cmd_eval = app.add_subcommand("evaluate", "score black-box edited outputs");
    cmd_eval->add_option("--manifests", manifests, "directory of instance manifests")->required();
    cmd_eval->add_option("--outputs", outputs, "directory with <id>.png edited outputs")
        ->required();
    cmd_eval->add_option("--report", report_path, "report path (default report.json)");
    add_common(cmd_eval, eval_flags);

    CommonFlags agent_flags;
    CLI::App* cmd_agent = app.add_subcommand("agent", "run the layer-wise edit pipeline");
    cmd_agent->add_option("--manifests", manifests, "directory of instance manifests")
        ->required();
    cmd_agent->add_option("--outputs", outputs, "output directory for edited documents")
        ->required();
    cmd_agent->add_option("--report", report_path, "report path (default report.json)");
    add_common(cmd_agent, agent_flags);

    CommonFlags score_flags;
    CLI::App* cmd_score = app.add_subcommand("score", "recompute composite scores from a CSV");
    cmd_score->add_option("--csv", csv_path, "CSV with if,lc,aes,tr[,label][,rating] columns")
        ->required();
    add_common(cmd_score, score_flags);

    CommonFlags datagen_flags;
    CLI::App* cmd_datagen =
        app.add_subcommand("datagen", "consolidate raw documents and align steps to layers");
    cmd_datagen->add_option("--raw", raw_docs, "directory of raw document manifests")->required();
    cmd_datagen->add_option("--outputs", outputs, "output directory for benchmark manifests")
        ->required();
    add_common(cmd_datagen, datagen_flags);

    CLI::App* cmd_report = app.add_subcommand("report", "print a run report as a table");
    cmd_report->add_option("--report", report_path, "report JSON to print")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        };

        if (cmd_eval->parsed()) {
            const RunConfig config = resolve_config(eval_flags, cmd_eval);
            const milde::RunReport report = milde::cmd_evaluate(manifests, outputs, config);
            write_outputs(report, report_path.empty() ? "report.json" : report_path, elapsed());
        } else if (cmd_agent->parsed()) {
            const RunConfig config = resolve_config(agent_flags, cmd_agent);
            const milde::RunReport report = milde::cmd_agent(manifests, outputs, config);
            write_outputs(report, report_path.empty() ? "report.json" : report_path, elapsed());
        } else if (cmd_score->parsed()) {
            const RunConfig config = resolve_config(score_flags, cmd_score);
            const milde::ScoreTable table = milde::cmd_score(csv_path, config.milde);
            std::cout << std::left << std::setw(24) << "label" << std::right << std::setw(12)
                      << "milde_x100" << std::setw(10) << "dw_sum" << std::setw(10) << "geo"
                      << std::setw(10) << "hcore" << '\n';
            for (const milde::ScoreRow& row : table.rows)
                std::cout << std::left << std::setw(24) << row.label << std::right << std::fixed
                          << std::setprecision(4) << std::setw(12) << row.milde * 100.0
                          << std::setw(10) << row.dw_sum << std::setw(10) << row.geo_mean
                          << std::setw(10) << row.hcore_sup << '\n';
            if (table.spearman_vs_rating)
                std::cout << "spearman(milde, rating) = " << *table.spearman_vs_rating << '\n';
        } else if (cmd_datagen->parsed()) {
            const RunConfig config = resolve_config(datagen_flags, cmd_datagen);
            const milde::DatagenResult result = milde::cmd_datagen(raw_docs, outputs, config);
            for (const milde::DatagenInstanceResult& r : result.instances) {
                std::cout << r.id << ": " << r.layers_before << " -> " << r.layers_after
                          << " layers";
                if (!r.unmatched_steps.empty())
                    std::cout << ", " << r.unmatched_steps.size() << " unmatched steps";
                std::cout << '\n';
            }
        } else if (cmd_report->parsed()) {
            print_report_file(report_path);
        }
    } catch (const milde::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
