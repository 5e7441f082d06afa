#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "milde/layout_metric.hpp"
#include "milde/metrics.hpp"
#include "milde/scoring.hpp"

namespace milde {

struct InstanceReport {
    std::string id;
    bool failed = false;
    std::string failure;
    MetricReport metrics;
    double milde = 0.0; // fraction; milde * 100 is also written to the report
    double dw_sum = 0.0;
    double geo_mean = 0.0;
    double hcore_sup = 0.0;
};

struct CorpusSummary {
    int instances = 0;
    int failures = 0;
    int tr_applicable = 0;
    double mean_if = 0.0;
    std::optional<double> mean_tr; // not-applicable instances leave the denominator
    double mean_aes = 0.0;
    double mean_lc = 0.0;
    std::optional<double> mean_lda;
    double mean_milde = 0.0;
    double mean_dw_sum = 0.0;
    double mean_geo_mean = 0.0;
    double mean_hcore_sup = 0.0;
};

/// Everything needed to re-run the evaluation that produced a report.
struct ConfigEcho {
    MildeWeights milde;
    LayoutWeights layout;
    double alpha_threshold = 0.5;
    bool normalize_layout = false;
    std::string mask_source = "alpha";
    int workers = 1;
    std::uint64_t template_fingerprint = 0;
    std::string judge;
    std::string reasoner;
    std::string editor;
};

struct RunReport {
    ConfigEcho config;
    std::vector<InstanceReport> instances; // sorted by instance id
    CorpusSummary summary;
};

/// Unweighted means over successful instances; failures only counted.
CorpusSummary summarize(const std::vector<InstanceReport>& instances);

/// Deterministic JSON: stable key order, instances sorted by id, no
/// wall-clock content (timing goes to a sidecar so reports stay byte-stable).
std::string report_to_json_string(const RunReport& report);

void write_report(const RunReport& report, const std::filesystem::path& path);

} // namespace milde
