#include "milde/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "milde/errors.hpp"

namespace milde {

void RawScores::validate() const {
    if (!(if_pct >= 0.0 && if_pct <= 100.0) || !(lc_pct >= 0.0 && lc_pct <= 100.0) ||
        !(tr_pct >= 0.0 && tr_pct <= 100.0))
        throw PreconditionError("raw percents must lie in [0,100]");
    // The predictor range is 1-10; 0 is additionally accepted as the
    // degenerate all-zero point where every aggregator vanishes.
    if (!(aes >= 0.0 && aes <= 10.0))
        throw PreconditionError("aesthetics value must lie in [1,10] (or be exactly 0)");
}

void MildeWeights::validate() const {
    if (std::abs(w_if + w_lc + w_tr + w_a - 1.0) > 1e-9)
        throw PreconditionError("milde weights w_if + w_lc + w_tr + w_a must sum to 1");
    if (!(k > 0.0)) throw PreconditionError("gate steepness k must be positive");
    if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("gate threshold tau must be in (0,1)");
    if (w_sy < 0.0) throw PreconditionError("synergy weight must be non-negative");
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Normalized {
    double if_h, lc_h, tr_h, a_h;
};

Normalized normalize(const RawScores& raw) {
    raw.validate();
    return Normalized{raw.if_pct / 100.0, raw.lc_pct / 100.0, raw.tr_pct / 100.0, raw.aes / 10.0};
}

} // namespace

double gate(double if_h, double tau, double k) {
    const double floor = sigmoid(-k * tau);
    const double ceil = sigmoid(k * (1.0 - tau));
    return (sigmoid(k * (if_h - tau)) - floor) / (ceil - floor);
}

double milde_score(const RawScores& raw, const MildeWeights& w) {
    w.validate();
    const Normalized n = normalize(raw);
    const double g = gate(n.if_h, w.tau, w.k);
    return w.w_if * n.if_h + w.w_tr * n.tr_h + g * (w.w_lc * n.lc_h + w.w_a * n.a_h) +
           w.w_sy * g * n.if_h * n.lc_h;
}

double dw_sum(const RawScores& raw, const MildeWeights& w) {
    w.validate();
    const Normalized n = normalize(raw);
    return w.w_if * n.if_h + w.w_tr * n.tr_h + w.w_lc * n.lc_h + w.w_a * n.a_h;
}

double geo_mean(const RawScores& raw, const MildeWeights& w) {
    w.validate();
    const Normalized n = normalize(raw);
    if (n.if_h == 0.0 || n.tr_h == 0.0 || n.lc_h == 0.0 || n.a_h == 0.0) return 0.0;
    const double sum_w = w.w_if + w.w_tr + w.w_lc + w.w_a;
    const double log_mean = w.w_if * std::log(n.if_h) + w.w_tr * std::log(n.tr_h) +
                            w.w_lc * std::log(n.lc_h) + w.w_a * std::log(n.a_h);
    return std::exp(log_mean / sum_w);
}

double hcore_sup(const RawScores& raw, const MildeWeights& w) {
    w.validate();
    const Normalized n = normalize(raw);
    const double core = (w.w_if * n.if_h + w.w_tr * n.tr_h) / (w.w_if + w.w_tr);
    const double sup = (w.w_lc * n.lc_h + w.w_a * n.a_h) / (w.w_lc + w.w_a);
    if (core + sup == 0.0) return 0.0;
    return 2.0 * core * sup / (core + sup);
}

namespace {

// Average ranks (1-based); ties share the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(v.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw PreconditionError("spearman: length mismatch");
    if (a.size() < 2) throw PreconditionError("spearman: need at least two observations");

    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double mean_a = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mean_b = std::accumulate(rb.begin(), rb.end(), 0.0) / n;

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - mean_a;
        const double db = rb[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0)
        throw PreconditionError("spearman: constant input has no rank ordering");
    return cov / std::sqrt(var_a * var_b);
}

} // namespace milde
