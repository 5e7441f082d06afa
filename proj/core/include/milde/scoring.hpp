#pragma once

#include <vector>

namespace milde {

/// The four per-document criteria before normalization: percents for
/// instruction following / layout consistency / text rendering, and the
/// aesthetics predictor value on its native 1-10 scale.
struct RawScores {
    double if_pct = 0.0;
    double lc_pct = 0.0;
    double tr_pct = 0.0;
    double aes = 1.0;

    void validate() const;
};

struct MildeWeights {
    double tau = 0.3;
    double k = 10.0;
    double w_if = 0.30;
    double w_lc = 0.30;
    double w_tr = 0.30;
    double w_a = 0.10;
    double w_sy = 0.15;

    /// w_if + w_lc + w_tr + w_a must equal 1 (tolerance 1e-9), k > 0, 0 < tau < 1.
    void validate() const;
};

/// Normalized sigmoid gate on the instruction-following fraction: exactly 0 at
/// if_h = 0 and exactly 1 at if_h = 1, strictly increasing in between.
double gate(double if_h, double tau, double k);

/// Gated composite score on the [0,1] scale:
///   w_if*IF + w_tr*TR + g(IF)*(w_lc*LC + w_a*A) + w_sy*g(IF)*IF*LC
/// where IF/LC/TR are percents divided by 100 and A is aesthetics divided by 10.
double milde_score(const RawScores& raw, const MildeWeights& w = {});

/// Plain weighted sum of the four normalized criteria.
double dw_sum(const RawScores& raw, const MildeWeights& w = {});

/// Weighted geometric mean; any zero criterion drives the result to 0.
double geo_mean(const RawScores& raw, const MildeWeights& w = {});

/// Harmonic mean of the core (IF, TR) and support (LC, A) weighted groups.
double hcore_sup(const RawScores& raw, const MildeWeights& w = {});

/// Spearman rank correlation with average ranks for ties.
/// Throws PreconditionError for length mismatch, length < 2, or a constant input.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

} // namespace milde
