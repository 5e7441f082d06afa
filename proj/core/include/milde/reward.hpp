#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "milde/agent.hpp"

namespace milde {

struct RewardBreakdown {
    double r_f = 0.0; // format validity
    double r_d = 0.0; // decision correctness
    double r_p = 0.0; // prompt quality; meaningful only when r_d = 1
    double total = 0.0;
};

/// 1 iff the raw reasoner text parses under the tagged grammar.
double format_reward(std::string_view raw_text, const std::string& layer_id);

/// Per-layer reward: r_d compares the parsed decision to the gold one (a
/// format error counts as no decision, so r_d = 0); on a correct edit decision
/// r_p is the BLEU of the predicted prompt against the gold prompt, and a
/// correct no-op earns r_p = 1. Total is (r_f+r_d+r_p)/3 when the decision is
/// correct and (r_f+r_d)/2 otherwise.
RewardBreakdown per_layer_reward(const ReasonerParse& parse, bool gold_decision,
                                 const std::optional<std::string>& gold_prompt);

/// Sentence-level BLEU, n-grams up to 4 with uniform weights and brevity
/// penalty. Tokenization lowercases, strips punctuation and splits on
/// whitespace. The unigram precision is used raw (zero overlap scores 0);
/// higher-order precisions get add-one smoothing, so bleu(x, x) = 1 for any
/// non-empty x. Empty candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference);

/// Group-relative advantages: (r - mean) / population std. A group with
/// std below 1e-8 gets all-zero advantages. Requires at least 2 rewards.
std::vector<double> group_advantages(const std::vector<double>& rewards);

/// Clipped surrogate: min(ratio*A, clip(ratio, 1-eps, 1+eps)*A) - beta*kl.
double grpo_surrogate(double ratio, double advantage, double epsilon, double kl, double beta);

} // namespace milde
