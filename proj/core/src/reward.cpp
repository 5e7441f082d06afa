#include "milde/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "milde/errors.hpp"

namespace milde {

double format_reward(std::string_view raw_text, const std::string& layer_id) {
    return parse_reasoner(raw_text, layer_id).ok() ? 1.0 : 0.0;
}

RewardBreakdown per_layer_reward(const ReasonerParse& parse, bool gold_decision,
                                 const std::optional<std::string>& gold_prompt) {
    if (gold_decision != gold_prompt.has_value())
        throw PreconditionError("gold prompt must be present exactly when gold decision is true");

    RewardBreakdown r;
    r.r_f = parse.ok() ? 1.0 : 0.0;
    const bool decision_correct = parse.ok() && parse.output->decision == gold_decision;
    r.r_d = decision_correct ? 1.0 : 0.0;

    if (decision_correct) {
        r.r_p = gold_decision ? bleu(parse.output->prompt.value_or(""), *gold_prompt) : 1.0;
        r.total = (r.r_f + r.r_d + r.r_p) / 3.0;
    } else {
        r.r_p = 0.0;
        r.total = (r.r_f + r.r_d) / 2.0;
    }
    return r;
}

namespace {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char raw : text) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c) || raw == '_') {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens,
                                                     std::size_t n) {
    std::map<std::vector<std::string>, int> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

} // namespace

double bleu(std::string_view candidate, std::string_view reference) {
    const std::vector<std::string> cand = tokenize(candidate);
    const std::vector<std::string> ref = tokenize(reference);
    if (cand.empty()) return 0.0;

    double log_precision_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto cand_ngrams = ngram_counts(cand, n);
        const auto ref_ngrams = ngram_counts(ref, n);
        long long matched = 0, total = 0;
        for (const auto& [gram, count] : cand_ngrams) {
            total += count;
            const auto it = ref_ngrams.find(gram);
            if (it != ref_ngrams.end()) matched += std::min(count, it->second);
        }
        double precision;
        if (n == 1) {
            if (matched == 0) return 0.0;
            precision = static_cast<double>(matched) / static_cast<double>(total);
        } else {
            precision = static_cast<double>(matched + 1) / static_cast<double>(total + 1);
        }
        log_precision_sum += 0.25 * std::log(precision);
    }

    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
    return brevity * std::exp(log_precision_sum);
}

std::vector<double> group_advantages(const std::vector<double>& rewards) {
    if (rewards.size() < 2)
        throw PreconditionError("group_advantages: need at least two rewards");

    const double n = static_cast<double>(rewards.size());
    const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
    double variance = 0.0;
    for (const double r : rewards) variance += (r - mean) * (r - mean);
    const double std_dev = std::sqrt(variance / n); // population std

    std::vector<double> advantages(rewards.size(), 0.0);
    if (std_dev < 1e-8) return advantages;
    for (std::size_t i = 0; i < rewards.size(); ++i)
        advantages[i] = (rewards[i] - mean) / std_dev;
    return advantages;
}

double grpo_surrogate(double ratio, double advantage, double epsilon, double kl, double beta) {
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage) - beta * kl;
}

} // namespace milde
