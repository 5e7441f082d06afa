#include <benchmark/benchmark.h>

#include <random>

#include "milde/reward.hpp"
#include "milde/scoring.hpp"

using namespace milde;

namespace {

void bm_milde_score(benchmark::State& state) {
    const MildeWeights weights;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> pct(0.0, 100.0), aes(1.0, 10.0);
    std::vector<RawScores> rows(1024);
    for (RawScores& row : rows) row = RawScores{pct(rng), pct(rng), pct(rng), aes(rng)};

    for (auto _ : state) {
        double sum = 0.0;
        for (const RawScores& row : rows) sum += milde_score(row, weights);
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(rows.size()));
}

void bm_bleu(benchmark::State& state) {
    const std::string candidate = "change the heading text to winter camp registration open";
    const std::string reference = "change the heading to winter camp registration is now open";
    for (auto _ : state) benchmark::DoNotOptimize(bleu(candidate, reference));
}

} // namespace

BENCHMARK(bm_milde_score);
BENCHMARK(bm_bleu);
