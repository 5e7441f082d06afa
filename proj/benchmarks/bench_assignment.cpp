#include <benchmark/benchmark.h>

#include <random>

#include "milde/assignment.hpp"

using namespace milde;

namespace {

SimilarityMatrix random_similarity(std::size_t n) {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    SimilarityMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m.set(r, c, value(rng));
    return m;
}

void bm_hungarian_max(benchmark::State& state) {
    const SimilarityMatrix m = random_similarity(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hungarian_max(m));
}

} // namespace

// document layer counts range up to ~12 after consolidation; 32 is headroom
BENCHMARK(bm_hungarian_max)->Arg(4)->Arg(12)->Arg(32);
