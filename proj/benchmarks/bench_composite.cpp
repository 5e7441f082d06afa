#include <benchmark/benchmark.h>

#include <random>

#include "milde/doc_model.hpp"

using namespace milde;

namespace {

Document make_stack(int side, int layers) {
    std::mt19937 rng(9001);
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<Layer> stack;
    for (int i = 0; i < layers; ++i) {
        Layer layer;
        layer.id = "L" + std::to_string(i);
        layer.z_index = i;
        layer.pixels = Raster(side, side);
        for (Rgba& px : layer.pixels.pixels())
            px = Rgba{static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                      static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng))};
        stack.push_back(std::move(layer));
    }
    return Document(side, side, std::move(stack));
}

void bm_composite(benchmark::State& state) {
    const Document doc = make_stack(static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(composite(doc));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) *
                            state.range(1));
}

void bm_alpha_mask(benchmark::State& state) {
    const Document doc = make_stack(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(alpha_mask(doc.layers().front(), 0.5));
}

} // namespace

BENCHMARK(bm_composite)->Args({128, 4})->Args({256, 6})->Args({512, 8});
BENCHMARK(bm_alpha_mask)->Arg(128)->Arg(512);
