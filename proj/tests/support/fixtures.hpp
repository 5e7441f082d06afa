#pragma once

// Synthetic documents, masks and on-disk corpora for tests.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "milde/doc_model.hpp"
#include "milde/judge.hpp"
#include "milde/manifest.hpp"

namespace milde::testing {

/// Layer filled with `fill` inside `support` and fully transparent elsewhere.
Layer solid_layer(const std::string& id, int z, LayerKind kind, int width, int height,
                  const Rect& support, Rgba fill);

/// Layer whose pixels (all four channels) are uniformly random. Zero-alpha
/// pixels are normalized to all-zero so identity edits round-trip.
Layer random_layer(const std::string& id, int z, LayerKind kind, int width, int height,
                   std::mt19937& rng);

/// Like random_layer but transparent outside a random rectangle.
Layer random_region_layer(const std::string& id, int z, LayerKind kind, int width, int height,
                          std::mt19937& rng);

Document random_document(int width, int height, int n_layers, std::mt19937& rng,
                         bool region_layers = false);

Mask rect_mask(int width, int height, const Rect& r);

/// Fresh unique directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// A small deterministic instance: three 64x48 layers (background image,
/// text, decoration), gold edit on the text layer, precomputed QA pair.
struct FixtureInstance {
    ManifestData manifest;
    BenchmarkInstance instance;
};
FixtureInstance make_fixture_instance(const std::string& id);

/// Writes `count` fixture instances (manifest + layer PNGs) under dir.
void write_fixture_corpus(const std::filesystem::path& dir, int count);

/// Judge script answering every fixture QA question with "yes" and OCR with 1.
JudgeScript agreeable_judge_script();

/// Reasoner script that reproduces the fixtures' gold decisions.
JudgeScript oracle_reasoner_script();

} // namespace milde::testing
