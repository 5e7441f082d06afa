#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "milde/doc_model.hpp"
#include "milde/geometry.hpp"

namespace milde {

struct LayerEntry {
    std::string id;
    int z = 0;
    LayerKind kind = LayerKind::image;
    std::string png; // path relative to the manifest file
    std::optional<Rect> bbox;
};

/// On-disk description of one benchmark instance. Layers stay as separate PNG
/// files so transparency round-trips losslessly.
struct ManifestData {
    int schema_version = 1;
    std::string id;
    int width = 0;
    int height = 0;
    std::string instruction;
    std::vector<LayerEntry> layers;
    std::vector<std::string> gold_relevant;
    std::map<std::string, std::string> gold_layer_instructions;
    std::optional<std::vector<QAPair>> qa_pairs;
    std::optional<std::string> external_masks_index; // relative path to a mask index file
    std::optional<std::string> regions_file;         // relative path, lines: id x y w h
    std::vector<std::string> steps;                  // datagen input
};

/// Parses and validates a manifest JSON file (referenced files must exist).
ManifestData load_manifest(const std::filesystem::path& path);

void write_manifest(const ManifestData& manifest, const std::filesystem::path& path);

/// Loads layer PNGs and builds the validated in-memory instance.
BenchmarkInstance load_instance(const ManifestData& manifest,
                                const std::filesystem::path& manifest_dir);

/// Writes the document's layers (and the manifest-facing entries) under dir.
std::vector<LayerEntry> write_layers(const Document& document,
                                     const std::filesystem::path& dir,
                                     const std::filesystem::path& relative_prefix);

/// Mask index file: one `<png-filename> <mask-id>` pair per line, paths
/// relative to the index file's directory. Masks load in file order.
std::vector<Mask> load_mask_set(const std::filesystem::path& index_file);

/// Region file: one `id x y w h` rectangle per line.
std::vector<std::pair<std::string, Rect>> load_regions(const std::filesystem::path& path);

/// All *.json manifests in a directory, sorted by filename.
std::vector<std::filesystem::path> list_manifests(const std::filesystem::path& dir);

} // namespace milde
