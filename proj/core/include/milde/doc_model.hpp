#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "milde/geometry.hpp"
#include "milde/raster.hpp"

namespace milde {

enum class LayerKind { text, decoration, image };

const char* to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& s);

/// One transparent layer of a design document. The raster always has the
/// parent document's dimensions; layers never carry an offset.
struct Layer {
    std::string id;
    Raster pixels;
    int z_index = 0;
    LayerKind kind = LayerKind::image;
    std::optional<Rect> bbox; // optional layout metadata from the manifest

    bool operator==(const Layer&) const = default;
};

/// A z-ordered stack of same-size layers. Layers are kept sorted ascending by
/// z_index; ids and z_index values are unique. Immutable after construction.
class Document {
public:
    Document(int width, int height, std::vector<Layer> layers);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<Layer>& layers() const { return layers_; }

    const Layer* find(const std::string& id) const;
    std::set<std::string> layer_ids() const;

    bool operator==(const Document&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Layer> layers_;
};

/// Binary spatial mask over a document canvas.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // 0 or 1, row-major
    std::optional<std::string> source_layer;

    Mask() = default;
    Mask(int w, int h)
        : width(w), height(h),
          bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t area() const;
    bool empty() const { return area() == 0; }
    bool same_size(const Mask& o) const { return width == o.width && height == o.height; }
};

/// A yes/no question grounded in one edited layer, with its expected answer.
struct QAPair {
    std::string question;
    bool expected_yes = true;
    std::string target_layer;
};

/// A benchmark item: the document, the document-level instruction, the gold
/// set of layers that must change, their gold layer-wise instructions, and
/// optionally precomputed QA pairs. `no-op` layers are simply absent from
/// gold_layer_instructions.
struct BenchmarkInstance {
    std::string id;
    Document document;
    std::string instruction;
    std::set<std::string> gold_relevant;
    std::map<std::string, std::string> gold_layer_instructions;
    std::optional<std::vector<QAPair>> qa_pairs;

    /// Throws StructuralError when the gold fields do not agree with the document.
    void validate() const;
};

/// Renders the stack bottom-to-top with the straight-alpha "over" operator.
/// Arithmetic runs in double precision over the whole stack and each channel
/// is rounded half-up once at the end.
Raster composite(const Document& document);

/// Binary mask of the pixels whose alpha fraction reaches `threshold`
/// (alpha/255 >= threshold). threshold must be in [0,1].
Mask alpha_mask(const Layer& layer, double threshold = 0.5);

/// Re-anchors an editor's output to the original layer: color channels are
/// taken from `edited_pixels` inside the original alpha support, the original
/// alpha is restored there, and everything outside the support becomes fully
/// transparent (all four channels zero). id, z_index and kind are preserved.
Layer apply_layer_edit(const Layer& original, const Raster& edited_pixels);

/// Substitutes the pixel content of the listed layers. Identity, z order and
/// kind stay with the document; untouched layers are returned bit-identical.
Document replace_layers(const Document& document, const std::map<std::string, Layer>& edits);

/// Tight bounding box of the set bits; empty Rect for an empty mask.
Rect support_bbox(const Mask& mask);

} // namespace milde
