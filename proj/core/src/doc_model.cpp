#include "milde/doc_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace milde {

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::text: return "text";
        case LayerKind::decoration: return "decoration";
        case LayerKind::image: return "image";
    }
    return "image";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "text") return LayerKind::text;
    if (s == "decoration") return LayerKind::decoration;
    if (s == "image") return LayerKind::image;
    throw StructuralError("unknown layer kind: '" + s + "'");
}

Document::Document(int width, int height, std::vector<Layer> layers)
    : width_(width), height_(height), layers_(std::move(layers)) {
    if (width_ <= 0 || height_ <= 0)
        throw StructuralError("document dimensions must be positive");
    if (layers_.empty())
        throw StructuralError("document must have at least one layer");

    std::unordered_set<std::string> ids;
    std::unordered_set<int> zs;
    for (const Layer& layer : layers_) {
        if (layer.pixels.width() != width_ || layer.pixels.height() != height_)
            throw StructuralError("layer '" + layer.id + "' does not match document dimensions");
        if (!ids.insert(layer.id).second)
            throw StructuralError("duplicate layer id '" + layer.id + "'");
        if (!zs.insert(layer.z_index).second)
            throw StructuralError("duplicate z_index in document (layer '" + layer.id + "')");
    }
    std::sort(layers_.begin(), layers_.end(),
              [](const Layer& a, const Layer& b) { return a.z_index < b.z_index; });
}

const Layer* Document::find(const std::string& id) const {
    for (const Layer& layer : layers_)
        if (layer.id == id) return &layer;
    return nullptr;
}

std::set<std::string> Document::layer_ids() const {
    std::set<std::string> ids;
    for (const Layer& layer : layers_) ids.insert(layer.id);
    return ids;
}

std::size_t Mask::area() const {
    return static_cast<std::size_t>(
        std::accumulate(bits.begin(), bits.end(), std::size_t{0},
                        [](std::size_t acc, std::uint8_t b) { return acc + (b != 0); }));
}

void BenchmarkInstance::validate() const {
    const std::set<std::string> ids = document.layer_ids();
    for (const std::string& id : gold_relevant)
        if (!ids.count(id))
            throw StructuralError("gold_relevant names unknown layer '" + id + "'");
    for (const auto& [id, text] : gold_layer_instructions) {
        (void)text;
        if (!gold_relevant.count(id))
            throw StructuralError("gold_layer_instructions key '" + id +
                                  "' is not in gold_relevant");
    }
    if (qa_pairs) {
        for (const QAPair& qa : *qa_pairs)
            if (qa.question.empty())
                throw StructuralError("qa pair with empty question");
    }
}

namespace {

inline std::uint8_t round_channel(double v) {
    // half-up rounding of v*255; v is always in [0,1] here
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

} // namespace

Raster composite(const Document& document) {
    const int w = document.width();
    const int h = document.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;

    std::vector<double> acc_r(n, 0.0), acc_g(n, 0.0), acc_b(n, 0.0), acc_a(n, 0.0);

    for (const Layer& layer : document.layers()) {
        const std::span<const Rgba> px = layer.pixels.pixels();
        for (std::size_t i = 0; i < n; ++i) {
            const double fa = px[i].a / 255.0;
            const double fr = px[i].r / 255.0;
            const double fg = px[i].g / 255.0;
            const double fb = px[i].b / 255.0;
            const double out_a = fa + acc_a[i] * (1.0 - fa);
            if (out_a > 0.0) {
                acc_r[i] = (fa * fr + acc_a[i] * acc_r[i] * (1.0 - fa)) / out_a;
                acc_g[i] = (fa * fg + acc_a[i] * acc_g[i] * (1.0 - fa)) / out_a;
                acc_b[i] = (fa * fb + acc_a[i] * acc_b[i] * (1.0 - fa)) / out_a;
            } else {
                acc_r[i] = acc_g[i] = acc_b[i] = 0.0;
            }
            acc_a[i] = out_a;
        }
    }

    Raster out(w, h);
    std::span<Rgba> dst = out.pixels();
    for (std::size_t i = 0; i < n; ++i)
        dst[i] = Rgba{round_channel(acc_r[i]), round_channel(acc_g[i]),
                      round_channel(acc_b[i]), round_channel(acc_a[i])};
    return out;
}

Mask alpha_mask(const Layer& layer, double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        throw PreconditionError("alpha threshold must be in [0,1]");
    Mask mask(layer.pixels.width(), layer.pixels.height());
    mask.source_layer = layer.id;
    const std::span<const Rgba> px = layer.pixels.pixels();
    // alpha/255 >= threshold, compared without dividing so 128 vs 0.5 is exact
    const double cutoff = threshold * 255.0;
    for (std::size_t i = 0; i < px.size(); ++i)
        mask.bits[i] = (static_cast<double>(px[i].a) >= cutoff) ? 1 : 0;
    return mask;
}

Layer apply_layer_edit(const Layer& original, const Raster& edited_pixels) {
    if (!original.pixels.same_size(edited_pixels))
        throw StructuralError("edited raster does not match layer dimensions");

    Layer out = original;
    const std::span<const Rgba> src = original.pixels.pixels();
    const std::span<const Rgba> edit = edited_pixels.pixels();
    const std::span<Rgba> dst = out.pixels.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i].a == 0) {
            dst[i] = Rgba{};
        } else {
            dst[i] = Rgba{edit[i].r, edit[i].g, edit[i].b, src[i].a};
        }
    }
    return out;
}

Document replace_layers(const Document& document, const std::map<std::string, Layer>& edits) {
    std::vector<Layer> layers = document.layers();
    for (const auto& [id, replacement] : edits) {
        auto it = std::find_if(layers.begin(), layers.end(),
                               [&](const Layer& l) { return l.id == id; });
        if (it == layers.end())
            throw LookupError("replace_layers: unknown layer id '" + id + "'");
        if (replacement.pixels.width() != document.width() ||
            replacement.pixels.height() != document.height())
            throw StructuralError("replacement for '" + id + "' has wrong dimensions");
        it->pixels = replacement.pixels;
    }
    return Document(document.width(), document.height(), std::move(layers));
}

Rect support_bbox(const Mask& mask) {
    int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return Rect{};
    return Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

} // namespace milde
