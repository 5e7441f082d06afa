#include "fixtures.hpp"

#include <atomic>

#include "milde/png_io.hpp"

namespace milde::testing {

Layer solid_layer(const std::string& id, int z, LayerKind kind, int width, int height,
                  const Rect& support, Rgba fill) {
    Layer layer;
    layer.id = id;
    layer.z_index = z;
    layer.kind = kind;
    layer.pixels = Raster(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (support.contains(x, y)) layer.pixels.at(x, y) = fill;
    return layer;
}

Layer random_layer(const std::string& id, int z, LayerKind kind, int width, int height,
                   std::mt19937& rng) {
    std::uniform_int_distribution<int> byte(0, 255);
    Layer layer;
    layer.id = id;
    layer.z_index = z;
    layer.kind = kind;
    layer.pixels = Raster(width, height);
    for (Rgba& px : layer.pixels.pixels()) {
        px.a = static_cast<std::uint8_t>(byte(rng));
        if (px.a == 0) continue;
        px.r = static_cast<std::uint8_t>(byte(rng));
        px.g = static_cast<std::uint8_t>(byte(rng));
        px.b = static_cast<std::uint8_t>(byte(rng));
    }
    return layer;
}

Layer random_region_layer(const std::string& id, int z, LayerKind kind, int width, int height,
                          std::mt19937& rng) {
    std::uniform_int_distribution<int> xd(0, width - 2), yd(0, height - 2);
    const int x0 = xd(rng), y0 = yd(rng);
    std::uniform_int_distribution<int> wd(1, width - x0 - 1), hd(1, height - y0 - 1);
    const Rect region{x0, y0, wd(rng), hd(rng)};

    std::uniform_int_distribution<int> byte(0, 255), alpha(1, 255);
    Layer layer;
    layer.id = id;
    layer.z_index = z;
    layer.kind = kind;
    layer.pixels = Raster(width, height);
    for (int y = region.y; y < region.y + region.h; ++y)
        for (int x = region.x; x < region.x + region.w; ++x)
            layer.pixels.at(x, y) = Rgba{static_cast<std::uint8_t>(byte(rng)),
                                         static_cast<std::uint8_t>(byte(rng)),
                                         static_cast<std::uint8_t>(byte(rng)),
                                         static_cast<std::uint8_t>(alpha(rng))};
    return layer;
}

Document random_document(int width, int height, int n_layers, std::mt19937& rng,
                         bool region_layers) {
    static constexpr LayerKind kKinds[] = {LayerKind::text, LayerKind::decoration,
                                           LayerKind::image};
    std::uniform_int_distribution<int> kind_of(0, 2);
    std::vector<Layer> layers;
    layers.reserve(static_cast<std::size_t>(n_layers));
    for (int i = 0; i < n_layers; ++i) {
        const std::string id = "L" + std::to_string(i);
        const LayerKind kind = kKinds[kind_of(rng)];
        layers.push_back(region_layers
                             ? random_region_layer(id, i * 10, kind, width, height, rng)
                             : random_layer(id, i * 10, kind, width, height, rng));
    }
    return Document(width, height, std::move(layers));
}

Mask rect_mask(int width, int height, const Rect& r) {
    Mask mask(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (r.contains(x, y)) mask.set(x, y, true);
    return mask;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("milde-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

FixtureInstance make_fixture_instance(const std::string& id) {
    const int w = 64, h = 48;
    // badge position varies with the id so instances are not clones
    const int wiggle = static_cast<int>(id.empty() ? 0 : (id.back() - '0')) % 8;

    std::vector<Layer> layers;
    layers.push_back(
        solid_layer("bg", 0, LayerKind::image, w, h, Rect{0, 0, w, h}, Rgba{20, 30, 80, 255}));
    layers.push_back(solid_layer("title", 10, LayerKind::text, w, h, Rect{8, 8, 32, 12},
                                 Rgba{250, 250, 250, 255}));
    layers.push_back(solid_layer("badge", 20, LayerKind::decoration, w, h,
                                 Rect{40 + wiggle, 28, 12, 12}, Rgba{200, 40, 40, 255}));

    BenchmarkInstance instance{
        id,
        Document(w, h, std::move(layers)),
        "Change the title to 'Winter Camp'",
        {"title"},
        {{"title", "replace the title text with 'Winter Camp'"}},
        std::vector<QAPair>{
            QAPair{"Has the title been changed to 'Winter Camp'?", true, "title"}},
    };
    instance.validate();

    ManifestData manifest;
    manifest.id = id;
    manifest.width = w;
    manifest.height = h;
    manifest.instruction = instance.instruction;
    for (std::size_t i = 0; i < instance.document.layers().size(); ++i) {
        const Layer& layer = instance.document.layers()[i];
        LayerEntry entry;
        entry.id = layer.id;
        entry.z = layer.z_index;
        entry.kind = layer.kind;
        entry.png = id + "_layers/layer_" + std::to_string(i) + ".png";
        manifest.layers.push_back(std::move(entry));
    }
    manifest.gold_relevant = {"title"};
    manifest.gold_layer_instructions = instance.gold_layer_instructions;
    manifest.qa_pairs = instance.qa_pairs;
    return FixtureInstance{std::move(manifest), std::move(instance)};
}

void write_fixture_corpus(const std::filesystem::path& dir, int count) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        const std::string id = "inst-00" + std::to_string(i + 1);
        const FixtureInstance fixture = make_fixture_instance(id);
        std::filesystem::create_directories(dir / (id + "_layers"));
        for (std::size_t l = 0; l < fixture.instance.document.layers().size(); ++l)
            write_png_rgba(dir / fixture.manifest.layers[l].png,
                           fixture.instance.document.layers()[l].pixels);
        write_manifest(fixture.manifest, dir / (id + ".json"));
    }
}

JudgeScript agreeable_judge_script() {
    JudgeScript script;
    script.binary_default = "yes";
    script.ocr_default = "1";
    script.aesthetics = "6";
    return script;
}

JudgeScript oracle_reasoner_script() {
    JudgeScript script;
    script.reason["title"] =
        "<think>the instruction targets the title text</think>"
        "<decision>yes</decision>"
        "<prompt>replace the title text with 'Winter Camp'</prompt>";
    // every other layer falls through to reason_default (a well-formed no)
    return script;
}

} // namespace milde::testing
