#include "milde/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "milde/errors.hpp"
#include "milde/png_io.hpp"

namespace milde {

using nlohmann::ordered_json;

namespace {

ordered_json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open " + path.string());
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ManifestError("invalid JSON in " + path.string());
    return j;
}

template <typename T>
T require(const ordered_json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        throw ManifestError(where + ": missing required field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(where + ": bad field '" + key + "': " + e.what());
    }
}

std::optional<Rect> rect_from(const ordered_json& j) {
    if (!j.is_array() || j.size() != 4) return std::nullopt;
    return Rect{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

} // namespace

ManifestData load_manifest(const std::filesystem::path& path) {
    const ordered_json j = parse_file(path);
    const std::string where = path.filename().string();

    ManifestData m;
    m.schema_version = require<int>(j, "schema_version", where);
    if (m.schema_version != 1)
        throw ManifestError(where + ": unsupported schema_version " +
                            std::to_string(m.schema_version));
    m.id = require<std::string>(j, "id", where);
    m.width = require<int>(j, "width", where);
    m.height = require<int>(j, "height", where);
    m.instruction = j.value("instruction", std::string{});

    if (!j.contains("layers") || !j.at("layers").is_array() || j.at("layers").empty())
        throw ManifestError(where + ": 'layers' must be a non-empty array");
    for (const ordered_json& lj : j.at("layers")) {
        LayerEntry entry;
        entry.id = require<std::string>(lj, "id", where);
        entry.z = require<int>(lj, "z", where);
        entry.kind = layer_kind_from_string(require<std::string>(lj, "kind", where));
        entry.png = require<std::string>(lj, "png", where);
        if (lj.contains("bbox")) entry.bbox = rect_from(lj.at("bbox"));
        m.layers.push_back(std::move(entry));
    }

    if (j.contains("gold_relevant"))
        m.gold_relevant = j.at("gold_relevant").get<std::vector<std::string>>();
    if (j.contains("gold_layer_instructions"))
        m.gold_layer_instructions =
            j.at("gold_layer_instructions").get<std::map<std::string, std::string>>();
    if (j.contains("qa_pairs")) {
        std::vector<QAPair> pairs;
        for (const ordered_json& qj : j.at("qa_pairs")) {
            QAPair qa;
            qa.question = require<std::string>(qj, "question", where);
            const std::string expected = require<std::string>(qj, "expected", where);
            if (expected != "yes" && expected != "no")
                throw ManifestError(where + ": qa expected must be yes or no");
            qa.expected_yes = expected == "yes";
            qa.target_layer = qj.value("target_layer", std::string{});
            pairs.push_back(std::move(qa));
        }
        m.qa_pairs = std::move(pairs);
    }
    if (j.contains("external_masks_index"))
        m.external_masks_index = j.at("external_masks_index").get<std::string>();
    if (j.contains("regions_file")) m.regions_file = j.at("regions_file").get<std::string>();
    if (j.contains("steps")) m.steps = j.at("steps").get<std::vector<std::string>>();
    if (j.contains("steps_file")) {
        std::ifstream steps_in(path.parent_path() / j.at("steps_file").get<std::string>());
        if (!steps_in)
            throw ManifestError(where + ": steps file missing: " +
                                j.at("steps_file").get<std::string>());
        std::string line;
        while (std::getline(steps_in, line))
            if (!line.empty()) m.steps.push_back(line);
    }

    const std::filesystem::path dir = path.parent_path();
    for (const LayerEntry& entry : m.layers)
        if (!std::filesystem::exists(dir / entry.png))
            throw ManifestError(where + ": layer file missing: " + entry.png);
    if (m.external_masks_index && !std::filesystem::exists(dir / *m.external_masks_index))
        throw ManifestError(where + ": mask index missing: " + *m.external_masks_index);
    if (m.regions_file && !std::filesystem::exists(dir / *m.regions_file))
        throw ManifestError(where + ": regions file missing: " + *m.regions_file);
    return m;
}

void write_manifest(const ManifestData& m, const std::filesystem::path& path) {
    ordered_json j;
    j["schema_version"] = m.schema_version;
    j["id"] = m.id;
    j["width"] = m.width;
    j["height"] = m.height;
    j["instruction"] = m.instruction;
    j["layers"] = ordered_json::array();
    for (const LayerEntry& entry : m.layers) {
        ordered_json lj;
        lj["id"] = entry.id;
        lj["z"] = entry.z;
        lj["kind"] = to_string(entry.kind);
        lj["png"] = entry.png;
        if (entry.bbox)
            lj["bbox"] = {entry.bbox->x, entry.bbox->y, entry.bbox->w, entry.bbox->h};
        j["layers"].push_back(std::move(lj));
    }
    j["gold_relevant"] = m.gold_relevant;
    j["gold_layer_instructions"] = m.gold_layer_instructions;
    if (m.qa_pairs) {
        j["qa_pairs"] = ordered_json::array();
        for (const QAPair& qa : *m.qa_pairs)
            j["qa_pairs"].push_back({{"question", qa.question},
                                     {"expected", qa.expected_yes ? "yes" : "no"},
                                     {"target_layer", qa.target_layer}});
    }
    if (m.external_masks_index) j["external_masks_index"] = *m.external_masks_index;
    if (m.regions_file) j["regions_file"] = *m.regions_file;
    if (!m.steps.empty()) j["steps"] = m.steps;

    std::ofstream out(path);
    if (!out) throw ManifestError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

BenchmarkInstance load_instance(const ManifestData& m, const std::filesystem::path& manifest_dir) {
    std::vector<Layer> layers;
    layers.reserve(m.layers.size());
    for (const LayerEntry& entry : m.layers) {
        Layer layer;
        layer.id = entry.id;
        layer.z_index = entry.z;
        layer.kind = entry.kind;
        layer.bbox = entry.bbox;
        layer.pixels = read_png_rgba(manifest_dir / entry.png);
        if (layer.pixels.width() != m.width || layer.pixels.height() != m.height)
            throw ManifestError("instance '" + m.id + "': layer '" + entry.id +
                                "' PNG does not match document dimensions");
        layers.push_back(std::move(layer));
    }

    BenchmarkInstance instance{
        m.id,
        Document(m.width, m.height, std::move(layers)),
        m.instruction,
        std::set<std::string>(m.gold_relevant.begin(), m.gold_relevant.end()),
        m.gold_layer_instructions,
        m.qa_pairs,
    };
    instance.validate();
    return instance;
}

std::vector<LayerEntry> write_layers(const Document& document, const std::filesystem::path& dir,
                                     const std::filesystem::path& relative_prefix) {
    std::filesystem::create_directories(dir);
    std::vector<LayerEntry> entries;
    int index = 0;
    for (const Layer& layer : document.layers()) {
        const std::string filename = "layer_" + std::to_string(index++) + ".png";
        write_png_rgba(dir / filename, layer.pixels);
        LayerEntry entry;
        entry.id = layer.id;
        entry.z = layer.z_index;
        entry.kind = layer.kind;
        entry.png = (relative_prefix / filename).generic_string();
        entry.bbox = layer.bbox;
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<Mask> load_mask_set(const std::filesystem::path& index_file) {
    std::ifstream in(index_file);
    if (!in) throw ManifestError("cannot open mask index " + index_file.string());
    const std::filesystem::path dir = index_file.parent_path();

    std::vector<Mask> masks;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string filename, mask_id;
        if (!(ss >> filename)) continue; // blank line
        ss >> mask_id;
        Mask mask = read_mask_png(dir / filename);
        if (!mask_id.empty()) mask.source_layer = mask_id;
        masks.push_back(std::move(mask));
    }
    if (masks.empty()) throw ManifestError("mask index is empty: " + index_file.string());
    return masks;
}

std::vector<std::pair<std::string, Rect>> load_regions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open regions file " + path.string());

    std::vector<std::pair<std::string, Rect>> regions;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string id;
        Rect r;
        if (!(ss >> id)) continue;
        if (!(ss >> r.x >> r.y >> r.w >> r.h))
            throw ManifestError("bad region line in " + path.string() + ": " + line);
        regions.emplace_back(std::move(id), r);
    }
    return regions;
}

std::vector<std::filesystem::path> list_manifests(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ManifestError("manifest directory does not exist: " + dir.string());
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    return paths;
}

} // namespace milde
