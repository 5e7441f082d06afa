#include "milde/datagen.hpp"

#include <algorithm>
#include <map>

#include "milde/errors.hpp"

namespace milde {

bool step_compatible(StepCategory category, LayerKind kind) {
    if (category == StepCategory::text_edit) return kind == LayerKind::text;
    return kind == LayerKind::image || kind == LayerKind::decoration;
}

namespace {

// Alpha support (any non-zero alpha); overlap during consolidation is about
// what blends, not about the mask threshold used by the metrics.
Mask support_of(const Layer& layer) {
    Mask mask(layer.pixels.width(), layer.pixels.height());
    const std::span<const Rgba> px = layer.pixels.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) mask.bits[i] = px[i].a > 0 ? 1 : 0;
    return mask;
}

bool masks_overlap(const Mask& a, const Mask& b) {
    for (std::size_t i = 0; i < a.bits.size(); ++i)
        if (a.bits[i] && b.bits[i]) return true;
    return false;
}

struct LayerInfo {
    const Layer* layer = nullptr;
    LayerKind category = LayerKind::image;
    Mask support;
    Rect box;
};

bool overlaps(const LayerInfo& a, const LayerInfo& b, bool alpha_level) {
    if (alpha_level) return masks_overlap(a.support, b.support);
    return a.box.intersects(b.box);
}

Layer merge_group(const std::vector<const LayerInfo*>& group, LayerKind category) {
    const Layer& base = *group.front()->layer;
    Layer merged;
    merged.z_index = base.z_index;
    merged.kind = category;

    std::string id;
    for (const LayerInfo* info : group) {
        if (!id.empty()) id += '+';
        id += info->layer->id;
    }
    merged.id = std::move(id);

    // Supports are mutually disjoint, so a straight copy of each member's
    // visible pixels reproduces their blend exactly.
    Raster pixels(base.pixels.width(), base.pixels.height());
    for (const LayerInfo* info : group) {
        const std::span<const Rgba> src = info->layer->pixels.pixels();
        const std::span<Rgba> dst = pixels.pixels();
        for (std::size_t i = 0; i < src.size(); ++i)
            if (src[i].a > 0) dst[i] = src[i];
    }
    merged.pixels = std::move(pixels);

    bool all_boxes = true;
    Rect box;
    for (const LayerInfo* info : group) {
        if (!info->layer->bbox) {
            all_boxes = false;
            break;
        }
        box = Rect::union_of(box, *info->layer->bbox);
    }
    if (all_boxes) merged.bbox = box;
    return merged;
}

// One merge pass against a frozen layout. Returns the new layer list and
// whether anything merged. categories maps layer id -> classified kind.
std::pair<std::vector<Layer>, bool> merge_pass(const Document& document,
                                               const std::map<std::string, LayerKind>& categories,
                                               bool alpha_level) {
    std::vector<LayerInfo> infos;
    infos.reserve(document.layers().size());
    for (const Layer& layer : document.layers()) {
        LayerInfo info;
        info.layer = &layer;
        info.category = categories.at(layer.id);
        info.support = support_of(layer);
        info.box = support_bbox(info.support);
        infos.push_back(std::move(info));
    }

    const std::size_t n = infos.size();
    std::vector<int> group_of(n, -1);
    std::vector<std::vector<std::size_t>> groups;

    for (std::size_t i = 0; i < n; ++i) {
        if (group_of[i] >= 0) continue;
        const int gid = static_cast<int>(groups.size());
        group_of[i] = gid;
        groups.push_back({i});

        for (std::size_t j = i + 1; j < n; ++j) {
            if (group_of[j] >= 0 || infos[j].category != infos[i].category) continue;

            bool joinable = true;
            for (const std::size_t member : groups[gid])
                if (overlaps(infos[j], infos[member], alpha_level)) {
                    joinable = false;
                    break;
                }
            // Moving j down to the group base must not hop over a layer it
            // blends with; that would reorder the stack at shared pixels.
            for (std::size_t k = i + 1; k < j && joinable; ++k) {
                if (group_of[k] == gid) continue;
                if (overlaps(infos[j], infos[k], alpha_level)) joinable = false;
            }
            if (joinable) {
                group_of[j] = gid;
                groups[gid].push_back(j);
            }
        }
    }

    bool merged_any = false;
    std::vector<Layer> out;
    out.reserve(groups.size());
    for (const std::vector<std::size_t>& group : groups) {
        if (group.size() == 1) {
            out.push_back(*infos[group.front()].layer);
            continue;
        }
        std::vector<const LayerInfo*> members;
        members.reserve(group.size());
        for (const std::size_t idx : group) members.push_back(&infos[idx]);
        out.push_back(merge_group(members, members.front()->category));
        merged_any = true;
    }
    return {std::move(out), merged_any};
}

} // namespace

Document consolidate(const Document& document, JudgeClient& judge,
                     const ConsolidateOptions& options) {
    std::map<std::string, LayerKind> categories;
    for (const Layer& layer : document.layers())
        categories[layer.id] = judge.classify_layer(layer).label;

    Document current = document;
    while (true) {
        auto [layers, merged_any] = merge_pass(current, categories, options.alpha_level_overlap);
        if (!merged_any) break;
        // merged ids inherit the group category; untouched ids keep theirs
        std::map<std::string, LayerKind> next_categories;
        for (const Layer& layer : layers) {
            const auto it = categories.find(layer.id);
            next_categories[layer.id] = it != categories.end() ? it->second : layer.kind;
        }
        categories = std::move(next_categories);
        current = Document(document.width(), document.height(), std::move(layers));
    }
    return current;
}

std::vector<EditStep> classify_steps(const std::vector<std::string>& texts, JudgeClient& judge) {
    std::vector<EditStep> steps;
    steps.reserve(texts.size());
    for (const std::string& text : texts) {
        EditStep step;
        step.text = text;
        step.category = judge.classify_step(text);
        steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<EditStep> match_steps(std::vector<EditStep> steps, const Document& document,
                                  JudgeClient& judge) {
    for (EditStep& step : steps) {
        for (const Layer& layer : document.layers()) {
            if (!step_compatible(step.category, layer.kind)) continue;
            if (judge.step_applies(step.text, layer).yes) {
                step.assigned_layer = layer.id;
                break;
            }
        }
    }
    return steps;
}

} // namespace milde
