#include "milde/layout_metric.hpp"

#include <algorithm>
#include <cmath>

#include "milde/assignment.hpp"
#include "milde/errors.hpp"

namespace milde {

void LayoutWeights::validate() const {
    for (double v : {w_match, w_pos, w_shape, w_area, w_penalty, iou_threshold, new_layer_coeff})
        if (!(v >= 0.0 && v <= 1.0))
            throw StructuralError("layout weights must all lie in [0,1]");
}

namespace {

struct Centroid {
    double x = 0.0;
    double y = 0.0;
};

Centroid centroid_of(const Mask& m) {
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.get(x, y)) continue;
            sx += x + 0.5; // pixel centers
            sy += y + 0.5;
            ++count;
        }
    }
    return Centroid{sx / static_cast<double>(count), sy / static_cast<double>(count)};
}

std::string mask_label(const Mask& m, std::size_t index, const char* prefix) {
    if (m.source_layer) return *m.source_layer;
    return std::string(prefix) + std::to_string(index);
}

} // namespace

double position_consistency(const Mask& a, const Mask& b, int width, int height) {
    if (!a.same_size(b)) throw StructuralError("position_consistency: mask dimensions differ");
    if (a.empty() || b.empty())
        throw PreconditionError("position_consistency: centroid undefined for an empty mask");
    const Centroid ca = centroid_of(a);
    const Centroid cb = centroid_of(b);
    const double displacement = std::hypot(ca.x - cb.x, ca.y - cb.y);
    const double diagonal = std::sqrt(static_cast<double>(height) * height +
                                      static_cast<double>(width) * width);
    return 1.0 - displacement / diagonal;
}

double area_consistency(const Mask& a, const Mask& b) {
    const double aa = static_cast<double>(a.area());
    const double ab = static_cast<double>(b.area());
    if (aa == 0.0 && ab == 0.0)
        throw PreconditionError("area_consistency: both masks empty (degenerate pair)");
    return std::min(aa, ab) / std::max(aa, ab);
}

LayoutReport layout_consistency(const std::vector<Mask>& original_masks,
                                const std::vector<Mask>& edited_masks,
                                const LayoutWeights& weights) {
    weights.validate();
    if (original_masks.empty())
        throw PreconditionError("layout_consistency: no original masks");
    for (const Mask& m : original_masks)
        if (!m.same_size(original_masks.front()))
            throw StructuralError("layout_consistency: mask canvas sizes differ");
    for (const Mask& m : edited_masks)
        if (!m.same_size(original_masks.front()))
            throw StructuralError("layout_consistency: mask canvas sizes differ");

    const int width = original_masks.front().width;
    const int height = original_masks.front().height;
    const double canvas = static_cast<double>(width) * height;

    LayoutReport report;
    report.iou_threshold = weights.iou_threshold;

    std::vector<char> orig_matched(original_masks.size(), 0);
    std::vector<char> edit_matched(edited_masks.size(), 0);

    double sum_pos = 0.0, sum_shape = 0.0, sum_area = 0.0;

    if (!edited_masks.empty()) {
        SimilarityMatrix sim(original_masks.size(), edited_masks.size());
        for (std::size_t i = 0; i < original_masks.size(); ++i)
            for (std::size_t j = 0; j < edited_masks.size(); ++j)
                sim.set(i, j, iou(original_masks[i], edited_masks[j]));

        for (const AssignedPair& p : hungarian_max(sim)) {
            const Mask& a = original_masks[p.row];
            const Mask& b = edited_masks[p.col];
            if (sim(p.row, p.col) < weights.iou_threshold) continue;
            if (a.empty() || b.empty()) continue;

            MatchedPairDetail detail;
            detail.original_id = mask_label(a, p.row, "orig-");
            detail.edited_id = mask_label(b, p.col, "edit-");
            detail.c_pos = position_consistency(a, b, width, height);
            detail.c_shape = sim(p.row, p.col);
            detail.c_area = area_consistency(a, b);
            sum_pos += detail.c_pos;
            sum_shape += detail.c_shape;
            sum_area += detail.c_area;
            report.matched_pairs.push_back(std::move(detail));
            orig_matched[p.row] = 1;
            edit_matched[p.col] = 1;
        }
    }

    const std::size_t n_pairs = report.matched_pairs.size();
    const double denom =
        static_cast<double>(std::max(original_masks.size(), edited_masks.size()));
    report.match_rate = static_cast<double>(n_pairs) / denom;

    for (std::size_t i = 0; i < original_masks.size(); ++i)
        if (!orig_matched[i])
            report.penalty_disappeared += static_cast<double>(original_masks[i].area()) / canvas;
    for (std::size_t j = 0; j < edited_masks.size(); ++j)
        if (!edit_matched[j])
            report.penalty_new +=
                weights.new_layer_coeff * static_cast<double>(edited_masks[j].area()) / canvas;

    const double mean_pos = n_pairs ? sum_pos / static_cast<double>(n_pairs) : 0.0;
    const double mean_shape = n_pairs ? sum_shape / static_cast<double>(n_pairs) : 0.0;
    const double mean_area = n_pairs ? sum_area / static_cast<double>(n_pairs) : 0.0;

    const double raw = weights.w_match * report.match_rate + weights.w_pos * mean_pos +
                       weights.w_shape * mean_shape + weights.w_area * mean_area -
                       weights.w_penalty * (report.penalty_disappeared + report.penalty_new);
    report.score = std::max(0.0, raw);
    report.score_normalized = weights.positive_sum() > 0.0 ? report.score / weights.positive_sum() : 0.0;
    return report;
}

LayoutReport layout_consistency(const Document& original, const std::vector<Mask>& edited_masks,
                                const LayoutWeights& weights, double alpha_threshold) {
    std::vector<Mask> original_masks;
    original_masks.reserve(original.layers().size());
    for (const Layer& layer : original.layers())
        original_masks.push_back(alpha_mask(layer, alpha_threshold));
    return layout_consistency(original_masks, edited_masks, weights);
}

} // namespace milde
