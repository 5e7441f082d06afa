#pragma once

#include <string>
#include <vector>

#include "milde/doc_model.hpp"

namespace milde {

struct LayoutWeights {
    double w_match = 0.25;
    double w_pos = 0.2;
    double w_shape = 0.2;
    double w_area = 0.2;
    double w_penalty = 0.15;
    double iou_threshold = 0.05;
    double new_layer_coeff = 0.7;

    void validate() const;
    double positive_sum() const { return w_match + w_pos + w_shape + w_area; }
};

struct MatchedPairDetail {
    std::string original_id;
    std::string edited_id;
    double c_pos = 0.0;
    double c_shape = 0.0;
    double c_area = 0.0;
};

struct LayoutReport {
    std::vector<MatchedPairDetail> matched_pairs;
    double match_rate = 0.0;
    double penalty_disappeared = 0.0;
    double penalty_new = 0.0;
    double score = 0.0;            // literal formula, clamped at 0
    double score_normalized = 0.0; // score / positive weight sum
    double iou_threshold = 0.0;    // echoed for reproducibility
};

/// 1 - centroid displacement / canvas diagonal. Centroids use pixel centers.
/// Both masks must be non-empty.
double position_consistency(const Mask& a, const Mask& b, int width, int height);

/// min(area)/max(area); at least one mask must be non-empty.
double area_consistency(const Mask& a, const Mask& b);

/// Full layout-consistency pipeline over two mask sets: IoU similarity matrix,
/// maximum-weight matching, threshold filtering, per-pair consistency terms,
/// and area-weighted penalties for unmatched masks. All masks must share one
/// canvas size. Pairs where either mask is empty are dropped from the match
/// (an empty mask has no centroid; empty/empty pairs carry no geometry).
LayoutReport layout_consistency(const std::vector<Mask>& original_masks,
                                const std::vector<Mask>& edited_masks,
                                const LayoutWeights& weights = {});

/// Convenience overload: original masks are the per-layer alpha masks of the
/// document (in z order).
LayoutReport layout_consistency(const Document& original, const std::vector<Mask>& edited_masks,
                                const LayoutWeights& weights = {}, double alpha_threshold = 0.5);

} // namespace milde
