#pragma once

#include <optional>
#include <string>
#include <vector>

#include "milde/doc_model.hpp"
#include "milde/judge.hpp"

namespace milde {

/// One atomic editing action decomposed from a document-level instruction.
struct EditStep {
    std::string text;
    StepCategory category = StepCategory::image_edit;
    std::optional<std::string> assigned_layer;
};

/// Whether a step category may be assigned to a layer of the given kind:
/// text edits go to text layers, image edits to image or decoration layers.
bool step_compatible(StepCategory category, LayerKind kind);

struct ConsolidateOptions {
    /// Overlap test: bounding boxes of the alpha support (default) or exact
    /// alpha-level intersection.
    bool alpha_level_overlap = false;
    double alpha_threshold = 0.5;
};

/// Structure-preserving consolidation: classifies every layer through the
/// judge, then merges groups of mutually non-overlapping same-category layers
/// into single layers (z_index = group minimum). A layer only joins a group
/// when it also clears every non-group layer between the group's base and its
/// own z position, which is what keeps the rendered composite bit-identical.
/// Runs to a fixed point, so consolidating twice changes nothing.
Document consolidate(const Document& document, JudgeClient& judge,
                     const ConsolidateOptions& options = {});

/// Classifies each step text through the judge into text/image editing.
std::vector<EditStep> classify_steps(const std::vector<std::string>& texts, JudgeClient& judge);

/// Sequential content-aware matcher: for each step in order, walk the
/// kind-compatible layers in ascending z and assign the step to the first
/// layer the judge accepts. Unmatched steps keep assigned_layer empty.
/// A layer may receive multiple steps.
std::vector<EditStep> match_steps(std::vector<EditStep> steps, const Document& document,
                                  JudgeClient& judge);

} // namespace milde
