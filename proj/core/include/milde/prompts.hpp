#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace milde {

/// Substitutes {name} placeholders. Unknown placeholders are left verbatim.
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& vars);

/// FNV-1a 64-bit — used to fingerprint prompt templates in reports.
std::uint64_t fnv1a64(std::string_view data);

/// Prompt templates for every backend call. Defaults ship with the library;
/// any of them can be overridden by a <name>.txt file in a template directory.
/// The exact wording is a tooling choice, which is why reports carry the
/// fingerprint of the set actually used.
struct PromptTemplates {
    std::string qa_generate;    // {layer_id} {instruction} {layer_instruction}
    std::string answer_binary;  // {question}
    std::string ocr_verify;     // {instruction} {x} {y} {w} {h}
    std::string classify_layer; // {layer_id}
    std::string classify_step;  // {step}
    std::string aesthetics;     // (no placeholders)
    std::string step_applies;   // {step} {layer_id}
    std::string reason;         // {instruction} {layer_id}
    std::string editor;         // {prompt}

    static PromptTemplates defaults();

    /// Overrides defaults from qa_generate.txt, answer_binary.txt, ... in dir.
    static PromptTemplates load_dir(const std::filesystem::path& dir);

    std::uint64_t fingerprint() const;
};

} // namespace milde
