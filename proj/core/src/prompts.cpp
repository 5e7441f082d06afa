#include "milde/prompts.hpp"

#include <fstream>
#include <sstream>

namespace milde {

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const std::size_t open = tpl.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(tpl.substr(pos));
            break;
        }
        out.append(tpl.substr(pos, open - pos));
        const std::size_t close = tpl.find('}', open);
        if (close == std::string_view::npos) {
            out.append(tpl.substr(open));
            break;
        }
        const std::string key(tpl.substr(open + 1, close - open - 1));
        auto it = vars.find(key);
        if (it != vars.end()) {
            out.append(it->second);
        } else {
            out.append(tpl.substr(open, close - open + 1));
        }
        pos = close + 1;
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

PromptTemplates PromptTemplates::defaults() {
    PromptTemplates t;
    t.qa_generate =
        "You are checking an edit of the design-document layer '{layer_id}'.\n"
        "The requested layer edit was: {layer_instruction}\n"
        "The document-level instruction was: {instruction}\n"
        "Write one yes/no question that verifies this edit was made.\n"
        "Answer with the expected answer token (yes or no) on the first line,\n"
        "followed by the question on the next line.";
    t.answer_binary =
        "Look at the attached image and answer the question strictly with 'yes' or 'no'\n"
        "on the first line.\nQuestion: {question}";
    t.ocr_verify =
        "Read the text inside the region x={x}, y={y}, w={w}, h={h} of the attached image.\n"
        "Decide whether it satisfies this instruction: {instruction}\n"
        "Reply with exactly one of 0, 0.5 or 1 on the first line\n"
        "(1 = satisfied, 0.5 = partially, 0 = not satisfied).";
    t.classify_layer =
        "Classify the attached design-document layer '{layer_id}' strictly as one of:\n"
        "text, decoration, image. Reply with the label only on the first line.";
    t.classify_step =
        "Classify this editing step strictly as 'text' (text editing) or 'image'\n"
        "(image editing). Reply with the label only on the first line.\nStep: {step}";
    t.aesthetics =
        "Rate the aesthetic quality of the attached image on a 1-10 scale.\n"
        "Reply with the number only on the first line.";
    t.step_applies =
        "Does this editing step semantically apply to the attached layer '{layer_id}'?\n"
        "Step: {step}\nReply strictly with 'yes' or 'no' on the first line.";
    t.reason =
        "You are editing a multi-layer design document. The full rendered document and\n"
        "one of its layers ('{layer_id}') are attached, in that order.\n"
        "Document-level instruction: {instruction}\n"
        "Decide whether this layer must change to satisfy the instruction. Respond as\n"
        "<think>...</think><decision>yes|no</decision> and, only when the decision is\n"
        "yes, append <prompt>layer-specific edit instruction</prompt>.";
    t.editor = "{prompt}";
    return t;
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir) {
    PromptTemplates t = defaults();
    auto load = [&dir](std::string& slot, const char* name) {
        const std::filesystem::path file = dir / (std::string(name) + ".txt");
        if (!std::filesystem::exists(file)) return;
        std::ifstream in(file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        slot = ss.str();
    };
    load(t.qa_generate, "qa_generate");
    load(t.answer_binary, "answer_binary");
    load(t.ocr_verify, "ocr_verify");
    load(t.classify_layer, "classify_layer");
    load(t.classify_step, "classify_step");
    load(t.aesthetics, "aesthetics");
    load(t.step_applies, "step_applies");
    load(t.reason, "reason");
    load(t.editor, "editor");
    return t;
}

std::uint64_t PromptTemplates::fingerprint() const {
    std::string all;
    for (const std::string* s : {&qa_generate, &answer_binary, &ocr_verify, &classify_layer,
                                 &classify_step, &aesthetics, &step_applies, &reason, &editor}) {
        all += *s;
        all += '\x1f';
    }
    return fnv1a64(all);
}

} // namespace milde
