#pragma once

// Internal wire helpers shared by the judge and editor clients: base64,
// endpoint splitting and the chat-completions POST with retry/backoff.

#include <string>
#include <vector>

#include "milde/judge.hpp"
#include "milde/raster.hpp"

namespace milde::wire {

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path; // leading '/', defaults to "/"
};
SplitUrl split_url(const std::string& endpoint);

/// POSTs a chat-completions request (one user message: a text part followed by
/// the given images as base64 PNG data URLs) and returns message.content.
/// Retries transport failures (connect errors, timeouts, 5xx) with exponential
/// backoff up to retry_budget extra attempts; protocol problems are never
/// retried. Throws TransportError / ProtocolError.
std::string chat_call(const JudgeBackend& backend, const std::string& prompt,
                      const std::vector<const Raster*>& images);

/// First line of a response: everything up to the first newline, trimmed,
/// lowercased, with trailing sentence punctuation stripped.
std::string first_line_token(const std::string& response);

/// Everything after the first newline, trimmed (used by QA generation).
std::string rest_after_first_line(const std::string& response);

std::string trim(const std::string& s);

} // namespace milde::wire
