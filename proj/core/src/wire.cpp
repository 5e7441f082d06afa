#include "wire.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "milde/errors.hpp"
#include "milde/png_io.hpp"

namespace milde::wire {

namespace {

constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

} // namespace

std::string base64_encode(const std::string& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += kB64Alphabet[v & 63];
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::string base64_decode(const std::string& text) {
    static const auto value_of = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kB64Alphabet[i])] = i;
        return t;
    }();

    std::string out;
    out.reserve(text.size() / 4 * 3);
    unsigned buffer = 0;
    int bits = 0;
    for (const char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = value_of[static_cast<unsigned char>(c)];
        if (v < 0) throw ProtocolError("invalid base64 payload", text);
        buffer = (buffer << 6) | static_cast<unsigned>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out += static_cast<char>((buffer >> bits) & 0xff);
        }
    }
    return out;
}

SplitUrl split_url(const std::string& endpoint) {
    const std::size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw PreconditionError("endpoint must start with http:// or https://: " + endpoint);
    const std::size_t path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return SplitUrl{endpoint, "/"};
    return SplitUrl{endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string first_line_token(const std::string& response) {
    const std::string trimmed = trim(response);
    std::string line = trimmed.substr(0, trimmed.find('\n'));
    line = trim(line);
    while (!line.empty()) {
        const char c = line.back();
        if (c == '.' || c == ',' || c == '!' || c == ':' || c == ';')
            line.pop_back();
        else
            break;
    }
    std::transform(line.begin(), line.end(), line.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return trim(line);
}

std::string rest_after_first_line(const std::string& response) {
    const std::string trimmed = trim(response);
    const std::size_t nl = trimmed.find('\n');
    if (nl == std::string::npos) return "";
    return trim(trimmed.substr(nl + 1));
}

std::string chat_call(const JudgeBackend& backend, const std::string& prompt,
                      const std::vector<const Raster*>& images) {
    const SplitUrl url = split_url(backend.endpoint);

    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", prompt}});
    for (const Raster* image : images) {
        const std::string data_url =
            "data:image/png;base64," + base64_encode(encode_png_rgba(*image));
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url}}}});
    }
    nlohmann::json body = {
        {"model", backend.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
    };

    httplib::Headers headers;
    if (!backend.auth_env.empty()) {
        if (const char* token = std::getenv(backend.auth_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    std::string last_error;
    for (int attempt = 0; attempt <= backend.retry_budget; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(100LL << (attempt - 1)));

        httplib::Client client(url.base);
        client.set_connection_timeout(backend.timeout_s, 0);
        client.set_read_timeout(backend.timeout_s, 0);

        auto res = client.Post(url.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("judge endpoint returned status " +
                                 std::to_string(res->status) + ": " + res->body);

        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty() ||
            !parsed["choices"][0].contains("message") ||
            !parsed["choices"][0]["message"].contains("content"))
            throw ProtocolError("response is not chat-completions shaped", res->body);
        return parsed["choices"][0]["message"]["content"].get<std::string>();
    }
    throw TransportError("backend unreachable after " + std::to_string(backend.retry_budget + 1) +
                         " attempts (" + last_error + ")");
}

} // namespace milde::wire
