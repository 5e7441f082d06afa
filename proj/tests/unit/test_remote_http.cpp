// Remote backend wire tests against an in-process chat-completions server.

#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "milde/agent.hpp"
#include "milde/errors.hpp"
#include "milde/judge.hpp"
#include "milde/png_io.hpp"
#include "../support/fixtures.hpp"

using namespace milde;
using nlohmann::json;

namespace {

std::string content_reply(const std::string& content) {
    json j;
    j["choices"] = json::array({{{"message", {{"content", content}}}}});
    return j.dump();
}

// test-side base64, independent of the client's encoder
std::string b64(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
    }
    if (bytes.size() - i == 1) {
        const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += "==";
    } else if (bytes.size() - i == 2) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit TestServer(httplib::Server::Handler handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer() {
        server.stop();
        thread.join();
    }

    JudgeBackend backend() const {
        JudgeBackend b;
        b.kind = BackendKind::remote_http;
        b.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
        b.model_name = "test-judge";
        b.timeout_s = 5;
        b.retry_budget = 2;
        return b;
    }
};

} // namespace

TEST_CASE("remote judge: request shape, auth header and parsed verdict") {
    std::atomic<int> image_parts{0};
    std::string seen_model, seen_auth;

    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        const json body = json::parse(req.body);
        seen_model = body.at("model").get<std::string>();
        if (req.has_header("Authorization")) seen_auth = req.get_header_value("Authorization");
        for (const json& part : body.at("messages")[0].at("content"))
            if (part.at("type") == "image_url") {
                ++image_parts;
                const std::string url = part.at("image_url").at("url").get<std::string>();
                CHECK(url.rfind("data:image/png;base64,", 0) == 0);
            }
        res.set_content(content_reply("Yes."), "application/json");
    });

    JudgeBackend backend = server.backend();
    backend.auth_env = "MILDE_TEST_TOKEN";
    setenv("MILDE_TEST_TOKEN", "sekrit", 1);

    JudgeClient judge(backend);
    const Verdict verdict = judge.answer_binary(Raster(4, 4, Rgba{1, 2, 3, 255}), "edited?");
    CHECK(verdict.yes);
    CHECK(verdict.raw_response == "Yes.");
    CHECK(seen_model == "test-judge");
    CHECK(seen_auth == "Bearer sekrit");
    CHECK(image_parts.load() == 1);
    unsetenv("MILDE_TEST_TOKEN");
}

TEST_CASE("remote judge: transient 5xx failures are retried with backoff") {
    std::atomic<int> hits{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        if (hits.fetch_add(1) < 2) {
            res.status = 503;
            return;
        }
        res.set_content(content_reply("no"), "application/json");
    });

    JudgeClient judge(server.backend()); // retry_budget 2: third attempt lands
    CHECK_FALSE(judge.answer_binary(Raster(2, 2), "q").yes);
    CHECK(hits.load() == 3);
}

TEST_CASE("remote judge: the retry budget is finite") {
    std::atomic<int> hits{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        hits.fetch_add(1);
        res.status = 500;
    });
    JudgeClient judge(server.backend());
    CHECK_THROWS_AS(judge.answer_binary(Raster(2, 2), "q"), TransportError);
    CHECK(hits.load() == 3); // initial try + 2 retries
}

TEST_CASE("remote judge: client errors and protocol errors are never retried") {
    std::atomic<int> hits{0};
    TestServer bad_status([&](const httplib::Request&, httplib::Response& res) {
        hits.fetch_add(1);
        res.status = 404;
    });
    JudgeClient judge(bad_status.backend());
    CHECK_THROWS_AS(judge.answer_binary(Raster(2, 2), "q"), TransportError);
    CHECK(hits.load() == 1);

    std::atomic<int> garbage_hits{0};
    TestServer garbage([&](const httplib::Request&, httplib::Response& res) {
        garbage_hits.fetch_add(1);
        res.set_content("{\"unexpected\": true}", "application/json");
    });
    JudgeClient judge2(garbage.backend());
    CHECK_THROWS_AS(judge2.answer_binary(Raster(2, 2), "q"), ProtocolError);
    CHECK(garbage_hits.load() == 1);

    // grammar violations inside a well-shaped response are protocol errors too
    TestServer vague([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(content_reply("it depends"), "application/json");
    });
    JudgeClient judge3(vague.backend());
    CHECK_THROWS_AS(judge3.answer_binary(Raster(2, 2), "q"), ProtocolError);
}

TEST_CASE("remote judge: unreachable endpoint exhausts the budget") {
    JudgeBackend backend;
    backend.kind = BackendKind::remote_http;
    backend.endpoint = "http://127.0.0.1:1/v1/chat/completions"; // nothing listens here
    backend.timeout_s = 1;
    backend.retry_budget = 1;
    JudgeClient judge(backend);
    CHECK_THROWS_AS(judge.answer_binary(Raster(2, 2), "q"), TransportError);
}

TEST_CASE("remote editor: data-url response is decoded and size-checked") {
    const Layer layer = testing::solid_layer("L", 0, LayerKind::image, 6, 4, Rect{0, 0, 6, 4},
                                             Rgba{10, 20, 30, 255});
    const Raster recolored(6, 4, Rgba{1, 1, 1, 255});

    TestServer good([&](const httplib::Request& req, httplib::Response& res) {
        const json body = json::parse(req.body);
        // prompt text part plus layer and mask image parts
        CHECK(body.at("messages")[0].at("content").size() == 3);
        res.set_content(content_reply("data:image/png;base64," +
                                      b64(encode_png_rgba(recolored))),
                        "application/json");
    });

    EditorBackend backend;
    backend.kind = EditorKind::remote_http;
    backend.endpoint = "http://127.0.0.1:" + std::to_string(good.port) + "/v1/chat/completions";
    backend.timeout_s = 5;
    EditorClient editor(backend);

    const Raster out = editor.edit(layer, "repaint it", alpha_mask(layer));
    CHECK(out == recolored);
}

TEST_CASE("remote editor: wrong dimensions are a protocol error") {
    const Raster tiny(2, 2, Rgba{1, 1, 1, 255});
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(content_reply("data:image/png;base64," +
                                      b64(encode_png_rgba(tiny))),
                        "application/json");
    });
    EditorBackend backend;
    backend.kind = EditorKind::remote_http;
    backend.endpoint = "http://127.0.0.1:" + std::to_string(server.port) + "/v1/chat/completions";
    EditorClient editor(backend);

    const Layer layer = testing::solid_layer("L", 0, LayerKind::image, 6, 4, Rect{0, 0, 6, 4},
                                             Rgba{10, 20, 30, 255});
    CHECK_THROWS_AS(editor.edit(layer, "p", alpha_mask(layer)), ProtocolError);

    TestServer not_an_image([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(content_reply("here is your edit!"), "application/json");
    });
    EditorBackend backend2 = backend;
    backend2.endpoint =
        "http://127.0.0.1:" + std::to_string(not_an_image.port) + "/v1/chat/completions";
    EditorClient editor2(backend2);
    CHECK_THROWS_AS(editor2.edit(layer, "p", alpha_mask(layer)), ProtocolError);
}
