#include "tsqa/http_client.hpp"

#include "tsqa/datasets.hpp"
#include "tsqa/tsevol.hpp"

#include <doctest.h>
#include <httplib.h>

#include <fstream>
#include <thread>

using namespace tsqa;
using json = nlohmann::ordered_json;

namespace {

// In-process chat-completion endpoint; echoes a canned evolution reply and
// records the request bodies it saw.
struct FakeServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::vector<json> requests;
    std::mutex mutex;

    FakeServer() {
        server.Post("/v1/chat/completions",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        json body = json::parse(req.body, nullptr, false);
                        {
                            std::lock_guard<std::mutex> lock(mutex);
                            requests.push_back(body);
                        }
                        json reply;
                        reply["choices"] = json::array();
                        std::string content =
                            "QUESTION: What changed?\nANSWER: The level rose.\nFACTS:\n"
                            "- series=0; kind=season_kind; location=; text=none\n";
                        reply["choices"].push_back(
                            json{{"message", json{{"role", "assistant"}, {"content", content}}}});
                        reply["usage"] = {{"prompt_tokens", 42}, {"completion_tokens", 7}};
                        res.set_content(reply.dump(), "application/json");
                    });
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeServer() {
        server.stop();
        thread.join();
    }
    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    }
};

} // namespace

TEST_CASE("chat endpoint speaks the completion schema and reports usage") {
    FakeServer fake;
    remote::EndpointConfig cfg;
    cfg.url = fake.url();
    cfg.model = "test-model";
    cfg.api_key = "sk-test";
    auto endpoint = std::make_shared<remote::ChatEndpoint>(cfg);

    auto completion = endpoint->complete("hello", 0.3, 100);
    CHECK(completion.text.find("QUESTION:") == 0);
    CHECK(completion.prompt_tokens == 42);
    CHECK(completion.completion_tokens == 7);

    REQUIRE(fake.requests.size() == 1);
    const auto& req = fake.requests[0];
    CHECK(req.at("model") == "test-model");
    CHECK(req.at("messages").at(0).at("role") == "user");
    CHECK(req.at("messages").at(0).at("content") == "hello");
    CHECK(req.at("temperature") == 0.3);
}

TEST_CASE("http generator plugs into the evolution step") {
    FakeServer fake;
    remote::EndpointConfig cfg;
    cfg.url = fake.url();
    cfg.model = "test-model";
    auto endpoint = std::make_shared<remote::ChatEndpoint>(cfg);
    remote::HttpTextGenerator gen(endpoint);

    std::string raw = gen.complete("prompt", tsevol::DecodeParams{});
    auto parsed_q = raw.find("QUESTION:");
    CHECK(parsed_q == 0);
}

TEST_CASE("audit flag logs request and response bodies") {
    FakeServer fake;
    std::string audit_path = "/tmp/tsqa_audit.jsonl";
    std::remove(audit_path.c_str());
    remote::EndpointConfig cfg;
    cfg.url = fake.url();
    cfg.model = "test-model";
    cfg.audit_path = audit_path;
    remote::ChatEndpoint endpoint(cfg);
    endpoint.complete("audited prompt", 0.0, 0);

    std::ifstream in(audit_path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    auto entry = json::parse(line);
    CHECK(entry.at("request").at("messages").at(0).at("content") == "audited prompt");
    CHECK(entry.at("response").contains("choices"));
}

TEST_CASE("unreachable endpoints raise EndpointError") {
    remote::EndpointConfig cfg;
    cfg.url = "http://127.0.0.1:9/v1/chat/completions"; // discard port
    remote::ChatEndpoint endpoint(cfg);
    CHECK_THROWS_AS(endpoint.complete("x", 0.0, 0), remote::EndpointError);
    CHECK_THROWS_AS(endpoint.check_reachable(), remote::EndpointError);
}
