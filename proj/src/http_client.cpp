#include "tsqa/http_client.hpp"

#include <fstream>

#include <httplib.h>
#include <json.hpp>

namespace tsqa::remote {

using json = nlohmann::ordered_json;

namespace {

struct ParsedUrl {
    std::string base; // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw EndpointError("bad endpoint url: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = "/v1/chat/completions";
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return out;
}

} // namespace

struct ChatEndpoint::Impl {
    EndpointConfig config;
    ParsedUrl url;
    httplib::Client client;
    std::mutex audit_mutex;

    explicit Impl(EndpointConfig cfg)
        : config(std::move(cfg)), url(parse_url(config.url)), client(url.base) {
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(120, 0);
        if (!config.api_key.empty())
            client.set_default_headers({{"Authorization", "Bearer " + config.api_key}});
    }

    void audit(const json& request, const json& response) {
        if (!config.audit_path) return;
        std::lock_guard<std::mutex> lock(audit_mutex);
        std::ofstream out(*config.audit_path, std::ios::app | std::ios::binary);
        json entry;
        entry["request"] = request;
        entry["response"] = response;
        out << entry.dump() << "\n";
    }
};

ChatEndpoint::ChatEndpoint(EndpointConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
ChatEndpoint::~ChatEndpoint() = default;

ChatEndpoint::Completion ChatEndpoint::complete(const std::string& prompt, double temperature,
                                                std::size_t max_tokens) {
    json body;
    body["model"] = impl_->config.model;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = temperature;
    if (max_tokens > 0) body["max_tokens"] = max_tokens;

    auto res = impl_->client.Post(impl_->url.path, body.dump(), "application/json");
    if (!res) throw EndpointError("endpoint unreachable: " + impl_->config.url);
    if (res->status != 200)
        throw EndpointError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                            res->body.substr(0, 200));

    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const std::exception& e) {
        throw EndpointError(std::string("endpoint returned invalid JSON: ") + e.what());
    }
    impl_->audit(body, reply);

    Completion out;
    try {
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception&) {
        throw EndpointError("endpoint reply lacks choices[0].message.content");
    }
    if (reply.contains("usage")) {
        const auto& usage = reply["usage"];
        if (usage.contains("prompt_tokens")) out.prompt_tokens = usage["prompt_tokens"].get<std::size_t>();
        if (usage.contains("completion_tokens"))
            out.completion_tokens = usage["completion_tokens"].get<std::size_t>();
    }
    return out;
}

void ChatEndpoint::check_reachable() {
    auto res = impl_->client.Options(impl_->url.path);
    if (!res) {
        // Some servers reject OPTIONS; fall back to a minimal POST probe.
        auto probe = impl_->client.Post(impl_->url.path, "{}", "application/json");
        if (!probe) throw EndpointError("endpoint unreachable: " + impl_->config.url);
    }
}

std::string HttpTextGenerator::complete(const std::string& prompt,
                                        const tsevol::DecodeParams& params) {
    return endpoint_->complete(prompt, params.temperature, params.max_tokens).text;
}

evalkit::ModelAnswer HttpModel::answer(const evalkit::QAInstance& item) {
    auto completion = endpoint_->complete(item.prompt_text, 0.0, 0);
    return {completion.text, completion.prompt_tokens, completion.completion_tokens};
}

} // namespace tsqa::remote
