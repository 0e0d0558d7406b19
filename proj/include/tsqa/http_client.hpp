#pragma once

#include "tsqa/evalkit.hpp"
#include "tsqa/tsevol.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace tsqa::remote {

struct EndpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EndpointConfig {
    std::string url;   // http(s)://host[:port]/path
    std::string model;
    std::string api_key;      // empty = no Authorization header
    double temperature = 0.7;
    std::optional<std::string> audit_path; // request/response JSONL log
};

// Chat-completion client shared by the evolution generator and the
// model-under-test adapter.
class ChatEndpoint {
public:
    explicit ChatEndpoint(EndpointConfig config);
    ~ChatEndpoint();

    struct Completion {
        std::string text;
        std::size_t prompt_tokens = 0;
        std::size_t completion_tokens = 0;
    };
    Completion complete(const std::string& prompt, double temperature, std::size_t max_tokens);

    // Cheap reachability probe; throws EndpointError when the host is down.
    void check_reachable();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class HttpTextGenerator : public tsevol::TextGenerator {
public:
    explicit HttpTextGenerator(std::shared_ptr<ChatEndpoint> endpoint)
        : endpoint_(std::move(endpoint)) {}
    std::string complete(const std::string& prompt, const tsevol::DecodeParams& params) override;

private:
    std::shared_ptr<ChatEndpoint> endpoint_;
};

class HttpModel : public evalkit::ModelUnderTest {
public:
    explicit HttpModel(std::shared_ptr<ChatEndpoint> endpoint) : endpoint_(std::move(endpoint)) {}
    evalkit::ModelAnswer answer(const evalkit::QAInstance& item) override;

private:
    std::shared_ptr<ChatEndpoint> endpoint_;
};

} // namespace tsqa::remote
