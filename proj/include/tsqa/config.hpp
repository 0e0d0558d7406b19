#pragma once

#include "tsqa/datasets.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace tsqa::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented `key = value` file with [sections]; `#` comments. Environment
// variables TSQA_<SECTION>_<KEY> override file keys; secrets (API keys) come
// only from the environment. Unknown keys are rejected by name.
struct Config {
    // [general]
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    // [corpus]
    datasets::CorpusSpec corpus;
    std::string alignment_corpus; // source corpus for the sft mix, jsonl path

    // [generator] - remote text-generation endpoint for the evolution step
    std::string endpoint_url;   // e.g. http://localhost:8000/v1/chat/completions
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "TSQA_API_KEY";
    double temperature = 0.7;
    int retries = 3;

    // [eval]
    std::size_t in_flight = 4;
    double rel_tolerance = 0.05;
    std::string eval_endpoint_url; // model under test; empty = offline targets only
    std::string eval_model = "gpt-4o-mini";
};

Config load_config(const std::optional<std::string>& path);

} // namespace tsqa::cli
