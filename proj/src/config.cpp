#include "tsqa/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

namespace tsqa::cli {

namespace {

std::string trim(std::string s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    return s;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("bad unsigned value for key '" + key + "': " + v);
    }
}

double parse_f64(const std::string& key, const std::string& v) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for key '" + key + "': " + v);
    }
}

} // namespace

Config load_config(const std::optional<std::string>& path) {
    Config cfg;

    std::map<std::string, std::function<void(const std::string&)>> setters;
    auto u64 = [](std::uint64_t& target) {
        return [&target](const std::string& key, const std::string& v) { target = parse_u64(key, v); };
    };
    (void)u64;

    setters["general.seed"] = [&](const std::string& v) { cfg.seed = parse_u64("general.seed", v); };
    setters["general.out_dir"] = [&](const std::string& v) { cfg.out_dir = v; };

    setters["corpus.stage"] = [&](const std::string& v) { cfg.corpus.stage = v; };
    setters["corpus.uts"] = [&](const std::string& v) { cfg.corpus.uts = parse_u64("corpus.uts", v); };
    setters["corpus.mts_shape"] = [&](const std::string& v) {
        cfg.corpus.mts_shape = parse_u64("corpus.mts_shape", v);
    };
    setters["corpus.mts_local"] = [&](const std::string& v) {
        cfg.corpus.mts_local = parse_u64("corpus.mts_local", v);
    };
    setters["corpus.tsevol"] = [&](const std::string& v) {
        cfg.corpus.tsevol = parse_u64("corpus.tsevol", v);
    };
    setters["corpus.instruct_follow"] = [&](const std::string& v) {
        cfg.corpus.instruct_follow = parse_u64("corpus.instruct_follow", v);
    };
    setters["corpus.alignment_mix_fraction"] = [&](const std::string& v) {
        cfg.corpus.alignment_mix_fraction = parse_f64("corpus.alignment_mix_fraction", v);
    };
    setters["corpus.alignment_mix_basis"] = [&](const std::string& v) {
        cfg.corpus.alignment_mix_basis = v;
    };
    setters["corpus.reasoning_seed_fraction"] = [&](const std::string& v) {
        cfg.corpus.reasoning_seed_fraction = parse_f64("corpus.reasoning_seed_fraction", v);
    };
    setters["corpus.evol_rounds"] = [&](const std::string& v) {
        cfg.corpus.evol_rounds = parse_u64("corpus.evol_rounds", v);
    };
    setters["corpus.min_length"] = [&](const std::string& v) {
        cfg.corpus.min_length = parse_u64("corpus.min_length", v);
    };
    setters["corpus.max_length"] = [&](const std::string& v) {
        cfg.corpus.max_length = parse_u64("corpus.max_length", v);
    };
    setters["corpus.catalog_path"] = [&](const std::string& v) { cfg.corpus.catalog_path = v; };
    setters["corpus.alignment_corpus"] = [&](const std::string& v) { cfg.alignment_corpus = v; };

    setters["generator.endpoint_url"] = [&](const std::string& v) { cfg.endpoint_url = v; };
    setters["generator.model"] = [&](const std::string& v) { cfg.model = v; };
    setters["generator.api_key_env"] = [&](const std::string& v) { cfg.api_key_env = v; };
    setters["generator.temperature"] = [&](const std::string& v) {
        cfg.temperature = parse_f64("generator.temperature", v);
    };
    setters["generator.retries"] = [&](const std::string& v) {
        cfg.retries = static_cast<int>(parse_u64("generator.retries", v));
    };

    setters["eval.in_flight"] = [&](const std::string& v) {
        cfg.in_flight = parse_u64("eval.in_flight", v);
    };
    setters["eval.rel_tolerance"] = [&](const std::string& v) {
        cfg.rel_tolerance = parse_f64("eval.rel_tolerance", v);
    };
    setters["eval.endpoint_url"] = [&](const std::string& v) { cfg.eval_endpoint_url = v; };
    setters["eval.model"] = [&](const std::string& v) { cfg.eval_model = v; };

    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot open config file: " + *path);
        std::string line;
        std::string section = "general";
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = trim(line);
            if (s.empty() || s[0] == '#') continue;
            if (s.front() == '[' && s.back() == ']') {
                section = trim(s.substr(1, s.size() - 2));
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(*path + ":" + std::to_string(lineno) + ": expected key = value");
            std::string key = section + "." + trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            auto it = setters.find(key);
            if (it == setters.end())
                throw ConfigError(*path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
            it->second(value);
        }
    }

    // Environment overrides: TSQA_<SECTION>_<KEY>.
    for (auto& [key, setter] : setters) {
        std::string env_name = "TSQA_";
        for (char c : key) env_name += c == '.' ? '_' : static_cast<char>(std::toupper(c));
        if (const char* v = std::getenv(env_name.c_str()); v && *v) setter(v);
    }

    if (auto err = datasets::validate_spec(cfg.corpus)) throw ConfigError("corpus spec: " + *err);
    return cfg;
}

} // namespace tsqa::cli
