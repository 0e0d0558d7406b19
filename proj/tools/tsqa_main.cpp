#include "tsqa/config.hpp"
#include "tsqa/datasets.hpp"
#include "tsqa/evalkit.hpp"
#include "tsqa/http_client.hpp"
#include "tsqa/metrics.hpp"
#include "tsqa/svgplot.hpp"
#include "tsqa/taxonomy.hpp"
#include "tsqa/tsevol.hpp"
#include "tsqa/prng.hpp"
#include "tsqa/util.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

namespace {

// Exit codes: 0 ok, 2 config, 3 io, 4 generation, 5 endpoint unreachable, 6
// every eval item failed.
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitGeneration = 4;
constexpr int kExitEndpoint = 5;
constexpr int kExitAllFailed = 6;

struct GlobalOptions {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool mock = false;
    bool audit = false;
};

tsqa::cli::Config load(const GlobalOptions& opts) {
    tsqa::cli::Config cfg = tsqa::cli::load_config(opts.config_path);
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.corpus.master_seed = *opts.seed;
    } else {
        cfg.corpus.master_seed = cfg.seed;
    }
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    return cfg;
}

std::shared_ptr<tsqa::remote::ChatEndpoint> make_endpoint(const tsqa::cli::Config& cfg,
                                                          const std::string& url,
                                                          const std::string& model,
                                                          bool audit,
                                                          const std::string& out_dir) {
    tsqa::remote::EndpointConfig ec;
    ec.url = url;
    ec.model = model;
    ec.temperature = cfg.temperature;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) ec.api_key = key;
    if (audit) ec.audit_path = out_dir + "/audit.jsonl";
    return std::make_shared<tsqa::remote::ChatEndpoint>(std::move(ec));
}

int cmd_taxonomy() {
    const auto& tax = tsqa::taxonomy::registry();
    std::cout << "trend types (" << tax.trend_types.size() << "):";
    for (auto k : tax.trend_types) std::cout << " [" << tsqa::taxonomy::id(k) << "]";
    std::cout << "\nseasonality types (" << tax.season_types.size() << "):";
    for (auto k : tax.season_types) std::cout << " [" << tsqa::taxonomy::id(k) << "]";
    std::cout << "\nnoise types (" << tax.noise_types.size() << "):";
    for (auto k : tax.noise_types) std::cout << " [" << tsqa::taxonomy::id(k) << "]";
    std::cout << "\nlocal fluctuation types (" << tax.fluctuation_types.size() << "):";
    for (auto k : tax.fluctuation_types) std::cout << " [" << tsqa::taxonomy::id(k) << "]";
    std::cout << "\n";
    try {
        auto catalog = tsqa::taxonomy::metric_catalog();
        std::cout << "metric catalog: " << catalog.size() << " entries\n";
    } catch (const std::exception& e) {
        std::cout << "metric catalog: unavailable (" << e.what() << ")\n";
    }
    return 0;
}

int cmd_generate(const GlobalOptions& opts) {
    tsqa::cli::Config cfg;
    try {
        cfg = load(opts);
    } catch (const tsqa::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);

    try {
        std::optional<tsqa::datasets::Corpus> alignment;
        if (cfg.corpus.stage == "sft" && !cfg.alignment_corpus.empty())
            alignment = tsqa::datasets::read_jsonl(cfg.alignment_corpus);
        if (cfg.corpus.stage == "sft" && cfg.corpus.alignment_mix_fraction > 0.0 && !alignment) {
            std::cerr << "config error: sft stage needs corpus.alignment_corpus\n";
            return kExitConfig;
        }

        std::unique_ptr<tsqa::tsevol::TextGenerator> gen;
        if (cfg.corpus.stage == "sft" && cfg.corpus.tsevol > 0) {
            if (opts.mock || cfg.endpoint_url.empty()) {
                gen = std::make_unique<tsqa::tsevol::MockTextGenerator>();
            } else {
                auto endpoint =
                    make_endpoint(cfg, cfg.endpoint_url, cfg.model, opts.audit, cfg.out_dir);
                try {
                    endpoint->check_reachable();
                } catch (const tsqa::remote::EndpointError& e) {
                    std::cerr << "endpoint error: " << e.what() << "\n";
                    return kExitEndpoint;
                }
                gen = std::make_unique<tsqa::remote::HttpTextGenerator>(endpoint);
            }
        }

        tsqa::datasets::Corpus corpus = tsqa::datasets::compose_corpus(
            cfg.corpus, alignment ? &*alignment : nullptr, gen.get());
        std::string path = cfg.out_dir + "/" + cfg.corpus.stage + ".jsonl";
        tsqa::datasets::write_jsonl(corpus, path);

        std::cout << "wrote " << corpus.records.size() << " records to " << path << "\n";
        for (const auto& [task, count] : corpus.manifest.task_counts)
            std::cout << "  " << task << ": " << count << "\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const tsqa::taxonomy::CatalogError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::runtime_error& e) {
        std::string what = e.what();
        if (what.rfind("cannot", 0) == 0 || what.find(": line ") != std::string::npos) {
            std::cerr << "io error: " << what << "\n";
            return kExitIo;
        }
        std::cerr << "generation error: " << what << "\n";
        return kExitGeneration;
    }
}

int cmd_evolve(const GlobalOptions& opts, const std::string& seed_corpus_path,
               std::size_t rounds_override) {
    tsqa::cli::Config cfg;
    try {
        cfg = load(opts);
    } catch (const tsqa::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);

    tsqa::datasets::Corpus seeds;
    try {
        seeds = tsqa::datasets::read_jsonl(seed_corpus_path);
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }

    std::unique_ptr<tsqa::tsevol::TextGenerator> gen;
    if (opts.mock) {
        gen = std::make_unique<tsqa::tsevol::MockTextGenerator>();
    } else {
        if (cfg.endpoint_url.empty()) {
            std::cerr << "endpoint error: no generator.endpoint_url configured (or pass --mock)\n";
            return kExitEndpoint;
        }
        auto endpoint = make_endpoint(cfg, cfg.endpoint_url, cfg.model, opts.audit, cfg.out_dir);
        try {
            endpoint->check_reachable();
        } catch (const tsqa::remote::EndpointError& e) {
            std::cerr << "endpoint error: " << e.what() << "\n";
            return kExitEndpoint;
        }
        gen = std::make_unique<tsqa::remote::HttpTextGenerator>(endpoint);
    }

    tsqa::tsevol::EvolutionOptions evo;
    evo.rounds = rounds_override > 0 ? rounds_override : cfg.corpus.evol_rounds;
    evo.retries = cfg.retries;
    evo.in_flight = cfg.in_flight;
    evo.tolerances.relative = cfg.rel_tolerance;

    tsqa::datasets::Corpus out;
    tsqa::tsevol::EvolutionStats totals;
    std::size_t emitted = 0;
    for (std::size_t i = 0; i < seeds.records.size(); ++i) {
        const auto& srec = seeds.records[i];
        std::vector<tsqa::genpool::AttributePool> pools;
        for (const auto& e : srec.series) pools.push_back(e.pool);
        if (pools.empty()) continue;
        auto run = tsqa::tsevol::run_evolution({srec.qa}, pools, srec.correlation_pools, *gen,
                                               tsqa::Rng::mix(cfg.seed, i), evo);
        totals.attempts += run.stats.attempts;
        totals.accepted += run.stats.accepted;
        totals.rejected += run.stats.rejected;
        totals.errors += run.stats.errors;
        for (auto& qa : run.records) {
            tsqa::datasets::Record rec = srec;
            rec.qa = qa;
            rec.stage = "sft";
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%06zu", emitted++);
            rec.qa.id = std::string("s-evol-") + buf;
            out.records.push_back(std::move(rec));
        }
    }
    out.manifest = tsqa::datasets::derive_manifest(out.records, cfg.seed);

    std::string path = cfg.out_dir + "/evolved.jsonl";
    try {
        tsqa::datasets::write_jsonl(out, path);
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    char rate[32];
    std::snprintf(rate, sizeof(rate), "%.3f", totals.acceptance_rate());
    std::cout << "wrote " << out.records.size() << " evolved records to " << path << "\n";
    std::cout << "attempts " << totals.attempts << ", accepted " << totals.accepted << ", rejected "
              << totals.rejected << ", errors " << totals.errors << ", acceptance rate " << rate
              << "\n";
    return 0;
}

int cmd_eval(const GlobalOptions& opts, const std::string& corpus_path, bool oracle,
             const std::string& tools_arg) {
    tsqa::cli::Config cfg;
    try {
        cfg = load(opts);
    } catch (const tsqa::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);

    tsqa::datasets::Corpus corpus;
    try {
        corpus = tsqa::datasets::read_jsonl(corpus_path);
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }

    std::unique_ptr<tsqa::evalkit::ModelUnderTest> model;
    std::string label;
    if (oracle) {
        model = std::make_unique<tsqa::evalkit::PoolEchoOracle>();
        label = "oracle";
    } else if (!tools_arg.empty()) {
        double acc = tools_arg.rfind("acc=", 0) == 0 ? std::strtod(tools_arg.c_str() + 4, nullptr)
                                                     : std::strtod(tools_arg.c_str(), nullptr);
        std::set<tsqa::evalkit::ToolKind> all = {
            tsqa::evalkit::ToolKind::trend,       tsqa::evalkit::ToolKind::seasonality,
            tsqa::evalkit::ToolKind::fluctuation, tsqa::evalkit::ToolKind::correlation,
            tsqa::evalkit::ToolKind::point_value, tsqa::evalkit::ToolKind::range_stats};
        model = std::make_unique<tsqa::evalkit::ToolAnswerer>(acc, all, cfg.seed);
        label = "tools";
    } else {
        if (cfg.eval_endpoint_url.empty()) {
            std::cerr << "endpoint error: no eval.endpoint_url configured (or pass --oracle / "
                         "--tools)\n";
            return kExitEndpoint;
        }
        auto endpoint =
            make_endpoint(cfg, cfg.eval_endpoint_url, cfg.eval_model, opts.audit, cfg.out_dir);
        try {
            endpoint->check_reachable();
        } catch (const tsqa::remote::EndpointError& e) {
            std::cerr << "endpoint error: " << e.what() << "\n";
            return kExitEndpoint;
        }
        model = std::make_unique<tsqa::remote::HttpModel>(endpoint);
        label = "endpoint";
    }

    auto report = tsqa::evalkit::run_benchmark(corpus, *model, cfg.in_flight);
    try {
        tsqa::evalkit::write_report_json(report, cfg.out_dir + "/report-" + label + ".json");
        tsqa::evalkit::write_report_csv(report, cfg.out_dir + "/report-" + label + ".csv");
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }

    std::cout << "evaluated " << report.rows.size() << " records (" << label << ")\n";
    std::cout << "  categorical F1:        " << tsqa::format_double(report.overall_categorical_f1)
              << " over " << report.categorical_count << "\n";
    std::cout << "  numeric rel. accuracy: " << tsqa::format_double(report.overall_numeric_accuracy)
              << " over " << report.numeric_count << "\n";
    std::cout << "  choice accuracy:       " << tsqa::format_double(report.overall_choice_accuracy)
              << " over " << report.choice_count << "\n";
    std::cout << "  keyword score:         " << tsqa::format_double(report.overall_keyword_score)
              << " over " << report.keyword_count << "\n";
    std::cout << "  tokens (proxy):        " << report.total_prompt_tokens << " prompt, "
              << report.total_answer_tokens << " answer\n";
    if (auto* ta = dynamic_cast<tsqa::evalkit::ToolAnswerer*>(model.get()); ta && ta->tool_calls())
        std::cout << "  tool truthfulness:     "
                  << tsqa::format_double(static_cast<double>(ta->truthful_calls()) /
                                         static_cast<double>(ta->tool_calls()))
                  << " over " << ta->tool_calls() << " calls\n";

    std::size_t failures = 0;
    for (const auto& [cause, count] : report.failures_by_cause) failures += count;
    if (!report.rows.empty() && failures >= report.rows.size()) {
        std::cerr << "all items failed\n";
        return kExitAllFailed;
    }
    return 0;
}

int cmd_plot(const GlobalOptions& opts, const std::string& corpus_path, const std::string& id) {
    tsqa::cli::Config cfg;
    try {
        cfg = load(opts);
    } catch (const tsqa::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);

    try {
        tsqa::datasets::Corpus corpus = tsqa::datasets::read_jsonl(corpus_path);
        for (const auto& rec : corpus.records) {
            if (rec.qa.id != id) continue;
            std::string path = tsqa::plot::write_record_plot(rec, cfg.out_dir);
            std::cout << "wrote " << path << "\n";
            return 0;
        }
        std::cerr << "io error: no record with id '" << id << "' in " << corpus_path << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic time-series QA data generation and evaluation toolkit"};
    app.require_subcommand(1);

    GlobalOptions opts;
    std::string config_path;
    std::uint64_t seed_value = 0;
    app.add_option("--config", config_path, "Config file path");
    auto* seed_opt = app.add_option("--seed", seed_value, "Master seed");
    app.add_option("--out", opts.out_dir, "Output directory");
    app.add_flag("--mock", opts.mock, "Use the deterministic offline generator");
    app.add_flag("--audit", opts.audit, "Log endpoint request/response bodies");

    auto* taxonomy_cmd = app.add_subcommand("taxonomy", "Print the attribute taxonomy and catalog size");
    auto* generate_cmd = app.add_subcommand("generate", "Generate a dataset corpus per config");
    auto* evolve_cmd = app.add_subcommand("evolve", "Evolve a seed corpus into new QA records");
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model over a corpus");
    auto* plot_cmd = app.add_subcommand("plot", "Export CSV + SVG plot for one record");

    std::string seed_corpus, eval_corpus, plot_corpus, plot_id, tools_arg;
    std::size_t rounds = 0;
    bool oracle = false;
    evolve_cmd->add_option("seed_corpus", seed_corpus, "Seed corpus (jsonl)")->required();
    evolve_cmd->add_option("--rounds", rounds, "Evolution rounds");
    eval_cmd->add_option("corpus", eval_corpus, "Corpus to evaluate (jsonl)")->required();
    eval_cmd->add_flag("--oracle", oracle, "Score the pool-echo oracle");
    eval_cmd->add_option("--tools", tools_arg, "Score the scripted tool answerer, e.g. acc=0.9");
    plot_cmd->add_option("corpus", plot_corpus, "Corpus (jsonl)")->required();
    plot_cmd->add_option("id", plot_id, "Record id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (!config_path.empty()) opts.config_path = config_path;
    if (seed_opt->count() > 0) opts.seed = seed_value;

    if (taxonomy_cmd->parsed()) return cmd_taxonomy();
    if (generate_cmd->parsed()) return cmd_generate(opts);
    if (evolve_cmd->parsed()) return cmd_evolve(opts, seed_corpus, rounds);
    if (eval_cmd->parsed()) return cmd_eval(opts, eval_corpus, oracle, tools_arg);
    if (plot_cmd->parsed()) return cmd_plot(opts, plot_corpus, plot_id);
    return kExitConfig;
}
