// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every tolerance is pinned here, in code.

#include "tsqa/datasets.hpp"
#include "tsqa/describe.hpp"
#include "tsqa/evalkit.hpp"
#include "tsqa/genpool.hpp"
#include "tsqa/metrics.hpp"
#include "tsqa/prng.hpp"
#include "tsqa/synth.hpp"
#include "tsqa/taxonomy.hpp"
#include "tsqa/tsevol.hpp"
#include "tsqa/util.hpp"
#include "tsqa/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef TSQA_CLI_PATH
#define TSQA_CLI_PATH "tsqa"
#endif

namespace {

using namespace tsqa;
using Clock = std::chrono::steady_clock;

int failures = 0;

struct Criterion {
    int number;
    double limit_seconds;
    std::vector<std::string> problems;
    Clock::time_point start = Clock::now();

    explicit Criterion(int n, double limit) : number(n), limit_seconds(limit) {}

    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }

    void finish(const std::string& title) {
        double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        if (elapsed > limit_seconds)
            problems.push_back("runtime " + std::to_string(elapsed) + "s exceeds " +
                               std::to_string(limit_seconds) + "s");
        if (problems.empty()) {
            std::printf("PASS criterion %d: %s (%.2fs)\n", number, title.c_str(), elapsed);
        } else {
            ++failures;
            std::printf("FAIL criterion %d: %s (%.2fs)\n", number, title.c_str(), elapsed);
            for (const auto& p : problems) std::printf("     - %s\n", p.c_str());
        }
        std::fflush(stdout);
    }
};

taxonomy::MetricSpec metric_for(const std::string& name, double lo, double hi, bool nonneg) {
    taxonomy::MetricSpec m;
    m.name = name;
    m.domain_tag = "AIOps";
    m.range_low = lo;
    m.range_high = hi;
    m.nonneg = nonneg;
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// --------------------------------------------------------------------------

void criterion_1_taxonomy() {
    Criterion c(1, 1.0);
    const auto& tax = taxonomy::registry();
    c.require(tax.trend_types.size() == 4, "trend kinds != 4");
    c.require(tax.season_types.size() == 7, "season kinds != 7");
    c.require(tax.noise_types.size() == 3, "noise kinds != 3");
    c.require(tax.fluctuation_types.size() == 19, "fluctuation kinds != 19");
    auto catalog = taxonomy::metric_catalog();
    c.require(catalog.size() == 567,
              "default catalog has " + std::to_string(catalog.size()) + " entries, want 567");
    c.finish("taxonomy counts 4/7/3/19 and 567-entry metric catalog");
}

void criterion_2_generator_exactness() {
    Criterion c(2, 60.0);

    // Noise-free recovery at exactness tolerances.
    genpool::RuleBasedSelector selector;
    auto clean_subset =
        genpool::select_subset(metric_for("acc_clean", 0.0, 500.0, true), selector).subset;
    clean_subset.noises = {taxonomy::NoiseKind::none};
    std::erase_if(clean_subset.fluctuations, [](taxonomy::FluctuationKind k) {
        return taxonomy::info(k).injects_noise || taxonomy::info(k).needs_base_noise;
    });

    std::size_t checked_amplitudes = 0, checked_positions = 0, checked_periods = 0,
                checked_slopes = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        std::size_t length = 64 + (Rng::mix(1001, i) % 961);
        auto pool = genpool::sample_pool(clean_subset, length, Rng::split(0xACC2, i));
        auto series = synth::render(pool);
        auto report = synth::verify(pool, series);
        for (const auto& check : report.checks) {
            bool amplitude_like = check.name.find(" amplitude") != std::string::npos ||
                                  check.name.find(" shift steps") != std::string::npos ||
                                  check.name.find(" period delta") != std::string::npos;
            if (amplitude_like) {
                ++checked_amplitudes;
                double denom = std::max(std::fabs(check.expected), 1e-12);
                if (std::fabs(check.measured - check.expected) / denom > 1e-6)
                    c.require(false, "pool " + std::to_string(i) + " " + check.name +
                                         " off by more than 1e-6 relative");
            } else if (check.name.find(" position") != std::string::npos ||
                       check.name.find(" onset") != std::string::npos) {
                ++checked_positions;
                if (!check.pass)
                    c.require(false,
                              "pool " + std::to_string(i) + " " + check.name + " not exact");
            } else if (check.name == "seasonality period") {
                ++checked_periods;
                if (std::fabs(check.measured - check.expected) > 1.0)
                    c.require(false, "pool " + std::to_string(i) + " period off by more than 1");
            } else if (check.name.find("slope sign") != std::string::npos) {
                ++checked_slopes;
                if (!check.pass)
                    c.require(false, "pool " + std::to_string(i) + " " + check.name + " wrong");
            }
            if (!check.pass && check.note.empty())
                c.require(false, "pool " + std::to_string(i) + " failed " + check.name);
        }
        if (c.problems.size() > 8) break;
    }
    c.require(checked_amplitudes > 200, "too few amplitude checks exercised");
    c.require(checked_positions > 200, "too few position checks exercised");
    c.require(checked_periods > 200, "too few period checks exercised");
    c.require(checked_slopes > 500, "too few slope checks exercised");

    // Gaussian-noise recovery at 3-sigma tolerances.
    auto noisy_subset =
        genpool::select_subset(metric_for("acc_noisy", 0.0, 1000.0, true), selector).subset;
    noisy_subset.noises = {taxonomy::NoiseKind::gaussian};
    std::size_t pass = 0;
    const std::size_t total = 1000;
    for (std::uint64_t i = 0; i < total; ++i) {
        std::size_t length = 64 + (Rng::mix(2002, i) % 961);
        auto pool = genpool::sample_pool(noisy_subset, length, Rng::split(0xACC3, i));
        auto series = synth::render(pool);
        if (synth::verify(pool, series).overall_pass) ++pass;
    }
    double rate = static_cast<double>(pass) / static_cast<double>(total);
    c.require(rate >= 0.99, "noisy pass rate " + std::to_string(rate) + " < 0.99");
    c.finish("generator exactness (noise-free exact recovery; noisy >= 99%)");
}

void criterion_3_normalization() {
    Criterion c(3, 10.0);
    genpool::RuleBasedSelector selector;
    auto subset = genpool::select_subset(metric_for("acc_norm", -2000.0, 3000.0, false), selector).subset;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        std::size_t length = 64 + (Rng::mix(3003, i) % 961);
        auto pool = genpool::sample_pool(subset, length, Rng::split(0xACC4, i));
        auto raw = synth::render(pool);
        auto back = synth::denormalize(synth::normalize(raw));
        for (std::size_t t = 0; t < raw.values.size(); ++t) {
            double scale = std::max(1.0, std::fabs(raw.values[t]));
            if (std::fabs(back.values[t] - raw.values[t]) > 1e-9 * scale) {
                c.require(false, "round trip off at series " + std::to_string(i));
                break;
            }
        }
        if (!c.problems.empty()) break;
    }
    synth::TimeSeries constant{"c", {7.0, 7.0, 7.0}};
    auto n = synth::normalize(constant);
    c.require(n.value_scaling == 1.0 && n.value_offset == 7.0, "constant-series rule broken");
    c.require(n.values == std::vector<double>{0.0, 0.0, 0.0}, "constant series not all zeros");
    c.finish("normalization round trip on 10000 series within 1e-9");
}

void criterion_4_metric_formulas() {
    Criterion c(4, 5.0);
    c.require(evalkit::relative_accuracy(100.0, 100.0) == 1.0, "(100,100) != 1.0");
    c.require(evalkit::relative_accuracy(110.0, 100.0) == 0.9, "(110,100) != 0.9");
    c.require(evalkit::relative_accuracy(300.0, 100.0) == 0.0, "(300,100) != 0.0");

    c.require(evalkit::f1({"spike"}, {"spike"}) == 1.0, "f1 identity");
    c.require(std::fabs(evalkit::f1({"spike"}, {"spike", "dip"}) - 2.0 / 3.0) < 1e-12,
              "f1 partial");
    c.require(evalkit::f1({}, {"spike"}) == 0.0, "f1 empty prediction");
    c.require(evalkit::f1({}, {}) == 1.0, "f1 both empty");

    c.require(evalkit::choice_accuracy("Answer: B", "B").score == 1, "choice B");
    c.require(evalkit::choice_accuracy("True, because it rises", "False").score == 0,
              "choice True vs False");
    auto bad = evalkit::choice_accuracy("maybe", "A");
    c.require(bad.score == 0 && bad.unparseable, "unparseable choice flag");
    c.finish("relative-accuracy, F1 and choice-accuracy tables");
}

datasets::Corpus make_alignment_corpus(std::size_t total, std::uint64_t seed) {
    datasets::CorpusSpec spec;
    spec.stage = "alignment";
    spec.uts = total / 3 + total % 3;
    spec.mts_shape = total / 3;
    spec.mts_local = total / 3;
    spec.min_length = 64;
    spec.max_length = 256;
    spec.master_seed = seed;
    return datasets::compose_corpus(spec);
}

void criterion_5_oracle_closure() {
    Criterion c(5, 60.0);
    auto corpus = make_alignment_corpus(1000, 0xC5);
    c.require(corpus.records.size() == 1000, "corpus size != 1000");

    evalkit::PoolEchoOracle oracle;
    auto report = evalkit::run_benchmark(corpus, oracle, 2);
    c.require(report.overall_categorical_f1 == 1.0,
              "overall categorical F1 = " + format_double(report.overall_categorical_f1));

    double noise_free_sum = 0.0;
    std::size_t noise_free_count = 0;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        const auto& rec = corpus.records[i];
        if (!describe::is_numeric_task(rec.qa.task)) continue;
        if (rec.series.front().pool.noise.kind != taxonomy::NoiseKind::none) continue;
        noise_free_sum += report.rows[i].score;
        ++noise_free_count;
    }
    c.require(noise_free_count > 20, "too few noise-free numeric items");
    double mean = noise_free_count ? noise_free_sum / static_cast<double>(noise_free_count) : 0.0;
    c.require(mean >= 0.99, "noise-free numeric relative accuracy " + format_double(mean));
    c.finish("pool-echo oracle closes the harness (F1 = 1.0, numeric >= 0.99)");
}

void criterion_6_perfect_tools() {
    Criterion c(6, 120.0);
    auto corpus = make_alignment_corpus(1000, 0xC6);
    std::set<evalkit::ToolKind> all = {
        evalkit::ToolKind::trend,       evalkit::ToolKind::seasonality,
        evalkit::ToolKind::fluctuation, evalkit::ToolKind::correlation,
        evalkit::ToolKind::point_value, evalkit::ToolKind::range_stats};

    double previous = -1.0;
    double last_f1 = 0.0;
    for (double acc : {0.8, 0.9, 0.95, 1.0}) {
        evalkit::ToolAnswerer model(acc, all, 0xFEED);
        auto report = evalkit::run_benchmark(corpus, model, 2);
        double truthful = static_cast<double>(model.truthful_calls()) /
                          static_cast<double>(model.tool_calls());
        c.require(std::fabs(truthful - acc) <= 0.02,
                  "truthfulness " + format_double(truthful) + " not within 0.02 of " +
                      format_double(acc));
        c.require(report.overall_categorical_f1 >= previous,
                  "F1 decreased at accuracy " + format_double(acc));
        previous = report.overall_categorical_f1;
        last_f1 = report.overall_categorical_f1;
    }
    c.require(last_f1 == 1.0, "F1 at accuracy 1.0 is " + format_double(last_f1));
    c.finish("perfect-tools sensitivity (nondecreasing F1, F1(1.0) = 1, truthfulness +/-2%)");
}

void criterion_7_tsevol() {
    Criterion c(7, 120.0);
    genpool::RuleBasedSelector selector;
    auto subset = genpool::select_subset(metric_for("acc_evol", 0.0, 800.0, true), selector).subset;

    // 100 seeds over shared pools; two identical 3-round runs must agree.
    std::vector<describe::QARecord> seeds;
    std::vector<genpool::AttributePool> pools;
    auto pool = genpool::sample_pool(subset, 256, 0xC7);
    pools.push_back(pool);
    auto series = synth::render(pool);
    static const char* tasks[] = {"trend", "season", "noise", "local"};
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto qa = describe::gen_alignment_qa(pool, series, tasks[i % 4], Rng::mix(17, i));
        qa.id = "seed-" + std::to_string(i);
        seeds.push_back(qa);
    }
    tsevol::MockTextGenerator gen;
    tsevol::EvolutionOptions opt;
    opt.rounds = 3;
    auto run_a = tsevol::run_evolution(seeds, pools, {}, gen, 0xC7C7, opt);
    auto run_b = tsevol::run_evolution(seeds, pools, {}, gen, 0xC7C7, opt);
    auto fingerprint = [](const tsevol::EvolutionRun& run) {
        std::string out;
        for (const auto& r : run.records)
            out += r.id + "\x1f" + r.task + "\x1f" + r.question + "\x1f" + r.answer + "\x1e";
        return out;
    };
    c.require(fingerprint(run_a) == fingerprint(run_b), "3-round evolution not bit-reproducible");
    c.require(!run_a.records.empty(), "evolution produced no records");

    // Mutation harness: corrupting one numeric claim must always reject.
    std::size_t trials = 0, rejected = 0;
    for (std::uint64_t i = 0; trials < 1000; ++i) {
        auto p = genpool::sample_pool(subset, 192, Rng::split(0xC7F, i));
        auto s = synth::render(p);
        auto seed_qa = describe::gen_alignment_qa(p, s, tasks[i % 4], Rng::mix(23, i));
        seed_qa.id = "mut-" + std::to_string(i);
        auto injected = tsevol::inject_attributes({p}, nullptr, 3, Rng::mix(29, i));
        auto cand = tsevol::evolve(seed_qa, {p}, tsevol::kAllEvolutionTypes[i % 6], injected, gen);
        bool corrupted = false;
        for (auto& claim : cand.claimed_facts) {
            if (!claim.text.empty()) continue;
            claim.value = claim.value * 3.0 + 10.0 * genpool::noise_sigma(p.noise) + 17.0;
            corrupted = true;
            break;
        }
        if (!corrupted) continue;
        ++trials;
        if (!tsevol::eliminate(cand, {p}).accepted) ++rejected;
    }
    c.require(trials == 1000, "mutation harness produced too few trials");
    c.require(rejected == trials,
              std::to_string(trials - rejected) + " corrupted candidates slipped through");
    c.finish("evolution reproducibility and eliminator mutation kill rate");
}

void criterion_8_corpus_composition() {
    Criterion c(8, 120.0);
    datasets::CorpusSpec alignment;
    alignment.stage = "alignment";
    alignment.uts = 350;
    alignment.mts_shape = 350;
    alignment.mts_local = 350;
    alignment.min_length = 64;
    alignment.max_length = 256;
    alignment.master_seed = 0xC8;
    auto align_corpus = datasets::compose_corpus(alignment);
    c.require(align_corpus.records.size() == 1050, "alignment corpus != 1050 records");

    datasets::CorpusSpec sft;
    sft.stage = "sft";
    sft.tsevol = 243;
    sft.instruct_follow = 51;
    sft.alignment_mix_fraction = 0.30;
    sft.min_length = 64;
    sft.max_length = 256;
    sft.master_seed = 0xC9;
    tsevol::MockTextGenerator gen;
    auto sft_corpus = datasets::compose_corpus(sft, &align_corpus, &gen);
    c.require(sft_corpus.records.size() == 243 + 51 + 315,
              "sft corpus has " + std::to_string(sft_corpus.records.size()) + " records, want 609");

    std::size_t manifest_total = 0;
    for (const auto& [task, count] : sft_corpus.manifest.task_counts) manifest_total += count;
    c.require(manifest_total == sft_corpus.records.size(), "manifest counts do not add up");
    c.require(sft_corpus.manifest.records == sft_corpus.records.size(), "manifest record total");
    std::size_t instruct = sft_corpus.manifest.task_counts.count("instruct_follow")
                               ? sft_corpus.manifest.task_counts.at("instruct_follow")
                               : 0;
    c.require(instruct == 51, "instruct_follow count " + std::to_string(instruct));

    std::string dir = "/tmp/tsqa_acceptance";
    std::filesystem::create_directories(dir);
    datasets::write_jsonl(align_corpus, dir + "/align_a.jsonl");
    datasets::write_jsonl(datasets::compose_corpus(alignment), dir + "/align_b.jsonl");
    c.require(slurp(dir + "/align_a.jsonl") == slurp(dir + "/align_b.jsonl"),
              "alignment rerun not byte-identical");
    datasets::write_jsonl(sft_corpus, dir + "/sft_a.jsonl");
    datasets::write_jsonl(datasets::compose_corpus(sft, &align_corpus, &gen), dir + "/sft_b.jsonl");
    c.require(slurp(dir + "/sft_a.jsonl") == slurp(dir + "/sft_b.jsonl"),
              "sft rerun not byte-identical");
    c.finish("corpus composition at scaled proportions, byte-identical rerun");
}

void criterion_9_end_to_end() {
    Criterion c(9, 300.0);
    std::string dir = "/tmp/tsqa_acceptance_e2e";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::string config_path = dir + "/desk.ini";
    {
        std::ofstream cfg(config_path);
        cfg << "[general]\nseed = 1234\n";
        cfg << "[corpus]\nstage = alignment\nuts = 100\nmts_shape = 100\nmts_local = 100\n";
        cfg << "max_length = 256\n";
    }
    std::string cli = TSQA_CLI_PATH;
    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " >> " + dir + "/log.txt 2>&1";
        return std::system(cmd.c_str());
    };
    c.require(run("--config " + config_path + " --out " + dir + " generate") == 0,
              "generate exited nonzero");
    c.require(std::filesystem::exists(dir + "/alignment.jsonl"), "alignment.jsonl missing");
    std::string manifest = slurp(dir + "/alignment.manifest.json");
    c.require(manifest.find("\"records\": 300") != std::string::npos,
              "manifest does not report 300 records");
    c.require(run("--out " + dir + " eval " + dir + "/alignment.jsonl --oracle") == 0,
              "eval --oracle exited nonzero");
    c.require(run("--seed 99 --out " + dir + " eval " + dir + "/alignment.jsonl --tools acc=0.9") == 0,
              "eval --tools exited nonzero");
    c.require(run("--out " + dir + " plot " + dir + "/alignment.jsonl a-uts-000000") == 0,
              "plot exited nonzero");
    c.require(std::filesystem::exists(dir + "/a-uts-000000.svg"), "plot svg missing");

    // The oracle run must also close at F1 = 1.0 through the CLI surface.
    std::string report = slurp(dir + "/report-oracle.csv");
    c.require(report.find("overall.categorical,f1,1,") != std::string::npos,
              "CLI oracle report lacks categorical F1 = 1");
    c.finish("offline end-to-end desk run through the CLI");
}

} // namespace

int main() {
    criterion_1_taxonomy();
    criterion_2_generator_exactness();
    criterion_3_normalization();
    criterion_4_metric_formulas();
    criterion_5_oracle_closure();
    criterion_6_perfect_tools();
    criterion_7_tsevol();
    criterion_8_corpus_composition();
    criterion_9_end_to_end();
    if (failures == 0) {
        std::printf("acceptance: all 9 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", failures);
    return 1;
}
