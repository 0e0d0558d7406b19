#include "tsqa/evalkit.hpp"

#include "tsqa/prng.hpp"
#include <fstream>

#include "helpers.hpp"

#include <doctest.h>

using namespace tsqa;
using namespace tsqa::testing;
using datasets::CorpusSpec;
using evalkit::ToolKind;

namespace {

datasets::Corpus alignment_corpus(std::size_t uts, std::size_t mts, std::uint64_t seed) {
    CorpusSpec spec;
    spec.stage = "alignment";
    spec.uts = uts;
    spec.mts_shape = mts / 2;
    spec.mts_local = mts - mts / 2;
    spec.min_length = 64;
    spec.max_length = 128;
    spec.master_seed = seed;
    return datasets::compose_corpus(spec);
}

std::set<ToolKind> all_tools() {
    return {ToolKind::trend,       ToolKind::seasonality, ToolKind::fluctuation,
            ToolKind::correlation, ToolKind::point_value, ToolKind::range_stats};
}

} // namespace

TEST_CASE("parse_categorical matches identifiers on word boundaries") {
    auto vocab = evalkit::make_vocab(taxonomy::fluctuation_vocab(true));
    auto labels = evalkit::parse_categorical("There is an upward spike near t=100", vocab);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0] == "upward spike");
    CHECK(evalkit::parse_categorical("", vocab).empty());
}

TEST_CASE("negated season phrasing maps to none") {
    auto vocab = evalkit::make_vocab(taxonomy::season_vocab(true));
    auto labels = evalkit::parse_categorical("no periodic fluctuations are present", vocab);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0] == "none");
}

TEST_CASE("longer labels shadow their substrings") {
    auto vocab = evalkit::make_vocab(taxonomy::season_vocab(true));
    auto labels =
        evalkit::parse_categorical("the series shows an amplitude modulated sine pattern", vocab);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0] == "amplitude modulated sine");

    auto both = evalkit::parse_categorical("a sine plus an amplitude modulated sine", vocab);
    CHECK(both.size() == 2);
}

TEST_CASE("negation lookback suppresses denied labels") {
    auto vocab = evalkit::make_vocab(taxonomy::noise_vocab());
    auto labels = evalkit::parse_categorical("there is no gaussian noise, it is uniform", vocab);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0] == "uniform");
}

TEST_CASE("parse_number follows the final-numeral rule") {
    CHECK(*evalkit::parse_number("The maximum value is approximately 42.5.") == 42.5);
    CHECK(*evalkit::parse_number("between 10 and 20, so about 15") == 15.0);
    CHECK_FALSE(evalkit::parse_number("no idea").has_value());
}

TEST_CASE("relative accuracy matches the worked metric table") {
    CHECK(evalkit::relative_accuracy(100.0, 100.0) == 1.0);
    CHECK(evalkit::relative_accuracy(110.0, 100.0) == 0.9);
    CHECK(evalkit::relative_accuracy(300.0, 100.0) == 0.0);
    CHECK(evalkit::relative_accuracy(std::nullopt, 100.0) == 0.0);
    // Near-zero labels measure against the delta guard.
    CHECK(evalkit::relative_accuracy(0.5, 0.0, 1.0) == 0.5);
    CHECK(evalkit::relative_accuracy(0.0, 0.0, 0.0) == 1.0);
}

TEST_CASE("f1 follows the set conventions") {
    CHECK(evalkit::f1({"spike"}, {"spike"}) == 1.0);
    CHECK(evalkit::f1({"spike"}, {"spike", "dip"}) == doctest::Approx(2.0 / 3.0));
    CHECK(evalkit::f1({}, {"spike"}) == 0.0);
    CHECK(evalkit::f1({"spike"}, {}) == 0.0);
    CHECK(evalkit::f1({}, {}) == 1.0);
}

TEST_CASE("choice accuracy takes the first standalone option token") {
    auto r = evalkit::choice_accuracy("Answer: B", "B");
    CHECK(r.score == 1);
    CHECK_FALSE(r.unparseable);
    CHECK(evalkit::choice_accuracy("True, because the values rise", "False").score == 0);
    CHECK_FALSE(evalkit::choice_accuracy("True, because the values rise", "False").unparseable);
    auto bad = evalkit::choice_accuracy("maybe", "A");
    CHECK(bad.score == 0);
    CHECK(bad.unparseable);
}

TEST_CASE("keyword score counts fuzzy-matched keywords") {
    CHECK(evalkit::keyword_score("rising trend with a spike and noise burst",
                                 {"trend", "spike", "noise", "burst"}) == 1.0);
    CHECK(evalkit::keyword_score("rising trend with spikes", {"trend", "spike", "dip", "gap"}) ==
          doctest::Approx(0.5));
    CHECK(evalkit::keyword_score("", {"trend"}) == 0.0);
}

TEST_CASE("cluster answers parse into canonical partitions") {
    std::vector<std::string> names = {"m_a", "m_b", "m_c", "m_d"};
    auto clusters = evalkit::parse_cluster("Group 1: m_a, m_b. Group 2: m_c, m_d.", names);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0] == "m_a+m_b");
    CHECK(clusters[1] == "m_c+m_d");
}

TEST_CASE("oracle benchmark closes the loop on a small corpus") {
    auto corpus = alignment_corpus(30, 10, 2025);
    evalkit::PoolEchoOracle oracle;
    auto report = evalkit::run_benchmark(corpus, oracle, 2);
    CHECK(report.rows.size() == corpus.records.size());
    CHECK(report.overall_categorical_f1 == 1.0);
    CHECK(report.overall_numeric_accuracy >= 0.99);
    CHECK(report.total_prompt_tokens > 0);
}

TEST_CASE("report aggregates equal recomputation from retained rows") {
    auto corpus = alignment_corpus(20, 6, 99);
    evalkit::PoolEchoOracle oracle;
    auto report = evalkit::run_benchmark(corpus, oracle, 1);
    double f1_sum = 0.0;
    std::size_t f1_count = 0;
    for (const auto& row : report.rows)
        if (row.metric == "f1") {
            f1_sum += row.score;
            ++f1_count;
        }
    REQUIRE(f1_count == report.categorical_count);
    CHECK(report.overall_categorical_f1 == doctest::Approx(f1_sum / f1_count).epsilon(1e-12));
    std::size_t per_task_total = 0;
    for (const auto& [task, agg] : report.per_task) per_task_total += agg.count;
    CHECK(per_task_total == report.rows.size());
}

TEST_CASE("constant-choice model scores the empirical gold frequency") {
    // Deductive items give a True/False gold; a constant "True" answer should
    // score exactly the fraction of True golds.
    auto subset = full_subset(generic_metric("const_model", 0.0, 300.0, true));
    datasets::Corpus corpus;
    for (std::uint64_t i = 0; i < 40; ++i) {
        auto pool = genpool::sample_pool(subset, 96, Rng::split(31, i));
        auto series = synth::render(pool);
        auto qa = describe::gen_reasoning_seed({pool}, {series}, "deductive", Rng::mix(7, i));
        REQUIRE(qa.has_value());
        datasets::Record rec;
        rec.qa = *qa;
        rec.qa.id = "d-" + std::to_string(i);
        rec.stage = "alignment";
        rec.seed = i;
        datasets::SeriesEntry entry;
        auto norm = synth::normalize(series);
        entry.name = pool.metric.name;
        entry.length = series.values.size();
        entry.values = norm.values;
        entry.value_scaling = norm.value_scaling;
        entry.value_offset = norm.value_offset;
        entry.pool = pool;
        rec.series.push_back(entry);
        rec.prompt = datasets::assemble_prompt(rec.qa.question + "\n<ts>", {norm});
        corpus.records.push_back(rec);
    }
    std::size_t true_golds = 0;
    for (const auto& rec : corpus.records)
        if (*rec.qa.gold.choice == "True") ++true_golds;

    evalkit::ConstantModel constant("True");
    auto report = evalkit::run_benchmark(corpus, constant, 1);
    CHECK(report.overall_choice_accuracy ==
          doctest::Approx(static_cast<double>(true_golds) / 40.0));
}

TEST_CASE("empty corpus yields an empty report") {
    datasets::Corpus corpus;
    evalkit::PoolEchoOracle oracle;
    auto report = evalkit::run_benchmark(corpus, oracle, 4);
    CHECK(report.rows.empty());
    CHECK(report.categorical_count == 0);
    CHECK(report.total_prompt_tokens == 0);
}

TEST_CASE("model errors are recorded as failures and scored zero") {
    struct ThrowingModel : evalkit::ModelUnderTest {
        evalkit::ModelAnswer answer(const evalkit::QAInstance&) override {
            throw std::runtime_error("boom");
        }
    };
    auto corpus = alignment_corpus(4, 0, 5);
    ThrowingModel model;
    auto report = evalkit::run_benchmark(corpus, model, 1);
    CHECK(report.failures_by_cause.at("model_error") == corpus.records.size());
    for (const auto& row : report.rows) CHECK(row.score == 0.0);
}

TEST_CASE("perfect tool at the accuracy boundaries") {
    auto subset = full_subset(generic_metric("tool_metric", 0.0, 50.0, true));
    auto pool = genpool::sample_pool(subset, 128, 404);
    evalkit::ToolQuery q;
    q.kind = ToolKind::range_stats;
    for (std::uint64_t i = 0; i < 50; ++i) {
        auto truth = evalkit::perfect_tool(q, {pool}, {}, 1.0, Rng::split(1, i));
        CHECK(truth.truthful);
        auto lie = evalkit::perfect_tool(q, {pool}, {}, 0.0, Rng::split(1, i));
        CHECK_FALSE(lie.truthful);
    }
    CHECK_THROWS_AS(
        evalkit::perfect_tool(evalkit::ToolQuery{ToolKind::trend, 5, 0, 0, 0}, {pool}, {}, 1.0, 1),
        std::invalid_argument);
}

TEST_CASE("perfect tool truthful fraction tracks the configured accuracy") {
    auto subset = full_subset(generic_metric("tool_mc", 0.0, 50.0, true));
    auto pool = genpool::sample_pool(subset, 128, 405);
    evalkit::ToolQuery q;
    q.kind = ToolKind::seasonality;
    std::size_t truthful = 0, total = 10000;
    for (std::uint64_t i = 0; i < total; ++i)
        if (evalkit::perfect_tool(q, {pool}, {}, 0.9, Rng::split(2, i)).truthful) ++truthful;
    double fraction = static_cast<double>(truthful) / static_cast<double>(total);
    CHECK(fraction >= 0.88);
    CHECK(fraction <= 0.92);
}

TEST_CASE("corrupted numerics deviate by at least 20 percent") {
    auto pool = steady_pool(40.0, 128);
    evalkit::ToolQuery q;
    q.kind = ToolKind::point_value;
    q.point = 10;
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto ans = evalkit::perfect_tool(q, {pool}, {}, 0.0, Rng::split(3, i));
        double v = ans.payload.at("value").get<double>();
        CHECK(std::fabs(v - 40.0) >= 0.2 * 40.0 * 0.999);
    }
}

TEST_CASE("tool answerer with perfect tools closes alignment tasks") {
    auto corpus = alignment_corpus(30, 10, 626);
    evalkit::ToolAnswerer model(1.0, all_tools(), 7);
    auto report = evalkit::run_benchmark(corpus, model, 1);
    CHECK(report.overall_categorical_f1 == 1.0);
    CHECK(report.overall_numeric_accuracy >= 0.99);
    CHECK(model.truthful_calls() == model.tool_calls());
}

TEST_CASE("disabling the fluctuation tool zeroes local tasks") {
    auto subset = full_subset(generic_metric("disabled_tool", 0.0, 90.0, true));
    datasets::Corpus corpus;
    std::size_t made = 0;
    for (std::uint64_t i = 0; made < 10; ++i) {
        auto pool = genpool::sample_pool(subset, 96, Rng::split(21, i));
        if (pool.fluctuations.empty()) continue;
        auto series = synth::render(pool);
        datasets::Record rec;
        rec.qa = describe::gen_alignment_qa(pool, series, "local", Rng::mix(2, i));
        rec.qa.id = "l-" + std::to_string(made++);
        rec.stage = "alignment";
        auto norm = synth::normalize(series);
        datasets::SeriesEntry entry{pool.metric.name, series.values.size(), norm.values,
                                    norm.value_scaling, norm.value_offset, pool};
        rec.series.push_back(entry);
        rec.prompt = datasets::assemble_prompt(rec.qa.question + "\n<ts>", {norm});
        corpus.records.push_back(rec);
    }
    auto tools = all_tools();
    tools.erase(ToolKind::fluctuation);
    evalkit::ToolAnswerer model(1.0, tools, 7);
    auto report = evalkit::run_benchmark(corpus, model, 1);
    CHECK(report.overall_categorical_f1 == 0.0);
}

TEST_CASE("tool answerer F1 is nondecreasing in accuracy") {
    auto corpus = alignment_corpus(60, 20, 888);
    double previous = -1.0;
    for (double acc : {0.6, 0.8, 1.0}) {
        evalkit::ToolAnswerer model(acc, all_tools(), 1234);
        auto report = evalkit::run_benchmark(corpus, model, 2);
        CHECK(report.overall_categorical_f1 >= previous);
        previous = report.overall_categorical_f1;
    }
    CHECK(previous == 1.0);
}

TEST_CASE("report files are written in both formats") {
    auto corpus = alignment_corpus(6, 2, 3);
    evalkit::PoolEchoOracle oracle;
    auto report = evalkit::run_benchmark(corpus, oracle, 1);
    evalkit::write_report_json(report, "/tmp/tsqa_report.json");
    evalkit::write_report_csv(report, "/tmp/tsqa_report.csv");
    std::ifstream json_in("/tmp/tsqa_report.json");
    CHECK(json_in.good());
    std::ifstream csv_in("/tmp/tsqa_report.csv");
    std::string header;
    std::getline(csv_in, header);
    CHECK(header == "task,metric,mean_score,count");
}
