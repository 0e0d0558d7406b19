#include "tsqa/genpool.hpp"
#include "tsqa/prng.hpp"
#include "tsqa/synth.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace tsqa;
using namespace tsqa::testing;

namespace {

// Selector that proposes an empty trend set; select_subset must fall back.
struct BrokenSelector : genpool::SubsetSelector {
    genpool::AttributeSubset propose(const taxonomy::MetricSpec& metric,
                                     const taxonomy::AttributeTaxonomy& tax) override {
        genpool::RuleBasedSelector base;
        auto s = base.propose(metric, tax);
        s.trends.clear();
        return s;
    }
};

} // namespace

TEST_CASE("rule-based subsets keep bounded metrics inside their range") {
    auto metric = generic_metric("cpu_utilization", 0.0, 100.0, true);
    auto subset = full_subset(metric);
    CHECK(subset.nonneg);
    CHECK(subset.bounded_above);

    for (std::uint64_t i = 0; i < 100; ++i) {
        auto pool = genpool::sample_pool(subset, 256, Rng::split(555, i));
        auto series = synth::render(pool);
        for (double v : series.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
    }
}

TEST_CASE("invalid selector output falls back to the rule-based default") {
    BrokenSelector selector;
    auto outcome = genpool::select_subset(generic_metric(), selector);
    CHECK(outcome.fell_back);
    CHECK_FALSE(outcome.warning.empty());
    CHECK(outcome.subset.trends.size() == 4);
}

TEST_CASE("subset selection is deterministic") {
    genpool::RuleBasedSelector selector;
    auto metric = generic_metric("web_latency_p99_ms", 1.0, 2000.0, true);
    auto a = genpool::select_subset(metric, selector);
    auto b = genpool::select_subset(metric, selector);
    CHECK(a.subset.trends == b.subset.trends);
    CHECK(a.subset.fluct_amplitude.lo == b.subset.fluct_amplitude.lo);
    CHECK(a.subset.fluct_amplitude.hi == b.subset.fluct_amplitude.hi);
}

TEST_CASE("sample_pool rejects out-of-bounds lengths") {
    auto subset = full_subset(generic_metric());
    CHECK_THROWS_AS(genpool::sample_pool(subset, 63, 1), std::invalid_argument);
    CHECK_THROWS_AS(genpool::sample_pool(subset, 1025, 1), std::invalid_argument);
    auto pool = genpool::sample_pool(subset, 64, 1);
    CHECK(pool.length == 64);
    CHECK(pool.trend.size() >= 1);
}

TEST_CASE("pools are bit-identical for a fixed seed") {
    auto subset = full_subset(generic_metric());
    auto a = genpool::sample_pool(subset, 256, 987654321);
    auto b = genpool::sample_pool(subset, 256, 987654321);
    CHECK(genpool::to_json(a) == genpool::to_json(b));
    auto c = genpool::sample_pool(subset, 256, 987654322);
    CHECK(genpool::to_json(a) != genpool::to_json(c));
}

TEST_CASE("fluctuation windows never overlap across 1000 sampled pools") {
    auto subset = full_subset(generic_metric());
    for (std::uint64_t i = 0; i < 1000; ++i) {
        auto pool = genpool::sample_pool(subset, 256, Rng::split(31337, i));
        for (std::size_t a = 0; a < pool.fluctuations.size(); ++a)
            for (std::size_t b = a + 1; b < pool.fluctuations.size(); ++b) {
                const auto& fa = pool.fluctuations[a];
                const auto& fb = pool.fluctuations[b];
                bool overlap = fa.position < fb.end() && fb.position < fa.end();
                CHECK_FALSE(overlap);
            }
    }
}

TEST_CASE("10000 random pools all satisfy the pool invariants") {
    auto metrics = {generic_metric("generic", -50.0, 50.0, false),
                    generic_metric("nonneg_count", 0.0, 20000.0, true),
                    generic_metric("percentish_utilization", 0.0, 100.0, true)};
    std::size_t idx = 0;
    for (const auto& metric : metrics) {
        auto subset = full_subset(metric);
        for (std::uint64_t i = 0; i < 3334; ++i, ++idx) {
            std::size_t length = 64 + (Rng::mix(42, idx) % 961);
            auto pool = genpool::sample_pool(subset, length, Rng::split(9001, idx));
            auto err = genpool::validate(pool);
            if (err) FAIL("pool ", idx, " invalid: ", *err);
            CHECK(pool.fluctuations.size() <= 3);
            CHECK(pool.trend.size() <= 4);
        }
    }
}

TEST_CASE("every fluctuation and season kind appears over 10000 pools") {
    auto subset = full_subset(generic_metric("coverage_metric", -10.0, 10.0, false));
    std::set<taxonomy::FluctuationKind> fluct_seen;
    std::set<taxonomy::SeasonKind> season_seen;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        std::size_t length = 128 + (Rng::mix(7, i) % 897);
        auto pool = genpool::sample_pool(subset, length, Rng::split(777, i));
        for (const auto& f : pool.fluctuations) fluct_seen.insert(f.kind);
        if (pool.seasonality) season_seen.insert(pool.seasonality->kind);
    }
    CHECK(fluct_seen.size() == taxonomy::kFluctuationCount);
    CHECK(season_seen.size() == taxonomy::kSeasonCount);
}

TEST_CASE("nonneg pools never render below zero") {
    auto subset = full_subset(generic_metric("requests_count", 0.0, 5000.0, true));
    for (std::uint64_t i = 0; i < 500; ++i) {
        auto pool = genpool::sample_pool(subset, 256, Rng::split(123321, i));
        auto series = synth::render(pool);
        double mn = *std::min_element(series.values.begin(), series.values.end());
        CHECK(mn >= 0.0);
    }
}

TEST_CASE("local correlation groups share kind and position") {
    auto subset = full_subset(generic_metric());
    auto [group, members] =
        genpool::build_correlation_group(genpool::CorrelationKind::local, 3, subset, 256, 42);
    CHECK(group.member_names.size() == 3);
    REQUIRE(group.shared_fluctuation.has_value());
    for (const auto& m : members) {
        bool found = false;
        for (const auto& f : m.fluctuations)
            if (f.kind == *group.shared_fluctuation && f.position == group.shared_position)
                found = true;
        CHECK(found);
    }
    CHECK_FALSE(genpool::validate(group, members).has_value());
}

TEST_CASE("shape correlation groups share the trend direction sequence") {
    auto subset = full_subset(generic_metric());
    auto [group, members] =
        genpool::build_correlation_group(genpool::CorrelationKind::shape, 4, subset, 256, 77);
    CHECK(group.member_names.size() == 4);
    for (const auto& m : members) {
        REQUIRE(m.trend.size() == group.trend_direction_sequence.size());
        for (std::size_t i = 0; i < m.trend.size(); ++i)
            CHECK(m.trend[i].slope_sign() == group.trend_direction_sequence[i]);
    }
    CHECK_FALSE(genpool::validate(group, members).has_value());
}

TEST_CASE("correlation group size bounds are enforced") {
    auto subset = full_subset(generic_metric());
    CHECK_THROWS_AS(genpool::build_correlation_group(genpool::CorrelationKind::local, 1, subset, 256, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(genpool::build_correlation_group(genpool::CorrelationKind::shape, 17, subset, 256, 1),
                    std::invalid_argument);
}

TEST_CASE("generated correlation groups verify over many seeds") {
    auto subset = full_subset(generic_metric("corr_metric", 0.0, 1000.0, true));
    for (std::uint64_t i = 0; i < 50; ++i) {
        auto kind = i % 2 == 0 ? genpool::CorrelationKind::shape : genpool::CorrelationKind::local;
        std::size_t size = 2 + (i % 4);
        auto [group, members] = genpool::build_correlation_group(kind, size, subset, 192, Rng::split(5150, i));
        auto err = genpool::validate(group, members);
        if (err) FAIL("group ", i, ": ", *err);
        for (const auto& m : members) {
            auto perr = genpool::validate(m);
            if (perr) FAIL("member of group ", i, ": ", *perr);
        }
    }
}
