#pragma once

#include "tsqa/genpool.hpp"
#include "tsqa/metrics.hpp"
#include "tsqa/taxonomy.hpp"

namespace tsqa::testing {

inline taxonomy::MetricSpec generic_metric(const std::string& name = "test_metric",
                                           double lo = 0.0, double hi = 100.0, bool nonneg = false) {
    taxonomy::MetricSpec m;
    m.name = name;
    m.domain_tag = "AIOps";
    m.range_low = lo;
    m.range_high = hi;
    m.nonneg = nonneg;
    return m;
}

inline genpool::AttributeSubset full_subset(const taxonomy::MetricSpec& metric) {
    genpool::RuleBasedSelector selector;
    return genpool::select_subset(metric, selector).subset;
}

// Subset whose pools are fully deterministic: no base noise and no
// noise-injecting fluctuation kinds.
inline genpool::AttributeSubset noise_free_subset(const taxonomy::MetricSpec& metric) {
    auto subset = full_subset(metric);
    subset.noises = {taxonomy::NoiseKind::none};
    std::erase_if(subset.fluctuations, [](taxonomy::FluctuationKind k) {
        return taxonomy::info(k).injects_noise || taxonomy::info(k).needs_base_noise;
    });
    return subset;
}

// Steady baseline pool for hand-computed expectations.
inline genpool::AttributePool steady_pool(double level, std::size_t length = 256) {
    genpool::AttributePool pool;
    pool.metric = generic_metric("steady_metric", 0.0, 100.0, false);
    pool.length = length;
    genpool::TrendSegment seg;
    seg.kind = taxonomy::TrendKind::steady;
    seg.start_idx = 0;
    seg.end_idx = length;
    seg.start_value = level;
    seg.param = 0.0;
    pool.trend = {seg};
    pool.noise = {taxonomy::NoiseKind::none, 0.0};
    pool.generation_seed = 7;
    return pool;
}

} // namespace tsqa::testing
