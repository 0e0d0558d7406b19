#pragma once

#include "tsqa/attributes.hpp"

#include <string>
#include <vector>

namespace tsqa::synth {

using genpool::AttributePool;

struct TimeSeries {
    std::string metric_name;
    std::vector<double> values;
};

struct NormalizedSeries {
    std::string metric_name;
    std::vector<double> values;  // in [0, 1]
    double value_scaling = 1.0;  // > 0
    double value_offset = 0.0;
};

// Renders the value array that exactly matches the pool:
// trend + seasonality (with window modifiers) + overlays + noise.
// Deterministic for a fixed pool, noise keyed off pool.generation_seed.
TimeSeries render(const AttributePool& pool);

// Min-max scaling to [0, 1]. Constant series: scaling 1, offset = value,
// all normalized values 0.
NormalizedSeries normalize(const TimeSeries& series);
TimeSeries denormalize(const NormalizedSeries& series);

// Noise-free baseline (trend + modified seasonality, overlays, pins) — what
// render produces with the noise term removed.
std::vector<double> render_baseline(const AttributePool& pool);

// CSV export: header `t,value`, one row per sample.
void write_csv(const TimeSeries& series, const std::string& path);

} // namespace tsqa::synth
