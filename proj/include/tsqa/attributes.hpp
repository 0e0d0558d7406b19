#pragma once

#include "tsqa/metrics.hpp"
#include "tsqa/taxonomy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tsqa::genpool {

using taxonomy::FluctuationKind;
using taxonomy::MetricSpec;
using taxonomy::NoiseKind;
using taxonomy::SeasonKind;
using taxonomy::TrendKind;

// One trend piece over [start_idx, end_idx). Pieces of a pool tile the whole
// index range and are value-continuous at the joints.
//
// steady:           v(t) = start_value
// linear increase:  v(t) = start_value + param * (t - start_idx), param > 0
// linear decrease:  same with param < 0
// curved:           v(t) = start_value + param * (t - start_idx)^2
struct TrendSegment {
    TrendKind kind = TrendKind::steady;
    std::size_t start_idx = 0;
    std::size_t end_idx = 0;
    double start_value = 0.0;
    double param = 0.0; // slope for linear kinds, curvature for curved, 0 for steady

    double value_at(std::size_t t) const;
    double end_value() const;       // value at end_idx (segment exit value)
    int slope_sign() const;         // -1, 0, +1 net direction
};

struct SeasonalityAttr {
    SeasonKind kind = SeasonKind::sine;
    std::size_t period = 0;   // steps, >= 4
    double amplitude = 0.0;   // metric units, half peak-to-peak
    double phase = 0.0;       // steps in [0, period)
};

struct NoiseAttr {
    NoiseKind kind = NoiseKind::none;
    double sigma_or_halfwidth = 0.0; // 0 for none, > 0 otherwise
};

// Amplitude semantics per kind (signed, metric units, relative to the
// noise-free trend+seasonality baseline):
//   spikes / shifts / transients / convex / concave / rises: peak offset
//   amplified/diminished seasonal amplitude: delta applied to the seasonal
//     half peak-to-peak inside the window
//   increased/decreased noise segment: delta applied to the noise scale
//   period lengthening: extra steps added to the period inside the window
//   phase shift: step offset applied to the seasonal phase inside the window
//   temporary flatline / gap: 0 (these pin values and ground no amplitude)
struct LocalFluctuation {
    FluctuationKind kind = FluctuationKind::upward_spike;
    std::size_t position = 0;
    std::size_t duration = 1;
    double amplitude = 0.0;

    std::size_t end() const { return position + duration; }
};

struct AttributePool {
    MetricSpec metric;
    std::size_t length = 0; // in [64, 1024]
    std::vector<TrendSegment> trend;
    std::optional<SeasonalityAttr> seasonality;
    NoiseAttr noise;
    std::vector<LocalFluctuation> fluctuations;
    std::uint64_t generation_seed = 0;
};

enum class CorrelationKind : std::uint8_t { shape, local };

// Relation record for one multivariate group. Members are identified by
// metric name (unique within the group).
struct CorrelationPool {
    std::string group_id;
    CorrelationKind kind = CorrelationKind::shape;
    std::vector<std::string> member_names;
    // shape relation: the shared trend-direction sequence, one entry per segment
    std::vector<int> trend_direction_sequence;
    // local relation: the shared fluctuation kind and its common position
    std::optional<FluctuationKind> shared_fluctuation;
    std::size_t shared_position = 0;
};

// Structural validation; returns a human-readable reason on failure.
std::optional<std::string> validate(const AttributePool& pool);
std::optional<std::string> validate(const CorrelationPool& group,
                                    const std::vector<AttributePool>& members);

// Noise-free baseline components evaluated from the pool alone.
double trend_value(const AttributePool& pool, std::size_t t);
double season_value(const AttributePool& pool, std::size_t t);

// Unit waveform (half peak-to-peak 1) at a fractional cycle position.
double seasonal_waveform(SeasonKind kind, double cycles, double duty_fraction);
// Leading duty fraction of the pulse-train waveform for a given period.
double pulse_duty_fraction(std::size_t period);
// Largest |seasonal term| the attribute can produce. Equals the amplitude for
// symmetric waveforms; pulse trains swing farther above their mean.
double season_margin(const SeasonalityAttr& attr);

// JSON round trip (ordered keys, lossless doubles).
nlohmann::ordered_json to_json(const AttributePool& pool);
AttributePool pool_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const CorrelationPool& group);
CorrelationPool correlation_from_json(const nlohmann::ordered_json& j);

} // namespace tsqa::genpool
