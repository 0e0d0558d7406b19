#pragma once

#include "tsqa/attributes.hpp"

#include <memory>
#include <utility>

namespace tsqa::genpool {

struct AmplitudeHint {
    double lo = 0.0;
    double hi = 0.0;
};

// Metric-appropriate restriction of the full taxonomy plus numeric constraint
// hints (metric units). sample_pool draws concrete attribute combinations
// from it; the hard physics rules (nonneg floors, bounded ceilings, range
// budgets) are enforced at sampling time no matter what a selector proposed.
struct AttributeSubset {
    MetricSpec metric;
    std::vector<TrendKind> trends;
    std::vector<SeasonKind> seasons;   // empty -> never seasonal
    std::vector<NoiseKind> noises;
    std::vector<FluctuationKind> fluctuations; // empty -> never fluctuating

    double base_low = 0.0;  // baseline start-value window
    double base_high = 1.0;
    AmplitudeHint trend_change;     // per-segment net change magnitude
    AmplitudeHint season_amplitude;
    AmplitudeHint noise_scale;
    AmplitudeHint fluct_amplitude;
    double season_probability = 0.7;

    bool nonneg = false;
    bool bounded_above = false; // rendered values must stay <= ceiling
    double ceiling = 0.0;
};

std::optional<std::string> validate_subset(const AttributeSubset& subset);

class SubsetSelector {
public:
    virtual ~SubsetSelector() = default;
    virtual AttributeSubset propose(const MetricSpec& metric,
                                    const taxonomy::AttributeTaxonomy& taxonomy) = 0;
};

// Offline default: keyword rules over the metric name / domain tag decide
// seasonality strength, spikiness and bounds. Always proposes every kind in
// each category; the hints carry the metric-specific knowledge.
class RuleBasedSelector : public SubsetSelector {
public:
    AttributeSubset propose(const MetricSpec& metric,
                            const taxonomy::AttributeTaxonomy& taxonomy) override;
};

struct SelectionOutcome {
    AttributeSubset subset;
    bool fell_back = false;  // selector output was invalid; rule-based default used
    std::string warning;
};

// Validates and sanitizes the selector's proposal; falls back to the
// rule-based default when the proposal is unusable.
SelectionOutcome select_subset(const MetricSpec& metric, SubsetSelector& selector);

// Draws one concrete pool. Pure function of (subset, length, seed).
// length must lie in [64, 1024]; fluctuation count in [0, 3], trend segment
// count in [1, 4], windows never overlap.
AttributePool sample_pool(const AttributeSubset& subset, std::size_t length, std::uint64_t seed);

// Builds a correlated multivariate group of `size` pools (2..16). Shape
// groups share the trend-direction sequence; local groups share a
// fluctuation kind at a common position. Member metric names are suffixed
// to stay unique within the group.
std::pair<CorrelationPool, std::vector<AttributePool>>
build_correlation_group(CorrelationKind kind, std::size_t size, const AttributeSubset& subset,
                        std::size_t length, std::uint64_t seed);

// Effective gaussian-equivalent noise scale (0 for none).
double noise_sigma(const NoiseAttr& noise);

// Value that `gap` windows pin to for this metric.
double gap_pin_value(const MetricSpec& metric);

} // namespace tsqa::genpool
