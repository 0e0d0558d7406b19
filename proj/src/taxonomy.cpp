#include "tsqa/taxonomy.hpp"

#include <stdexcept>

namespace tsqa::taxonomy {

namespace {

constexpr std::array<std::string_view, kTrendCount> kTrendIds = {
    "steady",
    "linear increase",
    "linear decrease",
    "curved",
};

constexpr std::array<std::string_view, kSeasonCount> kSeasonIds = {
    "sine",
    "square wave",
    "triangle wave",
    "sawtooth",
    "harmonic mixture",
    "amplitude modulated sine",
    "pulse train",
};

constexpr std::array<std::string_view, kNoiseCount> kNoiseIds = {
    "none",
    "gaussian",
    "uniform",
};

constexpr std::array<std::string_view, kFluctuationCount> kFluctuationIds = {
    "upward spike",
    "downward spike",
    "upward level shift",
    "downward level shift",
    "transient rise",
    "transient dip",
    "convex-shaped elevation",
    "concave-shaped depression",
    "rapid-rise-slow-decline",
    "slow-rise-rapid-decline",
    "amplified seasonal amplitude",
    "diminished seasonal amplitude",
    "increased noise segment",
    "decreased noise segment",
    "temporary flatline",
    "gap",
    "period lengthening",
    "phase shift",
    "oscillation burst",
};

using D = Direction;
using F = FluctuationKind;

// kind, direction, transient, pos, dur, amp, needs_season, needs_noise, injects_noise
constexpr std::array<FluctuationInfo, kFluctuationCount> kFluctuationInfo = {{
    {F::upward_spike, D::up, true, true, true, true, false, false, false},
    {F::downward_spike, D::down, true, true, true, true, false, false, false},
    {F::upward_level_shift, D::up, false, true, false, true, false, false, false},
    {F::downward_level_shift, D::down, false, true, false, true, false, false, false},
    {F::transient_rise, D::up, true, true, true, true, false, false, false},
    {F::transient_dip, D::down, true, true, true, true, false, false, false},
    {F::convex_elevation, D::up, true, true, true, true, false, false, false},
    {F::concave_depression, D::down, true, true, true, true, false, false, false},
    {F::rapid_rise_slow_decline, D::up, true, true, true, true, false, false, false},
    {F::slow_rise_rapid_decline, D::up, true, true, true, true, false, false, false},
    {F::amplified_seasonal_amplitude, D::neutral, true, true, true, true, true, false, false},
    {F::diminished_seasonal_amplitude, D::neutral, true, true, true, true, true, false, false},
    {F::increased_noise, D::neutral, true, true, true, true, false, false, true},
    {F::decreased_noise, D::neutral, true, true, true, true, false, true, false},
    {F::temporary_flatline, D::neutral, true, true, true, false, false, false, false},
    {F::gap, D::neutral, true, true, true, false, false, false, false},
    {F::period_lengthening, D::neutral, true, true, true, true, true, false, false},
    {F::phase_shift, D::neutral, true, true, true, true, true, false, false},
    {F::oscillation_burst, D::neutral, true, true, true, true, false, false, false},
}};

} // namespace

const AttributeTaxonomy& registry() {
    static const AttributeTaxonomy instance = [] {
        AttributeTaxonomy t;
        for (std::size_t i = 0; i < kTrendCount; ++i) t.trend_types.push_back(static_cast<TrendKind>(i));
        for (std::size_t i = 0; i < kSeasonCount; ++i) t.season_types.push_back(static_cast<SeasonKind>(i));
        for (std::size_t i = 0; i < kNoiseCount; ++i) t.noise_types.push_back(static_cast<NoiseKind>(i));
        for (std::size_t i = 0; i < kFluctuationCount; ++i)
            t.fluctuation_types.push_back(static_cast<FluctuationKind>(i));
        return t;
    }();
    return instance;
}

const FluctuationInfo& info(FluctuationKind kind) {
    return kFluctuationInfo[static_cast<std::size_t>(kind)];
}

std::string_view id(TrendKind kind) { return kTrendIds[static_cast<std::size_t>(kind)]; }
std::string_view id(SeasonKind kind) { return kSeasonIds[static_cast<std::size_t>(kind)]; }
std::string_view id(NoiseKind kind) { return kNoiseIds[static_cast<std::size_t>(kind)]; }
std::string_view id(FluctuationKind kind) { return kFluctuationIds[static_cast<std::size_t>(kind)]; }

namespace {
template <typename Kind, std::size_t N>
std::optional<Kind> from_id(const std::array<std::string_view, N>& ids, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i)
        if (ids[i] == s) return static_cast<Kind>(i);
    return std::nullopt;
}
} // namespace

std::optional<TrendKind> trend_from_id(std::string_view s) { return from_id<TrendKind>(kTrendIds, s); }
std::optional<SeasonKind> season_from_id(std::string_view s) { return from_id<SeasonKind>(kSeasonIds, s); }
std::optional<NoiseKind> noise_from_id(std::string_view s) { return from_id<NoiseKind>(kNoiseIds, s); }
std::optional<FluctuationKind> fluctuation_from_id(std::string_view s) {
    return from_id<FluctuationKind>(kFluctuationIds, s);
}

std::vector<std::string> trend_vocab() {
    std::vector<std::string> v;
    for (auto s : kTrendIds) v.emplace_back(s);
    return v;
}

std::vector<std::string> season_vocab(bool with_none) {
    std::vector<std::string> v;
    for (auto s : kSeasonIds) v.emplace_back(s);
    if (with_none) v.emplace_back("none");
    return v;
}

std::vector<std::string> noise_vocab() {
    std::vector<std::string> v;
    for (auto s : kNoiseIds) v.emplace_back(s);
    return v;
}

std::vector<std::string> fluctuation_vocab(bool with_none) {
    std::vector<std::string> v;
    for (auto s : kFluctuationIds) v.emplace_back(s);
    if (with_none) v.emplace_back("none");
    return v;
}

} // namespace tsqa::taxonomy
