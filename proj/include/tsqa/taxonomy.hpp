#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsqa::taxonomy {

enum class TrendKind : std::uint8_t {
    steady,
    linear_increase,
    linear_decrease,
    curved,
};

enum class SeasonKind : std::uint8_t {
    sine,
    square_wave,
    triangle_wave,
    sawtooth,
    harmonic_mixture,
    amplitude_modulated_sine,
    pulse_train,
};

enum class NoiseKind : std::uint8_t {
    none,
    gaussian,
    uniform,
};

enum class FluctuationKind : std::uint8_t {
    upward_spike,
    downward_spike,
    upward_level_shift,
    downward_level_shift,
    transient_rise,
    transient_dip,
    convex_elevation,
    concave_depression,
    rapid_rise_slow_decline,
    slow_rise_rapid_decline,
    amplified_seasonal_amplitude,
    diminished_seasonal_amplitude,
    increased_noise,
    decreased_noise,
    temporary_flatline,
    gap,
    period_lengthening,
    phase_shift,
    oscillation_burst,
};

inline constexpr std::size_t kTrendCount = 4;
inline constexpr std::size_t kSeasonCount = 7;
inline constexpr std::size_t kNoiseCount = 3;
inline constexpr std::size_t kFluctuationCount = 19;

enum class Direction : std::uint8_t { up, down, neutral };

// Per-kind metadata: which way it moves, whether the effect ends with the
// window, and which numeric facts it grounds. Every description that cites a
// grounded fact can be checked mechanically against the pool.
struct FluctuationInfo {
    FluctuationKind kind;
    Direction direction;
    bool transient;
    bool grounds_position;
    bool grounds_duration;
    bool grounds_amplitude;
    bool needs_seasonality;   // only sampled when the pool has a seasonal component
    bool needs_base_noise;    // only sampled when the pool noise sigma > 0
    bool injects_noise;       // adds randomness of its own
};

struct AttributeTaxonomy {
    std::vector<TrendKind> trend_types;
    std::vector<SeasonKind> season_types;
    std::vector<NoiseKind> noise_types;
    std::vector<FluctuationKind> fluctuation_types;
};

// Singleton taxonomy; iteration order is fixed.
const AttributeTaxonomy& registry();

const FluctuationInfo& info(FluctuationKind kind);

std::string_view id(TrendKind kind);
std::string_view id(SeasonKind kind);
std::string_view id(NoiseKind kind);
std::string_view id(FluctuationKind kind);

std::optional<TrendKind> trend_from_id(std::string_view s);
std::optional<SeasonKind> season_from_id(std::string_view s);
std::optional<NoiseKind> noise_from_id(std::string_view s);
std::optional<FluctuationKind> fluctuation_from_id(std::string_view s);

// Label vocabularies for rule-based answer matching: the identifiers of one
// category, optionally with the "none" label appended.
std::vector<std::string> trend_vocab();
std::vector<std::string> season_vocab(bool with_none = true);
std::vector<std::string> noise_vocab();
std::vector<std::string> fluctuation_vocab(bool with_none = true);

} // namespace tsqa::taxonomy
