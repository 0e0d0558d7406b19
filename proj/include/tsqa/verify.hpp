#pragma once

#include "tsqa/attributes.hpp"
#include "tsqa/synth.hpp"

#include <string>
#include <vector>

namespace tsqa::synth {

// Tolerances are module constants here; override per call when needed.
struct VerifyConfig {
    double sigma_mult = 3.0;      // deviation tolerance in units of the noise sigma
    double range_frac = 0.01;     // ... or this fraction of the rendered range
    double exact_tol = 1e-6;      // relative tolerance for noise-free recovery
    std::size_t period_tol = 1;   // steps of slack for period recovery
};

struct CheckResult {
    std::string name;     // e.g. "fluct[1] upward spike amplitude"
    bool pass = false;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct ConsistencyReport {
    std::vector<CheckResult> checks;
    bool overall_pass = true;

    const CheckResult* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// Re-measures every pool attribute from the rendered array: per-segment
// least-squares slope sign on the deseasonalized values, seasonal period via
// the autocorrelation peak, each fluctuation's deviation against its recorded
// amplitude, and peak positions for the spike family.
ConsistencyReport verify(const AttributePool& pool, const TimeSeries& series,
                         const VerifyConfig& config = {});

// Masked Pearson autocorrelation at one lag; indices where mask[i] is false
// are excluded from the pairing.
double autocorrelation_at(const std::vector<double>& x, const std::vector<bool>& mask,
                          std::size_t lag);

// Least-squares slope of y against its index.
double least_squares_slope(const std::vector<double>& y);

// Best period by scanning autocorrelation local maxima in [3, n/2]; 0 when
// nothing periodic stands out.
std::size_t detect_period(const std::vector<double>& x, const std::vector<bool>& mask,
                          double min_strength = 0.5);

} // namespace tsqa::synth
