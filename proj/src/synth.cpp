#include "tsqa/synth.hpp"

#include "tsqa/genpool.hpp"
#include "tsqa/prng.hpp"
#include "tsqa/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tsqa::synth {

using genpool::LocalFluctuation;
using genpool::NoiseKind;
using genpool::SeasonKind;
using taxonomy::FluctuationKind;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

const LocalFluctuation* window_at(const AttributePool& pool, std::size_t t) {
    for (const auto& f : pool.fluctuations)
        if (t >= f.position && t < f.end()) return &f;
    return nullptr;
}

// Seasonal term with the window modifiers applied (amplitude scaling, phase
// shift, period lengthening).
double season_term(const AttributePool& pool, std::size_t t, const LocalFluctuation* w) {
    if (!pool.seasonality) return 0.0;
    const auto& s = *pool.seasonality;
    if (w) {
        switch (w->kind) {
        case FluctuationKind::amplified_seasonal_amplitude:
        case FluctuationKind::diminished_seasonal_amplitude: {
            double factor = (s.amplitude + w->amplitude) / s.amplitude;
            return factor * genpool::season_value(pool, t);
        }
        case FluctuationKind::phase_shift:
            return genpool::season_value(pool, t + static_cast<std::size_t>(w->amplitude));
        case FluctuationKind::period_lengthening: {
            // Phase-continuous at the window start, slower cycle inside.
            double p_new = static_cast<double>(s.period) + w->amplitude;
            double anchor = (static_cast<double>(w->position) + s.phase) / static_cast<double>(s.period);
            double cycles = anchor + (static_cast<double>(t) - static_cast<double>(w->position)) / p_new;
            return s.amplitude *
                   genpool::seasonal_waveform(s.kind, cycles, genpool::pulse_duty_fraction(s.period));
        }
        default: break;
        }
    }
    return genpool::season_value(pool, t);
}

double deviation_overlay(const LocalFluctuation& f, std::size_t t) {
    double j = static_cast<double>(t - f.position);
    double d = static_cast<double>(f.duration);
    double dm1 = std::max(1.0, d - 1.0);
    switch (f.kind) {
    case FluctuationKind::upward_spike:
    case FluctuationKind::downward_spike:
        return f.amplitude * (1.0 - j / d);
    case FluctuationKind::upward_level_shift:
    case FluctuationKind::downward_level_shift:
    case FluctuationKind::transient_rise:
    case FluctuationKind::transient_dip:
        return f.amplitude;
    case FluctuationKind::convex_elevation:
    case FluctuationKind::concave_depression:
        return f.amplitude * (j / dm1) * (j / dm1);
    case FluctuationKind::rapid_rise_slow_decline:
        return f.amplitude * std::exp(-3.0 * j / dm1);
    case FluctuationKind::slow_rise_rapid_decline:
        return f.amplitude * std::exp(-3.0 * (dm1 - j) / dm1);
    case FluctuationKind::oscillation_burst: {
        double burst_period = f.duration < 32 ? 4.0 : 8.0;
        return f.amplitude * std::sin(kTwoPi * j / burst_period);
    }
    default:
        return 0.0;
    }
}

} // namespace

TimeSeries render(const AttributePool& pool) {
    if (auto err = genpool::validate(pool))
        throw std::invalid_argument("invalid pool: " + *err);

    TimeSeries out;
    out.metric_name = pool.metric.name;
    out.values.resize(pool.length);

    std::uint64_t noise_key = Rng::mix(pool.generation_seed, 0x4E4F495345ULL);
    double pin_gap = genpool::gap_pin_value(pool.metric);

    // Flatline pin values are the baseline at the window start.
    std::vector<double> flat_pin(pool.fluctuations.size(), 0.0);
    for (std::size_t i = 0; i < pool.fluctuations.size(); ++i) {
        const auto& f = pool.fluctuations[i];
        if (f.kind == FluctuationKind::temporary_flatline)
            flat_pin[i] = genpool::trend_value(pool, f.position) +
                          genpool::season_value(pool, f.position);
    }

    for (std::size_t t = 0; t < pool.length; ++t) {
        const LocalFluctuation* w = window_at(pool, t);

        if (w && w->kind == FluctuationKind::gap) {
            out.values[t] = pin_gap;
            continue;
        }
        if (w && w->kind == FluctuationKind::temporary_flatline) {
            for (std::size_t i = 0; i < pool.fluctuations.size(); ++i)
                if (&pool.fluctuations[i] == w) out.values[t] = flat_pin[i];
            continue;
        }

        double v = genpool::trend_value(pool, t) + season_term(pool, t, w);

        if (w) {
            switch (w->kind) {
            case FluctuationKind::amplified_seasonal_amplitude:
            case FluctuationKind::diminished_seasonal_amplitude:
            case FluctuationKind::phase_shift:
            case FluctuationKind::period_lengthening:
            case FluctuationKind::increased_noise:
            case FluctuationKind::decreased_noise:
                break; // handled via season/noise terms
            default:
                v += deviation_overlay(*w, t);
            }
        }

        // Noise: counter-based per index so window modifiers never shift the
        // stream for the rest of the series.
        NoiseKind nkind = pool.noise.kind;
        double nscale = pool.noise.sigma_or_halfwidth;
        if (w && w->kind == FluctuationKind::increased_noise) {
            if (nkind == NoiseKind::none) {
                nkind = NoiseKind::gaussian;
                nscale = w->amplitude;
            } else {
                nscale += w->amplitude;
            }
        } else if (w && w->kind == FluctuationKind::decreased_noise) {
            nscale = std::max(0.0, nscale + w->amplitude);
        }
        if (nkind == NoiseKind::gaussian && nscale > 0.0) {
            v += nscale * Rng::normal_at(noise_key, t);
        } else if (nkind == NoiseKind::uniform && nscale > 0.0) {
            v += nscale * (2.0 * Rng::uniform01_at(noise_key, t) - 1.0);
        }

        out.values[t] = v;
    }
    return out;
}

std::vector<double> render_baseline(const AttributePool& pool) {
    AttributePool quiet = pool;
    quiet.noise.kind = NoiseKind::none;
    quiet.noise.sigma_or_halfwidth = 0.0;
    std::erase_if(quiet.fluctuations, [](const LocalFluctuation& f) {
        return f.kind == FluctuationKind::increased_noise ||
               f.kind == FluctuationKind::decreased_noise;
    });
    return render(quiet).values;
}

NormalizedSeries normalize(const TimeSeries& series) {
    NormalizedSeries out;
    out.metric_name = series.metric_name;
    if (series.values.empty()) return out;
    auto [mn_it, mx_it] = std::minmax_element(series.values.begin(), series.values.end());
    double mn = *mn_it, mx = *mx_it;
    out.value_offset = mn;
    out.value_scaling = mx > mn ? mx - mn : 1.0;
    out.values.reserve(series.values.size());
    for (double v : series.values) out.values.push_back((v - mn) / out.value_scaling);
    return out;
}

TimeSeries denormalize(const NormalizedSeries& series) {
    TimeSeries out;
    out.metric_name = series.metric_name;
    out.values.reserve(series.values.size());
    for (double v : series.values) out.values.push_back(v * series.value_scaling + series.value_offset);
    return out;
}

void write_csv(const TimeSeries& series, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "t,value\n";
    for (std::size_t t = 0; t < series.values.size(); ++t)
        f << t << "," << format_double(series.values[t]) << "\n";
}

} // namespace tsqa::synth
