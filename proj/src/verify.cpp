#include "tsqa/verify.hpp"

#include "tsqa/genpool.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsqa::synth {

using genpool::CorrelationKind;
using genpool::LocalFluctuation;
using genpool::NoiseKind;
using taxonomy::FluctuationKind;

double autocorrelation_at(const std::vector<double>& x, const std::vector<bool>& mask,
                          std::size_t lag) {
    std::size_t n = x.size();
    if (lag >= n) return 0.0;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    std::size_t count = 0;
    for (std::size_t t = 0; t + lag < n; ++t) {
        if (!mask[t] || !mask[t + lag]) continue;
        double a = x[t], b = x[t + lag];
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
        ++count;
    }
    if (count < 8) return 0.0;
    double nc = static_cast<double>(count);
    double cov = sab - sa * sb / nc;
    double va = saa - sa * sa / nc;
    double vb = sbb - sb * sb / nc;
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

double least_squares_slope(const std::vector<double>& y) {
    std::size_t n = y.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double xi = static_cast<double>(i);
        sx += xi;
        sy += y[i];
        sxx += xi * xi;
        sxy += xi * y[i];
    }
    double nd = static_cast<double>(n);
    double denom = nd * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (nd * sxy - sx * sy) / denom;
}

std::size_t detect_period(const std::vector<double>& x, const std::vector<bool>& mask,
                          double min_strength) {
    std::size_t n = x.size();
    if (n < 16) return 0;
    std::size_t max_lag = n / 2;
    std::vector<double> r(max_lag + 1, 0.0);
    for (std::size_t lag = 2; lag <= max_lag; ++lag) r[lag] = autocorrelation_at(x, mask, lag);

    double best = 0.0;
    for (std::size_t lag = 3; lag + 1 <= max_lag; ++lag)
        if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1]) best = std::max(best, r[lag]);
    if (best < min_strength) return 0;

    // Smallest strong local maximum; harmonics repeat at multiples.
    for (std::size_t lag = 3; lag + 1 <= max_lag; ++lag)
        if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= 0.6 * best) return lag;
    return 0;
}

namespace {

struct SeriesContext {
    const AttributePool& pool;
    const std::vector<double>& values;
    std::vector<double> deviation;   // values - trend - base season
    std::vector<bool> base_clean;    // true where no fluctuation window covers t
    double range = 0.0;
    double sigma = 0.0;              // gaussian-equivalent base noise scale
};

const LocalFluctuation* covering(const AttributePool& pool, std::size_t t) {
    for (const auto& f : pool.fluctuations)
        if (t >= f.position && t < f.end()) return &f;
    return nullptr;
}

bool is_deviation_kind(FluctuationKind k) {
    switch (k) {
    case FluctuationKind::upward_spike:
    case FluctuationKind::downward_spike:
    case FluctuationKind::upward_level_shift:
    case FluctuationKind::downward_level_shift:
    case FluctuationKind::transient_rise:
    case FluctuationKind::transient_dip:
    case FluctuationKind::convex_elevation:
    case FluctuationKind::concave_depression:
    case FluctuationKind::rapid_rise_slow_decline:
    case FluctuationKind::slow_rise_rapid_decline:
    case FluctuationKind::oscillation_burst:
        return true;
    default:
        return false;
    }
}

// Expected deviation profile value, mirroring the renderer's overlays.
double expected_overlay(const LocalFluctuation& f, std::size_t t) {
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
        return f.amplitude * std::sin(6.283185307179586 * j / burst_period);
    }
    default:
        return 0.0;
    }
}

// Index where |overlay| peaks, for the position checks.
std::size_t expected_apex(const LocalFluctuation& f) {
    switch (f.kind) {
    case FluctuationKind::upward_spike:
    case FluctuationKind::downward_spike:
    case FluctuationKind::rapid_rise_slow_decline:
        return f.position;
    case FluctuationKind::convex_elevation:
    case FluctuationKind::concave_depression:
    case FluctuationKind::slow_rise_rapid_decline:
        return f.position + f.duration - 1;
    default:
        return f.position;
    }
}

bool is_peaked_kind(FluctuationKind k) {
    switch (k) {
    case FluctuationKind::upward_spike:
    case FluctuationKind::downward_spike:
    case FluctuationKind::rapid_rise_slow_decline:
    case FluctuationKind::slow_rise_rapid_decline:
    case FluctuationKind::convex_elevation:
    case FluctuationKind::concave_depression:
        return true;
    default:
        return false;
    }
}

void add_check(ConsistencyReport& rep, std::string name, double measured, double expected,
               double tolerance, std::string note = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.measured = measured;
    c.expected = expected;
    c.tolerance = tolerance;
    c.pass = std::fabs(measured - expected) <= tolerance;
    c.note = std::move(note);
    rep.overall_pass = rep.overall_pass && c.pass;
    rep.checks.push_back(std::move(c));
}

double modified_season(const AttributePool& pool, std::size_t t, const LocalFluctuation& w);

// Per-index noise scale, accounting for noise-modifier windows.
double local_sigma(const AttributePool& pool, const LocalFluctuation* w) {
    if (!w) return genpool::noise_sigma(pool.noise);
    if (w->kind == FluctuationKind::increased_noise) {
        if (pool.noise.kind == NoiseKind::none)
            return genpool::noise_sigma({NoiseKind::gaussian, w->amplitude});
        return genpool::noise_sigma({pool.noise.kind, pool.noise.sigma_or_halfwidth + w->amplitude});
    }
    if (w->kind == FluctuationKind::decreased_noise)
        return genpool::noise_sigma(
            {pool.noise.kind, std::max(0.0, pool.noise.sigma_or_halfwidth + w->amplitude)});
    return genpool::noise_sigma(pool.noise);
}

void check_trend(SeriesContext& ctx, ConsistencyReport& rep, const VerifyConfig& cfg) {
    (void)cfg;
    for (std::size_t si = 0; si < ctx.pool.trend.size(); ++si) {
        const auto& seg = ctx.pool.trend[si];
        // Deseasonalize and repair declared distortions so the fit sees the
        // whole segment; only pinned windows are unusable.
        std::vector<double> xs, ys, sigmas;
        for (std::size_t t = seg.start_idx; t < seg.end_idx; ++t) {
            const LocalFluctuation* w = covering(ctx.pool, t);
            if (w && (w->kind == FluctuationKind::temporary_flatline ||
                      w->kind == FluctuationKind::gap))
                continue;
            double y = ctx.values[t] - genpool::season_value(ctx.pool, t);
            if (w) {
                if (is_deviation_kind(w->kind)) {
                    y -= expected_overlay(*w, t);
                } else if (ctx.pool.seasonality &&
                           (w->kind == FluctuationKind::amplified_seasonal_amplitude ||
                            w->kind == FluctuationKind::diminished_seasonal_amplitude ||
                            w->kind == FluctuationKind::phase_shift ||
                            w->kind == FluctuationKind::period_lengthening)) {
                    y -= modified_season(ctx.pool, t, *w) - genpool::season_value(ctx.pool, t);
                }
            }
            xs.push_back(static_cast<double>(t));
            ys.push_back(y);
            sigmas.push_back(local_sigma(ctx.pool, w));
        }
        std::string name = "trend[" + std::to_string(si) + "] slope sign";
        if (xs.size() < 8) {
            CheckResult c;
            c.name = name;
            c.pass = true;
            c.note = "segment fully pinned by fluctuation windows; skipped";
            rep.checks.push_back(c);
            continue;
        }
        double n = static_cast<double>(xs.size());
        double x_mean = 0.0, y_mean = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            x_mean += xs[i];
            y_mean += ys[i];
        }
        x_mean /= n;
        y_mean /= n;
        double sxx = 0.0, sxy = 0.0, var_num = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double dx = xs[i] - x_mean;
            sxx += dx * dx;
            sxy += dx * (ys[i] - y_mean);
            var_num += dx * dx * sigmas[i] * sigmas[i];
        }
        if (sxx <= 0.0) continue;
        double slope = sxy / sxx;
        double slope_sd = std::sqrt(var_num) / sxx;
        double threshold = std::max(4.0 * slope_sd, 1e-9 * std::max(1.0, ctx.range));
        int measured_sign = slope > threshold ? 1 : (slope < -threshold ? -1 : 0);
        add_check(rep, name, measured_sign, seg.slope_sign(), 0.0);
    }
}

// Seasonal term with a modifier window applied, mirroring the renderer.
double modified_season(const AttributePool& pool, std::size_t t, const LocalFluctuation& w) {
    const auto& s = *pool.seasonality;
    switch (w.kind) {
    case FluctuationKind::amplified_seasonal_amplitude:
    case FluctuationKind::diminished_seasonal_amplitude:
        return genpool::season_value(pool, t) * (s.amplitude + w.amplitude) / s.amplitude;
    case FluctuationKind::phase_shift:
        return genpool::season_value(pool, t + static_cast<std::size_t>(w.amplitude));
    case FluctuationKind::period_lengthening: {
        double p_new = static_cast<double>(s.period) + w.amplitude;
        double anchor = (static_cast<double>(w.position) + s.phase) / static_cast<double>(s.period);
        double cycles = anchor + (static_cast<double>(t) - static_cast<double>(w.position)) / p_new;
        return s.amplitude *
               genpool::seasonal_waveform(s.kind, cycles, genpool::pulse_duty_fraction(s.period));
    }
    default:
        return genpool::season_value(pool, t);
    }
}

void check_period(SeriesContext& ctx, ConsistencyReport& rep, const VerifyConfig& cfg) {
    std::size_t n = ctx.values.size();
    std::vector<double> x(n);
    std::vector<bool> mask(n, true);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = ctx.values[t] - genpool::trend_value(ctx.pool, t);
        const LocalFluctuation* w = covering(ctx.pool, t);
        if (!w) continue;
        if (is_deviation_kind(w->kind)) {
            x[t] -= expected_overlay(*w, t); // repairable distortion
        } else if (ctx.pool.seasonality &&
                   (w->kind == FluctuationKind::amplified_seasonal_amplitude ||
                    w->kind == FluctuationKind::diminished_seasonal_amplitude ||
                    w->kind == FluctuationKind::phase_shift ||
                    w->kind == FluctuationKind::period_lengthening)) {
            // Undo the declared modification; its own check validates it.
            x[t] -= modified_season(ctx.pool, t, *w) - genpool::season_value(ctx.pool, t);
        } else {
            mask[t] = false; // pins and noise modifiers: exclude
        }
    }

    if (ctx.pool.seasonality) {
        std::size_t found = detect_period(x, mask, 0.45);
        add_check(rep, "seasonality period", static_cast<double>(found),
                  static_cast<double>(ctx.pool.seasonality->period),
                  static_cast<double>(cfg.period_tol));
    } else {
        double var = 0.0, mean = 0.0;
        std::size_t cnt = 0;
        for (std::size_t t = 0; t < n; ++t)
            if (mask[t]) {
                mean += x[t];
                ++cnt;
            }
        if (cnt > 0) mean /= static_cast<double>(cnt);
        for (std::size_t t = 0; t < n; ++t)
            if (mask[t]) var += (x[t] - mean) * (x[t] - mean);
        bool quiet = cnt == 0 || var / std::max<std::size_t>(cnt, 1) <
                                     1e-18 * std::max(1.0, ctx.range * ctx.range);
        std::size_t found = quiet ? 0 : detect_period(x, mask, 0.6);
        CheckResult c;
        c.name = "seasonality absent";
        c.measured = static_cast<double>(found);
        c.expected = 0.0;
        c.tolerance = 0.0;
        c.pass = found == 0;
        rep.overall_pass = rep.overall_pass && c.pass;
        rep.checks.push_back(std::move(c));
    }
}

void check_noise(SeriesContext& ctx, ConsistencyReport& rep, const VerifyConfig& cfg) {
    // Residual spread over unmasked indices vs the pool's noise scale.
    std::vector<double> resid;
    for (std::size_t t = 0; t < ctx.values.size(); ++t)
        if (ctx.base_clean[t]) resid.push_back(ctx.deviation[t]);
    if (resid.size() < 16) return;
    double mean = 0.0;
    for (double v : resid) mean += v;
    mean /= static_cast<double>(resid.size());
    double var = 0.0;
    for (double v : resid) var += (v - mean) * (v - mean);
    var /= static_cast<double>(resid.size() - 1);
    double measured = std::sqrt(var);

    if (ctx.pool.noise.kind == NoiseKind::none) {
        add_check(rep, "noise absent", measured, 0.0, 1e-9 * std::max(1.0, ctx.range));
    } else {
        double expected = ctx.sigma;
        double est_sd = expected / std::sqrt(2.0 * (static_cast<double>(resid.size()) - 1.0));
        double tol = std::max({cfg.sigma_mult * ctx.sigma, cfg.range_frac * ctx.range, 4.0 * est_sd});
        add_check(rep, "noise scale", measured, expected, tol);
    }
}

void check_fluctuations(SeriesContext& ctx, ConsistencyReport& rep, const VerifyConfig& cfg) {
    const auto& pool = ctx.pool;
    double base_tol = std::max(cfg.sigma_mult * ctx.sigma, cfg.range_frac * ctx.range);
    bool noise_free = ctx.sigma == 0.0;

    for (std::size_t fi = 0; fi < pool.fluctuations.size(); ++fi) {
        const auto& f = pool.fluctuations[fi];
        std::string tag = "fluct[" + std::to_string(fi) + "] " + std::string(taxonomy::id(f.kind));

        switch (f.kind) {
        case FluctuationKind::upward_spike:
        case FluctuationKind::downward_spike:
        case FluctuationKind::rapid_rise_slow_decline:
        case FluctuationKind::slow_rise_rapid_decline:
        case FluctuationKind::convex_elevation:
        case FluctuationKind::concave_depression:
        case FluctuationKind::upward_level_shift:
        case FluctuationKind::downward_level_shift:
        case FluctuationKind::transient_rise:
        case FluctuationKind::transient_dip:
        case FluctuationKind::oscillation_burst: {
            double amp_tol =
                noise_free ? cfg.exact_tol * std::max(std::fabs(f.amplitude), 1e-12) : base_tol;
            double measured_amp;
            if (f.kind == FluctuationKind::oscillation_burst) {
                // Project onto the known burst profile; unbiased under noise
                // and exact without it.
                double num = 0.0, den = 0.0;
                for (std::size_t t = f.position; t < f.end(); ++t) {
                    double b = expected_overlay(f, t) / f.amplitude;
                    num += ctx.deviation[t] * b;
                    den += b * b;
                }
                measured_amp = den > 0.0 ? num / den : 0.0;
                add_check(rep, tag + " amplitude", measured_amp, f.amplitude, amp_tol);
                break;
            }
            if (f.kind == FluctuationKind::upward_level_shift ||
                f.kind == FluctuationKind::downward_level_shift ||
                f.kind == FluctuationKind::transient_rise ||
                f.kind == FluctuationKind::transient_dip) {
                double mean = 0.0;
                for (std::size_t t = f.position; t < f.end(); ++t) mean += ctx.deviation[t];
                mean /= static_cast<double>(f.duration);
                add_check(rep, tag + " amplitude", mean, f.amplitude,
                          noise_free ? amp_tol : base_tol);
                // Onset localization: the first window sample carries the full
                // offset, the sample before the window does not.
                add_check(rep, tag + " onset", ctx.deviation[f.position], f.amplitude,
                          noise_free ? amp_tol : std::max(base_tol, std::fabs(f.amplitude) / 2.0));
                if (f.position > 0 && !covering(pool, f.position - 1)) {
                    double before = std::fabs(ctx.deviation[f.position - 1]);
                    CheckResult c;
                    c.name = tag + " boundary";
                    c.measured = before;
                    c.expected = 0.0;
                    c.tolerance = std::max(base_tol, std::fabs(f.amplitude) / 2.0);
                    c.pass = before <= c.tolerance;
                    rep.overall_pass = rep.overall_pass && c.pass;
                    rep.checks.push_back(std::move(c));
                }
                break;
            }
            // Peaked kinds: amplitude at the apex, position by window argmax.
            std::size_t apex = expected_apex(f);
            measured_amp = ctx.deviation[apex];
            add_check(rep, tag + " amplitude", measured_amp, f.amplitude, amp_tol);

            std::size_t argmax = f.position;
            double best = -1.0;
            for (std::size_t t = f.position; t < f.end(); ++t)
                if (std::fabs(ctx.deviation[t]) > best) {
                    best = std::fabs(ctx.deviation[t]);
                    argmax = t;
                }
            if (noise_free) {
                add_check(rep, tag + " position", static_cast<double>(argmax),
                          static_cast<double>(apex), 0.0);
            } else {
                // Under noise: the recorded apex must carry (close to) the
                // window's peak deviation.
                CheckResult c;
                c.name = tag + " position";
                c.measured = static_cast<double>(argmax);
                c.expected = static_cast<double>(apex);
                c.tolerance = base_tol;
                c.pass = std::fabs(ctx.deviation[apex]) >= best - base_tol;
                rep.overall_pass = rep.overall_pass && c.pass;
                rep.checks.push_back(std::move(c));
            }
            break;
        }

        case FluctuationKind::amplified_seasonal_amplitude:
        case FluctuationKind::diminished_seasonal_amplitude: {
            // deviation = season * (A / a): least-squares projection onto the
            // base seasonal term recovers A exactly.
            double a = pool.seasonality->amplitude;
            double num = 0.0, den = 0.0;
            for (std::size_t t = f.position; t < f.end(); ++t) {
                double s = genpool::season_value(pool, t);
                num += ctx.deviation[t] * s;
                den += s * s;
            }
            double measured = den > 0.0 ? a * num / den : 0.0;
            double tol = noise_free ? cfg.exact_tol * std::max(std::fabs(f.amplitude), 1e-12)
                                    : base_tol;
            add_check(rep, tag + " amplitude", measured, f.amplitude, tol);
            break;
        }

        case FluctuationKind::increased_noise:
        case FluctuationKind::decreased_noise: {
            double mean = 0.0;
            for (std::size_t t = f.position; t < f.end(); ++t) mean += ctx.deviation[t];
            mean /= static_cast<double>(f.duration);
            double var = 0.0;
            for (std::size_t t = f.position; t < f.end(); ++t)
                var += (ctx.deviation[t] - mean) * (ctx.deviation[t] - mean);
            var /= static_cast<double>(f.duration - 1);
            double measured = std::sqrt(var);

            double scale = pool.noise.sigma_or_halfwidth + f.amplitude;
            NoiseKind wkind = pool.noise.kind == NoiseKind::none ? NoiseKind::gaussian : pool.noise.kind;
            genpool::NoiseAttr wattr{wkind, std::max(scale, 0.0)};
            double expected = genpool::noise_sigma(wattr);
            double est_sd = expected / std::sqrt(2.0 * (static_cast<double>(f.duration) - 1.0));
            double tol = std::max({base_tol, 4.0 * est_sd});
            add_check(rep, tag + " scale", measured, expected, tol);
            break;
        }

        case FluctuationKind::temporary_flatline: {
            double mn = 1e300, mx = -1e300;
            for (std::size_t t = f.position; t < f.end(); ++t) {
                mn = std::min(mn, ctx.values[t]);
                mx = std::max(mx, ctx.values[t]);
            }
            add_check(rep, tag + " flatness", mx - mn, 0.0, 1e-9 * std::max(1.0, ctx.range));
            double pin = genpool::trend_value(pool, f.position) + genpool::season_value(pool, f.position);
            add_check(rep, tag + " level", ctx.values[f.position], pin,
                      1e-9 * std::max(1.0, ctx.range));
            break;
        }

        case FluctuationKind::gap: {
            double pin = genpool::gap_pin_value(pool.metric);
            double worst = 0.0;
            for (std::size_t t = f.position; t < f.end(); ++t)
                worst = std::max(worst, std::fabs(ctx.values[t] - pin));
            add_check(rep, tag + " pinned", worst, 0.0, 1e-9 * std::max(1.0, ctx.range));
            break;
        }

        case FluctuationKind::phase_shift: {
            // The shift is identified modulo the period; search half a period
            // each way (the sampler keeps shifts below that).
            const auto& s = *pool.seasonality;
            std::int64_t half = static_cast<std::int64_t>((s.period - 1) / 2);
            double best_res = 1e300;
            std::int64_t best_s = 0;
            for (std::int64_t sh = -half; sh <= half; ++sh) {
                double res = 0.0;
                for (std::size_t t = f.position; t < f.end(); ++t) {
                    double cycles =
                        (static_cast<double>(t) + static_cast<double>(sh) + s.phase) /
                        static_cast<double>(s.period);
                    double model = s.amplitude * genpool::seasonal_waveform(
                                                     s.kind, cycles, genpool::pulse_duty_fraction(s.period));
                    double d = ctx.values[t] - genpool::trend_value(pool, t) - model;
                    res += d * d;
                }
                if (res < best_res - 1e-12 ||
                    (std::fabs(res - best_res) <= 1e-12 && std::llabs(sh) < std::llabs(best_s))) {
                    best_res = res;
                    best_s = sh;
                }
            }
            add_check(rep, tag + " shift steps", static_cast<double>(best_s), f.amplitude,
                      static_cast<double>(cfg.period_tol));
            break;
        }

        case FluctuationKind::period_lengthening: {
            const auto& s = *pool.seasonality;
            double anchor =
                (static_cast<double>(f.position) + s.phase) / static_cast<double>(s.period);
            std::size_t lo = s.period, hi = s.period + 2 * static_cast<std::size_t>(f.amplitude) + 2;
            double best_res = 1e300;
            std::size_t best_p = s.period;
            for (std::size_t cand = lo; cand <= hi; ++cand) {
                double res = 0.0;
                for (std::size_t t = f.position; t < f.end(); ++t) {
                    double cycles = anchor + (static_cast<double>(t) - static_cast<double>(f.position)) /
                                                 static_cast<double>(cand);
                    double model = s.amplitude * genpool::seasonal_waveform(
                                                     s.kind, cycles, genpool::pulse_duty_fraction(s.period));
                    double d = ctx.values[t] - genpool::trend_value(pool, t) - model;
                    res += d * d;
                }
                if (res < best_res) {
                    best_res = res;
                    best_p = cand;
                }
            }
            double measured_delta = static_cast<double>(best_p) - static_cast<double>(s.period);
            add_check(rep, tag + " period delta", measured_delta, f.amplitude,
                      static_cast<double>(cfg.period_tol));
            break;
        }
        }
    }
}

} // namespace

ConsistencyReport verify(const AttributePool& pool, const TimeSeries& series,
                         const VerifyConfig& config) {
    if (series.values.size() != pool.length)
        throw std::invalid_argument("series length does not match pool length");

    SeriesContext ctx{pool, series.values, {}, {}, 0.0, 0.0};
    std::size_t n = series.values.size();
    auto [mn_it, mx_it] = std::minmax_element(series.values.begin(), series.values.end());
    ctx.range = *mx_it - *mn_it;
    ctx.sigma = genpool::noise_sigma(pool.noise);
    ctx.deviation.resize(n);
    ctx.base_clean.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        ctx.deviation[t] =
            series.values[t] - genpool::trend_value(pool, t) - genpool::season_value(pool, t);
        ctx.base_clean[t] = covering(pool, t) == nullptr;
    }

    ConsistencyReport rep;
    check_trend(ctx, rep, config);
    check_period(ctx, rep, config);
    check_noise(ctx, rep, config);
    check_fluctuations(ctx, rep, config);
    return rep;
}

} // namespace tsqa::synth
