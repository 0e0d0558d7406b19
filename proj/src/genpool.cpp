#include "tsqa/genpool.hpp"

#include "tsqa/prng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsqa::genpool {

namespace {

double span_of(const MetricSpec& m) { return m.range_high - m.range_low; }

bool name_contains(const MetricSpec& m, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (m.name.find(k) != std::string::npos) return true;
    return false;
}

// Max excursion of the noise term used for headroom budgeting.
double noise_bound(const NoiseAttr& noise) {
    switch (noise.kind) {
    case NoiseKind::none: return 0.0;
    case NoiseKind::gaussian: return 7.0 * noise.sigma_or_halfwidth;
    case NoiseKind::uniform: return noise.sigma_or_halfwidth;
    }
    return 0.0;
}

} // namespace

double noise_sigma(const NoiseAttr& noise) {
    switch (noise.kind) {
    case NoiseKind::none: return 0.0;
    case NoiseKind::gaussian: return noise.sigma_or_halfwidth;
    case NoiseKind::uniform: return noise.sigma_or_halfwidth / 1.7320508075688772;
    }
    return 0.0;
}

double gap_pin_value(const MetricSpec& metric) {
    double pin = metric.range_low - 0.25 * span_of(metric);
    if (metric.nonneg) pin = std::max(0.0, pin);
    return pin;
}

std::optional<std::string> validate_subset(const AttributeSubset& subset) {
    if (subset.trends.empty()) return "subset allows no trend kind";
    if (subset.noises.empty()) return "subset allows no noise kind";
    if (!(subset.metric.range_low < subset.metric.range_high)) return "metric range is empty";
    if (!(subset.base_low < subset.base_high)) return "baseline window is empty";
    auto bad_hint = [](const AmplitudeHint& h) { return !(h.lo >= 0.0) || !(h.hi >= h.lo); };
    if (bad_hint(subset.trend_change)) return "bad trend change hint";
    if (bad_hint(subset.season_amplitude)) return "bad seasonal amplitude hint";
    if (bad_hint(subset.noise_scale)) return "bad noise scale hint";
    if (bad_hint(subset.fluct_amplitude)) return "bad fluctuation amplitude hint";
    if (subset.season_probability < 0.0 || subset.season_probability > 1.0)
        return "season probability outside [0, 1]";
    return std::nullopt;
}

AttributeSubset RuleBasedSelector::propose(const MetricSpec& metric,
                                           const taxonomy::AttributeTaxonomy& taxonomy) {
    AttributeSubset s;
    s.metric = metric;
    s.trends = taxonomy.trend_types;
    s.seasons = taxonomy.season_types;
    s.noises = taxonomy.noise_types;
    s.fluctuations = taxonomy.fluctuation_types;

    double span = span_of(metric);
    s.base_low = metric.range_low + 0.18 * span;
    s.base_high = metric.range_high - 0.18 * span;
    s.trend_change = {0.04 * span, 0.40 * span};
    s.season_amplitude = {0.03 * span, 0.30 * span};
    s.noise_scale = {0.004 * span, 0.028 * span};
    s.fluct_amplitude = {0.05 * span, 0.70 * span};
    s.season_probability = 0.7;
    s.nonneg = metric.nonneg;

    // Percent-like and saturation metrics are hard-bounded on both sides.
    bool percentish = name_contains(metric, {"utilization", "_pct", "percent", "occupancy",
                                             "share", "cover", "duty_cycle", "spo2", "humidity"}) ||
                      (metric.nonneg && metric.range_low == 0.0 && metric.range_high == 100.0);
    if (percentish) {
        s.bounded_above = true;
        s.ceiling = metric.range_high;
        s.trend_change.hi = 0.30 * span;
        s.season_amplitude.hi = 0.20 * span;
        s.fluct_amplitude.hi = 0.45 * span;
    }

    // Count-like metrics: bursty, weaker seasonality, larger spikes.
    if (name_contains(metric, {"count", "requests", "trips", "ridership", "admissions",
                               "doses", "volume", "retransmits", "switches"})) {
        s.season_probability = 0.55;
        s.fluct_amplitude.hi = std::min(s.fluct_amplitude.hi, 0.8 * span);
    }

    // Environment-driven metrics carry strong periodic structure.
    if (metric.domain_tag == "weather" || metric.domain_tag == "traffic" ||
        name_contains(metric, {"temperature", "temp_c", "solar", "pressure_hpa"})) {
        s.season_probability = 0.85;
    }

    return s;
}

namespace {

// Clamps a proposal into the hard budget for its metric; never widens.
AttributeSubset sanitize(AttributeSubset s) {
    const MetricSpec& m = s.metric;
    double span = span_of(m);
    s.nonneg = m.nonneg; // physics rule, not selector opinion
    double lo_cap = m.range_low - 0.5 * span;
    double hi_cap = m.range_high + 0.5 * span;
    s.base_low = std::clamp(s.base_low, lo_cap, hi_cap);
    s.base_high = std::clamp(s.base_high, s.base_low + 1e-9 * span, hi_cap);
    if (s.nonneg) s.base_low = std::max(s.base_low, 0.05 * span);

    auto cap = [&](AmplitudeHint& h, double hard_hi) {
        h.lo = std::clamp(h.lo, 0.0, hard_hi);
        h.hi = std::clamp(h.hi, h.lo, hard_hi);
        if (h.hi <= 0.0) h.hi = hard_hi * 0.1;
        if (h.lo <= 0.0) h.lo = h.hi * 0.05;
    };
    cap(s.trend_change, 0.45 * span);
    cap(s.season_amplitude, 0.35 * span);
    cap(s.noise_scale, 0.03 * span);
    cap(s.fluct_amplitude, 0.80 * span);
    s.season_probability = std::clamp(s.season_probability, 0.0, 1.0);
    if (s.bounded_above && s.ceiling <= m.range_low) s.bounded_above = false;
    return s;
}

} // namespace

SelectionOutcome select_subset(const MetricSpec& metric, SubsetSelector& selector) {
    SelectionOutcome out;
    AttributeSubset proposal;
    std::string failure;
    try {
        proposal = selector.propose(metric, taxonomy::registry());
        proposal.metric = metric;
        if (auto err = validate_subset(proposal)) failure = *err;
    } catch (const std::exception& e) {
        failure = e.what();
    }
    if (!failure.empty()) {
        RuleBasedSelector fallback;
        proposal = fallback.propose(metric, taxonomy::registry());
        out.fell_back = true;
        out.warning = "selector proposal rejected (" + failure + "); using rule-based default";
    }
    out.subset = sanitize(std::move(proposal));
    return out;
}

// ---------------------------------------------------------------------------
// Pool sampling
// ---------------------------------------------------------------------------

namespace {

struct Budget {
    double floor;   // rendered values must stay >= floor (nonneg metrics)
    double ceiling; // rendered values must stay <= ceiling (bounded metrics)
    bool has_floor;
    bool has_ceiling;
};

template <typename T>
T choice(Rng& rng, const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(xs.size()) - 1))];
}

// Trend pieces are monotone, so extremes over a window sit at window edges
// or segment joints.
std::pair<double, double> trend_extremes(const std::vector<TrendSegment>& segs, std::size_t lo,
                                         std::size_t hi_excl) {
    double mn = 1e300, mx = -1e300;
    auto look = [&](std::size_t t) {
        for (const auto& seg : segs)
            if (t >= seg.start_idx && t < seg.end_idx) {
                double v = seg.value_at(t);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
                return;
            }
    };
    look(lo);
    look(hi_excl - 1);
    for (const auto& seg : segs) {
        if (seg.start_idx > lo && seg.start_idx < hi_excl) look(seg.start_idx);
        if (seg.end_idx - 1 > lo && seg.end_idx - 1 < hi_excl) look(seg.end_idx - 1);
    }
    return {mn, mx};
}

std::vector<TrendSegment> sample_trend(Rng& rng, const AttributeSubset& subset, std::size_t length,
                                       const Budget& budget, double season_amp, double noise_room,
                                       double sigma) {
    std::size_t min_seg = std::max<std::size_t>(16, length / 8);
    std::size_t max_segments = std::min<std::size_t>(4, length / min_seg);
    std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_segments)));

    // Stick-breaking boundaries with a minimum piece length.
    std::vector<double> weights(k);
    double total = 0.0;
    for (auto& w : weights) {
        w = 0.4 + rng.uniform01();
        total += w;
    }
    std::vector<std::size_t> lens(k);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t li = std::max(min_seg, static_cast<std::size_t>(
                                               std::floor(weights[i] / total * static_cast<double>(length))));
        lens[i] = li;
        assigned += li;
    }
    // Fix up rounding so pieces tile the range exactly.
    while (assigned > length) {
        for (auto& li : lens)
            if (assigned > length && li > min_seg) {
                --li;
                --assigned;
            }
        if (*std::min_element(lens.begin(), lens.end()) <= min_seg &&
            assigned > length) { // cannot shrink further: drop a segment
            assigned -= lens.back();
            lens.pop_back();
            k = lens.size();
        }
    }
    lens.back() += length - assigned;

    double span = span_of(subset.metric);
    double eps = 1e-6 * span; // guards against exact-boundary float rounding
    double value_floor = budget.has_floor ? budget.floor + season_amp + noise_room + eps : -1e300;
    double value_ceiling = budget.has_ceiling ? budget.ceiling - season_amp - noise_room - eps : 1e300;
    value_floor = std::min(value_floor, value_ceiling - 0.05 * span); // keep a usable corridor

    double v = rng.uniform(std::max(subset.base_low, value_floor),
                           std::max(std::min(subset.base_high, value_ceiling), value_floor + 0.05 * span));

    std::vector<TrendSegment> segs;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < k; ++i) {
        TrendSegment seg;
        seg.kind = choice(rng, subset.trends);
        seg.start_idx = cursor;
        seg.end_idx = cursor + lens[i];
        seg.start_value = v;
        double steps = static_cast<double>(lens[i]);

        // Salience floor: the least-squares slope estimate must clear its own
        // noise floor, sd(total change) ~ sigma * sqrt(12 / steps).
        double change_floor = std::max({subset.trend_change.lo, 0.04 * span,
                                        8.0 * sigma * std::sqrt(12.0 / steps)});
        double delta = rng.log_uniform(change_floor, std::max(subset.trend_change.hi, change_floor * 1.01));
        if (seg.kind == TrendKind::linear_decrease) delta = -delta;
        if (seg.kind == TrendKind::curved && rng.bernoulli(0.5)) delta = -delta;
        if (seg.kind == TrendKind::steady) delta = 0.0;

        // Clamp the excursion into the value corridor, flipping direction when
        // the sampled one has no headroom.
        if (delta > 0 && v + delta > value_ceiling) {
            double headroom = value_ceiling - v;
            delta = headroom >= change_floor ? headroom : -std::min(std::fabs(delta), v - value_floor);
        } else if (delta < 0 && v + delta < value_floor) {
            double headroom = v - value_floor;
            delta = headroom >= change_floor ? -headroom : std::min(std::fabs(delta), value_ceiling - v);
        }
        auto allowed = [&](TrendKind k) {
            return std::find(subset.trends.begin(), subset.trends.end(), k) != subset.trends.end();
        };
        if (std::fabs(delta) < change_floor * 0.5) {
            seg.kind = TrendKind::steady;
            delta = 0.0;
        } else if (seg.kind != TrendKind::curved) {
            // Corridor clamping may have flipped the direction; relabel,
            // preferring kinds the subset allows.
            TrendKind desired = delta > 0 ? TrendKind::linear_increase : TrendKind::linear_decrease;
            if (allowed(desired))
                seg.kind = desired;
            else if (allowed(TrendKind::curved))
                seg.kind = TrendKind::curved;
            else
                seg.kind = desired;
        }

        switch (seg.kind) {
        case TrendKind::steady: seg.param = 0.0; break;
        case TrendKind::linear_increase:
        case TrendKind::linear_decrease: seg.param = delta / steps; break;
        case TrendKind::curved: seg.param = delta / (steps * steps); break;
        }
        v = seg.end_value();
        cursor = seg.end_idx;
        segs.push_back(seg);
    }
    return segs;
}

struct FluctPlan {
    FluctuationKind kind;
    std::size_t min_dur, max_dur;
};

bool windows_clash(const std::vector<LocalFluctuation>& placed, std::size_t pos, std::size_t end) {
    for (const auto& f : placed)
        if (pos < f.end() && f.position < end) return true;
    return false;
}

} // namespace

AttributePool sample_pool(const AttributeSubset& subset, std::size_t length, std::uint64_t seed) {
    if (length < 64 || length > 1024)
        throw std::invalid_argument("series length " + std::to_string(length) + " outside [64, 1024]");
    if (auto err = validate_subset(subset))
        throw std::invalid_argument("invalid attribute subset: " + *err);

    Rng rng(seed);
    AttributePool pool;
    pool.metric = subset.metric;
    pool.length = length;
    pool.generation_seed = seed;

    double span = span_of(subset.metric);
    Budget budget;
    budget.has_floor = subset.nonneg;
    budget.floor = 0.0;
    budget.has_ceiling = subset.bounded_above;
    budget.ceiling = subset.ceiling;

    // Noise first: seasonal and fluctuation amplitudes keep a salience
    // margin above it so attribute recovery stays well-posed.
    pool.noise.kind = choice(rng, subset.noises);
    if (pool.noise.kind != NoiseKind::none)
        pool.noise.sigma_or_halfwidth =
            rng.log_uniform(subset.noise_scale.lo, std::max(subset.noise_scale.hi, subset.noise_scale.lo * 1.01));
    double sigma = noise_sigma(pool.noise);
    double noise_room = noise_bound(pool.noise);

    if (!subset.seasons.empty() && rng.bernoulli(subset.season_probability)) {
        SeasonalityAttr s;
        s.kind = choice(rng, subset.seasons);
        std::size_t p_hi = std::max<std::size_t>(8, length / 4);
        // The AM-sine envelope (5 carrier cycles) skews the autocorrelation
        // peak by ~0.013*P steps; keep P small enough that the period stays
        // recoverable within one step.
        if (s.kind == SeasonKind::amplitude_modulated_sine)
            p_hi = std::max<std::size_t>(8, std::min<std::size_t>(48, length / 8));
        s.period = static_cast<std::size_t>(
            std::llround(rng.log_uniform(8.0, static_cast<double>(p_hi))));
        s.period = std::clamp<std::size_t>(s.period, 8, p_hi);
        double amp_lo = std::max(subset.season_amplitude.lo, 8.0 * sigma);
        double amp_hi = std::max(subset.season_amplitude.hi, amp_lo * 1.01);
        s.amplitude = std::min(rng.log_uniform(amp_lo, amp_hi), 0.5 * span);
        s.phase = static_cast<double>(rng.uniform_int(0, static_cast<std::int64_t>(s.period) - 1));
        pool.seasonality = s;
    }

    double season_amp = pool.seasonality ? pool.seasonality->amplitude : 0.0;
    double season_room = pool.seasonality ? season_margin(*pool.seasonality) : 0.0;
    pool.trend = sample_trend(rng, subset, length, budget, season_room, noise_room, sigma);

    // Fluctuations last; each clamps against the exact local baseline.
    if (!subset.fluctuations.empty()) {
        static const double count_weights[4] = {0.15, 0.35, 0.30, 0.20};
        double u = rng.uniform01(), acc = 0.0;
        std::size_t want = 0;
        for (std::size_t c = 0; c < 4; ++c) {
            acc += count_weights[c];
            if (u < acc) {
                want = c;
                break;
            }
        }

        auto trend_window = [&](std::size_t lo, std::size_t hi) {
            return trend_extremes(pool.trend, lo, hi);
        };
        double amp_floor = std::max({subset.fluct_amplitude.lo, 8.0 * sigma, 0.02 * span});
        double amp_hi = std::max(subset.fluct_amplitude.hi, amp_floor * 1.01);

        for (std::size_t i = 0; i < want; ++i) {
            FluctuationKind kind = choice(rng, subset.fluctuations);
            const auto& fi = taxonomy::info(kind);
            if (fi.needs_seasonality && !pool.seasonality) continue;
            if (fi.needs_base_noise && sigma <= 0.0) continue;

            std::size_t P = pool.seasonality ? pool.seasonality->period : 0;
            std::size_t min_dur = 1, max_dur = 1;
            bool to_end = false;
            switch (kind) {
            case FluctuationKind::upward_spike:
            case FluctuationKind::downward_spike:
                min_dur = 1; max_dur = 5; break;
            case FluctuationKind::upward_level_shift:
            case FluctuationKind::downward_level_shift:
                to_end = true; break;
            case FluctuationKind::transient_rise:
            case FluctuationKind::transient_dip:
                min_dur = 8; max_dur = std::min<std::size_t>(32, length / 4); break;
            case FluctuationKind::convex_elevation:
            case FluctuationKind::concave_depression:
            case FluctuationKind::rapid_rise_slow_decline:
            case FluctuationKind::slow_rise_rapid_decline:
                min_dur = 12; max_dur = std::min<std::size_t>(48, length / 4); break;
            case FluctuationKind::amplified_seasonal_amplitude:
            case FluctuationKind::diminished_seasonal_amplitude:
                min_dur = P + P / 4; max_dur = std::min(3 * P, length / 2); break;
            case FluctuationKind::increased_noise:
            case FluctuationKind::decreased_noise:
                min_dur = std::min<std::size_t>(48, length / 2 - 1);
                max_dur = std::min<std::size_t>(96, length / 2);
                break;
            case FluctuationKind::temporary_flatline:
            case FluctuationKind::gap:
                min_dur = 8; max_dur = std::min<std::size_t>(32, length / 4); break;
            case FluctuationKind::period_lengthening:
                min_dur = 4 * P + P; max_dur = std::min(6 * P, length - 2); break;
            case FluctuationKind::phase_shift:
                min_dur = 2 * P; max_dur = std::min(4 * P, length - 2); break;
            case FluctuationKind::oscillation_burst:
                min_dur = 8; max_dur = std::min<std::size_t>(48, length / 4); break;
            }
            if (min_dur < 1 || max_dur < min_dur || min_dur >= length) continue;

            LocalFluctuation f;
            f.kind = kind;
            bool placed = false;
            for (int attempt = 0; attempt < 24 && !placed; ++attempt) {
                if (to_end) {
                    f.position = static_cast<std::size_t>(
                        rng.uniform_int(static_cast<std::int64_t>(length / 8),
                                        static_cast<std::int64_t>(length - length / 8)));
                    f.duration = length - f.position;
                } else {
                    f.duration = static_cast<std::size_t>(
                        rng.uniform_int(static_cast<std::int64_t>(min_dur), static_cast<std::int64_t>(max_dur)));
                    if (f.duration + 4 >= length) continue;
                    f.position = static_cast<std::size_t>(
                        rng.uniform_int(2, static_cast<std::int64_t>(length - f.duration - 2)));
                }
                placed = !windows_clash(pool.fluctuations, f.position, f.end());
                // Pinned windows erase trend evidence: every overlapped sloped
                // segment must keep enough clean points for sign recovery.
                if (placed && (kind == FluctuationKind::temporary_flatline ||
                               kind == FluctuationKind::gap) &&
                    sigma > 0.0) {
                    for (const auto& seg : pool.trend) {
                        if (seg.slope_sign() == 0) continue;
                        double L = static_cast<double>(seg.end_idx - seg.start_idx);
                        double delta_seg = std::fabs(seg.end_value() - seg.start_value);
                        std::size_t clean = 0;
                        for (std::size_t t = seg.start_idx; t < seg.end_idx; ++t) {
                            bool pinned = t >= f.position && t < f.end();
                            for (const auto& other : pool.fluctuations)
                                if ((other.kind == FluctuationKind::temporary_flatline ||
                                     other.kind == FluctuationKind::gap) &&
                                    t >= other.position && t < other.end())
                                    pinned = true;
                            if (!pinned) ++clean;
                        }
                        double n_min =
                            std::pow(8.0 * sigma * std::sqrt(12.0) * L / std::max(delta_seg, 1e-12),
                                     2.0 / 3.0);
                        if (static_cast<double>(clean) < std::min(n_min, L)) placed = false;
                    }
                }
            }
            if (!placed) continue;

            // Amplitude with exact local headroom.
            auto [wmin, wmax] = trend_window(f.position, f.end());
            double down_headroom =
                budget.has_floor ? std::max(0.0, wmin - season_room - noise_room - budget.floor) : 1e300;
            double up_headroom =
                budget.has_ceiling ? std::max(0.0, budget.ceiling - wmax - season_room - noise_room) : 1e300;

            switch (kind) {
            case FluctuationKind::upward_spike:
            case FluctuationKind::transient_rise:
            case FluctuationKind::convex_elevation:
            case FluctuationKind::rapid_rise_slow_decline:
            case FluctuationKind::slow_rise_rapid_decline:
            case FluctuationKind::upward_level_shift:
            case FluctuationKind::oscillation_burst: {
                double mag = rng.log_uniform(amp_floor, amp_hi);
                double room = kind == FluctuationKind::oscillation_burst
                                  ? std::min(up_headroom, down_headroom) // swings both ways
                                  : up_headroom;
                mag = std::min(mag, 0.95 * room);
                if (mag < amp_floor) continue;
                f.amplitude = mag;
                break;
            }
            case FluctuationKind::downward_spike:
            case FluctuationKind::transient_dip:
            case FluctuationKind::concave_depression:
            case FluctuationKind::downward_level_shift: {
                double mag = rng.log_uniform(amp_floor, amp_hi);
                mag = std::min(mag, 0.95 * down_headroom);
                if (mag < amp_floor) continue;
                f.amplitude = -mag;
                break;
            }
            case FluctuationKind::amplified_seasonal_amplitude:
            case FluctuationKind::diminished_seasonal_amplitude: {
                // The window must expose clear seasonal swings or the scaling
                // is unrecoverable (AM-sine envelopes have quiet stretches).
                std::size_t strong = 0;
                for (std::size_t t = f.position; t < f.end(); ++t)
                    if (std::fabs(season_value(pool, t)) >= 0.35 * season_amp) ++strong;
                if (strong < 6) { placed = false; break; }
                if (kind == FluctuationKind::amplified_seasonal_amplitude) {
                    double extra = rng.uniform(0.4 * season_amp, 1.2 * season_amp);
                    // The window's excursion grows by extra * (margin / amplitude).
                    double allowed = 0.95 * std::min(up_headroom, down_headroom) * season_amp /
                                     std::max(season_room, 1e-12);
                    extra = std::min(extra, allowed);
                    if (extra < 0.25 * season_amp || extra < 4.0 * sigma) { placed = false; break; }
                    f.amplitude = extra;
                } else {
                    double cut = rng.uniform(0.35 * season_amp, 0.85 * season_amp);
                    if (cut < 4.0 * sigma) { placed = false; break; }
                    f.amplitude = -cut;
                }
                break;
            }
            case FluctuationKind::increased_noise: {
                // Delta on the raw noise scale (sigma or halfwidth).
                double extra = rng.log_uniform(std::max(2.0 * pool.noise.sigma_or_halfwidth, 0.01 * span),
                                               0.06 * span);
                extra = std::min(extra, std::min(up_headroom, down_headroom) / 7.0);
                // Overlapped sloped segments must keep their slope detectable
                // above the widened noise floor: sigma' <= delta*sqrt(n)/35.
                for (const auto& seg : pool.trend) {
                    if (seg.slope_sign() == 0) continue;
                    if (f.position >= seg.end_idx || seg.start_idx >= f.end()) continue;
                    double steps = static_cast<double>(seg.end_idx - seg.start_idx);
                    double delta_seg = std::fabs(seg.end_value() - seg.start_value);
                    double sigma_cap = delta_seg * std::sqrt(steps) / 35.0;
                    extra = std::min(extra, sigma_cap - pool.noise.sigma_or_halfwidth);
                }
                if (extra < std::max(pool.noise.sigma_or_halfwidth, 0.005 * span)) {
                    placed = false;
                    break;
                }
                f.amplitude = extra;
                break;
            }
            case FluctuationKind::decreased_noise: {
                f.amplitude = -rng.uniform(0.55, 0.9) * pool.noise.sigma_or_halfwidth;
                break;
            }
            case FluctuationKind::temporary_flatline:
            case FluctuationKind::gap:
                f.amplitude = 0.0;
                break;
            case FluctuationKind::period_lengthening: {
                std::size_t dp = static_cast<std::size_t>(
                    rng.uniform_int(std::max<std::int64_t>(1, static_cast<std::int64_t>(P / 8)),
                                    std::max<std::int64_t>(1, static_cast<std::int64_t>(P / 4))));
                if (f.duration < 3 * (P + dp)) { placed = false; break; }
                f.amplitude = static_cast<double>(dp);
                break;
            }
            case FluctuationKind::phase_shift: {
                std::int64_t max_shift = static_cast<std::int64_t>((P - 1) / 2);
                if (max_shift < 2) { placed = false; break; }
                f.amplitude = static_cast<double>(rng.uniform_int(2, max_shift));
                break;
            }
            }
            if (!placed) continue;
            pool.fluctuations.push_back(f);
        }
        std::sort(pool.fluctuations.begin(), pool.fluctuations.end(),
                  [](const LocalFluctuation& a, const LocalFluctuation& b) {
                      return a.position < b.position;
                  });
    }

    return pool;
}

std::pair<CorrelationPool, std::vector<AttributePool>>
build_correlation_group(CorrelationKind kind, std::size_t size, const AttributeSubset& subset,
                        std::size_t length, std::uint64_t seed) {
    if (size < 2 || size > 16)
        throw std::invalid_argument("correlation group size " + std::to_string(size) +
                                    " outside [2, 16]");

    CorrelationPool group;
    group.kind = kind;
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "grp-%016llx", static_cast<unsigned long long>(seed));
        group.group_id = buf;
    }

    std::vector<AttributePool> members;
    members.reserve(size);

    if (kind == CorrelationKind::shape) {
        // Template pool fixes the segment layout; members re-scale magnitudes.
        AttributePool tmpl = sample_pool(subset, length, Rng::split(seed, 0));
        for (std::size_t i = 0; i < size; ++i) {
            AttributePool m = sample_pool(subset, length, Rng::split(seed, i + 1));
            Rng mrng(Rng::split(seed, 0x5A5A + i));
            double scale = mrng.uniform(0.5, subset.nonneg || subset.bounded_above ? 1.0 : 1.6);
            auto rebuild = [&](double sc) {
                double v = m.trend.front().start_value;
                std::vector<TrendSegment> segs;
                for (const auto& t : tmpl.trend) {
                    TrendSegment seg = t;
                    seg.start_value = v;
                    double steps = static_cast<double>(t.end_idx - t.start_idx);
                    double delta = (t.end_value() - t.start_value) * sc;
                    switch (t.kind) {
                    case TrendKind::steady: seg.param = 0.0; break;
                    case TrendKind::linear_increase:
                    case TrendKind::linear_decrease: seg.param = delta / steps; break;
                    case TrendKind::curved: seg.param = delta / (steps * steps); break;
                    }
                    v = seg.end_value();
                    segs.push_back(seg);
                }
                return segs;
            };
            auto segs = rebuild(scale);
            // Shrink the shared shape until this member's corridor holds it.
            double margin = (m.seasonality ? season_margin(*m.seasonality) : 0.0) + noise_bound(m.noise);
            double flo = subset.nonneg ? margin : -1e300;
            double fhi = subset.bounded_above ? subset.ceiling - margin : 1e300;
            for (int iter = 0; iter < 8; ++iter) {
                auto [mn, mx] = trend_extremes(segs, 0, length);
                if (mn >= flo && mx <= fhi) break;
                scale *= 0.6;
                segs = rebuild(scale);
            }
            m.trend = std::move(segs);
            // Drop fluctuations whose headroom assumptions no longer hold
            // against the re-scaled trend; shape groups are about the trend.
            if (subset.nonneg || subset.bounded_above) m.fluctuations.clear();
            m.metric.name += "_" + std::string(1, static_cast<char>('a' + i));
            members.push_back(std::move(m));
        }
        for (const auto& t : tmpl.trend) group.trend_direction_sequence.push_back(t.slope_sign());
    } else {
        Rng grng(Rng::split(seed, 0));
        // Deviation-family kinds place cleanly at a common position for all
        // members; pick among those present in the subset.
        static const FluctuationKind family[] = {
            FluctuationKind::upward_spike, FluctuationKind::downward_spike,
            FluctuationKind::transient_rise, FluctuationKind::transient_dip,
        };
        std::vector<FluctuationKind> candidates;
        for (auto k : family)
            if (std::find(subset.fluctuations.begin(), subset.fluctuations.end(), k) !=
                subset.fluctuations.end())
                candidates.push_back(k);
        if (candidates.empty()) candidates.push_back(FluctuationKind::upward_spike);
        FluctuationKind shared = choice(grng, candidates);
        bool spike = shared == FluctuationKind::upward_spike || shared == FluctuationKind::downward_spike;
        std::size_t dur_hi = spike ? 5 : std::min<std::size_t>(24, length / 8);
        std::size_t pos = static_cast<std::size_t>(
            grng.uniform_int(static_cast<std::int64_t>(length / 8),
                             static_cast<std::int64_t>(length - length / 8 - dur_hi - 1)));

        for (std::size_t i = 0; i < size; ++i) {
            AttributePool m = sample_pool(subset, length, Rng::split(seed, i + 1));
            // Clear any fluctuation overlapping the shared window, then inject.
            std::size_t window_end = pos + dur_hi;
            std::erase_if(m.fluctuations, [&](const LocalFluctuation& f) {
                return f.position < window_end + 2 && pos < f.end() + 2;
            });
            while (m.fluctuations.size() >= 3) m.fluctuations.pop_back();
            Rng mrng(Rng::split(seed, 0xA5A5 + i));
            LocalFluctuation f;
            f.kind = shared;
            f.position = pos;
            f.duration = spike ? static_cast<std::size_t>(mrng.uniform_int(1, 5))
                               : static_cast<std::size_t>(mrng.uniform_int(8, static_cast<std::int64_t>(dur_hi)));
            double span = subset.metric.range_high - subset.metric.range_low;
            double sigma = noise_sigma(m.noise);
            double mag = mrng.log_uniform(std::max({subset.fluct_amplitude.lo, 8.0 * sigma, 0.02 * span}),
                                          std::max(subset.fluct_amplitude.hi, subset.fluct_amplitude.lo * 1.01));
            if (subset.nonneg || subset.bounded_above) mag = std::min(mag, 0.3 * span);
            bool down = shared == FluctuationKind::downward_spike || shared == FluctuationKind::transient_dip;
            f.amplitude = down ? -mag : mag;
            if (down && subset.nonneg) {
                // Exact local headroom against this member's own baseline.
                double wmin = 1e300;
                for (std::size_t t = f.position; t < f.end(); ++t)
                    wmin = std::min(wmin, trend_value(m, t));
                double season_amp = m.seasonality ? season_margin(*m.seasonality) : 0.0;
                double room = std::max(0.0, wmin - season_amp - noise_bound(m.noise));
                f.amplitude = -std::min(mag, 0.95 * room);
            }
            m.fluctuations.push_back(f);
            std::sort(m.fluctuations.begin(), m.fluctuations.end(),
                      [](const LocalFluctuation& a, const LocalFluctuation& b) {
                          return a.position < b.position;
                      });
            m.metric.name += "_" + std::string(1, static_cast<char>('a' + i));
            members.push_back(std::move(m));
        }
        group.shared_fluctuation = shared;
        group.shared_position = pos;
    }

    for (const auto& m : members) group.member_names.push_back(m.metric.name);
    return {std::move(group), std::move(members)};
}

} // namespace tsqa::genpool
