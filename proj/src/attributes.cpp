#include "tsqa/attributes.hpp"

#include <algorithm>
#include <cmath>

namespace tsqa::genpool {

double TrendSegment::value_at(std::size_t t) const {
    double dt = static_cast<double>(t) - static_cast<double>(start_idx);
    switch (kind) {
    case TrendKind::steady:
        return start_value;
    case TrendKind::linear_increase:
    case TrendKind::linear_decrease:
        return start_value + param * dt;
    case TrendKind::curved:
        return start_value + param * dt * dt;
    }
    return start_value;
}

double TrendSegment::end_value() const { return value_at(end_idx); }

int TrendSegment::slope_sign() const {
    switch (kind) {
    case TrendKind::steady: return 0;
    case TrendKind::linear_increase: return 1;
    case TrendKind::linear_decrease: return -1;
    case TrendKind::curved: return param > 0 ? 1 : (param < 0 ? -1 : 0);
    }
    return 0;
}

std::optional<std::string> validate(const AttributePool& pool) {
    if (pool.length < 64 || pool.length > 1024)
        return "length " + std::to_string(pool.length) + " outside [64, 1024]";
    if (pool.trend.empty() || pool.trend.size() > 4)
        return "trend segment count outside [1, 4]";
    std::size_t cursor = 0;
    for (const auto& seg : pool.trend) {
        if (seg.start_idx != cursor) return "trend segments do not tile the index range";
        if (seg.end_idx <= seg.start_idx) return "empty trend segment";
        cursor = seg.end_idx;
    }
    if (cursor != pool.length) return "trend segments do not cover the full length";

    if (pool.seasonality) {
        const auto& s = *pool.seasonality;
        if (s.period < 4) return "seasonal period below 4 steps";
        if (s.period > pool.length / 2) return "seasonal period above length/2";
        if (s.amplitude < 0) return "negative seasonal amplitude";
        if (s.phase < 0 || s.phase >= static_cast<double>(s.period)) return "phase outside [0, period)";
    }

    if (pool.noise.kind == NoiseKind::none) {
        if (pool.noise.sigma_or_halfwidth != 0.0) return "noise scale must be 0 for kind none";
    } else if (!(pool.noise.sigma_or_halfwidth > 0.0)) {
        return "noise scale must be > 0";
    }

    if (pool.fluctuations.size() > 3) return "more than 3 fluctuations";
    for (const auto& f : pool.fluctuations) {
        if (f.duration < 1) return "fluctuation duration below 1";
        if (f.end() > pool.length) return "fluctuation window exceeds series length";
        const auto& fi = taxonomy::info(f.kind);
        if (fi.needs_seasonality && !pool.seasonality)
            return std::string(taxonomy::id(f.kind)) + " requires a seasonal component";
    }
    for (std::size_t i = 0; i < pool.fluctuations.size(); ++i)
        for (std::size_t j = i + 1; j < pool.fluctuations.size(); ++j) {
            const auto& a = pool.fluctuations[i];
            const auto& b = pool.fluctuations[j];
            if (a.position < b.end() && b.position < a.end())
                return "overlapping fluctuation windows";
        }
    return std::nullopt;
}

std::optional<std::string> validate(const CorrelationPool& group,
                                    const std::vector<AttributePool>& members) {
    if (group.member_names.size() < 2) return "correlation group needs at least 2 members";
    if (members.size() < group.member_names.size()) return "missing member pools";

    auto find_member = [&](const std::string& name) -> const AttributePool* {
        for (const auto& p : members)
            if (p.metric.name == name) return &p;
        return nullptr;
    };

    for (const auto& name : group.member_names) {
        const AttributePool* p = find_member(name);
        if (!p) return "member pool not found: " + name;
        if (group.kind == CorrelationKind::shape) {
            if (p->trend.size() != group.trend_direction_sequence.size())
                return name + ": segment count differs from shared direction sequence";
            for (std::size_t i = 0; i < p->trend.size(); ++i)
                if (p->trend[i].slope_sign() != group.trend_direction_sequence[i])
                    return name + ": trend direction mismatch at segment " + std::to_string(i);
        } else {
            if (!group.shared_fluctuation) return "local group lacks a shared fluctuation kind";
            bool found = false;
            for (const auto& f : p->fluctuations)
                if (f.kind == *group.shared_fluctuation && f.position == group.shared_position) found = true;
            if (!found)
                return name + ": no " + std::string(taxonomy::id(*group.shared_fluctuation)) +
                       " at position " + std::to_string(group.shared_position);
        }
    }
    return std::nullopt;
}

double trend_value(const AttributePool& pool, std::size_t t) {
    for (const auto& seg : pool.trend)
        if (t >= seg.start_idx && t < seg.end_idx) return seg.value_at(t);
    return pool.trend.empty() ? 0.0 : pool.trend.back().value_at(t);
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Peak-to-peak normalizers so `amplitude` always means half peak-to-peak.
// The harmonic mixture uses fixed weights 1.0/0.6/0.3; its extremes were
// evaluated numerically once.
constexpr double kHarmonicHalfRange = 1.5197396064610453; // (max - min) / 2 of the weighted sum

} // namespace

double pulse_duty_fraction(std::size_t period) {
    return std::max(1.0, std::floor(static_cast<double>(period) / 8.0)) / static_cast<double>(period);
}

double seasonal_waveform(SeasonKind kind, double cycles_in, double duty_fraction) {
    double frac = cycles_in - std::floor(cycles_in); // position within the cycle, [0, 1)
    double theta = kTwoPi * frac;
    switch (kind) {
    case SeasonKind::sine:
        return std::sin(theta);
    case SeasonKind::square_wave:
        return frac < 0.5 ? 1.0 : -1.0;
    case SeasonKind::triangle_wave:
        return frac < 0.25   ? 4.0 * frac
               : frac < 0.75 ? 2.0 - 4.0 * frac
                             : 4.0 * frac - 4.0;
    case SeasonKind::sawtooth:
        return 2.0 * frac - 1.0;
    case SeasonKind::harmonic_mixture:
        return (std::sin(theta) + 0.6 * std::sin(2.0 * theta) + 0.3 * std::sin(3.0 * theta)) /
               kHarmonicHalfRange;
    case SeasonKind::amplitude_modulated_sine: {
        // Envelope period fixed at 5 cycles of the carrier.
        double env = 0.5 + 0.5 * std::sin(kTwoPi * cycles_in / 5.0);
        return env * std::sin(theta);
    }
    case SeasonKind::pulse_train: {
        // Pulse of height 2 over the leading duty fraction, mean-adjusted.
        double pulse = frac < duty_fraction ? 2.0 : 0.0;
        return pulse - 2.0 * duty_fraction;
    }
    }
    return 0.0;
}

double season_value(const AttributePool& pool, std::size_t t) {
    if (!pool.seasonality) return 0.0;
    const auto& s = *pool.seasonality;
    double cycles = (static_cast<double>(t) + s.phase) / static_cast<double>(s.period);
    return s.amplitude * seasonal_waveform(s.kind, cycles, pulse_duty_fraction(s.period));
}

double season_margin(const SeasonalityAttr& attr) {
    if (attr.kind == SeasonKind::pulse_train) {
        double duty = pulse_duty_fraction(attr.period);
        return attr.amplitude * std::max(2.0 - 2.0 * duty, 2.0 * duty);
    }
    return attr.amplitude;
}

using json = nlohmann::ordered_json;

nlohmann::ordered_json to_json(const AttributePool& pool) {
    json j;
    j["metric"] = {{"name", pool.metric.name},
                   {"domain_tag", pool.metric.domain_tag},
                   {"range_low", pool.metric.range_low},
                   {"range_high", pool.metric.range_high},
                   {"nonneg", pool.metric.nonneg}};
    j["length"] = pool.length;
    j["trend"] = json::array();
    for (const auto& seg : pool.trend)
        j["trend"].push_back({{"kind", std::string(taxonomy::id(seg.kind))},
                              {"start_idx", seg.start_idx},
                              {"end_idx", seg.end_idx},
                              {"start_value", seg.start_value},
                              {"param", seg.param}});
    if (pool.seasonality) {
        const auto& s = *pool.seasonality;
        j["seasonality"] = {{"kind", std::string(taxonomy::id(s.kind))},
                            {"period", s.period},
                            {"amplitude", s.amplitude},
                            {"phase", s.phase}};
    } else {
        j["seasonality"] = nullptr;
    }
    j["noise"] = {{"kind", std::string(taxonomy::id(pool.noise.kind))},
                  {"scale", pool.noise.sigma_or_halfwidth}};
    j["fluctuations"] = json::array();
    for (const auto& f : pool.fluctuations)
        j["fluctuations"].push_back({{"kind", std::string(taxonomy::id(f.kind))},
                                     {"position", f.position},
                                     {"duration", f.duration},
                                     {"amplitude", f.amplitude}});
    j["generation_seed"] = pool.generation_seed;
    return j;
}

AttributePool pool_from_json(const nlohmann::ordered_json& j) {
    AttributePool pool;
    const auto& m = j.at("metric");
    pool.metric.name = m.at("name").get<std::string>();
    pool.metric.domain_tag = m.at("domain_tag").get<std::string>();
    pool.metric.range_low = m.at("range_low").get<double>();
    pool.metric.range_high = m.at("range_high").get<double>();
    pool.metric.nonneg = m.at("nonneg").get<bool>();
    pool.length = j.at("length").get<std::size_t>();
    for (const auto& s : j.at("trend")) {
        TrendSegment seg;
        seg.kind = taxonomy::trend_from_id(s.at("kind").get<std::string>()).value();
        seg.start_idx = s.at("start_idx").get<std::size_t>();
        seg.end_idx = s.at("end_idx").get<std::size_t>();
        seg.start_value = s.at("start_value").get<double>();
        seg.param = s.at("param").get<double>();
        pool.trend.push_back(seg);
    }
    if (!j.at("seasonality").is_null()) {
        const auto& s = j.at("seasonality");
        SeasonalityAttr sa;
        sa.kind = taxonomy::season_from_id(s.at("kind").get<std::string>()).value();
        sa.period = s.at("period").get<std::size_t>();
        sa.amplitude = s.at("amplitude").get<double>();
        sa.phase = s.at("phase").get<double>();
        pool.seasonality = sa;
    }
    pool.noise.kind = taxonomy::noise_from_id(j.at("noise").at("kind").get<std::string>()).value();
    pool.noise.sigma_or_halfwidth = j.at("noise").at("scale").get<double>();
    for (const auto& f : j.at("fluctuations")) {
        LocalFluctuation lf;
        lf.kind = taxonomy::fluctuation_from_id(f.at("kind").get<std::string>()).value();
        lf.position = f.at("position").get<std::size_t>();
        lf.duration = f.at("duration").get<std::size_t>();
        lf.amplitude = f.at("amplitude").get<double>();
        pool.fluctuations.push_back(lf);
    }
    pool.generation_seed = j.at("generation_seed").get<std::uint64_t>();
    return pool;
}

nlohmann::ordered_json to_json(const CorrelationPool& group) {
    json j;
    j["group_id"] = group.group_id;
    j["kind"] = group.kind == CorrelationKind::shape ? "shape" : "local";
    j["member_names"] = group.member_names;
    j["trend_direction_sequence"] = group.trend_direction_sequence;
    if (group.shared_fluctuation)
        j["shared_fluctuation"] = std::string(taxonomy::id(*group.shared_fluctuation));
    else
        j["shared_fluctuation"] = nullptr;
    j["shared_position"] = group.shared_position;
    return j;
}

CorrelationPool correlation_from_json(const nlohmann::ordered_json& j) {
    CorrelationPool g;
    g.group_id = j.at("group_id").get<std::string>();
    g.kind = j.at("kind").get<std::string>() == "shape" ? CorrelationKind::shape : CorrelationKind::local;
    g.member_names = j.at("member_names").get<std::vector<std::string>>();
    g.trend_direction_sequence = j.at("trend_direction_sequence").get<std::vector<int>>();
    if (!j.at("shared_fluctuation").is_null())
        g.shared_fluctuation =
            taxonomy::fluctuation_from_id(j.at("shared_fluctuation").get<std::string>()).value();
    g.shared_position = j.at("shared_position").get<std::size_t>();
    return g;
}

} // namespace tsqa::genpool
