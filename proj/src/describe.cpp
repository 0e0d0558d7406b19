#include "tsqa/describe.hpp"

#include "tsqa/prng.hpp"
#include "tsqa/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tsqa::describe {

using genpool::LocalFluctuation;
using genpool::NoiseKind;
using genpool::TrendSegment;
using taxonomy::FluctuationKind;

bool is_categorical_task(const std::string& task) {
    return task == "trend" || task == "season" || task == "noise" || task == "local" ||
           task == "correlation" || task == "cluster";
}

bool is_numeric_task(const std::string& task) { return task.rfind("numeric.", 0) == 0; }

bool is_choice_task(const std::string& task) {
    return task == "deductive" || task == "causal" || task == "comparison";
}

bool is_keyword_task(const std::string& task) {
    return task == "inductive" || task == "instruct_follow";
}

std::vector<StructuredFact> enumerate_facts(const AttributePool& pool, std::size_t series_index) {
    std::vector<StructuredFact> facts;
    auto push = [&](std::string kind, double value, std::string text, std::string units,
                    std::string location) {
        StructuredFact f;
        f.kind = std::move(kind);
        f.value = value;
        f.text = std::move(text);
        f.units = std::move(units);
        f.location = std::move(location);
        f.series_index = series_index;
        facts.push_back(std::move(f));
    };

    for (std::size_t i = 0; i < pool.trend.size(); ++i) {
        const auto& seg = pool.trend[i];
        std::string loc = "segment " + std::to_string(i);
        push("trend_kind", 0.0, std::string(taxonomy::id(seg.kind)), "", loc);
        push("trend_slope_sign", seg.slope_sign(), "", "", loc);
        push("trend_start_value", seg.start_value, "", pool.metric.name, loc);
        push("trend_end_value", seg.end_value(), "", pool.metric.name, loc);
    }
    if (pool.seasonality) {
        const auto& s = *pool.seasonality;
        push("season_kind", 0.0, std::string(taxonomy::id(s.kind)), "", "");
        push("season_period", static_cast<double>(s.period), "", "steps", "");
        push("season_amplitude", s.amplitude, "", pool.metric.name, "");
    } else {
        push("season_kind", 0.0, "none", "", "");
    }
    push("noise_kind", 0.0, std::string(taxonomy::id(pool.noise.kind)), "", "");
    if (pool.noise.kind != NoiseKind::none)
        push("noise_scale", pool.noise.sigma_or_halfwidth, "", pool.metric.name, "");
    for (const auto& f : pool.fluctuations) {
        std::string loc = "t=" + std::to_string(f.position);
        push("fluct_kind", 0.0, std::string(taxonomy::id(f.kind)), "", loc);
        push("fluct_position", static_cast<double>(f.position), "", "step index", loc);
        if (taxonomy::info(f.kind).grounds_duration)
            push("fluct_duration", static_cast<double>(f.duration), "", "steps", loc);
        if (taxonomy::info(f.kind).grounds_amplitude)
            push("fluct_amplitude", f.amplitude, "", pool.metric.name, loc);
    }
    return facts;
}

std::vector<StructuredFact> enumerate_facts(const CorrelationPool& group) {
    std::vector<StructuredFact> facts;
    StructuredFact f;
    f.kind = "correlated_members";
    std::string joined;
    for (const auto& name : group.member_names) {
        if (!joined.empty()) joined += ", ";
        joined += name;
    }
    f.text = joined;
    f.location = group.group_id;
    facts.push_back(f);
    if (group.kind == genpool::CorrelationKind::local && group.shared_fluctuation) {
        StructuredFact g;
        g.kind = "shared_fluctuation";
        g.text = std::string(taxonomy::id(*group.shared_fluctuation));
        g.value = static_cast<double>(group.shared_position);
        g.location = group.group_id;
        facts.push_back(g);
    }
    return facts;
}

std::vector<std::string> category_labels(const AttributePool& pool, const std::string& task) {
    std::vector<std::string> labels;
    auto add_unique = [&](std::string_view s) {
        std::string v(s);
        if (std::find(labels.begin(), labels.end(), v) == labels.end()) labels.push_back(v);
    };
    if (task == "trend") {
        for (const auto& seg : pool.trend) add_unique(taxonomy::id(seg.kind));
    } else if (task == "season") {
        if (pool.seasonality)
            add_unique(taxonomy::id(pool.seasonality->kind));
        else
            add_unique("none");
    } else if (task == "noise") {
        add_unique(taxonomy::id(pool.noise.kind));
    } else if (task == "local") {
        for (const auto& f : pool.fluctuations) add_unique(taxonomy::id(f.kind));
        if (pool.fluctuations.empty()) add_unique("none");
    } else {
        throw std::invalid_argument("category_labels: not a category task: " + task);
    }
    return labels;
}

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) out += labels.size() == 2 ? " and " : (i + 1 == labels.size() ? ", and " : ", ");
        out += labels[i];
    }
    return out;
}

std::string sig4(double v) { return format_sig4(v); }

template <std::size_t N>
const char* pick(Rng& rng, const char* const (&options)[N]) {
    return options[static_cast<std::size_t>(rng.uniform_int(0, N - 1))];
}

std::string subst(std::string tpl, const std::string& key, const std::string& value) {
    auto pos = tpl.find(key);
    while (pos != std::string::npos) {
        tpl.replace(pos, key.size(), value);
        pos = tpl.find(key, pos + value.size());
    }
    return tpl;
}

} // namespace

AttributeDescription describe(const AttributePool& pool) {
    AttributeDescription out;
    out.facts = enumerate_facts(pool);

    std::string text = pool.metric.name + " over " + std::to_string(pool.length) + " points. ";

    text += "Trend: ";
    for (std::size_t i = 0; i < pool.trend.size(); ++i) {
        const auto& seg = pool.trend[i];
        if (i > 0) text += ", then ";
        text += std::string(taxonomy::id(seg.kind)) + " from " + sig4(seg.start_value) + " to " +
                sig4(seg.end_value()) + " over [" + std::to_string(seg.start_idx) + ", " +
                std::to_string(seg.end_idx) + ")";
    }
    text += ". ";

    if (pool.seasonality) {
        const auto& s = *pool.seasonality;
        text += "Seasonality: " + std::string(taxonomy::id(s.kind)) + " with period " +
                std::to_string(s.period) + " steps and amplitude " + sig4(s.amplitude) +
                " (half peak-to-peak). ";
    } else {
        text += "Seasonality: none; the series shows no periodic fluctuation. ";
    }

    if (pool.noise.kind == NoiseKind::none) {
        text += "Noise: none; the series is smooth and noise-free. ";
    } else {
        text += "Noise: " + std::string(taxonomy::id(pool.noise.kind)) + " with scale " +
                sig4(pool.noise.sigma_or_halfwidth) + ". ";
    }

    if (pool.fluctuations.empty()) {
        text += "Local fluctuations: none.";
    } else {
        text += "Local fluctuations: ";
        for (std::size_t i = 0; i < pool.fluctuations.size(); ++i) {
            const auto& f = pool.fluctuations[i];
            if (i > 0) text += "; ";
            text += "a " + std::string(taxonomy::id(f.kind)) + " at position " +
                    std::to_string(f.position);
            if (taxonomy::info(f.kind).grounds_duration)
                text += " lasting " + std::to_string(f.duration) + " steps";
            if (taxonomy::info(f.kind).grounds_amplitude)
                text += " with amplitude " + sig4(f.amplitude);
        }
        text += ".";
    }

    out.text = text;
    return out;
}

QARecord gen_alignment_qa(const AttributePool& pool, const TimeSeries& series,
                          const std::string& task, std::uint64_t template_seed) {
    (void)series;
    if (task != "trend" && task != "season" && task != "noise" && task != "local")
        throw std::invalid_argument("gen_alignment_qa: bad task " + task);

    Rng rng(template_seed);
    QARecord rec;
    rec.task = task;
    rec.series_refs = {pool.metric.name};
    rec.gold.labels = category_labels(pool, task);

    const std::string& m = pool.metric.name;
    int variant = 0;
    if (task == "trend") {
        static const char* questions[] = {
            "What trend does <m> exhibit?",
            "Describe the overall trend of <m>.",
            "How does the long-term level of <m> evolve over the window?",
            "Identify the trend segments present in <m>.",
            "Which trend patterns appear in <m>?",
        };
        const char* q = pick(rng, questions);
        variant = static_cast<int>(rng.uniform_int(0, 2));
        rec.question = subst(q, "<m>", m);
        std::string body = join_labels(rec.gold.labels);
        if (variant == 0)
            rec.answer = "The trend of " + m + " consists of " + body + " segments.";
        else if (variant == 1)
            rec.answer = "Over the window, " + m + " shows a " + body + " trend pattern.";
        else
            rec.answer = "Trend segments observed: " + body + ".";
    } else if (task == "season") {
        static const char* questions[] = {
            "Does <m> show any periodic fluctuation, and of which kind?",
            "Describe the seasonality of <m>.",
            "Is there a repeating pattern in <m>?",
            "What periodic behavior does <m> display?",
            "Characterize the seasonal component of <m>.",
        };
        rec.question = subst(pick(rng, questions), "<m>", m);
        if (pool.seasonality) {
            std::string kind(taxonomy::id(pool.seasonality->kind));
            rec.answer = "Yes, " + m + " shows a " + kind + " pattern with period " +
                         std::to_string(pool.seasonality->period) + " steps.";
        } else {
            rec.answer = "No, " + m + " shows no periodic fluctuation.";
        }
    } else if (task == "noise") {
        static const char* questions[] = {
            "How noisy is <m>?",
            "Describe the noise component of <m>.",
            "What kind of measurement noise does <m> carry?",
            "Characterize the noise in <m>.",
            "Is <m> noisy, and with what distribution?",
        };
        rec.question = subst(pick(rng, questions), "<m>", m);
        if (pool.noise.kind == NoiseKind::none)
            rec.answer = "The series is smooth and noise-free.";
        else
            rec.answer = "The series carries " + std::string(taxonomy::id(pool.noise.kind)) +
                         " noise with scale about " + sig4(pool.noise.sigma_or_halfwidth) + ".";
    } else { // local
        static const char* questions[] = {
            "Which local fluctuations occur in <m>?",
            "Are there any local anomalies in <m>?",
            "List the local fluctuation types present in <m>.",
            "What short-lived deviations does <m> contain?",
            "Identify any local fluctuations in <m>.",
        };
        rec.question = subst(pick(rng, questions), "<m>", m);
        if (pool.fluctuations.empty()) {
            rec.answer = "There are no local fluctuations in " + m + ".";
        } else {
            std::string body = join_labels(rec.gold.labels);
            rec.answer = "The series contains the following local fluctuations: " + body + ".";
        }
    }
    rec.provenance = "tpl:" + task;
    return rec;
}

std::optional<QARecord> gen_numeric_qa(const AttributePool& pool, const TimeSeries& series,
                                       const std::string& task, std::uint64_t template_seed) {
    Rng rng(template_seed);
    QARecord rec;
    rec.task = task;
    rec.series_refs = {pool.metric.name};
    const std::string& m = pool.metric.name;

    auto [mn_it, mx_it] = std::minmax_element(series.values.begin(), series.values.end());
    double range = *mx_it - *mn_it;
    rec.gold.delta = 0.01 * std::max(range, 1e-12);
    rec.gold.tolerance = 0.05;

    auto finish = [&](double gold, std::string q, std::string a_prefix) {
        rec.gold.value = gold;
        rec.question = std::move(q);
        rec.answer = a_prefix + " " + format_double(gold) + ".";
        rec.provenance = "tpl:" + task;
        return rec;
    };

    if (task == "numeric.max") {
        static const char* questions[] = {
            "What is the maximum value of <m>?",
            "Report the highest value reached by <m>.",
            "Find the peak value of <m>.",
            "What is the largest value observed in <m>?",
            "How high does <m> get at its highest point?",
        };
        std::size_t arg = static_cast<std::size_t>(
            std::distance(series.values.begin(), mx_it)); // minmax_element: first max? see note
        // Smallest index among ties.
        for (std::size_t t = 0; t < series.values.size(); ++t)
            if (series.values[t] == *mx_it) {
                arg = t;
                break;
            }
        return finish(*mx_it, subst(pick(rng, questions), "<m>", m),
                      "At position " + std::to_string(arg) + ", the maximum value of " + m + " is");
    }
    if (task == "numeric.min") {
        static const char* questions[] = {
            "What is the minimum value of <m>?",
            "Report the lowest value reached by <m>.",
            "Find the smallest value of <m>.",
            "What is the lowest value observed in <m>?",
            "How low does <m> get at its lowest point?",
        };
        std::size_t arg = 0;
        for (std::size_t t = 0; t < series.values.size(); ++t)
            if (series.values[t] == *mn_it) {
                arg = t;
                break;
            }
        return finish(*mn_it, subst(pick(rng, questions), "<m>", m),
                      "At position " + std::to_string(arg) + ", the minimum value of " + m + " is");
    }
    if (task == "numeric.value_at") {
        std::size_t t = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(series.values.size()) - 1));
        static const char* questions[] = {
            "What is the value of <m> at time point <t>?",
            "Report the value of <m> at index <t>.",
            "What value does <m> take at position <t>?",
            "Read off <m> at time point <t>.",
            "At index <t>, what is the value of <m>?",
        };
        std::string q = subst(subst(pick(rng, questions), "<m>", m), "<t>", std::to_string(t));
        return finish(series.values[t], std::move(q),
                      "The value of " + m + " at time point " + std::to_string(t) + " is");
    }
    if (task == "numeric.segment_avg") {
        const auto& seg = pool.trend[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(pool.trend.size()) - 1))];
        double sum = 0.0;
        for (std::size_t t = seg.start_idx; t < seg.end_idx; ++t) sum += series.values[t];
        double avg = sum / static_cast<double>(seg.end_idx - seg.start_idx);
        static const char* questions[] = {
            "What is the average value of <m> between positions <a> and <b>?",
            "Compute the mean of <m> over [<a>, <b>).",
            "What is the mean level of <m> from index <a> up to <b>?",
            "Average <m> over the window starting at <a> and ending before <b>.",
            "Over [<a>, <b>), what is the average of <m>?",
        };
        std::string q = subst(subst(subst(pick(rng, questions), "<m>", m), "<a>",
                                  std::to_string(seg.start_idx)),
                             "<b>", std::to_string(seg.end_idx));
        return finish(avg, std::move(q),
                      "The average value over [" + std::to_string(seg.start_idx) + ", " +
                          std::to_string(seg.end_idx) + ") is");
    }
    if (task == "numeric.fluct_amplitude" || task == "numeric.fluct_position") {
        std::vector<const LocalFluctuation*> eligible;
        for (const auto& f : pool.fluctuations) {
            if (task == "numeric.fluct_position") {
                // Position questions name the fluctuation only by kind, so the
                // kind must be unique in the pool or the question is ambiguous.
                std::size_t same_kind = 0;
                for (const auto& other : pool.fluctuations)
                    if (other.kind == f.kind) ++same_kind;
                if (same_kind == 1) eligible.push_back(&f);
            } else if (taxonomy::info(f.kind).grounds_amplitude) {
                eligible.push_back(&f);
            }
        }
        if (eligible.empty()) return std::nullopt;
        const auto& f = *eligible[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1))];
        std::string kind(taxonomy::id(f.kind));
        if (task == "numeric.fluct_amplitude") {
            static const char* questions[] = {
                "What is the amplitude of the <k> near position <p> in <m>?",
                "How large is the <k> around index <p> in <m>?",
                "Report the amplitude of the <k> at position <p> in <m>.",
                "Quantify the <k> near t=<p> in <m>.",
                "What amplitude does the <k> near position <p> of <m> have?",
            };
            std::string q = subst(subst(subst(pick(rng, questions), "<m>", m), "<k>", kind), "<p>",
                                 std::to_string(f.position));
            return finish(f.amplitude, std::move(q), "The amplitude of the " + kind + " is");
        }
        static const char* questions[] = {
            "At which position does the <k> in <m> start?",
            "Where does the <k> in <m> occur?",
            "Report the starting index of the <k> in <m>.",
            "Locate the <k> in <m>.",
            "At what time point does the <k> in <m> begin?",
        };
        std::string q = subst(subst(pick(rng, questions), "<m>", m), "<k>", kind);
        rec.gold.delta = std::max(2.0, 0.01 * static_cast<double>(pool.length));
        return finish(static_cast<double>(f.position), std::move(q),
                      "The " + kind + " starts at position");
    }
    if (task == "numeric.period") {
        if (!pool.seasonality) return std::nullopt;
        static const char* questions[] = {
            "What is the period of the seasonal pattern in <m>, in steps?",
            "How many steps long is one cycle of <m>?",
            "Report the seasonal period of <m>.",
            "What is the cycle length of <m>?",
            "How long is the repeating period in <m>?",
        };
        return finish(static_cast<double>(pool.seasonality->period),
                      subst(pick(rng, questions), "<m>", m), "The seasonal period is");
    }
    throw std::invalid_argument("gen_numeric_qa: bad task " + task);
}

QARecord gen_mts_qa(const std::vector<CorrelationPool>& groups,
                    const std::vector<AttributePool>& pools,
                    const std::vector<TimeSeries>& series_list, const std::string& task,
                    std::uint64_t template_seed) {
    (void)series_list;
    if (pools.size() < 2) throw std::invalid_argument("gen_mts_qa: need at least 2 series");
    if (groups.empty()) throw std::invalid_argument("gen_mts_qa: need a correlation group");
    if (task != "correlation" && task != "cluster")
        throw std::invalid_argument("gen_mts_qa: bad task " + task);

    Rng rng(template_seed);
    QARecord rec;
    rec.task = task;
    for (const auto& p : pools) rec.series_refs.push_back(p.metric.name);

    if (task == "correlation") {
        const auto& g = groups.front();
        static const char* shape_q[] = {
            "Which of these metrics share the same global trend shape?",
            "Identify the metrics whose overall shapes are correlated.",
            "Which series move together in their long-term trend?",
            "Find the group of metrics with a shared trend-direction pattern.",
            "Which metrics are shape-correlated?",
        };
        static const char* local_q[] = {
            "Which of these metrics show a correlated local fluctuation at the same position?",
            "Identify the metrics that share a simultaneous local anomaly.",
            "Which series exhibit the same local fluctuation at a common time?",
            "Find the metrics whose local deviations coincide.",
            "Which metrics are locally correlated?",
        };
        rec.question = g.kind == genpool::CorrelationKind::shape ? pick(rng, shape_q)
                                                                 : pick(rng, local_q);
        rec.gold.labels = g.member_names;
        std::string body = join_labels(g.member_names);
        rec.answer = "The correlated metrics are: " + body + ".";
        rec.provenance = "tpl:correlation";
        return rec;
    }

    // cluster: gold is the canonical partition over all series in the record;
    // ungrouped series form singleton clusters.
    static const char* cluster_q[] = {
        "Cluster these metrics into groups of correlated series.",
        "Partition the metrics into correlated clusters.",
        "Group the series so correlated metrics share a cluster.",
        "Which metrics belong together, judging by their correlation?",
        "Split the metrics into clusters of correlated behavior.",
    };
    rec.question = pick(rng, cluster_q);
    std::set<std::string> grouped;
    std::vector<std::vector<std::string>> clusters;
    for (const auto& g : groups) {
        std::vector<std::string> members = g.member_names;
        std::sort(members.begin(), members.end());
        for (const auto& name : members) grouped.insert(name);
        clusters.push_back(std::move(members));
    }
    for (const auto& p : pools)
        if (!grouped.count(p.metric.name)) clusters.push_back({p.metric.name});
    std::sort(clusters.begin(), clusters.end());

    std::string answer;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        std::string joined;
        for (const auto& name : clusters[i]) {
            if (!joined.empty()) joined += ", ";
            joined += name;
        }
        answer += "Group " + std::to_string(i + 1) + ": " + joined + ". ";
        std::string canon;
        for (const auto& name : clusters[i]) {
            if (!canon.empty()) canon += "+";
            canon += name;
        }
        rec.gold.labels.push_back(canon);
    }
    if (!answer.empty()) answer.pop_back();
    rec.answer = answer;
    rec.provenance = "tpl:cluster";
    return rec;
}

namespace {

// Plausible causes per fluctuation family, used for multiple-choice items.
const char* cause_for(FluctuationKind kind) {
    switch (kind) {
    case FluctuationKind::upward_spike:
    case FluctuationKind::rapid_rise_slow_decline:
        return "a sudden burst of activity hitting the system";
    case FluctuationKind::downward_spike:
    case FluctuationKind::transient_dip:
        return "a brief outage or dropout in the measured process";
    case FluctuationKind::upward_level_shift:
        return "a configuration change that raised the operating level";
    case FluctuationKind::downward_level_shift:
        return "capacity being removed or demand migrating away";
    case FluctuationKind::transient_rise:
    case FluctuationKind::convex_elevation:
        return "a temporary load increase that later subsided";
    case FluctuationKind::concave_depression:
        return "a gradual slowdown followed by a quick recovery";
    case FluctuationKind::slow_rise_rapid_decline:
        return "pressure building up slowly until a reset released it";
    case FluctuationKind::amplified_seasonal_amplitude:
        return "the periodic driver temporarily strengthening";
    case FluctuationKind::diminished_seasonal_amplitude:
        return "the periodic driver temporarily weakening";
    case FluctuationKind::increased_noise:
        return "sensor interference adding measurement jitter";
    case FluctuationKind::decreased_noise:
        return "a smoothing filter being applied to the readings";
    case FluctuationKind::temporary_flatline:
        return "the reading being held at a stale value";
    case FluctuationKind::gap:
        return "a data collection outage";
    case FluctuationKind::period_lengthening:
        return "the driving cycle slowing down";
    case FluctuationKind::phase_shift:
        return "the driving cycle starting earlier or later than usual";
    case FluctuationKind::oscillation_burst:
        return "a feedback loop briefly oscillating";
    }
    return "an unknown external event";
}

} // namespace

std::optional<QARecord> gen_reasoning_seed(const std::vector<AttributePool>& pools,
                                           const std::vector<TimeSeries>& series_list,
                                           const std::string& task, std::uint64_t template_seed) {
    if (pools.empty() || pools.size() != series_list.size())
        throw std::invalid_argument("gen_reasoning_seed: pools/series mismatch");
    Rng rng(template_seed);
    QARecord rec;
    rec.task = task;
    const auto& pool = pools.front();
    const auto& series = series_list.front();
    const std::string& m = pool.metric.name;
    rec.series_refs = {m};

    if (task == "deductive") {
        double mx = *std::max_element(series.values.begin(), series.values.end());
        bool above = rng.bernoulli(0.5);
        double threshold = round_sig(above ? mx * 0.85 : mx * 1.2, 4);
        if (threshold == mx) threshold = above ? mx - 1.0 : mx + 1.0;
        bool gold = mx > threshold;
        static const char* conditions[] = {
            "the reading is considered critical",
            "an alert should be raised",
            "the threshold policy is violated",
            "the system is flagged as overloaded",
            "the measurement is out of spec",
        };
        const char* cond = pick(rng, conditions);
        rec.question = "Rule: if the maximum value of " + m + " exceeds " +
                       format_double(threshold) + ", then " + cond +
                       ". Based on the series, is that the case? Answer True or False.";
        rec.gold.choice = gold ? "True" : "False";
        rec.answer = std::string(gold ? "True" : "False") + ".";
        rec.provenance = "tpl:deductive";
        return rec;
    }

    if (task == "causal") {
        if (pool.fluctuations.empty()) return std::nullopt;
        const auto& f = pool.fluctuations[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(pool.fluctuations.size()) - 1))];
        std::string kind(taxonomy::id(f.kind));
        std::string correct = cause_for(f.kind);
        // Decoys: causes of other kinds, deterministic distinct picks.
        std::vector<std::string> options = {correct};
        const auto& all = taxonomy::registry().fluctuation_types;
        std::size_t probe = static_cast<std::size_t>(rng.uniform_int(0, 18));
        while (options.size() < 4) {
            FluctuationKind k = all[probe % all.size()];
            probe += 7;
            std::string cause = cause_for(k);
            if (std::find(options.begin(), options.end(), cause) == options.end())
                options.push_back(cause);
        }
        std::size_t correct_slot = static_cast<std::size_t>(rng.uniform_int(0, 3));
        std::swap(options[0], options[correct_slot]);
        static const char* letters[] = {"A", "B", "C", "D"};
        static const char* stems[] = {
            "A <k> occurs near position <p> in <m>. Which is the most likely cause?",
            "Around index <p>, <m> shows a <k>. What most plausibly caused it?",
            "Select the most likely explanation for the <k> near position <p> in <m>.",
            "The monitoring data for <m> contains a <k> at about t=<p>. Pick the likeliest cause.",
            "What best explains the <k> observed near position <p> in <m>?",
        };
        std::string q = subst(subst(subst(pick(rng, stems), "<k>", kind), "<p>",
                                    std::to_string(f.position)),
                              "<m>", m);
        for (std::size_t i = 0; i < 4; ++i)
            q += std::string(" ") + letters[i] + ") " + options[i] + ".";
        rec.question = q;
        rec.gold.choice = letters[correct_slot];
        rec.answer = std::string(letters[correct_slot]) + ") " + correct + ".";
        rec.provenance = "tpl:causal";
        return rec;
    }

    if (task == "comparison") {
        if (pools.size() < 2) return std::nullopt;
        const auto& a = series_list[0];
        const auto& b = series_list[1];
        rec.series_refs = {pools[0].metric.name, pools[1].metric.name};
        int mode = static_cast<int>(rng.uniform_int(0, 2));
        double va, vb;
        std::string what;
        if (mode == 0) {
            va = *std::max_element(a.values.begin(), a.values.end());
            vb = *std::max_element(b.values.begin(), b.values.end());
            what = "higher maximum value";
        } else if (mode == 1) {
            double sa = 0, sb = 0;
            for (double v : a.values) sa += v;
            for (double v : b.values) sb += v;
            va = sa / static_cast<double>(a.values.size());
            vb = sb / static_cast<double>(b.values.size());
            what = "higher average level";
        } else {
            auto [amn, amx] = std::minmax_element(a.values.begin(), a.values.end());
            auto [bmn, bmx] = std::minmax_element(b.values.begin(), b.values.end());
            va = *amx - *amn;
            vb = *bmx - *bmn;
            what = "wider value range";
        }
        if (va == vb) return std::nullopt; // no defensible gold
        bool first = va > vb;
        static const char* stems[] = {
            "Compare the two series. Which one has the <w>?",
            "Looking at both series, which shows the <w>?",
            "Between the two metrics, which one exhibits the <w>?",
            "Judge the two series against each other: which has the <w>?",
            "Of these two series, pick the one with the <w>.",
        };
        rec.question = subst(pick(rng, stems), "<w>", what) + " A) " + pools[0].metric.name +
                       " B) " + pools[1].metric.name;
        rec.gold.choice = first ? "A" : "B";
        rec.answer = std::string(first ? "A" : "B") + ") " +
                     (first ? pools[0].metric.name : pools[1].metric.name) + ".";
        rec.provenance = "tpl:comparison";
        return rec;
    }

    if (task == "inductive") {
        static const char* questions[] = {
            "Summarize the main patterns visible in <m>.",
            "Give a short analysis of what <m> is doing over this window.",
            "Describe the notable behaviors of <m>.",
            "What stands out when you inspect <m>?",
            "Provide an overview of the patterns in <m>.",
        };
        rec.question = subst(pick(rng, questions), "<m>", m);
        std::vector<std::string> keywords = category_labels(pool, "trend");
        if (pool.seasonality)
            keywords.push_back(std::string(taxonomy::id(pool.seasonality->kind)));
        for (const auto& f : pool.fluctuations)
            keywords.push_back(std::string(taxonomy::id(f.kind)));
        // De-duplicate, keep order.
        std::vector<std::string> uniq;
        for (auto& k : keywords)
            if (std::find(uniq.begin(), uniq.end(), k) == uniq.end()) uniq.push_back(k);
        rec.gold.keywords = uniq;
        rec.answer = describe(pool).text;
        rec.provenance = "tpl:inductive";
        return rec;
    }

    throw std::invalid_argument("gen_reasoning_seed: bad task " + task);
}

} // namespace tsqa::describe
