#include "tsqa/tsevol.hpp"

#include "tsqa/genpool.hpp"
#include "tsqa/prng.hpp"
#include "tsqa/util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace tsqa::tsevol {

using describe::GoldLabels;
using genpool::NoiseKind;

std::string_view evolution_name(EvolutionType t) {
    switch (t) {
    case EvolutionType::in_depth: return "in_depth";
    case EvolutionType::in_breadth: return "in_breadth";
    case EvolutionType::condition_add: return "condition_add";
    case EvolutionType::concretize: return "concretize";
    case EvolutionType::reasoning: return "reasoning";
    case EvolutionType::situation: return "situation";
    }
    return "in_depth";
}

std::optional<EvolutionType> evolution_from_name(std::string_view name) {
    for (auto t : kAllEvolutionTypes)
        if (evolution_name(t) == name) return t;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Fact line syntax shared by prompts and replies:
//   - series=0; kind=fluct_amplitude; location=t=100; value=5
//   - series=0; kind=season_kind; location=; text=sine
// ---------------------------------------------------------------------------

namespace {

std::string fact_line(const StructuredFact& f) {
    std::string line = "- series=" + std::to_string(f.series_index) + "; kind=" + f.kind +
                       "; location=" + f.location + "; ";
    if (f.text.empty())
        line += "value=" + format_double(f.value);
    else
        line += "text=" + f.text;
    return line;
}

std::optional<StructuredFact> parse_fact_line(std::string_view line) {
    auto trimmed = line;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '-')) trimmed.remove_prefix(1);
    StructuredFact f;
    bool has_payload = false;
    std::size_t pos = 0;
    while (pos < trimmed.size()) {
        std::size_t sep = trimmed.find(';', pos);
        std::string_view field = trimmed.substr(pos, sep == std::string_view::npos ? trimmed.size() - pos
                                                                                   : sep - pos);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
        std::size_t eq = field.find('=');
        if (eq != std::string_view::npos) {
            std::string_view key = field.substr(0, eq);
            std::string_view value = field.substr(eq + 1);
            if (key == "series")
                f.series_index = static_cast<std::size_t>(std::strtoull(std::string(value).c_str(), nullptr, 10));
            else if (key == "kind")
                f.kind = std::string(value);
            else if (key == "location")
                f.location = std::string(value);
            else if (key == "value") {
                f.value = std::strtod(std::string(value).c_str(), nullptr);
                has_payload = true;
            } else if (key == "text") {
                f.text = std::string(value);
                has_payload = true;
            }
        }
        if (sep == std::string_view::npos) break;
        pos = sep + 1;
    }
    if (f.kind.empty() || !has_payload) return std::nullopt;
    return f;
}

const char* instruction_for(EvolutionType etype) {
    switch (etype) {
    case EvolutionType::in_depth:
        return "Deepen the question: require multi-step analysis of the same series, folding the "
               "injected attributes into the reasoning.";
    case EvolutionType::in_breadth:
        return "Broaden the question to cover the injected attributes in addition to the original "
               "topic.";
    case EvolutionType::condition_add:
        return "Add an explicit condition derived from the injected attributes and ask whether it "
               "holds (answer True or False).";
    case EvolutionType::concretize:
        return "Make the question concrete: replace vague wording with the exact numbers from the "
               "injected attributes.";
    case EvolutionType::reasoning:
        return "Turn the question into a reasoning item: ask why the pattern occurs or what "
               "explains it, grounded in the injected attributes.";
    case EvolutionType::situation:
        return "Wrap the question in a realistic operations scenario in which the injected "
               "attributes matter.";
    }
    return "";
}

std::string section_after(const std::string& text, const std::string& header) {
    auto pos = text.find(header);
    if (pos == std::string::npos) return {};
    pos += header.size();
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string out = text.substr(pos, end - pos);
    while (!out.empty() && out.front() == ' ') out.erase(out.begin());
    while (!out.empty() && (out.back() == '\r' || out.back() == ' ')) out.pop_back();
    return out;
}

std::vector<StructuredFact> facts_after(const std::string& text, const std::string& header) {
    std::vector<StructuredFact> facts;
    auto pos = text.find(header);
    if (pos == std::string::npos) return facts;
    pos = text.find('\n', pos);
    if (pos == std::string::npos) return facts;
    ++pos;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + pos, end - pos);
        if (line.empty() || line[0] != '-') break;
        if (auto f = parse_fact_line(line)) facts.push_back(std::move(*f));
        pos = end + 1;
    }
    return facts;
}

std::string summarize_fact(const StructuredFact& f) {
    std::string s;
    if (!f.text.empty()) {
        s = f.text;
        if (f.kind == "fluct_kind" && !f.location.empty()) s += " at " + f.location;
    } else {
        s = f.kind + " of " + format_double(f.value);
        if (!f.location.empty()) s += " at " + f.location;
    }
    return s;
}

} // namespace

std::string build_evolution_prompt(const QARecord& seed_qa,
                                   const std::vector<AttributePool>& pools, EvolutionType etype,
                                   const std::vector<StructuredFact>& injected) {
    std::ostringstream p;
    p << "You are evolving one time-series question-answer pair into a new one.\n";
    p << "EVOLUTION TYPE: " << evolution_name(etype) << "\n";
    p << "SEED QUESTION: " << seed_qa.question << "\n";
    p << "SEED ANSWER: " << seed_qa.answer << "\n";
    p << "SERIES:";
    for (std::size_t i = 0; i < pools.size(); ++i) p << " " << i << "=" << pools[i].metric.name;
    p << "\nINJECTED FACTS:\n";
    for (const auto& f : injected) p << fact_line(f) << "\n";
    p << "INSTRUCTIONS: " << instruction_for(etype) << "\n";
    p << "Reply in exactly this layout (the FACTS trailer must restate, verbatim, every injected "
         "fact your question or answer uses):\n";
    p << "QUESTION: <the evolved question>\n";
    p << "ANSWER: <the evolved answer>\n";
    p << "FACTS:\n";
    p << "- series=<i>; kind=<kind>; location=<location>; value=<number> (or text=<label>)\n";
    return p.str();
}

std::string MockTextGenerator::complete(const std::string& prompt, const DecodeParams&) {
    std::string etype_name = section_after(prompt, "EVOLUTION TYPE:");
    std::string seed_q = section_after(prompt, "SEED QUESTION:");
    std::string seed_a = section_after(prompt, "SEED ANSWER:");
    auto injected = facts_after(prompt, "INJECTED FACTS:");
    EvolutionType etype = evolution_from_name(etype_name).value_or(EvolutionType::in_depth);

    std::string mention;
    for (const auto& f : injected) {
        if (!mention.empty()) mention += ", and ";
        mention += summarize_fact(f);
    }
    if (mention.empty()) mention = "the recorded attributes";

    std::string question, answer;
    switch (etype) {
    case EvolutionType::in_depth:
        question = seed_q + " Work through it step by step, accounting for " + mention + ".";
        answer = seed_a + " This follows from " + mention + ".";
        break;
    case EvolutionType::in_breadth:
        question = seed_q + " Also describe " + mention + ".";
        answer = seed_a + " In addition, the series shows " + mention + ".";
        break;
    case EvolutionType::condition_add: {
        // Deterministic truth: the condition restates a fact, so it holds.
        question = seed_q + " Condition: the series exhibits " + mention +
                   ". True or False: the condition is consistent with the data?";
        answer = "True. The recorded attributes include " + mention + ".";
        break;
    }
    case EvolutionType::concretize:
        question = seed_q + " Use the exact figures: " + mention + ".";
        answer = seed_a + " Precisely: " + mention + ".";
        break;
    case EvolutionType::reasoning:
        question = "Why does the pattern in question occur - what explains " + mention +
                   ", given: " + seed_q;
        answer = "The behavior is explained by the recorded attributes: " + mention + ".";
        break;
    case EvolutionType::situation:
        question = "You are the on-call operator reviewing these metrics. " + seed_q +
                   " Pay attention to " + mention + ".";
        answer = seed_a + " Operationally, note " + mention + ".";
        break;
    }

    std::ostringstream out;
    out << "QUESTION: " << question << "\n";
    out << "ANSWER: " << answer << "\n";
    out << "FACTS:\n";
    for (const auto& f : injected) out << fact_line(f) << "\n";
    return out.str();
}

namespace {

template <typename Kind>
std::vector<Kind> parse_kind_list(const std::string& line,
                                  std::optional<Kind> (*parser)(std::string_view)) {
    std::vector<Kind> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        std::string item = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && (item.back() == ' ' || item.back() == '\r')) item.pop_back();
        if (auto kind = parser(item); kind && std::find(out.begin(), out.end(), *kind) == out.end())
            out.push_back(*kind);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

genpool::AttributeSubset GeneratorBackedSelector::propose(
    const taxonomy::MetricSpec& metric, const taxonomy::AttributeTaxonomy& taxonomy) {
    std::ostringstream p;
    p << "Choose the time-series attribute kinds that fit this real-world metric.\n";
    p << "METRIC: " << metric.name << " (domain " << metric.domain_tag << ", typical range "
      << format_double(metric.range_low) << " to " << format_double(metric.range_high)
      << (metric.nonneg ? ", nonnegative" : "") << ")\n";
    auto list = [&](auto kinds) {
        std::string out;
        for (auto k : kinds) {
            if (!out.empty()) out += ", ";
            out += std::string(taxonomy::id(k));
        }
        return out;
    };
    p << "Reply with exactly these four lines, each a comma-separated subset:\n";
    p << "TREND: (from: " << list(taxonomy.trend_types) << ")\n";
    p << "SEASONALITY: (from: " << list(taxonomy.season_types) << "; may be empty)\n";
    p << "NOISE: (from: " << list(taxonomy.noise_types) << ")\n";
    p << "FLUCTUATIONS: (from: " << list(taxonomy.fluctuation_types) << "; may be empty)\n";

    std::string reply = gen_.complete(p.str(), params_);

    // Hints stay rule-based; only the kind lists come from the generator.
    genpool::RuleBasedSelector base;
    genpool::AttributeSubset subset = base.propose(metric, taxonomy);
    subset.trends = parse_kind_list<taxonomy::TrendKind>(section_after(reply, "TREND:"), taxonomy::trend_from_id);
    subset.seasons =
        parse_kind_list<taxonomy::SeasonKind>(section_after(reply, "SEASONALITY:"), taxonomy::season_from_id);
    subset.noises = parse_kind_list<taxonomy::NoiseKind>(section_after(reply, "NOISE:"), taxonomy::noise_from_id);
    subset.fluctuations = parse_kind_list<taxonomy::FluctuationKind>(section_after(reply, "FLUCTUATIONS:"),
                                                           taxonomy::fluctuation_from_id);
    return subset;
}

std::vector<StructuredFact> inject_attributes(const std::vector<AttributePool>& pools,
                                              const CorrelationPool* corr_pool, std::size_t k,
                                              std::uint64_t seed) {
    if (pools.empty()) throw std::invalid_argument("inject_attributes: no pools");
    if (k < 1) throw std::invalid_argument("inject_attributes: k must be >= 1");
    std::vector<StructuredFact> all;
    for (std::size_t i = 0; i < pools.size(); ++i) {
        auto facts = describe::enumerate_facts(pools[i], i);
        all.insert(all.end(), facts.begin(), facts.end());
    }
    if (corr_pool) {
        auto facts = describe::enumerate_facts(*corr_pool);
        all.insert(all.end(), facts.begin(), facts.end());
    }
    if (k >= all.size()) return all;

    // Partial Fisher-Yates: first k entries of a seeded shuffle.
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(
                                rng.uniform_int(0, static_cast<std::int64_t>(all.size() - i) - 1));
        std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
}

CandidateQA evolve(const QARecord& seed_qa, const std::vector<AttributePool>& pools,
                   EvolutionType etype, const std::vector<StructuredFact>& injected,
                   TextGenerator& gen, int retries, const DecodeParams& params) {
    std::string prompt = build_evolution_prompt(seed_qa, pools, etype, injected);
    std::string last_output;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        last_output = gen.complete(prompt, params);
        std::string q = section_after(last_output, "QUESTION:");
        std::string a = section_after(last_output, "ANSWER:");
        auto facts = facts_after(last_output, "FACTS:");
        if (!q.empty() && !a.empty() && !facts.empty()) {
            CandidateQA cand;
            cand.question = std::move(q);
            cand.answer = std::move(a);
            cand.claimed_facts = std::move(facts);
            cand.lineage.seed_id = seed_qa.id;
            cand.lineage.etype = etype;
            return cand;
        }
    }
    throw EvolutionError("generator output unparseable after " + std::to_string(retries + 1) +
                             " attempts",
                         last_output);
}

namespace {

struct FactCheck {
    bool verifiable = false;
    bool ok = false;
    std::string truth;
    double deviation = 0.0;
};

FactCheck check_numeric(double claimed, double truth, double tol_abs) {
    FactCheck c;
    c.verifiable = true;
    c.deviation = std::fabs(claimed - truth);
    c.ok = c.deviation <= tol_abs;
    c.truth = format_double(truth);
    return c;
}

FactCheck check_text(const std::string& claimed, const std::string& truth) {
    FactCheck c;
    c.verifiable = true;
    c.ok = claimed == truth;
    c.truth = truth;
    return c;
}

const genpool::LocalFluctuation* fluct_at_location(const AttributePool& pool,
                                                   const std::string& location) {
    if (location.rfind("t=", 0) != 0) return nullptr;
    std::size_t pos = static_cast<std::size_t>(std::strtoull(location.c_str() + 2, nullptr, 10));
    for (const auto& f : pool.fluctuations)
        if (f.position == pos) return &f;
    return nullptr;
}

std::optional<std::size_t> segment_at_location(const AttributePool& pool,
                                               const std::string& location) {
    if (location.rfind("segment ", 0) != 0) return std::nullopt;
    std::size_t idx = static_cast<std::size_t>(std::strtoull(location.c_str() + 8, nullptr, 10));
    if (idx >= pool.trend.size()) return std::nullopt;
    return idx;
}

FactCheck check_fact(const StructuredFact& f, const std::vector<AttributePool>& pools,
                     const EvolutionTolerances& tol,
                     const std::vector<CorrelationPool>* corr_pools) {
    if (f.kind == "correlated_members" || f.kind == "shared_fluctuation") {
        FactCheck c;
        if (!corr_pools) return c;
        for (const auto& g : *corr_pools) {
            if (g.group_id != f.location) continue;
            if (f.kind == "correlated_members") {
                auto facts = describe::enumerate_facts(g);
                return check_text(f.text, facts.front().text);
            }
            if (!g.shared_fluctuation) return c;
            c = check_text(f.text, std::string(taxonomy::id(*g.shared_fluctuation)));
            c.ok = c.ok && static_cast<std::size_t>(f.value) == g.shared_position;
            return c;
        }
        return c;
    }

    if (f.series_index >= pools.size()) return {};
    const AttributePool& pool = pools[f.series_index];
    double sigma3 = tol.sigma_mult * genpool::noise_sigma(pool.noise);
    auto tol_abs = [&](double truth) { return std::max(tol.relative * std::fabs(truth), sigma3); };

    if (f.kind == "trend_kind" || f.kind == "trend_slope_sign" || f.kind == "trend_start_value" ||
        f.kind == "trend_end_value") {
        auto idx = segment_at_location(pool, f.location);
        if (!idx) return {};
        const auto& seg = pool.trend[*idx];
        if (f.kind == "trend_kind") return check_text(f.text, std::string(taxonomy::id(seg.kind)));
        if (f.kind == "trend_slope_sign") return check_numeric(f.value, seg.slope_sign(), 0.0);
        if (f.kind == "trend_start_value")
            return check_numeric(f.value, seg.start_value, tol_abs(seg.start_value));
        return check_numeric(f.value, seg.end_value(), tol_abs(seg.end_value()));
    }
    if (f.kind == "season_kind") {
        std::string truth = pool.seasonality ? std::string(taxonomy::id(pool.seasonality->kind))
                                             : std::string("none");
        return check_text(f.text, truth);
    }
    if (f.kind == "season_period") {
        if (!pool.seasonality) return {};
        double truth = static_cast<double>(pool.seasonality->period);
        return check_numeric(f.value, truth, tol_abs(truth));
    }
    if (f.kind == "season_amplitude") {
        if (!pool.seasonality) return {};
        return check_numeric(f.value, pool.seasonality->amplitude,
                             tol_abs(pool.seasonality->amplitude));
    }
    if (f.kind == "noise_kind")
        return check_text(f.text, std::string(taxonomy::id(pool.noise.kind)));
    if (f.kind == "noise_scale")
        return check_numeric(f.value, pool.noise.sigma_or_halfwidth,
                             tol_abs(pool.noise.sigma_or_halfwidth));

    if (f.kind.rfind("fluct_", 0) == 0) {
        const auto* fl = fluct_at_location(pool, f.location);
        if (!fl) return {};
        if (f.kind == "fluct_kind") return check_text(f.text, std::string(taxonomy::id(fl->kind)));
        if (f.kind == "fluct_position")
            return check_numeric(f.value, static_cast<double>(fl->position),
                                 tol_abs(static_cast<double>(fl->position)));
        if (f.kind == "fluct_duration")
            return check_numeric(f.value, static_cast<double>(fl->duration),
                                 tol_abs(static_cast<double>(fl->duration)));
        if (f.kind == "fluct_amplitude")
            return check_numeric(f.value, fl->amplitude, tol_abs(fl->amplitude));
    }
    return {}; // unknown kind: unverifiable
}

} // namespace

EliminationVerdict eliminate(const CandidateQA& candidate, const std::vector<AttributePool>& pools,
                             const EvolutionTolerances& tol,
                             const std::vector<CorrelationPool>* corr_pools) {
    EliminationVerdict verdict;
    for (const auto& f : candidate.claimed_facts) {
        FactCheck c = check_fact(f, pools, tol, corr_pools);
        if (c.verifiable && c.ok) continue;
        EliminationReason reason;
        reason.claimed = f;
        reason.truth = c.verifiable ? c.truth : "unverifiable";
        reason.deviation = c.deviation;
        verdict.reasons.push_back(std::move(reason));
    }
    verdict.accepted = verdict.reasons.empty();
    return verdict;
}

std::string task_for_evolution(EvolutionType etype, const std::string& answer) {
    if (etype == EvolutionType::condition_add) {
        auto tokens = split_tokens(answer);
        if (!tokens.empty()) {
            std::string first = to_lower(tokens.front());
            if (first == "true" || first == "false") return "deductive";
        }
    }
    return "inductive";
}

EvolutionRun run_evolution(const std::vector<QARecord>& seeds,
                           const std::vector<AttributePool>& pools,
                           const std::vector<CorrelationPool>& corr_pools, TextGenerator& gen,
                           std::uint64_t master_seed, const EvolutionOptions& options) {
    if (options.rounds < 1) throw std::invalid_argument("run_evolution: rounds must be >= 1");
    std::vector<double> mix = options.mix;
    if (mix.empty()) mix.assign(kAllEvolutionTypes.size(), 1.0);
    if (mix.size() != kAllEvolutionTypes.size())
        throw std::invalid_argument("run_evolution: mix size must match evolution type count");
    double mix_total = 0.0;
    for (double w : mix) mix_total += w;

    EvolutionRun run;
    std::vector<QARecord> current = seeds;

    for (std::size_t round = 1; round <= options.rounds; ++round) {
        struct ItemResult {
            std::optional<QARecord> record;
            std::optional<CandidateQA> candidate;
            std::optional<std::string> error;
            bool rejected = false;
        };
        std::vector<ItemResult> results(current.size());

        auto process = [&](std::size_t idx) {
            const QARecord& seed = current[idx];
            std::uint64_t item_seed = Rng::mix(master_seed, round * 1000003 + idx);
            Rng rng(item_seed);
            double pickw = rng.uniform01() * mix_total;
            std::size_t ei = 0;
            for (; ei + 1 < mix.size(); ++ei) {
                if (pickw < mix[ei]) break;
                pickw -= mix[ei];
            }
            EvolutionType etype = kAllEvolutionTypes[ei];
            try {
                auto injected =
                    inject_attributes(pools, corr_pools.empty() ? nullptr : &corr_pools.front(),
                                      options.inject_count, Rng::mix(item_seed, 17));
                CandidateQA cand =
                    evolve(seed, pools, etype, injected, gen, options.retries, DecodeParams{});
                cand.lineage.round = round;
                auto verdict = eliminate(cand, pools, options.tolerances,
                                         corr_pools.empty() ? nullptr : &corr_pools);
                if (!verdict.accepted) {
                    results[idx].rejected = true;
                    return;
                }
                QARecord rec;
                rec.id = seed.id + "-e" + std::to_string(round);
                rec.task = task_for_evolution(etype, cand.answer);
                rec.question = cand.question;
                rec.answer = cand.answer;
                rec.series_refs = seed.series_refs;
                rec.provenance = (seed.provenance.empty() ? seed.id : seed.provenance) + "|evol:" +
                                 std::string(evolution_name(etype)) + ":r" + std::to_string(round);
                for (const auto& f : cand.claimed_facts) {
                    if (!f.text.empty())
                        rec.gold.keywords.push_back(f.text);
                    else
                        rec.gold.keywords.push_back(format_double(f.value));
                }
                if (rec.task == "deductive") rec.gold.choice = "True";
                results[idx].candidate = std::move(cand);
                results[idx].record = std::move(rec);
            } catch (const EvolutionError& e) {
                results[idx].error = std::string(e.what());
            } catch (const std::exception& e) {
                results[idx].error = std::string(e.what());
            }
        };

        std::size_t workers = std::max<std::size_t>(1, options.in_flight);
        if (workers == 1 || current.size() <= 1) {
            for (std::size_t i = 0; i < current.size(); ++i) process(i);
        } else {
            std::vector<std::thread> threads;
            std::size_t stride = std::min(workers, current.size());
            for (std::size_t w = 0; w < stride; ++w)
                threads.emplace_back([&, w] {
                    for (std::size_t i = w; i < current.size(); i += stride) process(i);
                });
            for (auto& t : threads) t.join();
        }

        std::vector<QARecord> next;
        for (auto& res : results) {
            ++run.stats.attempts;
            if (res.record) {
                ++run.stats.accepted;
                run.records.push_back(*res.record);
                run.accepted_candidates.push_back(std::move(*res.candidate));
                next.push_back(std::move(*res.record));
            } else if (res.rejected) {
                ++run.stats.rejected;
            } else if (res.error) {
                ++run.stats.errors;
                run.error_messages.push_back(*res.error);
            }
        }
        current = std::move(next);
        if (current.empty()) break;
    }
    return run;
}

} // namespace tsqa::tsevol
