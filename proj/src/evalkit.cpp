#include "tsqa/evalkit.hpp"

#include "tsqa/metrics.hpp"
#include "tsqa/prng.hpp"
#include "tsqa/synth.hpp"
#include "tsqa/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace tsqa::evalkit {

using genpool::AttributePool;
using genpool::CorrelationPool;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Synonym table + categorical parsing
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::vector<std::string>>& synonym_table() {
    static std::map<std::string, std::vector<std::string>> table;
    static std::once_flag once;
    std::call_once(once, [] {
        std::ifstream in(taxonomy::default_data_dir() + "/synonyms.csv");
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            std::string label = line.substr(0, comma);
            std::string phrase = line.substr(comma + 1);
            while (!phrase.empty() && (phrase.back() == '\r' || phrase.back() == ' ')) phrase.pop_back();
            if (!label.empty() && !phrase.empty()) table[label].push_back(phrase);
        }
    });
    return table;
}

struct Occurrence {
    std::size_t label_index;
    std::size_t begin;
    std::size_t end;
};

bool word_bounded(const std::string& text, std::size_t begin, std::size_t end) {
    if (begin > 0 && is_word_char(text[begin - 1])) return false;
    if (end < text.size() && is_word_char(text[end])) return false;
    return true;
}

bool negated_before(const std::string& text, std::size_t begin) {
    // Look back a few tokens for a negation word.
    std::size_t lo = begin > 24 ? begin - 24 : 0;
    auto tokens = split_tokens(std::string_view(text).substr(lo, begin - lo));
    std::size_t considered = 0;
    for (auto it = tokens.rbegin(); it != tokens.rend() && considered < 3; ++it, ++considered) {
        if (*it == "no" || *it == "not" || *it == "without" || *it == "lacks" || *it == "lacked")
            return true;
    }
    return false;
}

} // namespace

void load_synonym_table(const std::string& path) {
    auto& table = synonym_table();
    table.clear();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open synonym table: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        std::string label = line.substr(0, comma);
        std::string phrase = line.substr(comma + 1);
        while (!phrase.empty() && (phrase.back() == '\r' || phrase.back() == ' ')) phrase.pop_back();
        if (!label.empty() && !phrase.empty()) table[label].push_back(phrase);
    }
}

Vocabulary make_vocab(const std::vector<std::string>& labels) {
    Vocabulary v;
    v.labels = labels;
    const auto& table = synonym_table();
    for (const auto& label : labels) {
        auto it = table.find(label);
        if (it != table.end()) v.synonyms[label] = it->second;
    }
    return v;
}

std::vector<std::string> parse_categorical(const std::string& answer, const Vocabulary& vocab) {
    std::string text = to_lower(answer);
    std::vector<Occurrence> occurrences;

    auto collect = [&](std::size_t label_index, const std::string& phrase_raw) {
        std::string phrase = to_lower(phrase_raw);
        if (phrase.empty()) return;
        std::size_t pos = text.find(phrase);
        while (pos != std::string::npos) {
            std::size_t end = pos + phrase.size();
            if (word_bounded(text, pos, end)) {
                bool is_none = vocab.labels[label_index] == "none";
                if (is_none || !negated_before(text, pos))
                    occurrences.push_back({label_index, pos, end});
            }
            pos = text.find(phrase, pos + 1);
        }
    };

    for (std::size_t i = 0; i < vocab.labels.size(); ++i) {
        collect(i, vocab.labels[i]);
        auto it = vocab.synonyms.find(vocab.labels[i]);
        if (it != vocab.synonyms.end())
            for (const auto& phrase : it->second) collect(i, phrase);
    }

    // Longest-match suppression: an occurrence strictly inside a different
    // label's occurrence does not count ("sine" within "amplitude modulated
    // sine").
    std::vector<std::string> out;
    for (const auto& label : vocab.labels) {
        bool found = false;
        for (const auto& occ : occurrences) {
            if (vocab.labels[occ.label_index] != label) continue;
            bool shadowed = false;
            for (const auto& other : occurrences) {
                if (other.label_index == occ.label_index) continue;
                bool contains = other.begin <= occ.begin && occ.end <= other.end &&
                                (other.end - other.begin) > (occ.end - occ.begin);
                if (contains) {
                    shadowed = true;
                    break;
                }
            }
            if (!shadowed) {
                found = true;
                break;
            }
        }
        if (found && std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
    }
    return out;
}

std::optional<double> parse_number(const std::string& answer) { return last_number(answer); }

std::vector<std::string> parse_cluster(const std::string& answer,
                                       const std::vector<std::string>& names) {
    std::string text = to_lower(answer);
    // Split into group chunks on sentence boundaries and "group" headers.
    std::vector<std::string> chunks;
    std::string current;
    for (char c : text) {
        if (c == '.' || c == ';' || c == '\n') {
            chunks.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) chunks.push_back(current);

    std::set<std::string> assigned;
    std::vector<std::string> clusters;
    for (const auto& chunk : chunks) {
        std::vector<std::string> members;
        for (const auto& name : names) {
            if (assigned.count(name)) continue;
            std::string lname = to_lower(name);
            std::size_t pos = chunk.find(lname);
            while (pos != std::string::npos) {
                if (word_bounded(chunk, pos, pos + lname.size())) {
                    members.push_back(name);
                    break;
                }
                pos = chunk.find(lname, pos + 1);
            }
        }
        if (members.empty()) continue;
        for (const auto& m : members) assigned.insert(m);
        std::sort(members.begin(), members.end());
        std::string canon;
        for (const auto& m : members) {
            if (!canon.empty()) canon += "+";
            canon += m;
        }
        clusters.push_back(canon);
    }
    std::sort(clusters.begin(), clusters.end());
    return clusters;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double relative_accuracy(std::optional<double> answer, double label, double delta) {
    if (!answer) return 0.0;
    double denom = std::fabs(label);
    if (denom < delta) denom = delta;
    if (denom == 0.0) return *answer == label ? 1.0 : 0.0;
    return std::max(1.0 - std::fabs(*answer - label) / denom, 0.0);
}

double f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
    std::set<std::string> p(predicted.begin(), predicted.end());
    std::set<std::string> g(gold.begin(), gold.end());
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& x : p)
        if (g.count(x)) ++hit;
    if (hit == 0) return 0.0;
    double precision = static_cast<double>(hit) / static_cast<double>(p.size());
    double recall = static_cast<double>(hit) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

ChoiceResult choice_accuracy(const std::string& answer, const std::string& gold_choice) {
    auto tokens = split_tokens(answer);
    for (const auto& tok : tokens) {
        bool letter = tok.size() == 1 && tok[0] >= 'A' && tok[0] <= 'F';
        std::string low = to_lower(tok);
        bool boolean = low == "true" || low == "false";
        if (!letter && !boolean) continue;
        std::string canon = letter ? tok : (low == "true" ? "True" : "False");
        return {canon == gold_choice ? 1 : 0, false};
    }
    return {0, true};
}

double keyword_score(const std::string& answer, const std::vector<std::string>& keywords) {
    if (keywords.empty()) return 0.0;
    auto answer_tokens = split_tokens(to_lower(answer));
    std::size_t matched = 0;
    for (const auto& kw : keywords) {
        auto kw_tokens = split_tokens(to_lower(kw));
        if (kw_tokens.empty()) continue;
        bool hit = false;
        for (std::size_t i = 0; !hit && i + kw_tokens.size() <= answer_tokens.size(); ++i) {
            bool all = true;
            for (std::size_t k = 0; k < kw_tokens.size(); ++k)
                if (!within_edit_distance_one(answer_tokens[i + k], kw_tokens[k])) {
                    all = false;
                    break;
                }
            hit = all;
        }
        if (hit) ++matched;
    }
    return static_cast<double>(matched) / static_cast<double>(keywords.size());
}

// ---------------------------------------------------------------------------
// Scoring + runner
// ---------------------------------------------------------------------------

namespace {

Vocabulary vocab_for_task(const Record& record) {
    const std::string& task = record.qa.task;
    if (task == "trend") return make_vocab(taxonomy::trend_vocab());
    if (task == "season") return make_vocab(taxonomy::season_vocab(true));
    if (task == "noise") return make_vocab(taxonomy::noise_vocab());
    if (task == "local") return make_vocab(taxonomy::fluctuation_vocab(true));
    // correlation: vocabulary is the record's series names
    std::vector<std::string> names;
    for (const auto& e : record.series) names.push_back(e.name);
    return make_vocab(names);
}

} // namespace

ItemRow score_record(const Record& record, const std::string& answer) {
    ItemRow row;
    row.id = record.qa.id;
    row.task = record.qa.task;
    const std::string& task = record.qa.task;

    if (describe::is_categorical_task(task)) {
        row.metric = "f1";
        if (task == "cluster") {
            std::vector<std::string> names;
            for (const auto& e : record.series) names.push_back(e.name);
            row.score = f1(parse_cluster(answer, names), record.qa.gold.labels);
        } else {
            row.score = f1(parse_categorical(answer, vocab_for_task(record)), record.qa.gold.labels);
        }
    } else if (describe::is_numeric_task(task)) {
        row.metric = "rel_acc";
        if (!record.qa.gold.value) {
            row.failure = "missing_gold";
        } else {
            auto v = parse_number(answer);
            if (!v) row.failure = "no_numeral";
            row.score = relative_accuracy(v, *record.qa.gold.value, record.qa.gold.delta);
        }
    } else if (describe::is_choice_task(task)) {
        row.metric = "choice";
        if (!record.qa.gold.choice) {
            row.failure = "missing_gold";
        } else {
            auto cr = choice_accuracy(answer, *record.qa.gold.choice);
            row.score = cr.score;
            if (cr.unparseable) row.failure = "unparseable";
        }
    } else {
        row.metric = "keyword";
        row.score = keyword_score(answer, record.qa.gold.keywords);
        if (record.qa.gold.keywords.empty()) row.failure = "missing_gold";
    }
    return row;
}

std::string inline_prompt_text(const Record& record) {
    std::string out;
    for (const auto& seg : record.prompt.segments) {
        if (!seg.is_series) {
            out += seg.text;
            continue;
        }
        const auto& e = record.series[seg.series_index];
        out += "values: [";
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            if (i) out += ", ";
            out += format_double(e.values[i]);
        }
        out += "]";
    }
    return out;
}

EvalReport run_benchmark(const Corpus& corpus, ModelUnderTest& model, std::size_t in_flight) {
    struct Outcome {
        ModelAnswer answer;
        std::string error;
    };
    std::vector<Outcome> outcomes(corpus.records.size());

    auto process = [&](std::size_t i) {
        QAInstance item;
        item.record = &corpus.records[i];
        item.prompt_text = inline_prompt_text(corpus.records[i]);
        try {
            outcomes[i].answer = model.answer(item);
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
        if (outcomes[i].answer.prompt_tokens == 0)
            outcomes[i].answer.prompt_tokens = whitespace_token_count(item.prompt_text);
        if (outcomes[i].answer.answer_tokens == 0)
            outcomes[i].answer.answer_tokens = whitespace_token_count(outcomes[i].answer.text);
    };

    std::size_t workers = std::max<std::size_t>(1, in_flight);
    if (workers == 1 || corpus.records.size() <= 1) {
        for (std::size_t i = 0; i < corpus.records.size(); ++i) process(i);
    } else {
        std::vector<std::thread> threads;
        std::size_t stride = std::min(workers, corpus.records.size());
        for (std::size_t w = 0; w < stride; ++w)
            threads.emplace_back([&, w] {
                for (std::size_t i = w; i < corpus.records.size(); i += stride) process(i);
            });
        for (auto& t : threads) t.join();
    }

    EvalReport report;
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        const Record& record = corpus.records[i];
        ItemRow row;
        if (!outcomes[i].error.empty()) {
            row.id = record.qa.id;
            row.task = record.qa.task;
            row.metric = describe::is_categorical_task(record.qa.task) ? "f1"
                         : describe::is_numeric_task(record.qa.task)   ? "rel_acc"
                         : describe::is_choice_task(record.qa.task)    ? "choice"
                                                                       : "keyword";
            row.score = 0.0;
            row.failure = "model_error";
        } else {
            row = score_record(record, outcomes[i].answer.text);
        }
        row.prompt_tokens = outcomes[i].answer.prompt_tokens;
        row.answer_tokens = outcomes[i].answer.answer_tokens;
        report.rows.push_back(row);
    }

    for (const auto& row : report.rows) {
        auto& agg = report.per_task[row.task];
        agg.metric = row.metric;
        agg.mean_score = (agg.mean_score * static_cast<double>(agg.count) + row.score) /
                         static_cast<double>(agg.count + 1);
        ++agg.count;
        report.total_prompt_tokens += row.prompt_tokens;
        report.total_answer_tokens += row.answer_tokens;
        if (!row.failure.empty()) ++report.failures_by_cause[row.failure];
        if (row.metric == "f1") {
            report.overall_categorical_f1 += row.score;
            ++report.categorical_count;
        } else if (row.metric == "rel_acc") {
            report.overall_numeric_accuracy += row.score;
            ++report.numeric_count;
        } else if (row.metric == "choice") {
            report.overall_choice_accuracy += row.score;
            ++report.choice_count;
        } else {
            report.overall_keyword_score += row.score;
            ++report.keyword_count;
        }
    }
    if (report.categorical_count) report.overall_categorical_f1 /= static_cast<double>(report.categorical_count);
    if (report.numeric_count) report.overall_numeric_accuracy /= static_cast<double>(report.numeric_count);
    if (report.choice_count) report.overall_choice_accuracy /= static_cast<double>(report.choice_count);
    if (report.keyword_count) report.overall_keyword_score /= static_cast<double>(report.keyword_count);
    return report;
}

void write_report_json(const EvalReport& report, const std::string& path) {
    json j;
    j["overall"] = {{"categorical_f1", report.overall_categorical_f1},
                    {"categorical_count", report.categorical_count},
                    {"numeric_relative_accuracy", report.overall_numeric_accuracy},
                    {"numeric_count", report.numeric_count},
                    {"choice_accuracy", report.overall_choice_accuracy},
                    {"choice_count", report.choice_count},
                    {"keyword_score", report.overall_keyword_score},
                    {"keyword_count", report.keyword_count},
                    {"prompt_tokens", report.total_prompt_tokens},
                    {"answer_tokens", report.total_answer_tokens},
                    {"token_counting", "whitespace-token proxy"}};
    j["per_task"] = json::object();
    for (const auto& [task, agg] : report.per_task)
        j["per_task"][task] = {{"metric", agg.metric}, {"mean", agg.mean_score}, {"count", agg.count}};
    j["failures"] = json::object();
    for (const auto& [cause, count] : report.failures_by_cause) j["failures"][cause] = count;
    j["rows"] = json::array();
    for (const auto& row : report.rows)
        j["rows"].push_back({{"id", row.id},
                             {"task", row.task},
                             {"metric", row.metric},
                             {"score", row.score},
                             {"prompt_tokens", row.prompt_tokens},
                             {"answer_tokens", row.answer_tokens},
                             {"failure", row.failure}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "task,metric,mean_score,count\n";
    for (const auto& [task, agg] : report.per_task)
        out << task << "," << agg.metric << "," << format_double(agg.mean_score) << "," << agg.count
            << "\n";
    out << "overall.categorical,f1," << format_double(report.overall_categorical_f1) << ","
        << report.categorical_count << "\n";
    out << "overall.numeric,rel_acc," << format_double(report.overall_numeric_accuracy) << ","
        << report.numeric_count << "\n";
    out << "overall.choice,choice," << format_double(report.overall_choice_accuracy) << ","
        << report.choice_count << "\n";
    out << "overall.keyword,keyword," << format_double(report.overall_keyword_score) << ","
        << report.keyword_count << "\n";
    out << "overall.tokens,prompt," << report.total_prompt_tokens << ",\n";
    out << "overall.tokens,answer," << report.total_answer_tokens << ",\n";
}

// ---------------------------------------------------------------------------
// Perfect tools
// ---------------------------------------------------------------------------

std::string_view tool_name(ToolKind kind) {
    switch (kind) {
    case ToolKind::trend: return "trend";
    case ToolKind::seasonality: return "seasonality";
    case ToolKind::fluctuation: return "fluctuation";
    case ToolKind::correlation: return "correlation";
    case ToolKind::point_value: return "point_value";
    case ToolKind::range_stats: return "range_stats";
    }
    return "trend";
}

namespace {

double perturb(double v, std::uint64_t seed, std::uint64_t salt) {
    double u = 0.2 + 0.6 * Rng::uniform01_at(seed, salt);          // 20..80%
    bool up = Rng::uniform01_at(seed, salt + 1) < 0.5;
    double base = v == 0.0 ? 1.0 : v;
    return v + (up ? u : -u) * std::fabs(base);
}

} // namespace

ToolAnswer perfect_tool(const ToolQuery& query, const std::vector<AttributePool>& pools,
                        const std::vector<CorrelationPool>& groups, double accuracy,
                        std::uint64_t seed) {
    if (query.series_index >= pools.size() && query.kind != ToolKind::correlation)
        throw std::invalid_argument("perfect_tool: unknown series index " +
                                    std::to_string(query.series_index));

    ToolAnswer answer;
    answer.truthful = Rng::uniform01_at(Rng::mix(seed, 0xACC0), 0) < accuracy;
    const AttributePool* pool = query.series_index < pools.size() ? &pools[query.series_index] : nullptr;

    auto corrupt_num = [&](double v, std::uint64_t salt) {
        return answer.truthful ? v : perturb(v, seed, salt);
    };

    switch (query.kind) {
    case ToolKind::trend: {
        json segs = json::array();
        std::uint64_t salt = 100;
        for (const auto& seg : pool->trend) {
            taxonomy::TrendKind kind = seg.kind;
            if (!answer.truthful) {
                std::size_t t = static_cast<std::size_t>(kind);
                std::size_t offset = 1 + Rng::mix(seed, salt) % (taxonomy::kTrendCount - 1);
                kind = static_cast<taxonomy::TrendKind>((t + offset) % taxonomy::kTrendCount);
            }
            segs.push_back({{"kind", std::string(taxonomy::id(kind))},
                            {"start_idx", seg.start_idx},
                            {"end_idx", seg.end_idx},
                            {"start_value", corrupt_num(seg.start_value, salt + 1)},
                            {"end_value", corrupt_num(seg.end_value(), salt + 3)}});
            salt += 10;
        }
        answer.payload = {{"segments", segs}};
        break;
    }
    case ToolKind::seasonality: {
        if (!pool->seasonality) {
            if (answer.truthful) {
                answer.payload = {{"kind", "none"}};
            } else {
                std::size_t period = 16 + Rng::mix(seed, 7) % 48;
                answer.payload = {{"kind", "sine"}, {"period", period}, {"amplitude", 1.0}};
            }
        } else {
            const auto& s = *pool->seasonality;
            taxonomy::SeasonKind kind = s.kind;
            if (!answer.truthful) {
                std::size_t t = static_cast<std::size_t>(kind);
                std::size_t offset = 1 + Rng::mix(seed, 9) % (taxonomy::kSeasonCount - 1);
                kind = static_cast<taxonomy::SeasonKind>((t + offset) % taxonomy::kSeasonCount);
            }
            answer.payload = {{"kind", std::string(taxonomy::id(kind))},
                              {"period", static_cast<std::size_t>(std::llround(
                                             std::max(2.0, corrupt_num(static_cast<double>(s.period), 11))))},
                              {"amplitude", corrupt_num(s.amplitude, 13)}};
        }
        break;
    }
    case ToolKind::fluctuation: {
        json items = json::array();
        std::uint64_t salt = 300;
        for (const auto& f : pool->fluctuations) {
            taxonomy::FluctuationKind kind = f.kind;
            if (!answer.truthful) {
                std::size_t t = static_cast<std::size_t>(kind);
                std::size_t offset = 1 + Rng::mix(seed, salt) % (taxonomy::kFluctuationCount - 1);
                kind = static_cast<taxonomy::FluctuationKind>((t + offset) % taxonomy::kFluctuationCount);
            }
            double pos = static_cast<double>(f.position);
            if (!answer.truthful)
                pos = std::clamp(perturb(pos, seed, salt + 1), 0.0,
                                 static_cast<double>(pool->length - 1));
            items.push_back({{"kind", std::string(taxonomy::id(kind))},
                             {"position", static_cast<std::size_t>(std::llround(pos))},
                             {"duration", f.duration},
                             {"amplitude", corrupt_num(f.amplitude, salt + 3)}});
            salt += 10;
        }
        if (!answer.truthful && pool->fluctuations.empty())
            items.push_back({{"kind", "upward spike"},
                             {"position", pool->length / 2},
                             {"duration", 1},
                             {"amplitude", 1.0}});
        answer.payload = {{"fluctuations", items}};
        break;
    }
    case ToolKind::correlation: {
        json out_groups = json::array();
        for (const auto& g : groups) {
            std::vector<std::string> members = g.member_names;
            if (!answer.truthful && !members.empty()) {
                // Drop one member, or swap one in from outside the group.
                bool drop = Rng::uniform01_at(Rng::mix(seed, 0xC0), 1) < 0.5 || pools.empty();
                if (drop && members.size() > 1) {
                    members.erase(members.begin() +
                                  static_cast<std::ptrdiff_t>(Rng::mix(seed, 0xC1) % members.size()));
                } else {
                    for (const auto& p : pools) {
                        if (std::find(members.begin(), members.end(), p.metric.name) ==
                            members.end()) {
                            members.push_back(p.metric.name);
                            break;
                        }
                    }
                }
            }
            out_groups.push_back(
                {{"kind", g.kind == genpool::CorrelationKind::shape ? "shape" : "local"},
                 {"members", members}});
        }
        answer.payload = {{"groups", out_groups}};
        break;
    }
    case ToolKind::point_value: {
        auto values = synth::render(*pool).values;
        std::size_t t = std::min(query.point, values.size() - 1);
        answer.payload = {{"t", t}, {"value", corrupt_num(values[t], 17)}};
        break;
    }
    case ToolKind::range_stats: {
        auto values = synth::render(*pool).values;
        std::size_t lo = std::min(query.range_lo, values.size() - 1);
        std::size_t hi = query.range_hi == 0 ? values.size() : std::min(query.range_hi, values.size());
        if (hi <= lo) hi = lo + 1;
        double mn = 1e300, mx = -1e300, sum = 0.0;
        for (std::size_t t = lo; t < hi; ++t) {
            mn = std::min(mn, values[t]);
            mx = std::max(mx, values[t]);
            sum += values[t];
        }
        double mean = sum / static_cast<double>(hi - lo);
        taxonomy::NoiseKind nkind = pool->noise.kind;
        if (!answer.truthful) {
            std::size_t t = static_cast<std::size_t>(nkind);
            std::size_t offset = 1 + Rng::mix(seed, 19) % (taxonomy::kNoiseCount - 1);
            nkind = static_cast<taxonomy::NoiseKind>((t + offset) % taxonomy::kNoiseCount);
        }
        answer.payload = {{"lo", lo},
                          {"hi", hi},
                          {"min", corrupt_num(mn, 21)},
                          {"max", corrupt_num(mx, 23)},
                          {"mean", corrupt_num(mean, 25)},
                          {"noise_kind", std::string(taxonomy::id(nkind))},
                          {"noise_scale", corrupt_num(pool->noise.sigma_or_halfwidth, 27)}};
        break;
    }
    }
    return answer;
}

// ---------------------------------------------------------------------------
// Scripted tool answerer
// ---------------------------------------------------------------------------

ToolAnswerer::ToolAnswerer(double accuracy, std::set<ToolKind> enabled_tools, std::uint64_t seed)
    : accuracy_(accuracy), enabled_(std::move(enabled_tools)), seed_(seed) {}

ToolAnswer ToolAnswerer::call(const ToolQuery& query, const Record& record, std::uint64_t call_salt) {
    std::vector<AttributePool> pools;
    for (const auto& e : record.series) pools.push_back(e.pool);
    std::uint64_t id_hash = 1469598103934665603ULL;
    for (char c : record.qa.id) id_hash = (id_hash ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    ToolAnswer ans = perfect_tool(query, pools, record.correlation_pools, accuracy_,
                                  Rng::mix(seed_, Rng::mix(id_hash, call_salt)));
    ++calls_;
    if (ans.truthful) ++truthful_;
    return ans;
}

ModelAnswer ToolAnswerer::answer(const QAInstance& item) {
    const Record& record = *item.record;
    const std::string& task = record.qa.task;

    ToolKind needed;
    if (task == "trend") needed = ToolKind::trend;
    else if (task == "season" || task == "numeric.period") needed = ToolKind::seasonality;
    else if (task == "noise" || task == "numeric.max" || task == "numeric.min" ||
             task == "numeric.segment_avg") needed = ToolKind::range_stats;
    else if (task == "numeric.value_at") needed = ToolKind::point_value;
    else if (task == "local" || task == "numeric.fluct_amplitude" ||
             task == "numeric.fluct_position") needed = ToolKind::fluctuation;
    else if (task == "correlation" || task == "cluster") needed = ToolKind::correlation;
    else return {"unknown", 0, 0};

    if (!enabled_.count(needed)) return {"unknown", 0, 0};

    ToolQuery q;
    q.kind = needed;
    auto question_numbers = extract_numbers(record.qa.question);

    if (task == "trend") {
        ToolAnswer ans = call(q, record, 1);
        std::vector<std::string> kinds;
        for (const auto& seg : ans.payload.at("segments")) {
            std::string k = seg.at("kind").get<std::string>();
            if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
        }
        std::string body;
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            if (i) body += i + 1 == kinds.size() ? " and " : ", ";
            body += kinds[i];
        }
        return {"The trend tool reports: " + body + ".", 0, 0};
    }
    if (task == "season") {
        ToolAnswer ans = call(q, record, 2);
        std::string kind = ans.payload.at("kind").get<std::string>();
        if (kind == "none") return {"The seasonality tool reports no periodicity.", 0, 0};
        return {"The seasonality tool reports a " + kind + " pattern with period " +
                    std::to_string(ans.payload.at("period").get<std::size_t>()) + ".",
                0, 0};
    }
    if (task == "numeric.period") {
        ToolAnswer ans = call(q, record, 3);
        if (ans.payload.at("kind").get<std::string>() == "none")
            return {"The seasonality tool reports no periodicity.", 0, 0};
        return {"The seasonal period is " +
                    std::to_string(ans.payload.at("period").get<std::size_t>()) + ".",
                0, 0};
    }
    if (task == "noise") {
        ToolAnswer ans = call(q, record, 4);
        std::string kind = ans.payload.at("noise_kind").get<std::string>();
        if (kind == "none") return {"The stats tool reports the series is noise-free.", 0, 0};
        return {"The stats tool reports " + kind + " noise with scale " +
                    format_double(ans.payload.at("noise_scale").get<double>()) + ".",
                0, 0};
    }
    if (task == "numeric.max" || task == "numeric.min") {
        ToolAnswer ans = call(q, record, 5);
        double v = ans.payload.at(task == "numeric.max" ? "max" : "min").get<double>();
        return {std::string("The ") + (task == "numeric.max" ? "maximum" : "minimum") +
                    " value reported by the stats tool is " + format_double(v) + ".",
                0, 0};
    }
    if (task == "numeric.segment_avg") {
        if (question_numbers.size() >= 2) {
            q.range_lo = static_cast<std::size_t>(question_numbers[question_numbers.size() - 2]);
            q.range_hi = static_cast<std::size_t>(question_numbers.back());
        }
        ToolAnswer ans = call(q, record, 6);
        return {"The mean over the requested range is " +
                    format_double(ans.payload.at("mean").get<double>()) + ".",
                0, 0};
    }
    if (task == "numeric.value_at") {
        if (!question_numbers.empty())
            q.point = static_cast<std::size_t>(question_numbers.back());
        ToolAnswer ans = call(q, record, 7);
        return {"The point tool reports the value " +
                    format_double(ans.payload.at("value").get<double>()) + ".",
                0, 0};
    }
    if (task == "local") {
        ToolAnswer ans = call(q, record, 8);
        const auto& items = ans.payload.at("fluctuations");
        if (items.empty()) return {"The fluctuation tool reports no local fluctuations.", 0, 0};
        std::string body;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) body += "; ";
            body += "a " + items[i].at("kind").get<std::string>() + " at position " +
                    std::to_string(items[i].at("position").get<std::size_t>());
        }
        return {"The fluctuation tool reports: " + body + ".", 0, 0};
    }
    if (task == "numeric.fluct_amplitude") {
        ToolAnswer ans = call(q, record, 9);
        const auto& items = ans.payload.at("fluctuations");
        if (items.empty() || question_numbers.empty())
            return {"The fluctuation tool reports nothing at that position.", 0, 0};
        std::size_t want = static_cast<std::size_t>(question_numbers.back());
        double best_amp = items[0].at("amplitude").get<double>();
        std::size_t best_gap = static_cast<std::size_t>(-1);
        for (const auto& it : items) {
            std::size_t pos = it.at("position").get<std::size_t>();
            std::size_t gap = pos > want ? pos - want : want - pos;
            if (gap < best_gap) {
                best_gap = gap;
                best_amp = it.at("amplitude").get<double>();
            }
        }
        return {"The amplitude reported by the fluctuation tool is " + format_double(best_amp) + ".",
                0, 0};
    }
    if (task == "numeric.fluct_position") {
        ToolAnswer ans = call(q, record, 10);
        const auto& items = ans.payload.at("fluctuations");
        std::string qlow = to_lower(record.qa.question);
        for (const auto& it : items) {
            std::string kind = it.at("kind").get<std::string>();
            if (qlow.find(to_lower(kind)) != std::string::npos)
                return {"The " + kind + " starts at position " +
                            std::to_string(it.at("position").get<std::size_t>()) + ".",
                        0, 0};
        }
        if (!items.empty())
            return {"The fluctuation starts at position " +
                        std::to_string(items[0].at("position").get<std::size_t>()) + ".",
                    0, 0};
        return {"The fluctuation tool reports no local fluctuations.", 0, 0};
    }
    // correlation | cluster
    ToolAnswer ans = call(q, record, 11);
    const auto& out_groups = ans.payload.at("groups");
    if (task == "correlation") {
        if (out_groups.empty()) return {"The correlation tool reports no related metrics.", 0, 0};
        auto members = out_groups[0].at("members").get<std::vector<std::string>>();
        std::string body;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) body += i + 1 == members.size() ? " and " : ", ";
            body += members[i];
        }
        return {"The correlation tool reports these related metrics: " + body + ".", 0, 0};
    }
    std::set<std::string> grouped;
    std::vector<std::vector<std::string>> clusters;
    for (const auto& g : out_groups) {
        auto members = g.at("members").get<std::vector<std::string>>();
        std::sort(members.begin(), members.end());
        for (const auto& m : members) grouped.insert(m);
        clusters.push_back(std::move(members));
    }
    for (const auto& e : record.series)
        if (!grouped.count(e.name)) clusters.push_back({e.name});
    std::sort(clusters.begin(), clusters.end());
    std::string body;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        std::string joined;
        for (const auto& m : clusters[i]) {
            if (!joined.empty()) joined += ", ";
            joined += m;
        }
        body += "Group " + std::to_string(i + 1) + ": " + joined + ". ";
    }
    if (!body.empty()) body.pop_back();
    return {body, 0, 0};
}

// ---------------------------------------------------------------------------
// Pool-echo oracle
// ---------------------------------------------------------------------------

ModelAnswer PoolEchoOracle::answer(const QAInstance& item) {
    const Record& record = *item.record;
    const std::string& task = record.qa.task;
    // Evolved items carry fact mentions verbatim in their stored answer.
    if (record.qa.provenance.find("|evol:") != std::string::npos)
        return {record.qa.answer, 0, 0};
    if (record.series.empty() && task != "instruct_follow") return {record.qa.answer, 0, 0};
    auto question_numbers = extract_numbers(record.qa.question);

    auto raw_series = [&](std::size_t idx) {
        synth::NormalizedSeries n;
        const auto& e = record.series[idx];
        n.metric_name = e.name;
        n.values = e.values;
        n.value_scaling = e.value_scaling;
        n.value_offset = e.value_offset;
        return synth::denormalize(n);
    };

    if (task == "trend" || task == "season" || task == "noise" || task == "local") {
        const auto& pool = record.series.front().pool;
        auto labels = describe::category_labels(pool, task);
        if (task == "season" && labels == std::vector<std::string>{"none"})
            return {"Looking at the data, there is no periodicity here.", 0, 0};
        if (task == "noise" && labels == std::vector<std::string>{"none"})
            return {"The series looks smooth and noise-free.", 0, 0};
        if (task == "local" && labels == std::vector<std::string>{"none"})
            return {"There are no local fluctuations in this series.", 0, 0};
        std::string body;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) body += i + 1 == labels.size() ? " and " : ", ";
            body += labels[i];
        }
        return {"Observed: " + body + ".", 0, 0};
    }

    if (task == "correlation") {
        const auto& g = record.correlation_pools.front();
        std::string body;
        for (std::size_t i = 0; i < g.member_names.size(); ++i) {
            if (i) body += i + 1 == g.member_names.size() ? " and " : ", ";
            body += g.member_names[i];
        }
        return {"The metrics sharing the relation are: " + body + ".", 0, 0};
    }
    if (task == "cluster") {
        std::set<std::string> grouped;
        std::vector<std::vector<std::string>> clusters;
        for (const auto& g : record.correlation_pools) {
            auto members = g.member_names;
            std::sort(members.begin(), members.end());
            for (const auto& m : members) grouped.insert(m);
            clusters.push_back(std::move(members));
        }
        for (const auto& e : record.series)
            if (!grouped.count(e.name)) clusters.push_back({e.name});
        std::sort(clusters.begin(), clusters.end());
        std::string body;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            std::string joined;
            for (const auto& m : clusters[i]) {
                if (!joined.empty()) joined += ", ";
                joined += m;
            }
            body += "Group " + std::to_string(i + 1) + ": " + joined + ". ";
        }
        if (!body.empty()) body.pop_back();
        return {body, 0, 0};
    }

    if (describe::is_numeric_task(task)) {
        const auto& pool = record.series.front().pool;
        synth::TimeSeries raw = raw_series(0);
        double value = 0.0;
        if (task == "numeric.max") {
            value = *std::max_element(raw.values.begin(), raw.values.end());
        } else if (task == "numeric.min") {
            value = *std::min_element(raw.values.begin(), raw.values.end());
        } else if (task == "numeric.value_at") {
            std::size_t t = question_numbers.empty()
                                ? 0
                                : static_cast<std::size_t>(question_numbers.back());
            value = raw.values[std::min(t, raw.values.size() - 1)];
        } else if (task == "numeric.segment_avg") {
            std::size_t a = 0, b = raw.values.size();
            if (question_numbers.size() >= 2) {
                a = static_cast<std::size_t>(question_numbers[question_numbers.size() - 2]);
                b = static_cast<std::size_t>(question_numbers.back());
            }
            b = std::min(b, raw.values.size());
            if (a >= b) a = 0;
            double sum = 0.0;
            for (std::size_t t = a; t < b; ++t) sum += raw.values[t];
            value = sum / static_cast<double>(b - a);
        } else if (task == "numeric.fluct_amplitude") {
            std::size_t want = question_numbers.empty()
                                   ? 0
                                   : static_cast<std::size_t>(question_numbers.back());
            for (const auto& f : pool.fluctuations)
                if (f.position == want) value = f.amplitude;
        } else if (task == "numeric.fluct_position") {
            std::string qlow = to_lower(record.qa.question);
            for (const auto& f : pool.fluctuations)
                if (qlow.find(to_lower(std::string(taxonomy::id(f.kind)))) != std::string::npos) {
                    value = static_cast<double>(f.position);
                    break;
                }
        } else if (task == "numeric.period") {
            if (pool.seasonality) value = static_cast<double>(pool.seasonality->period);
        }
        return {"Reading it off the data, the requested quantity is " + format_double(value) + ".",
                0, 0};
    }

    if (task == "deductive") {
        synth::TimeSeries raw = raw_series(0);
        double mx = *std::max_element(raw.values.begin(), raw.values.end());
        bool holds = !question_numbers.empty() && mx > question_numbers.back();
        return {std::string(holds ? "True" : "False") + ", based on the series maximum.", 0, 0};
    }
    if (task == "comparison") {
        if (record.series.size() < 2) return {"unknown", 0, 0};
        synth::TimeSeries a = raw_series(0), b = raw_series(1);
        std::string qlow = to_lower(record.qa.question);
        double va, vb;
        if (qlow.find("average") != std::string::npos) {
            double sa = 0, sb = 0;
            for (double v : a.values) sa += v;
            for (double v : b.values) sb += v;
            va = sa / static_cast<double>(a.values.size());
            vb = sb / static_cast<double>(b.values.size());
        } else if (qlow.find("range") != std::string::npos) {
            auto [amn, amx] = std::minmax_element(a.values.begin(), a.values.end());
            auto [bmn, bmx] = std::minmax_element(b.values.begin(), b.values.end());
            va = *amx - *amn;
            vb = *bmx - *bmn;
        } else {
            va = *std::max_element(a.values.begin(), a.values.end());
            vb = *std::max_element(b.values.begin(), b.values.end());
        }
        return {std::string(va > vb ? "A" : "B") + ", judging from the data.", 0, 0};
    }
    if (task == "causal") {
        return {record.qa.gold.choice.value_or("A") + std::string(") as the most likely cause."), 0,
                0};
    }
    if (task == "inductive") {
        const auto& pool = record.series.front().pool;
        return {describe::describe(pool).text, 0, 0};
    }
    // instruct_follow and evolved free-form tasks: echo the stored answer.
    return {record.qa.answer, 0, 0};
}

} // namespace tsqa::evalkit
