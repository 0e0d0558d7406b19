#pragma once

#include "tsqa/datasets.hpp"

#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tsqa::evalkit {

using datasets::Corpus;
using datasets::Record;

// ---------------------------------------------------------------------------
// Answer parsing
// ---------------------------------------------------------------------------

// Label vocabulary plus synonym phrases (loaded from an editable data file).
struct Vocabulary {
    std::vector<std::string> labels;
    std::map<std::string, std::vector<std::string>> synonyms; // label -> phrases
};

// Builds a vocabulary for `labels`, attaching synonyms from the shipped
// synonyms table (data/synonyms.csv by default).
Vocabulary make_vocab(const std::vector<std::string>& labels);
void load_synonym_table(const std::string& path); // replaces the global table

// Rule-based label matching: word-boundary, case-insensitive, with negation
// lookback ("no", "not", "without" suppress a following label) and
// longest-match suppression (a label inside a longer matched label does not
// count separately).
std::vector<std::string> parse_categorical(const std::string& answer, const Vocabulary& vocab);

// Final numeral in the answer; nullopt when no numeral appears.
std::optional<double> parse_number(const std::string& answer);

// Partition parse for cluster answers: sentences/lines group the names.
std::vector<std::string> parse_cluster(const std::string& answer,
                                       const std::vector<std::string>& names);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

// max(1 - |answer - label| / |label|, 0); near-zero labels measured against
// delta instead. Missing answers score 0.
double relative_accuracy(std::optional<double> answer, double label, double delta = 0.0);

// Set F1; both sets empty scores 1, exactly one empty scores 0.
double f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

struct ChoiceResult {
    int score = 0;
    bool unparseable = false;
};

// First standalone option token (A-F or True/False) against the gold choice.
ChoiceResult choice_accuracy(const std::string& answer, const std::string& gold_choice);

// Fraction of keywords fuzzy-found in the answer (case-insensitive,
// per-token edit distance <= 1).
double keyword_score(const std::string& answer, const std::vector<std::string>& keywords);

// ---------------------------------------------------------------------------
// Benchmark runner
// ---------------------------------------------------------------------------

struct QAInstance {
    const Record* record = nullptr;
    std::string prompt_text; // series inlined as text
};

struct ModelAnswer {
    std::string text;
    std::size_t prompt_tokens = 0; // 0 = let the runner fill the proxy count
    std::size_t answer_tokens = 0;
};

class ModelUnderTest {
public:
    virtual ~ModelUnderTest() = default;
    virtual ModelAnswer answer(const QAInstance& item) = 0;
};

struct ItemRow {
    std::string id;
    std::string task;
    std::string metric; // f1 | rel_acc | choice | keyword
    double score = 0.0;
    std::size_t prompt_tokens = 0;
    std::size_t answer_tokens = 0;
    std::string failure; // empty = ok
};

struct TaskAggregate {
    std::size_t count = 0;
    double mean_score = 0.0;
    std::string metric;
};

struct EvalReport {
    std::vector<ItemRow> rows;
    std::map<std::string, TaskAggregate> per_task;
    double overall_categorical_f1 = 0.0;
    std::size_t categorical_count = 0;
    double overall_numeric_accuracy = 0.0;
    std::size_t numeric_count = 0;
    double overall_choice_accuracy = 0.0;
    std::size_t choice_count = 0;
    double overall_keyword_score = 0.0;
    std::size_t keyword_count = 0;
    std::size_t total_prompt_tokens = 0; // whitespace-token proxy
    std::size_t total_answer_tokens = 0;
    std::map<std::string, std::size_t> failures_by_cause;
};

// Scores one answered record; exposed so reports can be recomputed.
ItemRow score_record(const Record& record, const std::string& answer);

// Renders the text-inlined prompt a baseline model sees.
std::string inline_prompt_text(const Record& record);

// Dispatches every record, scores by task kind, aggregates in record order
// regardless of completion order. Per-item model errors score 0 and the run
// continues.
EvalReport run_benchmark(const Corpus& corpus, ModelUnderTest& model, std::size_t in_flight = 1);

void write_report_json(const EvalReport& report, const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);

// ---------------------------------------------------------------------------
// Perfect tools with controlled accuracy
// ---------------------------------------------------------------------------

enum class ToolKind : std::uint8_t { trend, seasonality, fluctuation, correlation, point_value, range_stats };

std::string_view tool_name(ToolKind kind);

struct ToolQuery {
    ToolKind kind = ToolKind::trend;
    std::size_t series_index = 0;
    std::size_t point = 0;    // point_value
    std::size_t range_lo = 0; // range_stats
    std::size_t range_hi = 0; // 0 = full length
};

struct ToolAnswer {
    bool truthful = false; // audit flag: which branch fired
    nlohmann::ordered_json payload;
};

// Answers from pool ground truth with probability `accuracy`; otherwise
// returns a plausible corruption (wrong kind from the same category, numerics
// perturbed by 20-100%). Deterministic given seed.
ToolAnswer perfect_tool(const ToolQuery& query, const std::vector<genpool::AttributePool>& pools,
                        const std::vector<genpool::CorrelationPool>& groups, double accuracy,
                        std::uint64_t seed);

// Scripted reference model that answers alignment questions solely through
// perfect_tool calls over the enabled tools; questions needing a disabled
// tool are answered "unknown".
class ToolAnswerer : public ModelUnderTest {
public:
    ToolAnswerer(double accuracy, std::set<ToolKind> enabled_tools, std::uint64_t seed);
    ModelAnswer answer(const QAInstance& item) override;

    std::size_t tool_calls() const { return calls_.load(); }
    std::size_t truthful_calls() const { return truthful_.load(); }

private:
    ToolAnswer call(const ToolQuery& query, const Record& record, std::uint64_t call_salt);
    double accuracy_;
    std::set<ToolKind> enabled_;
    std::uint64_t seed_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> truthful_{0};
};

// Reference model that recomputes answers from the record's embedded pools
// and series; bounds the harness's own parsing loss.
class PoolEchoOracle : public ModelUnderTest {
public:
    ModelAnswer answer(const QAInstance& item) override;
};

// Degenerate baseline for calibration tests.
class ConstantModel : public ModelUnderTest {
public:
    explicit ConstantModel(std::string text) : text_(std::move(text)) {}
    ModelAnswer answer(const QAInstance&) override { return {text_, 0, 0}; }

private:
    std::string text_;
};

} // namespace tsqa::evalkit
