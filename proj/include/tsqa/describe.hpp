#pragma once

#include "tsqa/attributes.hpp"
#include "tsqa/synth.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tsqa::describe {

using genpool::AttributePool;
using genpool::CorrelationPool;
using synth::TimeSeries;

// One checkable statement about a pool. Numeric facts carry `value`;
// categorical facts carry `text`. `location` pins the fact to a segment or
// window so a claim can be matched against the right attribute.
struct StructuredFact {
    std::string kind;          // trend_kind, season_period, fluct_amplitude, ...
    double value = 0.0;
    std::string text;
    std::string units;
    std::string location;      // "segment 1", "t=100", "" for global facts
    std::size_t series_index = 0;
};

struct AttributeDescription {
    std::string text;
    std::vector<StructuredFact> facts;
};

struct GoldLabels {
    std::vector<std::string> labels;       // categorical / cluster gold
    std::optional<double> value;           // numeric gold
    double tolerance = 0.05;               // relative tolerance on `value`
    double delta = 0.0;                    // near-zero guard (1% of value range)
    std::optional<std::string> choice;     // T/F or multiple-choice gold
    std::vector<std::string> keywords;     // open-ended QA gold
};

struct QARecord {
    std::string id;
    std::string task;       // trend|season|noise|local|correlation|cluster|
                            // numeric.*|inductive|deductive|causal|comparison|
                            // instruct_follow
    std::string question;
    std::string answer;
    GoldLabels gold;
    std::vector<std::string> series_refs;  // metric names, in order
    std::string provenance;                // template id or evolution lineage
};

// Task-kind helpers for metric dispatch.
bool is_categorical_task(const std::string& task);
bool is_numeric_task(const std::string& task);
bool is_choice_task(const std::string& task);
bool is_keyword_task(const std::string& task);

// Every pool attribute, flattened to checkable facts.
std::vector<StructuredFact> enumerate_facts(const AttributePool& pool, std::size_t series_index = 0);
std::vector<StructuredFact> enumerate_facts(const CorrelationPool& group);

// Deterministic prose description covering all attribute categories present;
// every numeral equals the pool value rounded to 4 significant digits.
AttributeDescription describe(const AttributePool& pool);

// Categorical alignment question about one attribute category.
// task must be one of trend|season|noise|local.
QARecord gen_alignment_qa(const AttributePool& pool, const TimeSeries& series,
                          const std::string& task, std::uint64_t template_seed);

// Numeric question; nullopt when the task does not apply to this pool
// (e.g. fluct_amplitude on a fluctuation-free pool).
std::optional<QARecord> gen_numeric_qa(const AttributePool& pool, const TimeSeries& series,
                                       const std::string& task, std::uint64_t template_seed);

// Multivariate correlation / cluster question over a correlated group plus
// optional independent distractors. groups: all correlation pools whose
// members appear in `pools` (cluster questions cover several groups).
QARecord gen_mts_qa(const std::vector<CorrelationPool>& groups,
                    const std::vector<AttributePool>& pools,
                    const std::vector<TimeSeries>& series_list, const std::string& task,
                    std::uint64_t template_seed);

// Reasoning seed items built from condition templates over pool facts.
// task: deductive | causal | comparison | inductive. comparison needs 2 pools.
std::optional<QARecord> gen_reasoning_seed(const std::vector<AttributePool>& pools,
                                           const std::vector<TimeSeries>& series_list,
                                           const std::string& task, std::uint64_t template_seed);

// Canonical label sets recomputed from the pool, used for gold verification.
std::vector<std::string> category_labels(const AttributePool& pool, const std::string& task);

} // namespace tsqa::describe
