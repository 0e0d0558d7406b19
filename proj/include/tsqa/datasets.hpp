#pragma once

#include "tsqa/describe.hpp"
#include "tsqa/tsevol.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tsqa::datasets {

using describe::QARecord;
using genpool::AttributePool;
using genpool::CorrelationPool;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "1.0.0";

// Slot marker expanded by assemble_prompt, one per attached series.
inline constexpr const char* kSeriesSlot = "<ts>";

struct SeriesEntry {
    std::string name;
    std::size_t length = 0;
    std::vector<double> values;  // normalized to [0, 1]
    double value_scaling = 1.0;
    double value_offset = 0.0;
    AttributePool pool;
};

struct PromptSegment {
    bool is_series = false;
    std::string text;              // text segments
    std::size_t series_index = 0;  // series-ref segments
};

struct SeriesMeta {
    std::string name;
    std::size_t length = 0;
    double value_scaling = 1.0;
    double value_offset = 0.0;
};

struct PromptDocument {
    std::vector<PromptSegment> segments;
    std::vector<SeriesMeta> series_meta;
    std::string flat_text; // one <|series:i|> placeholder per series
};

// Expands each slot into a metadata header (name, length, value scaling,
// value offset) plus a series-ref segment; surrounding text is preserved.
// Slot count must equal series count.
PromptDocument assemble_prompt(const std::string& question_with_slots,
                               const std::vector<synth::NormalizedSeries>& series);

struct Record {
    QARecord qa;
    std::string stage; // alignment | sft
    std::vector<SeriesEntry> series;
    std::vector<CorrelationPool> correlation_pools;
    PromptDocument prompt;
    std::uint64_t seed = 0;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object(); // unknown fields, preserved
};

struct Manifest {
    int schema = kSchemaVersion;
    std::string version = kToolkitVersion;
    std::uint64_t seed = 0;
    std::size_t records = 0;
    std::map<std::string, std::size_t> task_counts;
};

struct Corpus {
    std::vector<Record> records;
    Manifest manifest;
};

struct CorpusSpec {
    std::string stage = "alignment"; // alignment | sft
    std::size_t uts = 0;
    std::size_t mts_shape = 0;
    std::size_t mts_local = 0;
    std::size_t tsevol = 0;          // sft only
    std::size_t instruct_follow = 0; // sft only
    double alignment_mix_fraction = 0.30;
    // What the mix fraction is measured against: the source alignment corpus
    // (default) or the freshly built sft records.
    std::string alignment_mix_basis = "alignment"; // alignment | sft
    double reasoning_seed_fraction = 0.5; // share of evolution seeds built fresh
    std::size_t evol_rounds = 2;
    std::size_t min_length = 64;
    std::size_t max_length = 1024;
    std::uint64_t master_seed = 0;
    std::optional<std::string> catalog_path;
};

std::optional<std::string> validate_spec(const CorpusSpec& spec);

// Deterministic corpus assembly. The sft stage requires `alignment_corpus`
// when alignment_mix_fraction > 0 and a generator for the evolution step
// (pass a MockTextGenerator for offline runs).
Corpus compose_corpus(const CorpusSpec& spec, const Corpus* alignment_corpus = nullptr,
                      tsevol::TextGenerator* gen = nullptr);

nlohmann::ordered_json record_to_json(const Record& record);
Record record_from_json(const nlohmann::ordered_json& j);

// JSONL persistence + `<name>.manifest.json` sidecar. Round trips are
// lossless; unknown fields on read are kept and re-emitted.
void write_jsonl(const Corpus& corpus, const std::string& path);
Corpus read_jsonl(const std::string& path);

// Recomputes a record's gold from its embedded pools/series; nullopt = sound.
std::optional<std::string> verify_record_gold(const Record& record);

// Manifest recomputed from the records.
Manifest derive_manifest(const std::vector<Record>& records, std::uint64_t seed);

} // namespace tsqa::datasets
