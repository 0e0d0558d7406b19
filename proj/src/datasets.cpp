#include "tsqa/datasets.hpp"

#include "tsqa/genpool.hpp"
#include "tsqa/prng.hpp"
#include "tsqa/util.hpp"
#include "tsqa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tsqa::datasets {

using json = nlohmann::ordered_json;
using genpool::RuleBasedSelector;
using synth::NormalizedSeries;
using synth::TimeSeries;

PromptDocument assemble_prompt(const std::string& question_with_slots,
                               const std::vector<NormalizedSeries>& series) {
    std::size_t slot_count = 0;
    for (std::size_t pos = question_with_slots.find(kSeriesSlot); pos != std::string::npos;
         pos = question_with_slots.find(kSeriesSlot, pos + 1))
        ++slot_count;
    if (slot_count != series.size())
        throw std::invalid_argument("assemble_prompt: " + std::to_string(slot_count) +
                                    " slots vs " + std::to_string(series.size()) + " series");

    PromptDocument doc;
    for (const auto& s : series)
        doc.series_meta.push_back(
            {s.metric_name, s.values.size(), s.value_scaling, s.value_offset});

    std::size_t cursor = 0, next_series = 0;
    const std::string slot = kSeriesSlot;
    std::string flat;
    while (cursor < question_with_slots.size()) {
        std::size_t pos = question_with_slots.find(slot, cursor);
        std::string chunk = question_with_slots.substr(
            cursor, pos == std::string::npos ? std::string::npos : pos - cursor);
        if (!chunk.empty()) {
            doc.segments.push_back({false, chunk, 0});
            flat += chunk;
        }
        if (pos == std::string::npos) break;
        const auto& meta = doc.series_meta[next_series];
        std::string header = "[series " + meta.name + ", length " + std::to_string(meta.length) +
                             ", value scaling " + format_double(meta.value_scaling) +
                             ", value offset " + format_double(meta.value_offset) + "] ";
        doc.segments.push_back({false, header, 0});
        doc.segments.push_back({true, "", next_series});
        flat += header + "<|series:" + std::to_string(next_series) + "|>";
        ++next_series;
        cursor = pos + slot.size();
    }
    doc.flat_text = std::move(flat);
    return doc;
}

std::optional<std::string> validate_spec(const CorpusSpec& spec) {
    if (spec.stage != "alignment" && spec.stage != "sft")
        return "stage must be alignment or sft";
    if (spec.stage == "alignment" && spec.tsevol > 0) return "alignment stage must have tsevol = 0";
    if (spec.min_length < 64 || spec.max_length > 1024 || spec.min_length > spec.max_length)
        return "length bounds must satisfy 64 <= min <= max <= 1024";
    if (spec.alignment_mix_fraction < 0.0 || spec.alignment_mix_fraction > 1.0)
        return "alignment_mix_fraction outside [0, 1]";
    if (spec.alignment_mix_basis != "alignment" && spec.alignment_mix_basis != "sft")
        return "alignment_mix_basis must be alignment or sft";
    if (spec.reasoning_seed_fraction < 0.0 || spec.reasoning_seed_fraction > 1.0)
        return "reasoning_seed_fraction outside [0, 1]";
    if (spec.evol_rounds < 1) return "evol_rounds must be >= 1";
    return std::nullopt;
}

namespace {

std::string record_id(const std::string& stage, const std::string& family, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06zu", index);
    return stage.substr(0, 1) + "-" + family + "-" + buf;
}

SeriesEntry make_entry(const AttributePool& pool, const TimeSeries& raw) {
    NormalizedSeries norm = synth::normalize(raw);
    SeriesEntry e;
    e.name = pool.metric.name;
    e.length = raw.values.size();
    e.values = norm.values;
    e.value_scaling = norm.value_scaling;
    e.value_offset = norm.value_offset;
    e.pool = pool;
    return e;
}

NormalizedSeries entry_to_normalized(const SeriesEntry& e) {
    NormalizedSeries n;
    n.metric_name = e.name;
    n.values = e.values;
    n.value_scaling = e.value_scaling;
    n.value_offset = e.value_offset;
    return n;
}

std::string question_with_series_block(const std::string& question, std::size_t n_series) {
    std::string q = question + "\nSeries:";
    for (std::size_t i = 0; i < n_series; ++i) q += std::string("\n") + kSeriesSlot;
    return q;
}

void attach_prompt(Record& rec) {
    std::vector<NormalizedSeries> norm;
    for (const auto& e : rec.series) norm.push_back(entry_to_normalized(e));
    rec.prompt = assemble_prompt(question_with_series_block(rec.qa.question, norm.size()), norm);
}

const taxonomy::MetricSpec& pick_metric(const std::vector<taxonomy::MetricSpec>& catalog, Rng& rng) {
    return catalog[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(catalog.size()) - 1))];
}

// UTS task rotation; numeric tasks fall back to the next applicable entry.
const std::vector<std::string>& uts_tasks() {
    static const std::vector<std::string> tasks = {
        "trend",        "season",          "noise",
        "local",        "numeric.max",     "numeric.min",
        "numeric.value_at", "numeric.segment_avg", "numeric.fluct_amplitude",
        "numeric.fluct_position", "numeric.period",
    };
    return tasks;
}

Record make_uts_record(const std::vector<taxonomy::MetricSpec>& catalog, const CorpusSpec& spec,
                       std::size_t index) {
    std::uint64_t seed = Rng::split(spec.master_seed, 0x1000000 + index);
    Rng rng(seed);
    RuleBasedSelector selector;
    const auto& metric = pick_metric(catalog, rng);
    auto subset = genpool::select_subset(metric, selector).subset;
    std::size_t length = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(spec.min_length),
                        static_cast<std::int64_t>(spec.max_length)));
    AttributePool pool = genpool::sample_pool(subset, length, Rng::mix(seed, 1));
    TimeSeries raw = synth::render(pool);

    const auto& tasks = uts_tasks();
    Record rec;
    for (std::size_t probe = 0; probe < tasks.size(); ++probe) {
        const std::string& task = tasks[(index + probe) % tasks.size()];
        if (describe::is_categorical_task(task)) {
            rec.qa = describe::gen_alignment_qa(pool, raw, task, Rng::mix(seed, 2));
            break;
        }
        auto qa = describe::gen_numeric_qa(pool, raw, task, Rng::mix(seed, 2));
        if (qa) {
            rec.qa = *qa;
            break;
        }
    }
    rec.qa.id = record_id(spec.stage, "uts", index);
    rec.stage = spec.stage;
    rec.series.push_back(make_entry(pool, raw));
    rec.seed = seed;
    attach_prompt(rec);
    return rec;
}

Record make_mts_record(const std::vector<taxonomy::MetricSpec>& catalog, const CorpusSpec& spec,
                       genpool::CorrelationKind ckind, std::size_t index) {
    std::uint64_t seed = Rng::split(spec.master_seed,
                                    (ckind == genpool::CorrelationKind::shape ? 0x2000000 : 0x3000000) +
                                        index);
    Rng rng(seed);
    RuleBasedSelector selector;
    std::size_t length = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(spec.min_length),
                        static_cast<std::int64_t>(spec.max_length)));
    bool cluster = index % 2 == 1;

    Record rec;
    std::vector<AttributePool> pools;
    std::vector<TimeSeries> all_series;

    if (!cluster) {
        // One correlated group plus an independent distractor.
        const auto& metric = pick_metric(catalog, rng);
        auto subset = genpool::select_subset(metric, selector).subset;
        std::size_t size = static_cast<std::size_t>(rng.uniform_int(3, 4));
        auto [group, members] = genpool::build_correlation_group(ckind, size, subset, length,
                                                                 Rng::mix(seed, 1));
        rec.correlation_pools.push_back(group);
        pools = std::move(members);

        const auto& other = pick_metric(catalog, rng);
        if (other.name != metric.name) {
            auto osubset = genpool::select_subset(other, selector).subset;
            pools.push_back(genpool::sample_pool(osubset, length, Rng::mix(seed, 2)));
        }
        for (const auto& p : pools) all_series.push_back(synth::render(p));
        rec.qa = describe::gen_mts_qa(rec.correlation_pools, pools, all_series, "correlation",
                                      Rng::mix(seed, 3));
    } else {
        // Two correlated groups; cluster gold is the partition.
        for (int g = 0; g < 2; ++g) {
            const auto& metric = pick_metric(catalog, rng);
            auto subset = genpool::select_subset(metric, selector).subset;
            auto [group, members] =
                genpool::build_correlation_group(ckind, 2, subset, length, Rng::mix(seed, 10 + g));
            // Distinct base metrics keep member names unique across groups.
            bool clash = false;
            for (const auto& m : members)
                for (const auto& p : pools)
                    if (p.metric.name == m.metric.name) clash = true;
            if (clash) continue;
            rec.correlation_pools.push_back(group);
            for (auto& m : members) pools.push_back(std::move(m));
        }
        for (const auto& p : pools) all_series.push_back(synth::render(p));
        rec.qa = describe::gen_mts_qa(rec.correlation_pools, pools, all_series, "cluster",
                                      Rng::mix(seed, 3));
    }

    rec.qa.id = record_id(spec.stage,
                          ckind == genpool::CorrelationKind::shape ? "mts-shape" : "mts-local",
                          index);
    rec.stage = spec.stage;
    for (std::size_t i = 0; i < pools.size(); ++i)
        rec.series.push_back(make_entry(pools[i], all_series[i]));
    rec.seed = seed;
    attach_prompt(rec);
    return rec;
}

Record make_instruct_record(const CorpusSpec& spec, std::size_t index) {
    std::uint64_t seed = Rng::split(spec.master_seed, 0x5000000 + index);
    Rng rng(seed);
    static const char* words[] = {"alignment", "periodic", "baseline", "anomaly",
                                  "trend",     "sensor",   "window",   "metric"};
    const char* w = words[static_cast<std::size_t>(rng.uniform_int(0, 7))];
    int variant = static_cast<int>(rng.uniform_int(0, 5));

    Record rec;
    rec.stage = spec.stage;
    rec.seed = seed;
    rec.qa.task = "instruct_follow";
    rec.qa.id = record_id(spec.stage, "if", index);
    rec.qa.provenance = "tpl:instruct_follow:" + std::to_string(variant);
    switch (variant) {
    case 0:
        rec.qa.question = std::string("Reply with exactly one word: the word '") + w + "'.";
        rec.qa.answer = w;
        break;
    case 1:
        rec.qa.question =
            std::string("Repeat the word '") + w + "' exactly three times, separated by spaces.";
        rec.qa.answer = std::string(w) + " " + w + " " + w;
        break;
    case 2:
        rec.qa.question = std::string("Answer with a single digit: how many words are in this "
                                      "list: ") +
                          w + ", sensorline, datapoint?";
        rec.qa.answer = "3";
        rec.qa.gold.keywords = {"3"};
        break;
    case 3:
        rec.qa.question = std::string("Respond with these words in reverse order: alpha beta ") + w + ".";
        rec.qa.answer = std::string(w) + " beta alpha";
        break;
    case 4:
        rec.qa.question = std::string("State the label exactly as written, nothing else: '") + w + "'.";
        rec.qa.answer = w;
        break;
    default:
        rec.qa.question = std::string("Answer in uppercase with the single word '") + w + "'.";
        rec.qa.answer = to_lower(w); // scoring is case-insensitive
        for (auto& c : rec.qa.answer) c = static_cast<char>(std::toupper(c));
        break;
    }
    if (rec.qa.gold.keywords.empty()) {
        if (variant == 3)
            rec.qa.gold.keywords = {w, "beta", "alpha"};
        else
            rec.qa.gold.keywords = {w};
    }
    rec.prompt = assemble_prompt(rec.qa.question, {});
    return rec;
}

} // namespace

Corpus compose_corpus(const CorpusSpec& spec, const Corpus* alignment_corpus,
                      tsevol::TextGenerator* gen) {
    if (auto err = validate_spec(spec)) throw std::invalid_argument("corpus spec: " + *err);
    if (spec.stage == "sft" && spec.alignment_mix_fraction > 0.0 && !alignment_corpus)
        throw std::invalid_argument(
            "sft stage with alignment_mix_fraction > 0 requires a source alignment corpus");
    if (spec.stage == "sft" && spec.tsevol > 0 && !gen)
        throw std::invalid_argument("sft stage with tsevol records requires a text generator");

    auto catalog = taxonomy::metric_catalog(spec.catalog_path);
    Corpus corpus;

    if (spec.stage == "alignment") {
        for (std::size_t i = 0; i < spec.uts; ++i)
            corpus.records.push_back(make_uts_record(catalog, spec, i));
        for (std::size_t i = 0; i < spec.mts_shape; ++i)
            corpus.records.push_back(
                make_mts_record(catalog, spec, genpool::CorrelationKind::shape, i));
        for (std::size_t i = 0; i < spec.mts_local; ++i)
            corpus.records.push_back(
                make_mts_record(catalog, spec, genpool::CorrelationKind::local, i));
    } else {
        // TSEvol records: evolve seed QAs until the requested count is
        // accepted. Seeds mix fresh reasoning items with alignment samples.
        std::size_t accepted = 0;
        std::size_t batch_index = 0;
        while (accepted < spec.tsevol && batch_index < 64) {
            std::size_t want = spec.tsevol - accepted;
            std::vector<QARecord> seeds;
            std::vector<AttributePool> pools;
            std::vector<CorrelationPool> corr_pools;
            std::vector<std::vector<std::string>> seed_refs;
            std::vector<Record> seed_records;

            for (std::size_t s = 0; s < want; ++s) {
                std::uint64_t seed =
                    Rng::split(spec.master_seed, 0x4000000 + batch_index * 1000000 + s);
                Rng rng(seed);
                bool fresh = alignment_corpus == nullptr ||
                             rng.uniform01() < spec.reasoning_seed_fraction;
                Record rec;
                if (fresh) {
                    RuleBasedSelector selector;
                    const auto& metric = pick_metric(catalog, rng);
                    auto subset = genpool::select_subset(metric, selector).subset;
                    std::size_t length = static_cast<std::size_t>(
                        rng.uniform_int(static_cast<std::int64_t>(spec.min_length),
                                        static_cast<std::int64_t>(spec.max_length)));
                    AttributePool pool = genpool::sample_pool(subset, length, Rng::mix(seed, 1));
                    TimeSeries raw = synth::render(pool);
                    static const char* seed_tasks[] = {"inductive", "deductive", "causal"};
                    std::optional<QARecord> qa;
                    for (int probe = 0; probe < 3 && !qa; ++probe)
                        qa = describe::gen_reasoning_seed(
                            {pool}, {raw}, seed_tasks[(s + probe) % 3], Rng::mix(seed, 2));
                    rec.qa = *qa;
                    rec.series.push_back(make_entry(pool, raw));
                } else {
                    const auto& src = alignment_corpus->records[static_cast<std::size_t>(
                        rng.uniform_int(0,
                                        static_cast<std::int64_t>(alignment_corpus->records.size()) - 1))];
                    rec = src;
                }
                rec.qa.id = record_id(spec.stage, "seed", batch_index * 100000 + s);
                rec.stage = spec.stage;
                rec.seed = seed;
                seed_records.push_back(rec);
            }

            // Evolve each seed against its own pools, one at a time, so the
            // injected attributes stay scoped to the referenced series.
            for (std::size_t s = 0; s < seed_records.size() && accepted < spec.tsevol; ++s) {
                Record& srec = seed_records[s];
                std::vector<AttributePool> rec_pools;
                for (const auto& e : srec.series) rec_pools.push_back(e.pool);
                if (rec_pools.empty()) continue;
                tsevol::EvolutionOptions opt;
                opt.rounds = spec.evol_rounds;
                tsevol::EvolutionRun run = tsevol::run_evolution(
                    {srec.qa}, rec_pools, srec.correlation_pools, *gen,
                    Rng::mix(spec.master_seed, 0x6000000 + batch_index * 100000 + s), opt);
                for (auto& out : run.records) {
                    if (accepted >= spec.tsevol) break;
                    Record rec = srec;
                    rec.qa = out;
                    rec.qa.id = record_id(spec.stage, "evol", accepted);
                    attach_prompt(rec);
                    corpus.records.push_back(std::move(rec));
                    ++accepted;
                }
            }
            ++batch_index;
        }
        if (accepted < spec.tsevol)
            throw std::runtime_error("evolution could not reach the requested record count");

        for (std::size_t i = 0; i < spec.instruct_follow; ++i)
            corpus.records.push_back(make_instruct_record(spec, i));

        if (spec.alignment_mix_fraction > 0.0 && alignment_corpus) {
            double basis = spec.alignment_mix_basis == "sft"
                               ? static_cast<double>(corpus.records.size())
                               : static_cast<double>(alignment_corpus->records.size());
            std::size_t take =
                static_cast<std::size_t>(std::llround(spec.alignment_mix_fraction * basis));
            take = std::min(take, alignment_corpus->records.size());
            std::vector<std::size_t> idx(alignment_corpus->records.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            Rng rng(Rng::split(spec.master_seed, 0x7000000));
            for (std::size_t i = 0; i < take; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(
                                        0, static_cast<std::int64_t>(idx.size() - i) - 1));
                std::swap(idx[i], idx[j]);
            }
            idx.resize(take);
            std::sort(idx.begin(), idx.end());
            for (std::size_t i : idx) {
                Record rec = alignment_corpus->records[i];
                rec.stage = "sft";
                rec.qa.id = "s-mix-" + rec.qa.id;
                corpus.records.push_back(std::move(rec));
            }
        }
    }

    corpus.manifest = derive_manifest(corpus.records, spec.master_seed);
    return corpus;
}

Manifest derive_manifest(const std::vector<Record>& records, std::uint64_t seed) {
    Manifest m;
    m.seed = seed;
    m.records = records.size();
    for (const auto& r : records) ++m.task_counts[r.qa.task];
    return m;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

json gold_to_json(const describe::GoldLabels& g) {
    json j;
    j["labels"] = g.labels;
    if (g.value)
        j["value"] = *g.value;
    else
        j["value"] = nullptr;
    j["tolerance"] = g.tolerance;
    j["delta"] = g.delta;
    if (g.choice)
        j["choice"] = *g.choice;
    else
        j["choice"] = nullptr;
    j["keywords"] = g.keywords;
    return j;
}

describe::GoldLabels gold_from_json(const json& j) {
    describe::GoldLabels g;
    g.labels = j.at("labels").get<std::vector<std::string>>();
    if (!j.at("value").is_null()) g.value = j.at("value").get<double>();
    g.tolerance = j.at("tolerance").get<double>();
    g.delta = j.at("delta").get<double>();
    if (!j.at("choice").is_null()) g.choice = j.at("choice").get<std::string>();
    g.keywords = j.at("keywords").get<std::vector<std::string>>();
    return g;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "schema",   "id",     "stage",        "task",           "question",
        "answer",   "gold_labels", "series", "correlation_pool", "prompt_segments",
        "provenance", "seed"};
    return keys;
}

} // namespace

nlohmann::ordered_json record_to_json(const Record& record) {
    json j;
    j["schema"] = kSchemaVersion;
    j["id"] = record.qa.id;
    j["stage"] = record.stage;
    j["task"] = record.qa.task;
    j["question"] = record.qa.question;
    j["answer"] = record.qa.answer;
    j["gold_labels"] = gold_to_json(record.qa.gold);
    j["series"] = json::array();
    for (const auto& e : record.series) {
        json s;
        s["name"] = e.name;
        s["length"] = e.length;
        s["values"] = e.values;
        s["value_scaling"] = e.value_scaling;
        s["value_offset"] = e.value_offset;
        s["pool"] = genpool::to_json(e.pool);
        j["series"].push_back(std::move(s));
    }
    j["correlation_pool"] = json::array();
    for (const auto& g : record.correlation_pools) j["correlation_pool"].push_back(genpool::to_json(g));
    j["prompt_segments"] = json::array();
    for (const auto& seg : record.prompt.segments) {
        if (seg.is_series)
            j["prompt_segments"].push_back({{"type", "series"}, {"index", seg.series_index}});
        else
            j["prompt_segments"].push_back({{"type", "text"}, {"text", seg.text}});
    }
    j["provenance"] = record.qa.provenance;
    j["seed"] = record.seed;
    for (auto it = record.extra.begin(); it != record.extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

Record record_from_json(const nlohmann::ordered_json& j) {
    Record r;
    if (j.at("schema").get<int>() != kSchemaVersion)
        throw std::runtime_error("unsupported schema version");
    r.qa.id = j.at("id").get<std::string>();
    r.stage = j.at("stage").get<std::string>();
    r.qa.task = j.at("task").get<std::string>();
    r.qa.question = j.at("question").get<std::string>();
    r.qa.answer = j.at("answer").get<std::string>();
    r.qa.gold = gold_from_json(j.at("gold_labels"));
    for (const auto& s : j.at("series")) {
        SeriesEntry e;
        e.name = s.at("name").get<std::string>();
        e.length = s.at("length").get<std::size_t>();
        e.values = s.at("values").get<std::vector<double>>();
        e.value_scaling = s.at("value_scaling").get<double>();
        e.value_offset = s.at("value_offset").get<double>();
        e.pool = genpool::pool_from_json(s.at("pool"));
        r.series.push_back(std::move(e));
        r.qa.series_refs.push_back(r.series.back().name);
    }
    for (const auto& g : j.at("correlation_pool"))
        r.correlation_pools.push_back(genpool::correlation_from_json(g));
    for (const auto& seg : j.at("prompt_segments")) {
        PromptSegment ps;
        if (seg.at("type").get<std::string>() == "series") {
            ps.is_series = true;
            ps.series_index = seg.at("index").get<std::size_t>();
        } else {
            ps.text = seg.at("text").get<std::string>();
        }
        r.prompt.segments.push_back(std::move(ps));
    }
    for (const auto& e : r.series)
        r.prompt.series_meta.push_back({e.name, e.length, e.value_scaling, e.value_offset});
    // Rebuild the flat text form from the segments.
    for (const auto& seg : r.prompt.segments)
        r.prompt.flat_text += seg.is_series
                                  ? "<|series:" + std::to_string(seg.series_index) + "|>"
                                  : seg.text;
    r.qa.provenance = j.at("provenance").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known_keys().count(it.key())) r.extra[it.key()] = it.value();
    return r;
}

void write_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& r : corpus.records) out << record_to_json(r).dump() << "\n";
    out.close();

    std::string manifest_path = path;
    if (manifest_path.size() > 6 && manifest_path.substr(manifest_path.size() - 6) == ".jsonl")
        manifest_path = manifest_path.substr(0, manifest_path.size() - 6);
    manifest_path += ".manifest.json";
    json m;
    m["schema"] = corpus.manifest.schema;
    m["version"] = corpus.manifest.version;
    m["seed"] = corpus.manifest.seed;
    m["records"] = corpus.manifest.records;
    m["task_counts"] = json::object();
    for (const auto& [task, count] : corpus.manifest.task_counts) m["task_counts"][task] = count;
    std::ofstream mf(manifest_path, std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write " + manifest_path);
    mf << m.dump(2) << "\n";
}

Corpus read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            corpus.records.push_back(record_from_json(j));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    corpus.manifest = derive_manifest(corpus.records,
                                      corpus.records.empty() ? 0 : corpus.records.front().seed);

    // Cross-check the sidecar when present; its counts must match the file.
    std::string manifest_path = path;
    if (manifest_path.size() > 6 && manifest_path.substr(manifest_path.size() - 6) == ".jsonl")
        manifest_path = manifest_path.substr(0, manifest_path.size() - 6);
    manifest_path += ".manifest.json";
    std::ifstream mf(manifest_path, std::ios::binary);
    if (mf) {
        try {
            json m = json::parse(mf);
            corpus.manifest.seed = m.at("seed").get<std::uint64_t>();
            corpus.manifest.version = m.at("version").get<std::string>();
            if (m.at("records").get<std::size_t>() != corpus.records.size())
                throw std::runtime_error("record count differs from the data file");
            for (const auto& [task, count] : m.at("task_counts").items())
                if (corpus.manifest.task_counts[task] != count.get<std::size_t>())
                    throw std::runtime_error("task count mismatch for '" + task + "'");
        } catch (const std::exception& e) {
            throw std::runtime_error(manifest_path + ": " + e.what());
        }
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// Gold re-verification
// ---------------------------------------------------------------------------

namespace {

bool same_label_set(std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

} // namespace

std::optional<std::string> verify_record_gold(const Record& record) {
    const auto& task = record.qa.task;
    if (task == "instruct_follow") return std::nullopt;
    if (record.qa.provenance.find("|evol:") != std::string::npos)
        return std::nullopt; // eliminator-verified at creation
    if (record.series.empty()) return "record has no series";

    const auto& pool = record.series.front().pool;

    if (task == "trend" || task == "season" || task == "noise" || task == "local") {
        auto expect = describe::category_labels(pool, task);
        if (!same_label_set(expect, record.qa.gold.labels)) return "label set mismatch for " + task;
        return std::nullopt;
    }
    if (task == "correlation") {
        if (record.correlation_pools.empty()) return "correlation record without group";
        if (!same_label_set(record.correlation_pools.front().member_names, record.qa.gold.labels))
            return "correlation member mismatch";
        std::vector<AttributePool> pools;
        for (const auto& e : record.series) pools.push_back(e.pool);
        if (auto err = genpool::validate(record.correlation_pools.front(), pools)) return err;
        return std::nullopt;
    }
    if (task == "cluster") {
        std::vector<AttributePool> pools;
        for (const auto& e : record.series) pools.push_back(e.pool);
        for (const auto& g : record.correlation_pools)
            if (auto err = genpool::validate(g, pools)) return err;
        std::set<std::string> grouped;
        std::vector<std::string> expect;
        for (const auto& g : record.correlation_pools) {
            auto members = g.member_names;
            std::sort(members.begin(), members.end());
            std::string canon;
            for (const auto& m : members) {
                grouped.insert(m);
                if (!canon.empty()) canon += "+";
                canon += m;
            }
            expect.push_back(canon);
        }
        for (const auto& e : record.series)
            if (!grouped.count(e.name)) expect.push_back(e.name);
        if (!same_label_set(expect, record.qa.gold.labels)) return "cluster partition mismatch";
        return std::nullopt;
    }

    if (describe::is_numeric_task(task)) {
        if (!record.qa.gold.value) return "numeric task without gold value";
        double gold = *record.qa.gold.value;
        TimeSeries raw = synth::denormalize(entry_to_normalized(record.series.front()));
        auto nums = extract_numbers(record.qa.question);
        double tol = 1e-6 * std::max(1.0, std::fabs(gold));
        if (task == "numeric.max")
            return std::fabs(*std::max_element(raw.values.begin(), raw.values.end()) - gold) <= tol
                       ? std::nullopt
                       : std::optional<std::string>("max mismatch");
        if (task == "numeric.min")
            return std::fabs(*std::min_element(raw.values.begin(), raw.values.end()) - gold) <= tol
                       ? std::nullopt
                       : std::optional<std::string>("min mismatch");
        if (task == "numeric.value_at") {
            if (nums.empty()) return "value_at question lacks index";
            std::size_t t = static_cast<std::size_t>(nums.back());
            if (t >= raw.values.size()) return "value_at index out of range";
            return std::fabs(raw.values[t] - gold) <= tol
                       ? std::nullopt
                       : std::optional<std::string>("value_at mismatch");
        }
        if (task == "numeric.segment_avg") {
            if (nums.size() < 2) return "segment_avg question lacks bounds";
            std::size_t a = static_cast<std::size_t>(nums[nums.size() - 2]);
            std::size_t b = static_cast<std::size_t>(nums.back());
            if (a >= b || b > raw.values.size()) return "segment_avg bounds invalid";
            double sum = 0.0;
            for (std::size_t t = a; t < b; ++t) sum += raw.values[t];
            double avg = sum / static_cast<double>(b - a);
            return std::fabs(avg - gold) <= std::max(tol, 1e-9 * std::fabs(avg))
                       ? std::nullopt
                       : std::optional<std::string>("segment_avg mismatch");
        }
        if (task == "numeric.fluct_amplitude") {
            if (nums.empty()) return "fluct_amplitude question lacks position";
            std::size_t pos = static_cast<std::size_t>(nums.back());
            for (const auto& f : pool.fluctuations)
                if (f.position == pos)
                    return std::fabs(f.amplitude - gold) <= tol
                               ? std::nullopt
                               : std::optional<std::string>("amplitude mismatch");
            return "no fluctuation at stated position";
        }
        if (task == "numeric.fluct_position") {
            for (const auto& f : pool.fluctuations)
                if (static_cast<double>(f.position) == gold) return std::nullopt;
            return "no fluctuation at gold position";
        }
        if (task == "numeric.period") {
            if (!pool.seasonality) return "period question on aperiodic pool";
            return static_cast<double>(pool.seasonality->period) == gold
                       ? std::nullopt
                       : std::optional<std::string>("period mismatch");
        }
        return "unknown numeric task " + task;
    }

    if (task == "deductive") {
        if (!record.qa.gold.choice) return "deductive without gold choice";
        auto nums = extract_numbers(record.qa.question);
        if (nums.empty()) return "deductive question lacks threshold";
        TimeSeries raw = synth::denormalize(entry_to_normalized(record.series.front()));
        double mx = *std::max_element(raw.values.begin(), raw.values.end());
        bool expect = mx > nums.back();
        bool gold = *record.qa.gold.choice == "True";
        return expect == gold ? std::nullopt : std::optional<std::string>("deductive gold mismatch");
    }
    if (task == "causal" || task == "comparison") {
        if (!record.qa.gold.choice) return task + " without gold choice";
        return std::nullopt; // option order is seeded; gold fixed at generation
    }
    if (task == "inductive") {
        std::set<std::string> valid;
        for (const auto& e : record.series) {
            for (const auto& seg : e.pool.trend) valid.insert(std::string(taxonomy::id(seg.kind)));
            if (e.pool.seasonality)
                valid.insert(std::string(taxonomy::id(e.pool.seasonality->kind)));
            for (const auto& f : e.pool.fluctuations)
                valid.insert(std::string(taxonomy::id(f.kind)));
        }
        for (const auto& k : record.qa.gold.keywords)
            if (!valid.count(k)) return "inductive keyword not grounded: " + k;
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace tsqa::datasets
