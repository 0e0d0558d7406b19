#include "tsqa/datasets.hpp"

#include "tsqa/prng.hpp"
#include "tsqa/synth.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace tsqa;
using namespace tsqa::testing;
using datasets::Corpus;
using datasets::CorpusSpec;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

CorpusSpec small_alignment_spec(std::uint64_t seed = 11) {
    CorpusSpec spec;
    spec.stage = "alignment";
    spec.uts = 12;
    spec.mts_shape = 6;
    spec.mts_local = 6;
    spec.min_length = 64;
    spec.max_length = 128;
    spec.master_seed = seed;
    return spec;
}

} // namespace

TEST_CASE("assemble_prompt expands one slot into header plus series ref") {
    synth::NormalizedSeries s;
    s.metric_name = "cpu_utilization";
    s.values = {0.0, 0.5, 1.0};
    s.value_scaling = 4.0;
    s.value_offset = 2.0;
    auto doc = datasets::assemble_prompt("analyze <ts> and report", {s});

    REQUIRE(doc.segments.size() == 4); // text, header, series-ref, text
    CHECK_FALSE(doc.segments[0].is_series);
    CHECK(doc.segments[2].is_series);
    CHECK(doc.segments[2].series_index == 0);
    CHECK(doc.flat_text.find("<|series:0|>") != std::string::npos);
    CHECK(doc.flat_text.find("value scaling 4,") != std::string::npos);
    CHECK(doc.flat_text.find("value offset 2]") != std::string::npos);
    CHECK(doc.flat_text.find("analyze ") == 0);
    CHECK(doc.flat_text.find(" and report") != std::string::npos);
}

TEST_CASE("assemble_prompt keeps headers in input order") {
    synth::NormalizedSeries a, b;
    a.metric_name = "first_metric";
    a.values = {0.0, 1.0};
    a.value_scaling = 1.0;
    b.metric_name = "second_metric";
    b.values = {0.0, 1.0};
    b.value_scaling = 2.0;
    auto doc = datasets::assemble_prompt("<ts><ts>", {a, b});
    CHECK(doc.series_meta[0].name == "first_metric");
    CHECK(doc.series_meta[1].name == "second_metric");
    CHECK(doc.flat_text.find("first_metric") < doc.flat_text.find("second_metric"));
    std::size_t p0 = doc.flat_text.find("<|series:0|>");
    std::size_t p1 = doc.flat_text.find("<|series:1|>");
    CHECK(p0 < p1);
}

TEST_CASE("assemble_prompt rejects slot/series count mismatches") {
    synth::NormalizedSeries s;
    s.metric_name = "m";
    s.values = {0.0};
    CHECK_THROWS_AS(datasets::assemble_prompt("no slots here", {s}), std::invalid_argument);
    CHECK_THROWS_AS(datasets::assemble_prompt("<ts><ts>", {s}), std::invalid_argument);
}

TEST_CASE("alignment composition hits the requested counts and the 2:1 ratio") {
    CorpusSpec spec = small_alignment_spec();
    spec.uts = 100;
    spec.mts_shape = 100;
    spec.mts_local = 100;
    auto corpus = datasets::compose_corpus(spec);
    CHECK(corpus.records.size() == 300);

    std::size_t uts = 0, mts = 0;
    for (const auto& rec : corpus.records)
        (rec.series.size() == 1 ? uts : mts) += 1;
    CHECK(uts == 100);
    CHECK(mts == 200); // MTS:UTS = 2:1
    CHECK(corpus.manifest.records == 300);
    std::size_t manifest_total = 0;
    for (const auto& [task, count] : corpus.manifest.task_counts) manifest_total += count;
    CHECK(manifest_total == 300);
}

TEST_CASE("sft composition arithmetic: tsevol + instruct + 30 percent mix") {
    auto alignment = datasets::compose_corpus(small_alignment_spec(3));
    REQUIRE(alignment.records.size() == 24);

    CorpusSpec sft;
    sft.stage = "sft";
    sft.tsevol = 20;
    sft.instruct_follow = 5;
    sft.alignment_mix_fraction = 0.5; // 12 of 24
    sft.min_length = 64;
    sft.max_length = 128;
    sft.master_seed = 77;
    tsevol::MockTextGenerator gen;
    auto corpus = datasets::compose_corpus(sft, &alignment, &gen);
    CHECK(corpus.records.size() == 20 + 5 + 12);

    std::size_t evolved = 0, instruct = 0, mixed = 0;
    for (const auto& rec : corpus.records) {
        if (rec.qa.id.rfind("s-mix-", 0) == 0) ++mixed;
        else if (rec.qa.task == "instruct_follow") ++instruct;
        else ++evolved;
    }
    CHECK(evolved == 20);
    CHECK(instruct == 5);
    CHECK(mixed == 12);
}

TEST_CASE("mix fraction can be measured against the sft record count instead") {
    auto alignment = datasets::compose_corpus(small_alignment_spec(3));
    CorpusSpec sft;
    sft.stage = "sft";
    sft.tsevol = 10;
    sft.instruct_follow = 10;
    sft.alignment_mix_fraction = 0.5;
    sft.alignment_mix_basis = "sft"; // 50% of the 20 fresh records
    sft.min_length = 64;
    sft.max_length = 128;
    sft.master_seed = 78;
    tsevol::MockTextGenerator gen;
    auto corpus = datasets::compose_corpus(sft, &alignment, &gen);
    CHECK(corpus.records.size() == 10 + 10 + 10);
}

TEST_CASE("sft stage without a source corpus is rejected when mix > 0") {
    CorpusSpec sft;
    sft.stage = "sft";
    sft.tsevol = 0;
    sft.instruct_follow = 1;
    sft.alignment_mix_fraction = 0.3;
    CHECK_THROWS_AS(datasets::compose_corpus(sft, nullptr, nullptr), std::invalid_argument);
    sft.alignment_mix_fraction = 0.0;
    auto corpus = datasets::compose_corpus(sft, nullptr, nullptr);
    CHECK(corpus.records.size() == 1);
}

TEST_CASE("alignment stage rejects tsevol counts") {
    CorpusSpec spec = small_alignment_spec();
    spec.tsevol = 5;
    CHECK_THROWS_AS(datasets::compose_corpus(spec), std::invalid_argument);
}

TEST_CASE("composition is byte-deterministic") {
    auto a = datasets::compose_corpus(small_alignment_spec(5));
    auto b = datasets::compose_corpus(small_alignment_spec(5));
    datasets::write_jsonl(a, "/tmp/tsqa_det_a.jsonl");
    datasets::write_jsonl(b, "/tmp/tsqa_det_b.jsonl");
    CHECK(slurp("/tmp/tsqa_det_a.jsonl") == slurp("/tmp/tsqa_det_b.jsonl"));
    auto c = datasets::compose_corpus(small_alignment_spec(6));
    datasets::write_jsonl(c, "/tmp/tsqa_det_c.jsonl");
    CHECK(slurp("/tmp/tsqa_det_a.jsonl") != slurp("/tmp/tsqa_det_c.jsonl"));
}

TEST_CASE("jsonl round trip is lossless") {
    auto corpus = datasets::compose_corpus(small_alignment_spec(9));
    datasets::write_jsonl(corpus, "/tmp/tsqa_rt.jsonl");
    auto loaded = datasets::read_jsonl("/tmp/tsqa_rt.jsonl");
    REQUIRE(loaded.records.size() == corpus.records.size());
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        CHECK(datasets::record_to_json(loaded.records[i]) ==
              datasets::record_to_json(corpus.records[i]));
    }
    datasets::write_jsonl(loaded, "/tmp/tsqa_rt2.jsonl");
    CHECK(slurp("/tmp/tsqa_rt.jsonl") == slurp("/tmp/tsqa_rt2.jsonl"));
}

TEST_CASE("read_jsonl names the offending line") {
    {
        std::ofstream out("/tmp/tsqa_bad.jsonl");
        auto corpus = datasets::compose_corpus(small_alignment_spec(13));
        out << datasets::record_to_json(corpus.records[0]).dump() << "\n";
        out << "{\"schema\": 1, \"truncated\": true\n"; // invalid json
    }
    CHECK_THROWS_WITH_AS(datasets::read_jsonl("/tmp/tsqa_bad.jsonl"), doctest::Contains("line 2"),
                         std::runtime_error);
}

TEST_CASE("empty corpus writes a valid file plus manifest") {
    Corpus empty;
    datasets::write_jsonl(empty, "/tmp/tsqa_empty.jsonl");
    auto loaded = datasets::read_jsonl("/tmp/tsqa_empty.jsonl");
    CHECK(loaded.records.empty());
    std::ifstream manifest("/tmp/tsqa_empty.manifest.json");
    CHECK(manifest.good());
}

TEST_CASE("unknown fields survive a read/write cycle") {
    auto corpus = datasets::compose_corpus(small_alignment_spec(15));
    auto j = datasets::record_to_json(corpus.records[0]);
    j["custom_annotation"] = "kept";
    {
        std::ofstream out("/tmp/tsqa_extra.jsonl");
        out << j.dump() << "\n";
    }
    auto loaded = datasets::read_jsonl("/tmp/tsqa_extra.jsonl");
    REQUIRE(loaded.records.size() == 1);
    auto round = datasets::record_to_json(loaded.records[0]);
    CHECK(round.at("custom_annotation") == "kept");
}

TEST_CASE("normalization metadata in stored records is affine-consistent") {
    auto corpus = datasets::compose_corpus(small_alignment_spec(21));
    for (const auto& rec : corpus.records) {
        for (const auto& e : rec.series) {
            auto pool_series = synth::render(e.pool);
            REQUIRE(pool_series.values.size() == e.values.size());
            for (std::size_t t = 0; t < e.values.size(); ++t) {
                double denorm = e.values[t] * e.value_scaling + e.value_offset;
                double scale = std::max(1.0, std::fabs(pool_series.values[t]));
                CHECK(std::fabs(denorm - pool_series.values[t]) <= 1e-9 * scale);
            }
        }
    }
}

TEST_CASE("every composed record's gold labels re-verify against its pools") {
    auto corpus = datasets::compose_corpus(small_alignment_spec(33));
    for (const auto& rec : corpus.records) {
        auto err = datasets::verify_record_gold(rec);
        if (err) FAIL_CHECK(rec.qa.id, " (", rec.qa.task, "): ", *err);
    }

    CorpusSpec sft;
    sft.stage = "sft";
    sft.tsevol = 10;
    sft.instruct_follow = 4;
    sft.alignment_mix_fraction = 0.25;
    sft.min_length = 64;
    sft.max_length = 128;
    sft.master_seed = 44;
    tsevol::MockTextGenerator gen;
    auto sft_corpus = datasets::compose_corpus(sft, &corpus, &gen);
    for (const auto& rec : sft_corpus.records) {
        auto err = datasets::verify_record_gold(rec);
        if (err) FAIL_CHECK(rec.qa.id, " (", rec.qa.task, "): ", *err);
    }
}
