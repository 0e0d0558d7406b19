#pragma once

#include "tsqa/describe.hpp"
#include "tsqa/genpool.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsqa::tsevol {

using describe::QARecord;
using describe::StructuredFact;
using genpool::AttributePool;
using genpool::CorrelationPool;

enum class EvolutionType : std::uint8_t {
    in_depth,
    in_breadth,
    condition_add,
    concretize,
    reasoning,
    situation,
};

inline constexpr std::array<EvolutionType, 6> kAllEvolutionTypes = {
    EvolutionType::in_depth,   EvolutionType::in_breadth, EvolutionType::condition_add,
    EvolutionType::concretize, EvolutionType::reasoning,  EvolutionType::situation,
};

std::string_view evolution_name(EvolutionType t);
std::optional<EvolutionType> evolution_from_name(std::string_view name);

struct DecodeParams {
    double temperature = 0.7;
    std::size_t max_tokens = 1024;
};

// Text-completion capability; implementations may call a remote endpoint or
// answer from a deterministic template (MockTextGenerator). Must be safe to
// call from multiple worker threads.
class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    virtual std::string complete(const std::string& prompt, const DecodeParams& params) = 0;
};

// Deterministic offline generator: parses the structured prompt sections and
// rewrites the seed QA according to the evolution type, restating the
// injected facts in the machine-readable trailer.
class MockTextGenerator : public TextGenerator {
public:
    std::string complete(const std::string& prompt, const DecodeParams& params) override;
};

// Subset selector that delegates the kind choice to a text generator (the
// numeric constraint hints stay rule-based). Unusable replies surface to
// select_subset, which falls back to the rule-based default.
class GeneratorBackedSelector : public genpool::SubsetSelector {
public:
    explicit GeneratorBackedSelector(TextGenerator& gen, DecodeParams params = {})
        : gen_(gen), params_(params) {}
    genpool::AttributeSubset propose(const taxonomy::MetricSpec& metric,
                                     const taxonomy::AttributeTaxonomy& taxonomy) override;

private:
    TextGenerator& gen_;
    DecodeParams params_;
};

struct Lineage {
    std::string seed_id;
    EvolutionType etype = EvolutionType::in_depth;
    std::size_t round = 0;
};

struct CandidateQA {
    std::string question;
    std::string answer;
    std::vector<StructuredFact> claimed_facts;
    Lineage lineage;
};

struct EliminationReason {
    StructuredFact claimed;
    std::string truth;      // rendered pool truth (or "unverifiable")
    double deviation = 0.0;
};

struct EliminationVerdict {
    bool accepted = false;
    std::vector<EliminationReason> reasons; // accepted <=> empty
};

struct EvolutionError : std::runtime_error {
    std::string raw_output;
    EvolutionError(const std::string& what, std::string raw)
        : std::runtime_error(what), raw_output(std::move(raw)) {}
};

struct EvolutionTolerances {
    double relative = 0.05; // accept numeric claims within max(5% rel, 3 sigma)
    double sigma_mult = 3.0;
};

// Samples k facts without replacement across the pools (plus correlation
// facts when a group is given); k beyond the total returns everything.
std::vector<StructuredFact> inject_attributes(const std::vector<AttributePool>& pools,
                                              const CorrelationPool* corr_pool, std::size_t k,
                                              std::uint64_t seed);

// Builds the evolution prompt for one step. Exposed for tests and audits.
std::string build_evolution_prompt(const QARecord& seed_qa,
                                   const std::vector<AttributePool>& pools, EvolutionType etype,
                                   const std::vector<StructuredFact>& injected);

// One evolution step: prompt the generator, parse the structured reply.
// Unparseable output is retried up to `retries` times, then EvolutionError.
CandidateQA evolve(const QARecord& seed_qa, const std::vector<AttributePool>& pools,
                   EvolutionType etype, const std::vector<StructuredFact>& injected,
                   TextGenerator& gen, int retries = 3, const DecodeParams& params = {});

// Attribute-based filter: every claimed fact must match pool truth within
// tolerance; facts of unknown kind are rejected as unverifiable.
EliminationVerdict eliminate(const CandidateQA& candidate, const std::vector<AttributePool>& pools,
                             const EvolutionTolerances& tol = {},
                             const std::vector<CorrelationPool>* corr_pools = nullptr);

struct EvolutionOptions {
    std::size_t rounds = 1;
    std::vector<double> mix = {};   // weights over kAllEvolutionTypes; empty = uniform
    int retries = 3;
    std::size_t in_flight = 1;      // worker threads against the generator
    std::size_t inject_count = 3;
    EvolutionTolerances tolerances;
};

struct EvolutionStats {
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t errors = 0;
    double acceptance_rate() const {
        return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts);
    }
};

struct EvolutionRun {
    std::vector<QARecord> records;
    std::vector<CandidateQA> accepted_candidates; // parallel to records
    EvolutionStats stats;
    std::vector<std::string> error_messages;
};

// Evolution loop: each round every surviving QA spawns one evolved child; only
// eliminator-accepted candidates continue and are emitted. Deterministic
// given a deterministic generator and master_seed, independent of in_flight.
EvolutionRun run_evolution(const std::vector<QARecord>& seeds,
                           const std::vector<AttributePool>& pools,
                           const std::vector<CorrelationPool>& corr_pools, TextGenerator& gen,
                           std::uint64_t master_seed, const EvolutionOptions& options);

// Task kind an accepted candidate is filed under.
std::string task_for_evolution(EvolutionType etype, const std::string& answer);

} // namespace tsqa::tsevol
