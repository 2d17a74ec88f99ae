#pragma once

#include "gramml/cancel.hpp"
#include "gramml/dsge.hpp"
#include "gramml/grammar.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gramml::evo {

enum class EvalStatus { ok, timeout, resource_failure, compile_failure, depth_failure };

std::string_view to_string(EvalStatus status);

/// Sentinel below the [0, 1] metric range so sorting and tournaments need
/// no special cases.
constexpr double kWorstFitness = -1.0;

struct EvalResult {
    double fitness = kWorstFitness;
    EvalStatus status = EvalStatus::resource_failure;
};

/// Total fitness function over phenotypes. Must poll the cancel token
/// between folds / training iterations; may throw Cancelled or any
/// std::exception — evaluate_with_budget converts those to statuses.
using Evaluator = std::function<EvalResult(const dsge::Phenotype&, const CancelToken&)>;

struct EvolutionConfig {
    std::size_t population_size = 100;
    std::size_t max_generations = 100;
    std::size_t tournament_size = 2;
    double crossover_rate = 0.90;
    double mutation_rate = 0.10; // per codon
    std::size_t elite_count = 5;
    std::size_t stall_generations = 5;
    std::chrono::duration<double> eval_time_budget = std::chrono::seconds(300);
    std::uint64_t master_seed = 0;
    std::size_t max_depth = 17;
    std::size_t workers = 1;
    std::size_t freq_top_k = 0; // 0 = whole population

    void validate() const; // throws std::invalid_argument
};

struct Individual {
    dsge::Genotype genotype;
    dsge::Phenotype phenotype;
    double fitness = kWorstFitness;
    EvalStatus status = EvalStatus::depth_failure;
    bool evaluated = false;
};

/// Per-generation record; the method-frequency tables cover the best-K
/// individuals and always sum to 1 per category ('none' buckets pipelines
/// without preprocessors).
struct GenerationStats {
    std::size_t generation = 0;
    double best = kWorstFitness;
    double mean = kWorstFitness;
    double worst = kWorstFitness;
    std::map<std::string, std::size_t> status_counts; // keyed by status name
    std::map<std::string, double> preprocessing_frequency;
    std::map<std::string, double> classifier_frequency;
};

struct EvolveResult {
    std::vector<GenerationStats> generations;
    Individual best; // best ever seen
    std::size_t best_generation = 0;
    std::size_t evaluations = 0; // evaluator invocations (cache misses)
};

/// Called after each generation is evaluated, before survivors are picked.
using Observer = std::function<void(std::size_t generation, const std::vector<Individual>&)>;

/// Generational loop: evaluate, record, carry elites, refill by tournament
/// selection + crossover/mutation. Stops at max_generations or as soon as
/// the best fitness has not improved (by more than 1e-12) for
/// stall_generations consecutive generations. Deterministic for a fixed
/// master seed regardless of worker count: per-slot random streams are
/// stream_seed(master, generation, slot) and evaluation is memoized on the
/// phenotype text.
EvolveResult evolve(const Grammar& g, const EvolutionConfig& cfg, const Evaluator& evaluator,
                    const Observer& observer = {});

/// Run the evaluator under a wall-clock budget. Cancellation (cooperative,
/// via the token) maps to timeout; any thrown failure maps to
/// resource_failure. Never throws.
EvalResult evaluate_with_budget(const Evaluator& evaluator, const dsge::Phenotype& phenotype,
                                std::chrono::duration<double> budget);

} // namespace gramml::evo
