#include "gramml/evolution.hpp"

#include "gramml/rng.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace gramml::evo {

std::string_view to_string(EvalStatus status) {
    switch (status) {
    case EvalStatus::ok: return "ok";
    case EvalStatus::timeout: return "timeout";
    case EvalStatus::resource_failure: return "resource_failure";
    case EvalStatus::compile_failure: return "compile_failure";
    case EvalStatus::depth_failure: return "depth_failure";
    }
    return "unknown";
}

void EvolutionConfig::validate() const {
    if (population_size == 0) throw std::invalid_argument("population_size must be positive");
    if (max_generations == 0) throw std::invalid_argument("max_generations must be positive");
    if (elite_count >= population_size)
        throw std::invalid_argument("elite_count must be smaller than population_size");
    if (tournament_size < 1) throw std::invalid_argument("tournament_size must be at least 1");
    if (crossover_rate < 0.0 || crossover_rate > 1.0)
        throw std::invalid_argument("crossover_rate must be in [0, 1]");
    if (mutation_rate < 0.0 || mutation_rate > 1.0)
        throw std::invalid_argument("mutation_rate must be in [0, 1]");
    if (stall_generations < 1) throw std::invalid_argument("stall_generations must be at least 1");
    if (eval_time_budget.count() <= 0.0)
        throw std::invalid_argument("eval_time_budget must be positive");
    if (max_depth == 0) throw std::invalid_argument("max_depth must be positive");
}

EvalResult evaluate_with_budget(const Evaluator& evaluator, const dsge::Phenotype& phenotype,
                                std::chrono::duration<double> budget) {
    EvalResult result;
    try {
        result = evaluator(phenotype, CancelToken::after(budget));
    } catch (const Cancelled&) {
        return {kWorstFitness, EvalStatus::timeout};
    } catch (...) {
        return {kWorstFitness, EvalStatus::resource_failure};
    }
    if (result.status != EvalStatus::ok) result.fitness = kWorstFitness;
    return result;
}

namespace {

struct FitnessCache {
    std::unordered_map<std::string, EvalResult> entries;
};

Individual make_individual(const Grammar& g, dsge::Genotype genotype, std::size_t max_depth) {
    Individual ind;
    dsge::MapResult mapped = dsge::map_genotype(g, genotype, max_depth);
    if (!mapped.ok) {
        ind.genotype = std::move(genotype);
        ind.fitness = kWorstFitness;
        ind.status = EvalStatus::depth_failure;
        ind.evaluated = true; // nothing to evaluate
        return ind;
    }
    ind.genotype = std::move(mapped.genotype);
    ind.phenotype = std::move(mapped.phenotype);
    return ind;
}

/// Evaluate every not-yet-evaluated individual. Unique phenotypes are
/// computed once (cache memoizes on the rendered text) and work is spread
/// over the worker threads; results are identical for any worker count.
void evaluate_population(std::vector<Individual>& pop, const EvolutionConfig& cfg,
                         const Evaluator& evaluator, FitnessCache& cache,
                         std::size_t& evaluations) {
    std::vector<std::string> keys;                       // first-appearance order
    std::unordered_map<std::string, std::size_t> index;  // key -> position in keys
    std::vector<const dsge::Phenotype*> phenotypes;
    for (auto& ind : pop) {
        if (ind.evaluated) continue;
        std::string key = ind.phenotype.text();
        if (cache.entries.count(key) || index.count(key)) continue;
        index.emplace(key, keys.size());
        keys.push_back(std::move(key));
        phenotypes.push_back(&ind.phenotype);
    }

    std::vector<EvalResult> results(keys.size());
    const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
    if (workers == 1 || keys.size() <= 1) {
        for (std::size_t i = 0; i < keys.size(); ++i)
            results[i] = evaluate_with_budget(evaluator, *phenotypes[i], cfg.eval_time_budget);
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= keys.size()) break;
                results[i] = evaluate_with_budget(evaluator, *phenotypes[i], cfg.eval_time_budget);
            }
        };
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < std::min(workers, keys.size()); ++w)
            threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }

    for (std::size_t i = 0; i < keys.size(); ++i) cache.entries.emplace(keys[i], results[i]);
    evaluations += keys.size();

    for (auto& ind : pop) {
        if (ind.evaluated) continue;
        const EvalResult& r = cache.entries.at(ind.phenotype.text());
        ind.fitness = r.fitness;
        ind.status = r.status;
        ind.evaluated = true;
    }
}

std::vector<std::size_t> rank_by_fitness(const std::vector<Individual>& pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pop[a].fitness != pop[b].fitness) return pop[a].fitness > pop[b].fitness;
        return a < b;
    });
    return order;
}

std::size_t tournament(const std::vector<Individual>& pop, const EvolutionConfig& cfg, Rng& rng) {
    std::vector<std::size_t> best;
    double best_fitness = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < cfg.tournament_size; ++t) {
        const std::size_t candidate = static_cast<std::size_t>(rng.below(pop.size()));
        if (pop[candidate].fitness > best_fitness) {
            best_fitness = pop[candidate].fitness;
            best.assign(1, candidate);
        } else if (pop[candidate].fitness == best_fitness) {
            best.push_back(candidate);
        }
    }
    return best.size() == 1 ? best[0] : best[rng.below(best.size())];
}

constexpr std::string_view kPrepTag = "preprocessing:";
constexpr std::string_view kClassifierTag = "classifier:";

GenerationStats compute_stats(std::size_t generation, const std::vector<Individual>& pop,
                              const std::vector<std::size_t>& order, std::size_t top_k) {
    GenerationStats stats;
    stats.generation = generation;
    stats.best = -std::numeric_limits<double>::infinity();
    stats.worst = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& ind : pop) {
        stats.best = std::max(stats.best, ind.fitness);
        stats.worst = std::min(stats.worst, ind.fitness);
        sum += ind.fitness;
        auto key = std::string(to_string(ind.status));
        ++stats.status_counts[key];
    }
    stats.mean = sum / static_cast<double>(pop.size());

    // Method usage over the best-K individuals (Fig. 3-style data). Every
    // pipeline contributes one classifier count and either its preprocessor
    // names or 'none'; fractions therefore sum to 1 per category.
    std::map<std::string, std::size_t> prep_counts, clf_counts;
    std::size_t prep_total = 0, clf_total = 0;
    const std::size_t k = std::min(top_k, pop.size());
    for (std::size_t r = 0; r < k; ++r) {
        const Individual& ind = pop[order[r]];
        if (ind.phenotype.tokens.empty()) continue;
        std::size_t preps = 0;
        for (const std::string& token : ind.phenotype.tokens) {
            if (token.compare(0, kPrepTag.size(), kPrepTag) == 0) {
                ++prep_counts[token.substr(kPrepTag.size())];
                ++prep_total;
                ++preps;
            } else if (token.compare(0, kClassifierTag.size(), kClassifierTag) == 0) {
                ++clf_counts[token.substr(kClassifierTag.size())];
                ++clf_total;
            }
        }
        if (preps == 0) {
            ++prep_counts["none"];
            ++prep_total;
        }
    }
    for (const auto& [name, count] : prep_counts)
        stats.preprocessing_frequency[name] =
            static_cast<double>(count) / static_cast<double>(prep_total);
    for (const auto& [name, count] : clf_counts)
        stats.classifier_frequency[name] =
            static_cast<double>(count) / static_cast<double>(clf_total);
    return stats;
}

} // namespace

EvolveResult evolve(const Grammar& g, const EvolutionConfig& cfg, const Evaluator& evaluator,
                    const Observer& observer) {
    cfg.validate();

    EvolveResult result;
    FitnessCache cache;

    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    for (std::size_t slot = 0; slot < cfg.population_size; ++slot) {
        Rng rng(stream_seed(cfg.master_seed, 0, slot));
        pop.push_back(make_individual(g, dsge::random_genotype(g, rng, cfg.max_depth),
                                      cfg.max_depth));
    }

    double stall_reference = -std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    bool have_best = false;

    for (std::size_t generation = 0; generation < cfg.max_generations; ++generation) {
        evaluate_population(pop, cfg, evaluator, cache, result.evaluations);

        const auto order = rank_by_fitness(pop);
        const std::size_t top_k = cfg.freq_top_k == 0 ? pop.size() : cfg.freq_top_k;
        result.generations.push_back(compute_stats(generation, pop, order, top_k));
        if (observer) observer(generation, pop);

        const Individual& generation_best = pop[order.front()];
        if (!have_best || generation_best.fitness > result.best.fitness) {
            result.best = generation_best;
            result.best_generation = generation;
            have_best = true;
        }

        // Strict improvement beyond float noise resets the stall counter.
        if (generation_best.fitness > stall_reference + 1e-12) {
            stall_reference = generation_best.fitness;
            stall = 0;
        } else {
            ++stall;
        }
        if (stall >= cfg.stall_generations) break;
        if (generation + 1 == cfg.max_generations) break;

        std::vector<Individual> next;
        next.reserve(cfg.population_size);
        for (std::size_t e = 0; e < cfg.elite_count; ++e) next.push_back(pop[order[e]]);

        for (std::size_t slot = cfg.elite_count; slot < cfg.population_size; slot += 2) {
            Rng rng(stream_seed(cfg.master_seed, generation + 1, slot));
            const std::size_t pa = tournament(pop, cfg, rng);
            const std::size_t pb = tournament(pop, cfg, rng);
            dsge::Genotype child_a = pop[pa].genotype;
            dsge::Genotype child_b = pop[pb].genotype;
            if (rng.bernoulli(cfg.crossover_rate))
                std::tie(child_a, child_b) = dsge::crossover(g, child_a, child_b, rng, cfg.max_depth);
            child_a = dsge::mutate(g, child_a, rng, cfg.mutation_rate, cfg.max_depth);
            next.push_back(make_individual(g, std::move(child_a), cfg.max_depth));
            if (next.size() < cfg.population_size) {
                child_b = dsge::mutate(g, child_b, rng, cfg.mutation_rate, cfg.max_depth);
                next.push_back(make_individual(g, std::move(child_b), cfg.max_depth));
            }
        }
        pop = std::move(next);
    }

    return result;
}

} // namespace gramml::evo
