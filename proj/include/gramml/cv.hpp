#pragma once

#include "gramml/folds.hpp"
#include "gramml/metrics.hpp"
#include "gramml/pipeline.hpp"

namespace gramml::ml {

/// Fitness of a pipeline: the arithmetic mean of the macro F-measures over
/// the plan's folds (train on the complement, test on the fold). Any
/// failing fold fails the whole evaluation; the cancel token is honored
/// between folds and inside component training loops.
double cv_fitness(const pipeline::Spec& spec, const pipeline::Registry& registry,
                  const Dataset& ds, const FoldPlan& plan, const CancelToken& cancel);

/// Convenience shape: builds a fresh stratified plan from the rng.
double cv_fitness(const pipeline::Spec& spec, const pipeline::Registry& registry,
                  const Dataset& ds, std::size_t k, Rng& rng, const CancelToken& cancel);

} // namespace gramml::ml
