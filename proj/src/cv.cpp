#include "gramml/cv.hpp"

namespace gramml::ml {

double cv_fitness(const pipeline::Spec& spec, const pipeline::Registry& registry,
                  const Dataset& ds, const FoldPlan& plan, const CancelToken& cancel) {
    double sum = 0.0;
    for (std::size_t fold = 0; fold < plan.k; ++fold) {
        throw_if_cancelled(cancel);
        const Dataset train = ds.subset(plan.complement_indices(fold));
        const Dataset test = ds.subset(plan.fold_indices(fold));
        const std::vector<int> predicted = pipeline::fit_predict(spec, registry, train, test, cancel);
        sum += f_measure(test.labels, predicted, ds.n_classes());
    }
    return sum / static_cast<double>(plan.k);
}

double cv_fitness(const pipeline::Spec& spec, const pipeline::Registry& registry,
                  const Dataset& ds, std::size_t k, Rng& rng, const CancelToken& cancel) {
    const FoldPlan plan = stratified_folds(ds, k, rng);
    return cv_fitness(spec, registry, ds, plan, cancel);
}

} // namespace gramml::ml
