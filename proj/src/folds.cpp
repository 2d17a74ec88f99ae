#include "gramml/folds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gramml::ml {

std::vector<std::size_t> FoldPlan::fold_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::complement_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

FoldPlan stratified_folds(const std::vector<int>& labels, std::size_t n_classes, std::size_t k,
                          Rng& rng) {
    const std::size_t n = labels.size();
    if (k < 2) throw std::invalid_argument("stratified_folds: k must be at least 2");
    if (k > n) throw std::invalid_argument("stratified_folds: k exceeds the instance count");

    std::vector<std::vector<std::size_t>> per_class(n_classes);
    for (std::size_t i = 0; i < n; ++i)
        per_class[static_cast<std::size_t>(labels[i])].push_back(i);
    for (std::size_t c = 0; c < n_classes; ++c)
        if (per_class[c].empty())
            throw std::invalid_argument("stratified_folds: class " + std::to_string(c) +
                                        " has no instances");

    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(n, 0);
    std::size_t cursor = 0;
    for (auto& members : per_class) {
        rng.shuffle(members);
        for (std::size_t idx : members) {
            plan.assignments[idx] = cursor % k;
            ++cursor;
        }
    }
    return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_holdout(const std::vector<int>& labels, std::size_t n_classes, double test_fraction,
                   Rng& rng) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("holdout fraction must be in (0, 1)");

    std::vector<std::vector<std::size_t>> per_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        per_class[static_cast<std::size_t>(labels[i])].push_back(i);

    std::vector<std::size_t> train, test;
    for (auto& members : per_class) {
        if (members.empty()) continue;
        rng.shuffle(members);
        std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
        if (members.size() == 1) {
            n_test = 0; // singleton classes stay in the train side
        } else {
            n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
        }
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < n_test ? test : train).push_back(members[i]);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    if (test.empty() || train.empty())
        throw std::invalid_argument("holdout produced an empty split");
    return {std::move(train), std::move(test)};
}

} // namespace gramml::ml
