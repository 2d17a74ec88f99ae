#pragma once

#include "gramml/dataset.hpp"
#include "gramml/rng.hpp"

#include <vector>

namespace gramml::ml {

/// Stratified k-fold assignment: per-row fold index in [0, k). Per-class
/// fold counts differ by at most one and every fold is non-empty.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;

    std::vector<std::size_t> fold_indices(std::size_t fold) const;
    std::vector<std::size_t> complement_indices(std::size_t fold) const;
};

/// Seeded per-class shuffle followed by round-robin assignment; the fold
/// cursor carries across classes so no fold stays empty even when classes
/// are tiny. Throws std::invalid_argument on k < 2, k > n, or an empty class.
FoldPlan stratified_folds(const std::vector<int>& labels, std::size_t n_classes, std::size_t k,
                          Rng& rng);

inline FoldPlan stratified_folds(const Dataset& ds, std::size_t k, Rng& rng) {
    return stratified_folds(ds.labels, ds.n_classes(), k, rng);
}

/// Stratified holdout: returns (train_indices, test_indices). Every class
/// with at least two instances keeps at least one instance on each side.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_holdout(const std::vector<int>& labels, std::size_t n_classes, double test_fraction,
                   Rng& rng);

} // namespace gramml::ml
