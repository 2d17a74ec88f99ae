#pragma once

#include "gramml/pipeline.hpp"

#include <vector>

namespace gramml::ml {

/// Registry with the shipped component set. Preprocessors: imputer,
/// min_max_scaler, standard_scaler, max_abs_scaler, variance_threshold,
/// select_percentile. Classifiers: knn, nearest_centroid, gaussian_nb,
/// decision_tree, logistic_regression, perceptron. The imputer is the only
/// component that tolerates missing values.
const pipeline::Registry& default_registry();

/// Multinomial logistic loss (mean cross-entropy + l2/2 * ||W||^2, bias
/// unregularized) and its gradient at the given flat parameter vector.
/// Layout: n_classes rows of (n_features weights + 1 bias). Exposed so the
/// gradient can be checked against finite differences.
double logistic_loss_gradient(const std::vector<double>& params, const Matrix& x,
                              const std::vector<int>& labels, std::size_t n_classes, double l2,
                              std::vector<double>& gradient);

/// Per-feature one-way ANOVA F statistic (between-group over within-group
/// mean squares); 0 where both are degenerate, +inf where only the
/// within-group variance vanishes.
std::vector<double> anova_f_statistic(const Matrix& x, const std::vector<int>& labels,
                                      std::size_t n_classes);

} // namespace gramml::ml
