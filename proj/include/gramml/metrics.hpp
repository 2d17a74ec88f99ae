#pragma once

#include <cstdint>
#include <vector>

namespace gramml::ml {

/// confusion[t][p] = number of instances of true class t predicted as p.
std::vector<std::vector<std::int64_t>> confusion_matrix(const std::vector<int>& truth,
                                                        const std::vector<int>& predicted,
                                                        std::size_t n_classes);

/// Per-class F1 with the zero conventions: precision/recall are 0 when
/// their denominator is 0, and F1 = 0 when precision + recall = 0.
std::vector<double> per_class_f1(const std::vector<int>& truth,
                                 const std::vector<int>& predicted, std::size_t n_classes);

/// Macro-averaged F-measure: unweighted mean of per-class F1 over all
/// n_classes (classes absent from both vectors contribute 0).
double f_measure(const std::vector<int>& truth, const std::vector<int>& predicted,
                 std::size_t n_classes);

} // namespace gramml::ml
