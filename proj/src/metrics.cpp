#include "gramml/metrics.hpp"

#include <stdexcept>

namespace gramml::ml {

std::vector<std::vector<std::int64_t>> confusion_matrix(const std::vector<int>& truth,
                                                        const std::vector<int>& predicted,
                                                        std::size_t n_classes) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("confusion_matrix: label vectors differ in length");
    std::vector<std::vector<std::int64_t>> m(n_classes, std::vector<std::int64_t>(n_classes, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto t = static_cast<std::size_t>(truth[i]);
        auto p = static_cast<std::size_t>(predicted[i]);
        if (t >= n_classes || p >= n_classes)
            throw std::invalid_argument("confusion_matrix: label out of range");
        ++m[t][p];
    }
    return m;
}

std::vector<double> per_class_f1(const std::vector<int>& truth,
                                 const std::vector<int>& predicted, std::size_t n_classes) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("per_class_f1: label vectors differ in length");
    std::vector<std::int64_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto t = static_cast<std::size_t>(truth[i]);
        auto p = static_cast<std::size_t>(predicted[i]);
        if (t >= n_classes || p >= n_classes)
            throw std::invalid_argument("per_class_f1: label out of range");
        if (t == p) {
            ++tp[t];
        } else {
            ++fp[p];
            ++fn[t];
        }
    }
    std::vector<double> f1(n_classes, 0.0);
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double precision = tp[c] + fp[c] > 0
                                     ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c])
                                     : 0.0;
        const double recall = tp[c] + fn[c] > 0
                                  ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c])
                                  : 0.0;
        f1[c] = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    return f1;
}

double f_measure(const std::vector<int>& truth, const std::vector<int>& predicted,
                 std::size_t n_classes) {
    const auto f1 = per_class_f1(truth, predicted, n_classes);
    double sum = 0.0;
    for (double v : f1) sum += v;
    return sum / static_cast<double>(n_classes);
}

} // namespace gramml::ml
