#pragma once

// Seeded synthetic datasets for tests: Gaussian blobs with a configurable
// count of informative and pure-noise features.

#include "gramml/dataset.hpp"
#include "gramml/rng.hpp"

#include <cmath>
#include <string>

namespace synthetic {

/// Deterministic standard normal draw (Box-Muller over the portable Rng).
inline double normal(gramml::Rng& rng) {
    double u1 = rng.next_double();
    while (u1 <= 0.0) u1 = rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// n rows, n_classes balanced classes. Informative features have per-class
/// means spaced `separation` apart (unit variance); noise features are
/// N(0,1) everywhere.
inline gramml::ml::Dataset make_blobs(std::size_t n, std::size_t n_informative,
                                      std::size_t n_noise, std::size_t n_classes,
                                      double separation, std::uint64_t seed) {
    gramml::Rng rng(seed);
    gramml::ml::Dataset ds;
    const std::size_t n_features = n_informative + n_noise;
    ds.features = gramml::ml::Matrix(n, n_features);
    for (std::size_t c = 0; c < n_classes; ++c)
        ds.class_names.push_back("c" + std::to_string(c));
    for (std::size_t j = 0; j < n_features; ++j)
        ds.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cls = i % n_classes;
        ds.labels.push_back(static_cast<int>(cls));
        double* row = ds.features.row(i);
        for (std::size_t j = 0; j < n_informative; ++j)
            row[j] = separation * static_cast<double>(cls) + normal(rng);
        for (std::size_t j = n_informative; j < n_features; ++j) row[j] = normal(rng);
    }
    return ds;
}

} // namespace synthetic
