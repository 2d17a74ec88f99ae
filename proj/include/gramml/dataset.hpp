#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gramml::ml {

/// Row-major dense matrix of doubles. Missing values are quiet NaN.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Classification dataset: numeric feature matrix (categoricals one-hot
/// encoded at ingestion), index-encoded labels, and the name tables.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;

    std::size_t size() const { return features.rows; }
    std::size_t n_classes() const { return class_names.size(); }
    bool has_missing() const;

    /// Row subset in the given order (indices into this dataset).
    Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// Load a CSV with a header row. Numeric columns parse as doubles;
/// categorical columns are one-hot encoded with lexicographic category
/// order; cells equal to missing_token become NaN (spread across the
/// one-hot block for categorical columns). The label column is removed from
/// the features and index-encoded by lexicographic class order.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& missing_token = "?");

/// Write a dataset back out as CSV (used by tests and the sweep tooling).
void write_csv(const Dataset& ds, const std::string& path, const std::string& label_column);

} // namespace gramml::ml
