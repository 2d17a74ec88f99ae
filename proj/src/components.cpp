#include "gramml/components.hpp"

#include "gramml/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gramml::ml {

namespace {

using pipeline::ComponentSpec;
using pipeline::ComponentInfo;
using pipeline::ParamSpec;
using pipeline::Role;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Matrix& x, const char* who) {
    for (double v : x.data) {
        if (!std::isfinite(v))
            throw NumericError(std::string(who) +
                               ": input contains missing or non-finite values "
                               "(only the imputer accepts them)");
    }
}

// -------------------------------------------------------------------------
// Preprocessing
// -------------------------------------------------------------------------

class Imputer final : public Transformer {
public:
    enum class Strategy { mean, median, most_frequent };

    explicit Imputer(Strategy strategy) : strategy_(strategy) {}

    void fit(const Matrix& x, const std::vector<int>&, std::size_t, const CancelToken&) override {
        fill_.assign(x.cols, 0.0);
        std::vector<double> column;
        for (std::size_t j = 0; j < x.cols; ++j) {
            column.clear();
            for (std::size_t i = 0; i < x.rows; ++i) {
                const double v = x.at(i, j);
                if (!std::isnan(v)) column.push_back(v);
            }
            if (column.empty()) continue; // all-missing column fills with 0
            switch (strategy_) {
            case Strategy::mean:
                fill_[j] = std::accumulate(column.begin(), column.end(), 0.0) /
                           static_cast<double>(column.size());
                break;
            case Strategy::median: {
                std::sort(column.begin(), column.end());
                const std::size_t m = column.size() / 2;
                fill_[j] = column.size() % 2 == 1 ? column[m] : (column[m - 1] + column[m]) / 2.0;
                break;
            }
            case Strategy::most_frequent: {
                std::sort(column.begin(), column.end());
                double best = column[0];
                std::size_t best_run = 0, run = 0;
                double prev = column[0];
                for (double v : column) {
                    run = v == prev ? run + 1 : 1;
                    if (run > best_run) { // first longest run wins: smallest value on ties
                        best_run = run;
                        best = v;
                    }
                    prev = v;
                }
                fill_[j] = best;
                break;
            }
            }
        }
    }

    Matrix transform(const Matrix& x) const override {
        Matrix out = x;
        for (std::size_t i = 0; i < out.rows; ++i) {
            double* row = out.row(i);
            for (std::size_t j = 0; j < out.cols; ++j)
                if (std::isnan(row[j])) row[j] = fill_[j];
        }
        return out;
    }

private:
    Strategy strategy_;
    std::vector<double> fill_;
};

// Shared shape of the three scalers: transform is (x - shift) * scale per row.
class AffineScaler : public Transformer {
public:
    Matrix transform(const Matrix& x) const override {
        require_finite(x, "scaler");
        Matrix out(x.rows, x.cols);
        const auto& k = kernels::active();
        for (std::size_t i = 0; i < x.rows; ++i)
            k.affine(x.row(i), shift_.data(), scale_.data(), out.row(i), x.cols);
        return out;
    }

protected:
    std::vector<double> shift_, scale_;
};

class MinMaxScaler final : public AffineScaler {
public:
    void fit(const Matrix& x, const std::vector<int>&, std::size_t, const CancelToken&) override {
        require_finite(x, "min_max_scaler");
        std::vector<double> lo(x.cols, kInf), hi(x.cols, -kInf);
        const auto& k = kernels::active();
        for (std::size_t i = 0; i < x.rows; ++i) {
            k.elementwise_min(x.row(i), lo.data(), x.cols);
            k.elementwise_max(x.row(i), hi.data(), x.cols);
        }
        shift_ = lo;
        scale_.assign(x.cols, 0.0);
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double span = hi[j] - lo[j];
            scale_[j] = span > 0.0 ? 1.0 / span : 0.0; // constant columns map to 0
        }
    }
};

class MaxAbsScaler final : public AffineScaler {
public:
    void fit(const Matrix& x, const std::vector<int>&, std::size_t, const CancelToken&) override {
        require_finite(x, "max_abs_scaler");
        std::vector<double> lo(x.cols, kInf), hi(x.cols, -kInf);
        const auto& k = kernels::active();
        for (std::size_t i = 0; i < x.rows; ++i) {
            k.elementwise_min(x.row(i), lo.data(), x.cols);
            k.elementwise_max(x.row(i), hi.data(), x.cols);
        }
        shift_.assign(x.cols, 0.0);
        scale_.assign(x.cols, 0.0);
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double max_abs = std::max(std::fabs(lo[j]), std::fabs(hi[j]));
            scale_[j] = max_abs > 0.0 ? 1.0 / max_abs : 0.0;
        }
    }
};

// Column means and centered sum of squares, two passes for stability.
void column_moments(const Matrix& x, std::vector<double>& mean, std::vector<double>& ssd) {
    const auto& k = kernels::active();
    mean.assign(x.cols, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) k.accumulate(x.row(i), mean.data(), x.cols);
    for (double& m : mean) m /= static_cast<double>(x.rows);

    ssd.assign(x.cols, 0.0);
    std::vector<double> ones(x.cols, 1.0), centered(x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        k.affine(x.row(i), mean.data(), ones.data(), centered.data(), x.cols);
        k.accumulate_squared(centered.data(), ssd.data(), x.cols);
    }
}

class StandardScaler final : public AffineScaler {
public:
    void fit(const Matrix& x, const std::vector<int>&, std::size_t, const CancelToken&) override {
        require_finite(x, "standard_scaler");
        std::vector<double> ssd;
        column_moments(x, shift_, ssd);
        scale_.assign(x.cols, 0.0);
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double sd = std::sqrt(ssd[j] / static_cast<double>(x.rows));
            scale_[j] = sd > 0.0 ? 1.0 / sd : 0.0;
        }
    }
};

class VarianceThreshold final : public Transformer {
public:
    explicit VarianceThreshold(double threshold) : threshold_(threshold) {}

    void fit(const Matrix& x, const std::vector<int>&, std::size_t, const CancelToken&) override {
        require_finite(x, "variance_threshold");
        std::vector<double> mean, ssd;
        column_moments(x, mean, ssd);
        keep_.clear();
        for (std::size_t j = 0; j < x.cols; ++j)
            if (ssd[j] / static_cast<double>(x.rows) > threshold_) keep_.push_back(j);
    }

    Matrix transform(const Matrix& x) const override {
        Matrix out(x.rows, keep_.size());
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double* src = x.row(i);
            double* dst = out.row(i);
            for (std::size_t j = 0; j < keep_.size(); ++j) dst[j] = src[keep_[j]];
        }
        return out;
    }

private:
    double threshold_;
    std::vector<std::size_t> keep_;
};

class SelectPercentile final : public Transformer {
public:
    explicit SelectPercentile(std::int64_t percentile) : percentile_(percentile) {}

    void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
             const CancelToken&) override {
        require_finite(x, "select_percentile");
        const auto f = anova_f_statistic(x, labels, n_classes);
        std::vector<std::size_t> order(x.cols);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return f[a] > f[b]; // ties keep the lower column index first
        });
        // Keep at least one feature so downstream components always have input.
        std::size_t n_keep = static_cast<std::size_t>(
            std::floor(static_cast<double>(x.cols) * static_cast<double>(percentile_) / 100.0));
        n_keep = std::clamp<std::size_t>(n_keep, 1, x.cols);
        keep_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_keep));
        std::sort(keep_.begin(), keep_.end()); // preserve original column order
    }

    Matrix transform(const Matrix& x) const override {
        Matrix out(x.rows, keep_.size());
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double* src = x.row(i);
            double* dst = out.row(i);
            for (std::size_t j = 0; j < keep_.size(); ++j) dst[j] = src[keep_[j]];
        }
        return out;
    }

private:
    std::int64_t percentile_;
    std::vector<std::size_t> keep_;
};

// -------------------------------------------------------------------------
// Classifiers
// -------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> group_by_class(const std::vector<int>& labels,
                                                     std::size_t n_classes) {
    std::vector<std::vector<std::size_t>> groups(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        groups[static_cast<std::size_t>(labels[i])].push_back(i);
    return groups;
}

double minkowski(const double* a, const double* b, std::size_t n, int p) {
    const auto& k = kernels::active();
    return p == 1 ? k.l1_distance(a, b, n) : std::sqrt(k.squared_l2(a, b, n));
}

class Knn final : public Classifier {
public:
    Knn(std::int64_t k, bool distance_weighted, int p)
        : k_(k), distance_weighted_(distance_weighted), p_(p) {}

    void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
             const CancelToken&) override {
        require_finite(x, "knn");
        if (x.rows == 0) throw NumericError("knn: empty training set");
        train_ = x;
        labels_ = labels;
        n_classes_ = n_classes;
    }

    std::vector<int> predict(const Matrix& x, const CancelToken& cancel) const override {
        require_finite(x, "knn");
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), train_.rows);
        std::vector<int> out(x.rows, 0);
        std::vector<std::pair<double, std::size_t>> dist(train_.rows);
        for (std::size_t q = 0; q < x.rows; ++q) {
            if (q % 64 == 0) throw_if_cancelled(cancel);
            for (std::size_t i = 0; i < train_.rows; ++i)
                dist[i] = {minkowski(x.row(q), train_.row(i), x.cols, p_), i};
            // sort on (distance, row index): distance ties break to the lower index
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                              dist.end());
            out[q] = vote(dist, k);
        }
        return out;
    }

private:
    int vote(const std::vector<std::pair<double, std::size_t>>& dist, std::size_t k) const {
        std::vector<double> votes(n_classes_, 0.0);
        if (distance_weighted_) {
            bool exact = false;
            for (std::size_t i = 0; i < k; ++i) exact |= dist[i].first == 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const auto cls = static_cast<std::size_t>(labels_[dist[i].second]);
                if (exact) {
                    if (dist[i].first == 0.0) votes[cls] += 1.0;
                } else {
                    votes[cls] += 1.0 / dist[i].first;
                }
            }
        } else {
            for (std::size_t i = 0; i < k; ++i)
                votes[static_cast<std::size_t>(labels_[dist[i].second])] += 1.0;
        }
        return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }

    std::int64_t k_;
    bool distance_weighted_;
    int p_;
    Matrix train_;
    std::vector<int> labels_;
    std::size_t n_classes_ = 0;
};

class NearestCentroid final : public Classifier {
public:
    explicit NearestCentroid(int p) : p_(p) {}

    void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
             const CancelToken&) override {
        require_finite(x, "nearest_centroid");
        centroids_ = Matrix(n_classes, x.cols);
        present_.assign(n_classes, false);
        const auto groups = group_by_class(labels, n_classes);
        const auto& k = kernels::active();
        for (std::size_t c = 0; c < n_classes; ++c) {
            if (groups[c].empty()) continue;
            present_[c] = true;
            for (std::size_t i : groups[c]) k.accumulate(x.row(i), centroids_.row(c), x.cols);
            const double inv = 1.0 / static_cast<double>(groups[c].size());
            for (std::size_t j = 0; j < x.cols; ++j) centroids_.at(c, j) *= inv;
        }
        if (std::none_of(present_.begin(), present_.end(), [](bool b) { return b; }))
            throw NumericError("nearest_centroid: no classes present in training data");
    }

    std::vector<int> predict(const Matrix& x, const CancelToken& cancel) const override {
        require_finite(x, "nearest_centroid");
        std::vector<int> out(x.rows, 0);
        for (std::size_t q = 0; q < x.rows; ++q) {
            if (q % 256 == 0) throw_if_cancelled(cancel);
            double best = kInf;
            int best_class = 0;
            for (std::size_t c = 0; c < centroids_.rows; ++c) {
                if (!present_[c]) continue;
                const double d = minkowski(x.row(q), centroids_.row(c), x.cols, p_);
                if (d < best) {
                    best = d;
                    best_class = static_cast<int>(c);
                }
            }
            out[q] = best_class;
        }
        return out;
    }

private:
    int p_;
    Matrix centroids_;
    std::vector<bool> present_;
};

class GaussianNb final : public Classifier {
public:
    void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
             const CancelToken&) override {
        require_finite(x, "gaussian_nb");
        const auto groups = group_by_class(labels, n_classes);
        means_ = Matrix(n_classes, x.cols);
        inv_var_ = Matrix(n_classes, x.cols);
        log_norm_.assign(n_classes, 0.0);
        log_prior_.assign(n_classes, -kInf);

        // Smoothing: 1e-9 times the largest overall feature variance.
        std::vector<double> mean, ssd;
        column_moments(x, mean, ssd);
        double max_var = 0.0;
        for (double s : ssd) max_var = std::max(max_var, s / static_cast<double>(x.rows));
        const double epsilon = max_var > 0.0 ? 1e-9 * max_var : 1e-12;

        const auto& k = kernels::active();
        std::vector<double> ones(x.cols, 1.0), centered(x.cols), class_ssd(x.cols);
        for (std::size_t c = 0; c < n_classes; ++c) {
            if (groups[c].empty()) continue;
            const double n_c = static_cast<double>(groups[c].size());
            log_prior_[c] = std::log(n_c / static_cast<double>(x.rows));
            for (std::size_t i : groups[c]) k.accumulate(x.row(i), means_.row(c), x.cols);
            for (std::size_t j = 0; j < x.cols; ++j) means_.at(c, j) /= n_c;
            std::fill(class_ssd.begin(), class_ssd.end(), 0.0);
            for (std::size_t i : groups[c]) {
                k.affine(x.row(i), means_.row(c), ones.data(), centered.data(), x.cols);
                k.accumulate_squared(centered.data(), class_ssd.data(), x.cols);
            }
            double log_det = 0.0;
            for (std::size_t j = 0; j < x.cols; ++j) {
                const double var = class_ssd[j] / n_c + epsilon;
                inv_var_.at(c, j) = 1.0 / var;
                log_det += std::log(2.0 * M_PI * var);
            }
            log_norm_[c] = -0.5 * log_det;
        }
    }

    std::vector<int> predict(const Matrix& x, const CancelToken& cancel) const override {
        require_finite(x, "gaussian_nb");
        const auto& k = kernels::active();
        std::vector<int> out(x.rows, 0);
        for (std::size_t q = 0; q < x.rows; ++q) {
            if (q % 256 == 0) throw_if_cancelled(cancel);
            double best = -kInf;
            int best_class = 0;
            for (std::size_t c = 0; c < means_.rows; ++c) {
                if (log_prior_[c] == -kInf) continue;
                const double maha =
                    k.weighted_squared_l2(x.row(q), means_.row(c), inv_var_.row(c), x.cols);
                const double score = log_prior_[c] + log_norm_[c] - 0.5 * maha;
                if (score > best) {
                    best = score;
                    best_class = static_cast<int>(c);
                }
            }
            out[q] = best_class;
        }
        return out;
    }

private:
    Matrix means_, inv_var_;
    std::vector<double> log_norm_, log_prior_;
};

class DecisionTree final : public Classifier {
public:
    DecisionTree(bool entropy, std::optional<std::int64_t> max_depth, std::int64_t min_samples_leaf)
        : entropy_(entropy),
          max_depth_(max_depth ? static_cast<std::size_t>(*max_depth)
                               : std::numeric_limits<std::size_t>::max()),
          min_leaf_(static_cast<std::size_t>(min_samples_leaf)) {}

    void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
             const CancelToken& cancel) override {
        require_finite(x, "decision_tree");
        if (x.rows == 0) throw NumericError("decision_tree: empty training set");
        data_ = &x;
        labels_ = &labels;
        n_classes_ = n_classes;
        nodes_.clear();
        std::vector<std::size_t> all(x.rows);
        std::iota(all.begin(), all.end(), 0);
        build(all, 0, cancel);
        data_ = nullptr;
        labels_ = nullptr;
    }

    std::vector<int> predict(const Matrix& x, const CancelToken& cancel) const override {
        require_finite(x, "decision_tree");
        std::vector<int> out(x.rows, 0);
        for (std::size_t q = 0; q < x.rows; ++q) {
            if (q % 1024 == 0) throw_if_cancelled(cancel);
            std::size_t node = 0;
            while (nodes_[node].feature >= 0) {
                node = x.at(q, static_cast<std::size_t>(nodes_[node].feature)) <=
                               nodes_[node].threshold
                           ? nodes_[node].left
                           : nodes_[node].right;
            }
            out[q] = nodes_[node].label;
        }
        return out;
    }

private:
    struct Node {
        int feature = -1; // -1 marks a leaf
        double threshold = 0.0;
        std::size_t left = 0, right = 0;
        int label = 0;
    };

    double impurity(const std::vector<std::size_t>& counts, std::size_t total) const {
        if (total == 0) return 0.0;
        double result = entropy_ ? 0.0 : 1.0;
        for (std::size_t c : counts) {
            if (c == 0) continue;
            const double p = static_cast<double>(c) / static_cast<double>(total);
            if (entropy_) result -= p * std::log2(p);
            else result -= p * p;
        }
        return result;
    }

    std::size_t build(const std::vector<std::size_t>& rows, std::size_t depth,
                      const CancelToken& cancel) {
        throw_if_cancelled(cancel);
        const Matrix& x = *data_;
        std::vector<std::size_t> counts(n_classes_, 0);
        for (std::size_t i : rows) ++counts[static_cast<std::size_t>((*labels_)[i])];
        const int majority = static_cast<int>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        const bool pure =
            counts[static_cast<std::size_t>(majority)] == rows.size();

        const std::size_t node_index = nodes_.size();
        nodes_.push_back(Node{-1, 0.0, 0, 0, majority});
        if (pure || depth >= max_depth_ || rows.size() < 2 * min_leaf_) return node_index;

        // Best split: minimal weighted child impurity; scan features then
        // thresholds in ascending order so ties keep the first candidate.
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = kInf;
        std::vector<std::pair<double, int>> values(rows.size());
        std::vector<std::size_t> left_counts(n_classes_), right_counts(n_classes_);
        for (std::size_t j = 0; j < x.cols; ++j) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                values[i] = {x.at(rows[i], j), (*labels_)[rows[i]]};
            std::sort(values.begin(), values.end());
            std::fill(left_counts.begin(), left_counts.end(), 0);
            right_counts = counts;
            for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                const auto cls = static_cast<std::size_t>(values[i].second);
                ++left_counts[cls];
                --right_counts[cls];
                if (values[i].first == values[i + 1].first) continue;
                const std::size_t nl = i + 1, nr = values.size() - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double score = (static_cast<double>(nl) * impurity(left_counts, nl) +
                                      static_cast<double>(nr) * impurity(right_counts, nr)) /
                                     static_cast<double>(values.size());
                if (score < best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(j);
                    double mid = (values[i].first + values[i + 1].first) / 2.0;
                    if (mid >= values[i + 1].first) mid = values[i].first;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature < 0) return node_index; // no valid split: stay a leaf

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t i : rows) {
            if (x.at(i, static_cast<std::size_t>(best_feature)) <= best_threshold)
                left_rows.push_back(i);
            else
                right_rows.push_back(i);
        }
        nodes_[node_index].feature = best_feature;
        nodes_[node_index].threshold = best_threshold;
        const std::size_t left = build(left_rows, depth + 1, cancel);
        const std::size_t right = build(right_rows, depth + 1, cancel);
        nodes_[node_index].left = left;
        nodes_[node_index].right = right;
        return node_index;
    }

    bool entropy_;
    std::size_t max_depth_;
    std::size_t min_leaf_;
    std::size_t n_classes_ = 0;
    const Matrix* data_ = nullptr;
    const std::vector<int>* labels_ = nullptr;
    std::vector<Node> nodes_;
};

class LogisticRegression final : public Classifier {
public:
    LogisticRegression(double l2, std::int64_t max_iter, double learning_rate)
        : l2_(l2), max_iter_(max_iter), lr_(learning_rate) {}

    void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
             const CancelToken& cancel) override {
        require_finite(x, "logistic_regression");
        n_classes_ = n_classes;
        n_features_ = x.cols;
        params_.assign(n_classes * (x.cols + 1), 0.0);
        std::vector<double> gradient(params_.size());
        const auto& k = kernels::active();
        for (std::int64_t it = 0; it < max_iter_; ++it) {
            throw_if_cancelled(cancel);
            logistic_loss_gradient(params_, x, labels, n_classes, l2_, gradient);
            k.axpy(-lr_, gradient.data(), params_.data(), params_.size());
        }
    }

    std::vector<int> predict(const Matrix& x, const CancelToken& cancel) const override {
        require_finite(x, "logistic_regression");
        const auto& k = kernels::active();
        const std::size_t stride = n_features_ + 1;
        std::vector<int> out(x.rows, 0);
        for (std::size_t q = 0; q < x.rows; ++q) {
            if (q % 256 == 0) throw_if_cancelled(cancel);
            double best = -kInf;
            for (std::size_t c = 0; c < n_classes_; ++c) {
                const double* w = params_.data() + c * stride;
                const double score = k.dot(w, x.row(q), n_features_) + w[n_features_];
                if (score > best) {
                    best = score;
                    out[q] = static_cast<int>(c);
                }
            }
        }
        return out;
    }

private:
    double l2_;
    std::int64_t max_iter_;
    double lr_;
    std::size_t n_classes_ = 0, n_features_ = 0;
    std::vector<double> params_;
};

class Perceptron final : public Classifier {
public:
    Perceptron(std::int64_t epochs, double learning_rate) : epochs_(epochs), lr_(learning_rate) {}

    void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
             const CancelToken& cancel) override {
        require_finite(x, "perceptron");
        n_classes_ = n_classes;
        n_features_ = x.cols;
        params_.assign(n_classes * (x.cols + 1), 0.0);
        const auto& k = kernels::active();
        const std::size_t stride = n_features_ + 1;
        for (std::int64_t epoch = 0; epoch < epochs_; ++epoch) {
            throw_if_cancelled(cancel);
            for (std::size_t i = 0; i < x.rows; ++i) {
                const double* row = x.row(i);
                double best = -kInf;
                std::size_t predicted = 0;
                for (std::size_t c = 0; c < n_classes_; ++c) {
                    const double* w = params_.data() + c * stride;
                    const double score = k.dot(w, row, n_features_) + w[n_features_];
                    if (score > best) {
                        best = score;
                        predicted = c;
                    }
                }
                const auto truth = static_cast<std::size_t>(labels[i]);
                if (predicted != truth) {
                    double* w_true = params_.data() + truth * stride;
                    double* w_pred = params_.data() + predicted * stride;
                    k.axpy(lr_, row, w_true, n_features_);
                    w_true[n_features_] += lr_;
                    k.axpy(-lr_, row, w_pred, n_features_);
                    w_pred[n_features_] -= lr_;
                }
            }
        }
    }

    std::vector<int> predict(const Matrix& x, const CancelToken& cancel) const override {
        require_finite(x, "perceptron");
        const auto& k = kernels::active();
        const std::size_t stride = n_features_ + 1;
        std::vector<int> out(x.rows, 0);
        for (std::size_t q = 0; q < x.rows; ++q) {
            if (q % 256 == 0) throw_if_cancelled(cancel);
            double best = -kInf;
            for (std::size_t c = 0; c < n_classes_; ++c) {
                const double* w = params_.data() + c * stride;
                const double score = k.dot(w, x.row(q), n_features_) + w[n_features_];
                if (score > best) {
                    best = score;
                    out[q] = static_cast<int>(c);
                }
            }
        }
        return out;
    }

private:
    std::int64_t epochs_;
    double lr_;
    std::size_t n_classes_ = 0, n_features_ = 0;
    std::vector<double> params_;
};

// -------------------------------------------------------------------------
// Registry
// -------------------------------------------------------------------------

ParamSpec int_param(std::string name, double lo, double hi, std::int64_t def) {
    ParamSpec p;
    p.name = std::move(name);
    p.kind = ParamSpec::Kind::int_range;
    p.lo = lo;
    p.hi = hi;
    p.default_value = def;
    return p;
}

ParamSpec optional_int_param(std::string name, double lo, double hi) {
    ParamSpec p;
    p.name = std::move(name);
    p.kind = ParamSpec::Kind::optional_int_range;
    p.lo = lo;
    p.hi = hi;
    p.default_value = std::monostate{};
    return p;
}

ParamSpec float_param(std::string name, double lo, double hi, double def) {
    ParamSpec p;
    p.name = std::move(name);
    p.kind = ParamSpec::Kind::float_range;
    p.lo = lo;
    p.hi = hi;
    p.default_value = def;
    return p;
}

ParamSpec choice_param(std::string name, std::vector<std::string> choices, std::string def) {
    ParamSpec p;
    p.name = std::move(name);
    p.kind = ParamSpec::Kind::choice;
    p.choices = std::move(choices);
    p.default_value = std::move(def);
    return p;
}

pipeline::Registry build_registry() {
    pipeline::Registry registry;

    {
        ComponentInfo info;
        info.role = Role::preprocessing;
        info.name = "imputer";
        info.params = {choice_param("strategy", {"mean", "median", "most_frequent"}, "mean")};
        info.make_transformer = [](const ComponentSpec& spec) -> std::unique_ptr<Transformer> {
            const std::string strategy = spec.get_text("strategy");
            auto s = strategy == "median"
                         ? Imputer::Strategy::median
                         : strategy == "most_frequent" ? Imputer::Strategy::most_frequent
                                                       : Imputer::Strategy::mean;
            return std::make_unique<Imputer>(s);
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::preprocessing;
        info.name = "min_max_scaler";
        info.make_transformer = [](const ComponentSpec&) -> std::unique_ptr<Transformer> {
            return std::make_unique<MinMaxScaler>();
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::preprocessing;
        info.name = "standard_scaler";
        info.make_transformer = [](const ComponentSpec&) -> std::unique_ptr<Transformer> {
            return std::make_unique<StandardScaler>();
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::preprocessing;
        info.name = "max_abs_scaler";
        info.make_transformer = [](const ComponentSpec&) -> std::unique_ptr<Transformer> {
            return std::make_unique<MaxAbsScaler>();
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::preprocessing;
        info.name = "variance_threshold";
        info.params = {float_param("threshold", 0.0, 1e9, 0.0)};
        info.make_transformer = [](const ComponentSpec& spec) -> std::unique_ptr<Transformer> {
            return std::make_unique<VarianceThreshold>(spec.get_double("threshold"));
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::preprocessing;
        info.name = "select_percentile";
        info.params = {int_param("percentile", 1, 100, 10)};
        info.make_transformer = [](const ComponentSpec& spec) -> std::unique_ptr<Transformer> {
            return std::make_unique<SelectPercentile>(spec.get_int("percentile"));
        };
        registry.add(std::move(info));
    }

    {
        ComponentInfo info;
        info.role = Role::classifier;
        info.name = "knn";
        info.params = {int_param("n_neighbors", 1, 100, 5),
                       choice_param("weights", {"uniform", "distance"}, "uniform"),
                       int_param("p", 1, 2, 2)};
        info.make_classifier = [](const ComponentSpec& spec) -> std::unique_ptr<Classifier> {
            return std::make_unique<Knn>(spec.get_int("n_neighbors"),
                                         spec.get_text("weights") == "distance",
                                         static_cast<int>(spec.get_int("p")));
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::classifier;
        info.name = "nearest_centroid";
        info.params = {int_param("p", 1, 2, 2)};
        info.make_classifier = [](const ComponentSpec& spec) -> std::unique_ptr<Classifier> {
            return std::make_unique<NearestCentroid>(static_cast<int>(spec.get_int("p")));
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::classifier;
        info.name = "gaussian_nb";
        info.make_classifier = [](const ComponentSpec&) -> std::unique_ptr<Classifier> {
            return std::make_unique<GaussianNb>();
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::classifier;
        info.name = "decision_tree";
        info.params = {choice_param("criterion", {"gini", "entropy"}, "gini"),
                       optional_int_param("max_depth", 1, 50),
                       int_param("min_samples_leaf", 1, 1000, 1)};
        info.make_classifier = [](const ComponentSpec& spec) -> std::unique_ptr<Classifier> {
            return std::make_unique<DecisionTree>(spec.get_text("criterion") == "entropy",
                                                  spec.get_optional_int("max_depth"),
                                                  spec.get_int("min_samples_leaf"));
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::classifier;
        info.name = "logistic_regression";
        info.params = {float_param("l2", 0.0, 1e6, 1e-4),
                       int_param("max_iter", 1, 100000, 200),
                       float_param("learning_rate", 1e-9, 10.0, 0.1)};
        info.make_classifier = [](const ComponentSpec& spec) -> std::unique_ptr<Classifier> {
            return std::make_unique<LogisticRegression>(spec.get_double("l2"),
                                                        spec.get_int("max_iter"),
                                                        spec.get_double("learning_rate"));
        };
        registry.add(std::move(info));
    }
    {
        ComponentInfo info;
        info.role = Role::classifier;
        info.name = "perceptron";
        info.params = {int_param("epochs", 1, 100000, 50),
                       float_param("learning_rate", 1e-9, 10.0, 0.1)};
        info.make_classifier = [](const ComponentSpec& spec) -> std::unique_ptr<Classifier> {
            return std::make_unique<Perceptron>(spec.get_int("epochs"),
                                                spec.get_double("learning_rate"));
        };
        registry.add(std::move(info));
    }

    return registry;
}

} // namespace

const pipeline::Registry& default_registry() {
    static const pipeline::Registry registry = build_registry();
    return registry;
}

double logistic_loss_gradient(const std::vector<double>& params, const Matrix& x,
                              const std::vector<int>& labels, std::size_t n_classes, double l2,
                              std::vector<double>& gradient) {
    const std::size_t stride = x.cols + 1;
    gradient.assign(params.size(), 0.0);
    const auto& k = kernels::active();
    const double inv_n = 1.0 / static_cast<double>(x.rows);

    double loss = 0.0;
    std::vector<double> scores(n_classes);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row(i);
        double max_score = -kInf;
        for (std::size_t c = 0; c < n_classes; ++c) {
            const double* w = params.data() + c * stride;
            scores[c] = k.dot(w, row, x.cols) + w[x.cols];
            max_score = std::max(max_score, scores[c]);
        }
        double z = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            scores[c] = std::exp(scores[c] - max_score);
            z += scores[c];
        }
        const auto truth = static_cast<std::size_t>(labels[i]);
        loss -= std::log(scores[truth] / z) * inv_n;
        for (std::size_t c = 0; c < n_classes; ++c) {
            const double coef = (scores[c] / z - (c == truth ? 1.0 : 0.0)) * inv_n;
            double* g = gradient.data() + c * stride;
            k.axpy(coef, row, g, x.cols);
            g[x.cols] += coef;
        }
    }
    // L2 on weights only, biases excluded.
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double* w = params.data() + c * stride;
        double* g = gradient.data() + c * stride;
        for (std::size_t j = 0; j < x.cols; ++j) {
            g[j] += l2 * w[j];
            loss += 0.5 * l2 * w[j] * w[j];
        }
    }
    return loss;
}

std::vector<double> anova_f_statistic(const Matrix& x, const std::vector<int>& labels,
                                      std::size_t n_classes) {
    const auto groups = group_by_class(labels, n_classes);
    std::size_t present = 0;
    for (const auto& g : groups) present += g.empty() ? 0 : 1;

    std::vector<double> overall_mean, unused;
    column_moments(x, overall_mean, unused);

    const auto& k = kernels::active();
    std::vector<double> ssb(x.cols, 0.0), ssw(x.cols, 0.0);
    std::vector<double> class_mean(x.cols), ones(x.cols, 1.0), centered(x.cols);
    for (const auto& group : groups) {
        if (group.empty()) continue;
        const double n_c = static_cast<double>(group.size());
        std::fill(class_mean.begin(), class_mean.end(), 0.0);
        for (std::size_t i : group) k.accumulate(x.row(i), class_mean.data(), x.cols);
        for (double& m : class_mean) m /= n_c;
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double d = class_mean[j] - overall_mean[j];
            ssb[j] += n_c * d * d;
        }
        for (std::size_t i : group) {
            k.affine(x.row(i), class_mean.data(), ones.data(), centered.data(), x.cols);
            k.accumulate_squared(centered.data(), ssw.data(), x.cols);
        }
    }

    std::vector<double> f(x.cols, 0.0);
    const double dfb = static_cast<double>(present) - 1.0;
    const double dfw = static_cast<double>(x.rows) - static_cast<double>(present);
    for (std::size_t j = 0; j < x.cols; ++j) {
        if (dfb <= 0.0) continue;
        const double msb = ssb[j] / dfb;
        if (dfw <= 0.0 || ssw[j] == 0.0) {
            f[j] = msb > 0.0 ? kInf : 0.0;
        } else {
            f[j] = msb / (ssw[j] / dfw);
        }
    }
    return f;
}

} // namespace gramml::ml
