#include "gramml/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace gramml::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void accumulate_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

void accumulate_squared_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i] * x[i];
}

void elementwise_min_scalar(const double* x, double* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) m[i] = std::min(m[i], x[i]);
}

void elementwise_max_scalar(const double* x, double* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) m[i] = std::max(m[i], x[i]);
}

double squared_l2_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double weighted_squared_l2_scalar(const double* a, const double* b, const double* w,
                                  std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += w[i] * d * d;
    }
    return acc;
}

double l1_distance_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

void affine_scalar(const double* x, const double* shift, const double* scale, double* out,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - shift[i]) * scale[i];
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",
        dot_scalar,
        axpy_scalar,
        accumulate_scalar,
        accumulate_squared_scalar,
        elementwise_min_scalar,
        elementwise_max_scalar,
        squared_l2_scalar,
        weighted_squared_l2_scalar,
        l1_distance_scalar,
        affine_scalar,
    };
    return ops;
}

} // namespace gramml::kernels
