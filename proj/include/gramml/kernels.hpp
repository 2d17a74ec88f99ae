#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gramml::kernels {

/// Dense double-precision kernels behind the ML components' inner loops.
/// Every operation has a scalar reference implementation and (on x86-64
/// hardware with AVX2+FMA) a vectorized variant; the active table is picked
/// once at startup. Variants may differ in the last few ulps because of
/// reduction order and FMA contraction; the equivalence tests bound that.
struct Ops {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y[i] += x[i]
    void (*accumulate)(const double* x, double* y, std::size_t n);
    // y[i] += x[i]^2
    void (*accumulate_squared)(const double* x, double* y, std::size_t n);
    // m[i] = min(m[i], x[i])  /  m[i] = max(m[i], x[i])
    void (*elementwise_min)(const double* x, double* m, std::size_t n);
    void (*elementwise_max)(const double* x, double* m, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*squared_l2)(const double* a, const double* b, std::size_t n);
    // sum_i w[i] * (a[i] - b[i])^2
    double (*weighted_squared_l2)(const double* a, const double* b, const double* w,
                                  std::size_t n);
    // sum_i |a[i] - b[i]|
    double (*l1_distance)(const double* a, const double* b, std::size_t n);
    // out[i] = (x[i] - shift[i]) * scale[i]
    void (*affine)(const double* x, const double* shift, const double* scale, double* out,
                   std::size_t n);
};

const Ops& scalar_ops();

/// All variants usable on this machine (scalar always; avx2 when supported).
std::vector<const Ops*> available_ops();

/// The dispatched table. Defaults to the widest supported variant; the
/// GRAMML_KERNELS environment variable ("scalar" or "avx2") overrides.
const Ops& active();

/// Force a variant by name; returns false if it is unavailable. Test hook.
bool set_active(const std::string& name);

} // namespace gramml::kernels
