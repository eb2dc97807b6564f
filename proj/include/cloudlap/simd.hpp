#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace cloudlap {
namespace simd {

// Every reducing kernel follows one canonical accumulation pattern so that
// all implementations produce bit-identical doubles:
//
//   * four independent accumulators, element i feeds accumulator i % 4,
//     elements processed in increasing i;
//   * the final value is ((acc0 + acc1) + acc2) + acc3;
//   * products are rounded before adding (no FMA contraction anywhere).
//
// A 4-lane vector register holds exactly these four accumulators, so the
// AVX2 bodies are the same arithmetic, not an approximation of it. The
// scalar bodies spell the pattern out explicitly and serve as the reference
// in equivalence tests. Max-reductions and purely elementwise kernels are
// order-insensitive over finite inputs and need no special treatment.

struct Ops {
    const char* name;

    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i x[i] * x[i]
    double (*nrm2sq)(const double* x, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y[i] = a * x[i] + b * y[i]
    void (*scale2)(double a, const double* x, double b, double* y, std::size_t n);
    // sum_p w[p] * f[col[p]]  (one CSR row; col indices arbitrary)
    double (*row_gather_dot)(const double* w, const std::int32_t* col,
                             const double* f, std::size_t n);
    // sum_p w[p] * (fi - f[col[p]]); exact zero for constant f.
    double (*lap_row)(double fi, const double* w, const std::int32_t* col,
                      const double* f, std::size_t n);
    // out[j] = squared Euclidean distance between q and row j of pts
    // (row-major, stride d). Summation over coordinates in increasing order.
    void (*dist2_rows)(const double* q, const double* pts, std::size_t nrows,
                       std::size_t d, double* out);
    // max_j |fi - f[j]| / (dist[j] + delta), skipping j == skip.
    double (*ratio_max)(double fi, const double* f, const double* dist,
                        double delta, std::size_t n, std::size_t skip);
    // Circle arc distances: out[j] = min(|ti - t[j]|, 2*pi - |ti - t[j]|).
    void (*circle_dist)(double ti, const double* t, std::size_t n, double* out);
    // Flat 2-torus distances from per-point angles (t1, t2):
    // out[j] = sqrt(w1*w1 + w2*w2) with wk the wrapped angle gap.
    void (*torus_dist)(double t1i, double t2i, const double* t1,
                       const double* t2, std::size_t n, double* out);
    // Sphere distances out[j] = atan2(|q x p_j|, <q, p_j>), pts row-major
    // with 3 used coordinates.
    void (*sphere_dist)(const double* q, const double* pts, std::size_t n,
                        std::size_t stride, double* out);
};

// Scalar reference implementation; always available.
const Ops& scalar_ops();

// Best implementation for this machine, honoring the CLOUDLAP_SIMD
// environment variable ("scalar", "avx2", "neon", unset = auto-detect).
const Ops& active_ops();

// Introspection used by tests and the CLI manifest.
bool avx2_available();
bool neon_available();
std::string active_name();

#if defined(__x86_64__) || defined(_M_X64)
const Ops* avx2_ops_or_null();
#endif
#if defined(__aarch64__)
const Ops* neon_ops_or_null();
#endif

} // namespace simd
} // namespace cloudlap
