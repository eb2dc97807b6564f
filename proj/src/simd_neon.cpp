#include "cloudlap/simd.hpp"

// NEON backend for aarch64. float64x2 gives two lanes, so the four canonical
// accumulators live in a register pair: acc01 covers lanes 0 and 1, acc23
// lanes 2 and 3. Explicit vmulq + vaddq keep products rounded before the add,
// matching the scalar reference bit for bit.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace cloudlap {
namespace simd {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double combine4(float64x2_t acc01, float64x2_t acc23, const double* tx,
                       const double* ty, std::size_t tail) {
    double lane[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                      vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (std::size_t t = 0; t < tail; ++t) lane[t] += tx[t] * ty[t];
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

double dot_neon(const double* x, const double* y, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    float64x2_t a01 = vdupq_n_f64(0.0);
    float64x2_t a23 = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n0; i += 4) {
        a01 = vaddq_f64(a01, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
        a23 = vaddq_f64(a23,
                        vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
    }
    return combine4(a01, a23, x + n0, y + n0, n - n0);
}

double nrm2sq_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(1);
    const float64x2_t va = vdupq_n_f64(a);
    for (std::size_t i = 0; i < n0; i += 2) {
        vst1q_f64(y + i,
                  vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    }
    for (std::size_t i = n0; i < n; ++i) y[i] += a * x[i];
}

void scale2_neon(double a, const double* x, double b, double* y,
                 std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(1);
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    for (std::size_t i = 0; i < n0; i += 2) {
        vst1q_f64(y + i, vaddq_f64(vmulq_f64(va, vld1q_f64(x + i)),
                                   vmulq_f64(vb, vld1q_f64(y + i))));
    }
    for (std::size_t i = n0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double row_gather_dot_neon(const double* w, const std::int32_t* col,
                           const double* f, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    float64x2_t a01 = vdupq_n_f64(0.0);
    float64x2_t a23 = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n0; i += 4) {
        double g[4] = {f[col[i]], f[col[i + 1]], f[col[i + 2]], f[col[i + 3]]};
        a01 = vaddq_f64(a01, vmulq_f64(vld1q_f64(w + i), vld1q_f64(g)));
        a23 = vaddq_f64(a23, vmulq_f64(vld1q_f64(w + i + 2), vld1q_f64(g + 2)));
    }
    double lane[4] = {vgetq_lane_f64(a01, 0), vgetq_lane_f64(a01, 1),
                      vgetq_lane_f64(a23, 0), vgetq_lane_f64(a23, 1)};
    for (std::size_t t = 0; t + n0 < n; ++t) lane[t] += w[n0 + t] * f[col[n0 + t]];
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

double lap_row_neon(double fi, const double* w, const std::int32_t* col,
                    const double* f, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    const float64x2_t vfi = vdupq_n_f64(fi);
    float64x2_t a01 = vdupq_n_f64(0.0);
    float64x2_t a23 = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n0; i += 4) {
        double g[4] = {f[col[i]], f[col[i + 1]], f[col[i + 2]], f[col[i + 3]]};
        a01 = vaddq_f64(a01, vmulq_f64(vld1q_f64(w + i),
                                       vsubq_f64(vfi, vld1q_f64(g))));
        a23 = vaddq_f64(a23, vmulq_f64(vld1q_f64(w + i + 2),
                                       vsubq_f64(vfi, vld1q_f64(g + 2))));
    }
    double lane[4] = {vgetq_lane_f64(a01, 0), vgetq_lane_f64(a01, 1),
                      vgetq_lane_f64(a23, 0), vgetq_lane_f64(a23, 1)};
    for (std::size_t t = 0; t + n0 < n; ++t) {
        lane[t] += w[n0 + t] * (fi - f[col[n0 + t]]);
    }
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

void dist2_rows_neon(const double* q, const double* pts, std::size_t nrows,
                     std::size_t d, double* out) {
    for (std::size_t j = 0; j < nrows; ++j) {
        const double* p = pts + j * d;
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = q[k] - p[k];
            s += diff * diff;
        }
        out[j] = s;
    }
}

double ratio_max_neon(double fi, const double* f, const double* dist,
                      double delta, std::size_t n, std::size_t skip) {
    const std::size_t n0 = n & ~std::size_t(1);
    const float64x2_t vfi = vdupq_n_f64(fi);
    const float64x2_t vdelta = vdupq_n_f64(delta);
    float64x2_t vbest = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < n0; j += 2) {
        const float64x2_t num = vabsq_f64(vsubq_f64(vfi, vld1q_f64(f + j)));
        const float64x2_t den = vaddq_f64(vld1q_f64(dist + j), vdelta);
        float64x2_t r = vdivq_f64(num, den);
        if (skip == j) r = vsetq_lane_f64(0.0, r, 0);
        if (skip == j + 1) r = vsetq_lane_f64(0.0, r, 1);
        vbest = vmaxq_f64(vbest, r);
    }
    double best = vgetq_lane_f64(vbest, 0);
    const double b1 = vgetq_lane_f64(vbest, 1);
    if (b1 > best) best = b1;
    for (std::size_t j = n0; j < n; ++j) {
        if (j == skip) continue;
        const double r = std::fabs(fi - f[j]) / (dist[j] + delta);
        if (r > best) best = r;
    }
    return best;
}

void circle_dist_neon(double ti, const double* t, std::size_t n, double* out) {
    const std::size_t n0 = n & ~std::size_t(1);
    const float64x2_t vti = vdupq_n_f64(ti);
    const float64x2_t vtau = vdupq_n_f64(kTwoPi);
    for (std::size_t j = 0; j < n0; j += 2) {
        const float64x2_t g = vabsq_f64(vsubq_f64(vti, vld1q_f64(t + j)));
        vst1q_f64(out + j, vminq_f64(g, vsubq_f64(vtau, g)));
    }
    for (std::size_t j = n0; j < n; ++j) {
        const double g = std::fabs(ti - t[j]);
        const double h = kTwoPi - g;
        out[j] = g < h ? g : h;
    }
}

void torus_dist_neon(double t1i, double t2i, const double* t1, const double* t2,
                     std::size_t n, double* out) {
    const std::size_t n0 = n & ~std::size_t(1);
    const float64x2_t v1 = vdupq_n_f64(t1i);
    const float64x2_t v2 = vdupq_n_f64(t2i);
    const float64x2_t vtau = vdupq_n_f64(kTwoPi);
    for (std::size_t j = 0; j < n0; j += 2) {
        const float64x2_t g1 = vabsq_f64(vsubq_f64(v1, vld1q_f64(t1 + j)));
        const float64x2_t w1 = vminq_f64(g1, vsubq_f64(vtau, g1));
        const float64x2_t g2 = vabsq_f64(vsubq_f64(v2, vld1q_f64(t2 + j)));
        const float64x2_t w2 = vminq_f64(g2, vsubq_f64(vtau, g2));
        vst1q_f64(out + j, vsqrtq_f64(vaddq_f64(vmulq_f64(w1, w1),
                                                vmulq_f64(w2, w2))));
    }
    for (std::size_t j = n0; j < n; ++j) {
        const double g1 = std::fabs(t1i - t1[j]);
        const double h1 = kTwoPi - g1;
        const double w1 = g1 < h1 ? g1 : h1;
        const double g2 = std::fabs(t2i - t2[j]);
        const double h2 = kTwoPi - g2;
        const double w2 = g2 < h2 ? g2 : h2;
        out[j] = std::sqrt(w1 * w1 + w2 * w2);
    }
}

void sphere_dist_neon(const double* q, const double* pts, std::size_t n,
                      std::size_t stride, double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double* p = pts + j * stride;
        const double dp = (q[0] * p[0] + q[1] * p[1]) + q[2] * p[2];
        const double cx = q[1] * p[2] - q[2] * p[1];
        const double cy = q[2] * p[0] - q[0] * p[2];
        const double cz = q[0] * p[1] - q[1] * p[0];
        const double cn = std::sqrt((cx * cx + cy * cy) + cz * cz);
        out[j] = std::atan2(cn, dp);
    }
}

const Ops kNeon = {
    "neon",         dot_neon,       nrm2sq_neon,    axpy_neon,
    scale2_neon,    row_gather_dot_neon,            lap_row_neon,
    dist2_rows_neon,
    ratio_max_neon, circle_dist_neon, torus_dist_neon, sphere_dist_neon,
};

} // namespace

const Ops* neon_ops_or_null() { return &kNeon; }

} // namespace simd
} // namespace cloudlap

#endif
