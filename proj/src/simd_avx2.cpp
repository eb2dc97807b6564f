#include "cloudlap/simd.hpp"

// AVX2 backend. Compiled with -mavx2 and nothing else: FMA stays disabled so
// every product is rounded before it is added, exactly like the scalar
// reference. One 4-lane register holds the four canonical accumulators, and
// loop tails finish in the matching lane, so results are bit-identical to
// scalar_ops() rather than merely close.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace cloudlap {
namespace simd {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double combine(__m256d acc, const double* tail_x, const double* tail_y,
                      std::size_t tail) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t t = 0; t < tail; ++t) lane[t] += tail_x[t] * tail_y[t];
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n0; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
    }
    return combine(acc, x + n0, y + n0, n - n0);
}

double nrm2sq_avx2(const double* x, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n0; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vx));
    }
    return combine(acc, x + n0, x + n0, n - n0);
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    const __m256d va = _mm256_set1_pd(a);
    for (std::size_t i = 0; i < n0; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (std::size_t i = n0; i < n; ++i) y[i] += a * x[i];
}

void scale2_avx2(double a, const double* x, double b, double* y,
                 std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    for (std::size_t i = 0; i < n0; i += 4) {
        const __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        const __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(vx, vy));
    }
    for (std::size_t i = n0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double row_gather_dot_avx2(const double* w, const std::int32_t* col,
                           const double* f, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n0; i += 4) {
        const __m128i idx =
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + i));
        const __m256d vf = _mm256_i32gather_pd(f, idx, 8);
        const __m256d vw = _mm256_loadu_pd(w + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, vf));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t t = 0; t + n0 < n; ++t) {
        lane[t] += w[n0 + t] * f[col[n0 + t]];
    }
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

double lap_row_avx2(double fi, const double* w, const std::int32_t* col,
                    const double* f, std::size_t n) {
    const std::size_t n0 = n & ~std::size_t(3);
    const __m256d vfi = _mm256_set1_pd(fi);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n0; i += 4) {
        const __m128i idx =
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + i));
        const __m256d vf = _mm256_i32gather_pd(f, idx, 8);
        const __m256d vw = _mm256_loadu_pd(w + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, _mm256_sub_pd(vfi, vf)));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t t = 0; t + n0 < n; ++t) {
        lane[t] += w[n0 + t] * (fi - f[col[n0 + t]]);
    }
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

void dist2_rows_avx2(const double* q, const double* pts, std::size_t nrows,
                     std::size_t d, double* out) {
    const std::size_t n0 = nrows & ~std::size_t(3);
    const int di = static_cast<int>(d);
    const __m128i ridx = _mm_setr_epi32(0, di, 2 * di, 3 * di);
    for (std::size_t j = 0; j < n0; j += 4) {
        const double* base = pts + j * d;
        __m256d s = _mm256_setzero_pd();
        for (std::size_t k = 0; k < d; ++k) {
            const __m256d pk = _mm256_i32gather_pd(base + k, ridx, 8);
            const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(q[k]), pk);
            s = _mm256_add_pd(s, _mm256_mul_pd(diff, diff));
        }
        _mm256_storeu_pd(out + j, s);
    }
    for (std::size_t j = n0; j < nrows; ++j) {
        const double* p = pts + j * d;
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = q[k] - p[k];
            s += diff * diff;
        }
        out[j] = s;
    }
}

double ratio_max_avx2(double fi, const double* f, const double* dist,
                      double delta, std::size_t n, std::size_t skip) {
    const std::size_t n0 = n & ~std::size_t(3);
    const __m256d vfi = _mm256_set1_pd(fi);
    const __m256d vdelta = _mm256_set1_pd(delta);
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d vbest = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n0; j += 4) {
        const __m256d num = _mm256_andnot_pd(
            sign, _mm256_sub_pd(vfi, _mm256_loadu_pd(f + j)));
        const __m256d den = _mm256_add_pd(_mm256_loadu_pd(dist + j), vdelta);
        __m256d r = _mm256_div_pd(num, den);
        if (skip >= j && skip < j + 4) {
            alignas(32) double tmp[4];
            _mm256_store_pd(tmp, r);
            tmp[skip - j] = 0.0;
            r = _mm256_load_pd(tmp);
        }
        vbest = _mm256_max_pd(vbest, r);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, vbest);
    double best = lane[0];
    if (lane[1] > best) best = lane[1];
    if (lane[2] > best) best = lane[2];
    if (lane[3] > best) best = lane[3];
    for (std::size_t j = n0; j < n; ++j) {
        if (j == skip) continue;
        const double r = std::fabs(fi - f[j]) / (dist[j] + delta);
        if (r > best) best = r;
    }
    return best;
}

void circle_dist_avx2(double ti, const double* t, std::size_t n, double* out) {
    const std::size_t n0 = n & ~std::size_t(3);
    const __m256d vti = _mm256_set1_pd(ti);
    const __m256d vtau = _mm256_set1_pd(kTwoPi);
    const __m256d sign = _mm256_set1_pd(-0.0);
    for (std::size_t j = 0; j < n0; j += 4) {
        const __m256d g =
            _mm256_andnot_pd(sign, _mm256_sub_pd(vti, _mm256_loadu_pd(t + j)));
        _mm256_storeu_pd(out + j, _mm256_min_pd(g, _mm256_sub_pd(vtau, g)));
    }
    for (std::size_t j = n0; j < n; ++j) {
        const double g = std::fabs(ti - t[j]);
        const double h = kTwoPi - g;
        out[j] = g < h ? g : h;
    }
}

void torus_dist_avx2(double t1i, double t2i, const double* t1,
                     const double* t2, std::size_t n, double* out) {
    const std::size_t n0 = n & ~std::size_t(3);
    const __m256d v1 = _mm256_set1_pd(t1i);
    const __m256d v2 = _mm256_set1_pd(t2i);
    const __m256d vtau = _mm256_set1_pd(kTwoPi);
    const __m256d sign = _mm256_set1_pd(-0.0);
    for (std::size_t j = 0; j < n0; j += 4) {
        const __m256d g1 =
            _mm256_andnot_pd(sign, _mm256_sub_pd(v1, _mm256_loadu_pd(t1 + j)));
        const __m256d w1 = _mm256_min_pd(g1, _mm256_sub_pd(vtau, g1));
        const __m256d g2 =
            _mm256_andnot_pd(sign, _mm256_sub_pd(v2, _mm256_loadu_pd(t2 + j)));
        const __m256d w2 = _mm256_min_pd(g2, _mm256_sub_pd(vtau, g2));
        const __m256d s = _mm256_add_pd(_mm256_mul_pd(w1, w1),
                                        _mm256_mul_pd(w2, w2));
        _mm256_storeu_pd(out + j, _mm256_sqrt_pd(s));
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

void sphere_dist_avx2(const double* q, const double* pts, std::size_t n,
                      std::size_t stride, double* out) {
    // Vector lanes produce <q,p> and |q x p|; atan2 stays in libm so both
    // backends call the identical function on identical arguments.
    const std::size_t n0 = n & ~std::size_t(3);
    const int si = static_cast<int>(stride);
    const __m128i ridx = _mm_setr_epi32(0, si, 2 * si, 3 * si);
    const __m256d q0 = _mm256_set1_pd(q[0]);
    const __m256d q1 = _mm256_set1_pd(q[1]);
    const __m256d q2 = _mm256_set1_pd(q[2]);
    alignas(32) double dp[4];
    alignas(32) double cn[4];
    for (std::size_t j = 0; j < n0; j += 4) {
        const double* base = pts + j * stride;
        const __m256d p0 = _mm256_i32gather_pd(base + 0, ridx, 8);
        const __m256d p1 = _mm256_i32gather_pd(base + 1, ridx, 8);
        const __m256d p2 = _mm256_i32gather_pd(base + 2, ridx, 8);
        const __m256d vdp = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(q0, p0), _mm256_mul_pd(q1, p1)),
            _mm256_mul_pd(q2, p2));
        const __m256d cx =
            _mm256_sub_pd(_mm256_mul_pd(q1, p2), _mm256_mul_pd(q2, p1));
        const __m256d cy =
            _mm256_sub_pd(_mm256_mul_pd(q2, p0), _mm256_mul_pd(q0, p2));
        const __m256d cz =
            _mm256_sub_pd(_mm256_mul_pd(q0, p1), _mm256_mul_pd(q1, p0));
        const __m256d vcn = _mm256_sqrt_pd(_mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(cx, cx), _mm256_mul_pd(cy, cy)),
            _mm256_mul_pd(cz, cz)));
        _mm256_store_pd(dp, vdp);
        _mm256_store_pd(cn, vcn);
        out[j] = std::atan2(cn[0], dp[0]);
        out[j + 1] = std::atan2(cn[1], dp[1]);
        out[j + 2] = std::atan2(cn[2], dp[2]);
        out[j + 3] = std::atan2(cn[3], dp[3]);
    }
    for (std::size_t j = n0; j < n; ++j) {
        const double* p = pts + j * stride;
        const double d0 = (q[0] * p[0] + q[1] * p[1]) + q[2] * p[2];
        const double cx = q[1] * p[2] - q[2] * p[1];
        const double cy = q[2] * p[0] - q[0] * p[2];
        const double cz = q[0] * p[1] - q[1] * p[0];
        const double c0 = std::sqrt((cx * cx + cy * cy) + cz * cz);
        out[j] = std::atan2(c0, d0);
    }
}

const Ops kAvx2 = {
    "avx2",         dot_avx2,       nrm2sq_avx2,    axpy_avx2,
    scale2_avx2,    row_gather_dot_avx2,            lap_row_avx2,
    dist2_rows_avx2,
    ratio_max_avx2, circle_dist_avx2, torus_dist_avx2, sphere_dist_avx2,
};

} // namespace

const Ops* avx2_ops_or_null() { return &kAvx2; }

} // namespace simd
} // namespace cloudlap

#endif
