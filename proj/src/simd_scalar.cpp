#include "cloudlap/simd.hpp"

#include <cmath>

// Reference kernels. These define the arithmetic contract: four strided
// accumulators combined as ((a0 + a1) + a2) + a3, products rounded before
// adding. Vector backends must reproduce these bit for bit.

namespace cloudlap {
namespace simd {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc[i & 3] += x[i] * y[i];
    return ((acc[0] + acc[1]) + acc[2]) + acc[3];
}

double nrm2sq_scalar(const double* x, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc[i & 3] += x[i] * x[i];
    return ((acc[0] + acc[1]) + acc[2]) + acc[3];
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale2_scalar(double a, const double* x, double b, double* y,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double row_gather_dot_scalar(const double* w, const std::int32_t* col,
                             const double* f, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc[i & 3] += w[i] * f[col[i]];
    return ((acc[0] + acc[1]) + acc[2]) + acc[3];
}

double lap_row_scalar(double fi, const double* w, const std::int32_t* col,
                      const double* f, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc[i & 3] += w[i] * (fi - f[col[i]]);
    return ((acc[0] + acc[1]) + acc[2]) + acc[3];
}

void dist2_rows_scalar(const double* q, const double* pts, std::size_t nrows,
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

double ratio_max_scalar(double fi, const double* f, const double* dist,
                        double delta, std::size_t n, std::size_t skip) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == skip) continue;
        const double r = std::fabs(fi - f[j]) / (dist[j] + delta);
        if (r > best) best = r;
    }
    return best;
}

void circle_dist_scalar(double ti, const double* t, std::size_t n,
                        double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double g = std::fabs(ti - t[j]);
        const double h = kTwoPi - g;
        out[j] = g < h ? g : h;
    }
}

void torus_dist_scalar(double t1i, double t2i, const double* t1,
                       const double* t2, std::size_t n, double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double g1 = std::fabs(t1i - t1[j]);
        const double h1 = kTwoPi - g1;
        const double w1 = g1 < h1 ? g1 : h1;
        const double g2 = std::fabs(t2i - t2[j]);
        const double h2 = kTwoPi - g2;
        const double w2 = g2 < h2 ? g2 : h2;
        out[j] = std::sqrt(w1 * w1 + w2 * w2);
    }
}

void sphere_dist_scalar(const double* q, const double* pts, std::size_t n,
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

const Ops kScalar = {
    "scalar",        dot_scalar,       nrm2sq_scalar,    axpy_scalar,
    scale2_scalar,   row_gather_dot_scalar,              lap_row_scalar,
    dist2_rows_scalar,
    ratio_max_scalar, circle_dist_scalar, torus_dist_scalar, sphere_dist_scalar,
};

} // namespace

const Ops& scalar_ops() { return kScalar; }

} // namespace simd
} // namespace cloudlap
