#include "cloudlap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

namespace cloudlap {

namespace {

// One Jacobi rotation in the (p, q) plane applied to the pair (x, y).
// c, s are implied by t and tau; the incremental form keeps the update
// backward stable when the rotation angle is small.
inline void rotate(double& x, double& y, double s, double tau) {
    const double xo = x;
    const double yo = y;
    x = xo - s * (yo + tau * xo);
    y = yo + s * (xo - tau * yo);
}

} // namespace

EighResult dense_eigh(std::vector<double> a, int n) {
    if (n <= 0) throw std::invalid_argument("dense_eigh: n must be positive");
    if (n > 1024) {
        throw std::invalid_argument(
            "dense_eigh: n > 1024, use the sparse solver");
    }
    if (a.size() != static_cast<std::size_t>(n) * n) {
        throw std::invalid_argument("dense_eigh: matrix size mismatch");
    }

    double frob2 = 0.0;
    for (double x : a) frob2 += x * x;
    const double frob = std::sqrt(frob2);

    double asym = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            asym = std::max(asym,
                            std::fabs(a[(std::size_t)i * n + j] -
                                      a[(std::size_t)j * n + i]));
        }
    }
    if (asym > 1e-10 * std::max(1.0, frob)) {
        throw std::invalid_argument("dense_eigh: matrix is not symmetric");
    }

    std::vector<double> v((std::size_t)n * n, 0.0);
    for (int i = 0; i < n; ++i) v[(std::size_t)i * n + i] = 1.0;

    const double stop = 1e-14 * std::max(1.0, frob);
    const double skip = stop / (10.0 * n);

    bool converged = (n == 1);
    for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
        double off2 = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double x = a[(std::size_t)p * n + q];
                off2 += x * x;
            }
        }
        if (std::sqrt(2.0 * off2) <= stop) {
            converged = true;
            break;
        }

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[(std::size_t)p * n + q];
                if (std::fabs(apq) <= skip) continue;

                const double app = a[(std::size_t)p * n + p];
                const double aqq = a[(std::size_t)q * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                // Root of t^2 + 2 theta t - 1 = 0 with smaller magnitude.
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) /
                    (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[(std::size_t)p * n + p] = app - t * apq;
                a[(std::size_t)q * n + q] = aqq + t * apq;
                a[(std::size_t)p * n + q] = 0.0;
                a[(std::size_t)q * n + p] = 0.0;
                for (int kk = 0; kk < n; ++kk) {
                    if (kk == p || kk == q) continue;
                    double& kp = a[(std::size_t)kk * n + p];
                    double& kq = a[(std::size_t)kk * n + q];
                    rotate(kp, kq, s, tau);
                    a[(std::size_t)p * n + kk] = kp;
                    a[(std::size_t)q * n + kk] = kq;
                }
                for (int kk = 0; kk < n; ++kk) {
                    rotate(v[(std::size_t)kk * n + p],
                           v[(std::size_t)kk * n + q], s, tau);
                }
            }
        }
    }
    if (!converged) {
        throw std::runtime_error("dense_eigh: no convergence in 60 sweeps");
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return a[(std::size_t)i * n + i] < a[(std::size_t)j * n + j];
    });

    EighResult out;
    out.n = n;
    out.values.resize(n);
    out.vectors.resize((std::size_t)n * n);
    for (int k = 0; k < n; ++k) {
        const int src = order[k];
        out.values[k] = a[(std::size_t)src * n + src];
        double* row = out.vectors.data() + (std::size_t)k * n;
        for (int i = 0; i < n; ++i) row[i] = v[(std::size_t)i * n + src];
    }
    return out;
}

} // namespace cloudlap
