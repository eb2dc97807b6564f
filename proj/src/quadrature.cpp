#include "cloudlap/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cloudlap {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

GaussLegendre compute_rule(int order) {
    // Newton iteration on the Legendre polynomial from the Chebyshev-like
    // initial guess; converges to machine precision in a handful of steps.
    GaussLegendre rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 =
                    ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const GaussLegendre& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_rule(order)).first;
    }
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a,
                    double b, int order) {
    const GaussLegendre& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * s;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol) {
    double prev = integrate_gl(f, a, b, 16);
    for (int order = 32; order <= 4096; order *= 2) {
        const double cur = integrate_gl(f, a, b, order);
        if (std::fabs(cur - prev) <=
            rel_tol * std::max(std::fabs(cur), 1e-300) + 1e-15 * rel_tol) {
            return cur;
        }
        prev = cur;
    }
    return prev;
}

double integrate(const Manifold& M,
                 const std::function<double(const Vec4&)>& g,
                 int resolution) {
    if (resolution < 2) throw std::invalid_argument("resolution too small");
    switch (M.kind()) {
        case ManifoldKind::circle: {
            double s = 0.0;
            for (int k = 0; k < resolution; ++k) {
                const double t = kTwoPi * k / resolution;
                s += g(Vec4{std::cos(t), std::sin(t)});
            }
            return s * (kTwoPi / resolution);
        }
        case ManifoldKind::sphere2: {
            // Area element in (z, azimuth) coordinates is dz dphi exactly.
            const GaussLegendre& rule = gauss_legendre(resolution);
            const int naz = 2 * resolution;
            double s = 0.0;
            for (int i = 0; i < resolution; ++i) {
                const double z = rule.nodes[i];
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                double ring = 0.0;
                for (int k = 0; k < naz; ++k) {
                    const double phi = kTwoPi * k / naz;
                    ring += g(Vec4{r * std::cos(phi), r * std::sin(phi), z});
                }
                s += rule.weights[i] * ring * (kTwoPi / naz);
            }
            return s;
        }
        case ManifoldKind::flat_torus2: {
            double s = 0.0;
            for (int i = 0; i < resolution; ++i) {
                const double t1 = kTwoPi * i / resolution;
                for (int j = 0; j < resolution; ++j) {
                    const double t2 = kTwoPi * j / resolution;
                    s += g(Vec4{std::cos(t1), std::sin(t1), std::cos(t2),
                                std::sin(t2)});
                }
            }
            const double w = kTwoPi / resolution;
            return s * w * w;
        }
    }
    return 0.0;
}

double integrate_auto(const Manifold& M,
                      const std::function<double(const Vec4&)>& g,
                      double tol) {
    double prev = integrate(M, g, 32);
    for (int res = 64; res <= 2048; res *= 2) {
        const double cur = integrate(M, g, res);
        if (std::fabs(cur - prev) <= tol * std::max(1.0, std::fabs(cur))) {
            return cur;
        }
        prev = cur;
    }
    return prev;
}

double ball_integral(const Manifold& M, const Vec4& x, double r,
                     const std::function<double(const Vec4&, double)>& F,
                     int radial, int angular) {
    M.check_point(x);
    if (r <= 0.0 || r >= M.injectivity_radius()) {
        throw std::invalid_argument(
            "ball radius must lie in (0, injectivity radius)");
    }
    const auto frame = M.tangent_frame(x);
    const GaussLegendre& rule = gauss_legendre(radial);
    if (M.intrinsic_dim() == 1) {
        double s = 0.0;
        for (int dir = 0; dir < 2; ++dir) {
            const double sign = dir == 0 ? 1.0 : -1.0;
            for (int i = 0; i < radial; ++i) {
                const double t = 0.5 * r * (rule.nodes[i] + 1.0);
                const Vec4 y = M.exp_map(x, (sign * t) * frame[0].comp);
                s += 0.5 * r * rule.weights[i] * F(y, t);
            }
        }
        return s;
    }
    const bool spherical = M.kind() == ManifoldKind::sphere2;
    double s = 0.0;
    for (int i = 0; i < radial; ++i) {
        const double t = 0.5 * r * (rule.nodes[i] + 1.0);
        const double jac = spherical ? std::sin(t) : t;
        double ring = 0.0;
        for (int k = 0; k < angular; ++k) {
            const double alpha = kTwoPi * k / angular;
            const Vec4 dirv = std::cos(alpha) * frame[0].comp +
                              std::sin(alpha) * frame[1].comp;
            const Vec4 y = M.exp_map(x, t * dirv);
            ring += F(y, t);
        }
        s += 0.5 * r * rule.weights[i] * jac * ring * (kTwoPi / angular);
    }
    return s;
}

double tangent_ball_integral(
    const Manifold& M, const Vec4& x,
    const std::function<double(const Vec4&, double)>& F, int radial,
    int angular) {
    M.check_point(x);
    const auto frame = M.tangent_frame(x);
    const GaussLegendre& rule = gauss_legendre(radial);
    if (M.intrinsic_dim() == 1) {
        double s = 0.0;
        for (int dir = 0; dir < 2; ++dir) {
            const double sign = dir == 0 ? 1.0 : -1.0;
            for (int i = 0; i < radial; ++i) {
                const double t = 0.5 * (rule.nodes[i] + 1.0);
                const Vec4 w = (sign * t) * frame[0].comp;
                s += 0.5 * rule.weights[i] * F(w, t);
            }
        }
        return s;
    }
    double s = 0.0;
    for (int i = 0; i < radial; ++i) {
        const double t = 0.5 * (rule.nodes[i] + 1.0);
        double ring = 0.0;
        for (int k = 0; k < angular; ++k) {
            const double alpha = kTwoPi * k / angular;
            const Vec4 w = (t * std::cos(alpha)) * frame[0].comp +
                           (t * std::sin(alpha)) * frame[1].comp;
            ring += F(w, t);
        }
        s += 0.5 * rule.weights[i] * t * ring * (kTwoPi / angular);
    }
    return s;
}

} // namespace cloudlap
