#include "cloudlap/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cloudlap/quadrature.hpp"

namespace cloudlap {
namespace {

void check_eps(const DensityModel& rho, double eps) {
    if (!(eps > 0.0) || eps >= rho.M->injectivity_radius()) {
        throw std::invalid_argument(
            "eps must lie in (0, injectivity radius)");
    }
}

double eps_pow_m(double eps, int m) { return m == 1 ? eps : eps * eps; }

} // namespace

double continuum_degree(const DensityModel& rho, const KernelModel& kernel,
                        double eps, const Vec4& x) {
    check_eps(rho, eps);
    const Manifold& M = *rho.M;
    const double scale = 1.0 / eps_pow_m(eps, M.intrinsic_dim());
    return scale * ball_integral(M, x, eps, [&](const Vec4& y, double t) {
        return kernel.eta(t / eps) * rho.rho(y);
    });
}

double averaging_A(const DensityModel& rho, const KernelModel& kernel,
                   double eps, const ScalarField& f, const Vec4& x) {
    check_eps(rho, eps);
    const Manifold& M = *rho.M;
    const double num = ball_integral(M, x, eps, [&](const Vec4& y, double t) {
        return kernel.eta(t / eps) * f(y) * rho.rho(y);
    });
    const double den = ball_integral(M, x, eps, [&](const Vec4& y, double t) {
        return kernel.eta(t / eps) * rho.rho(y);
    });
    return num / den;
}

double averaging_Abar(const DensityModel& rho, const KernelModel& kernel,
                      double eps, const ScalarField& f, const Vec4& x) {
    check_eps(rho, eps);
    const Manifold& M = *rho.M;
    const Vec4 glr = rho.grad_log_rho(x);
    return tangent_ball_integral(M, x, [&](const Vec4& w, double s) {
        const Vec4 y = M.exp_map(x, eps * w);
        return kernel.eta(s) * (1.0 + eps * dot(w, glr)) * f(y);
    });
}

double nonlocal_laplacian(const DensityModel& rho, const KernelModel& kernel,
                          double eps, const ScalarField& f, const Vec4& x) {
    check_eps(rho, eps);
    const Manifold& M = *rho.M;
    const double fx = f(x);
    double scale = 1.0 / (eps * eps * eps_pow_m(eps, M.intrinsic_dim()));
    return scale * ball_integral(M, x, eps, [&](const Vec4& y, double t) {
        return kernel.eta(t / eps) * (fx - f(y)) * rho.rho(y);
    });
}

ConsistencyResidual consistency_residual(const DensityModel& rho,
                                         const KernelModel& kernel, double eps,
                                         const TestFunction& f,
                                         const Vec4& x) {
    if (eps >= 0.5 * rho.M->injectivity_radius()) {
        throw std::invalid_argument("eps must be below half the injectivity radius");
    }
    const double fx = f.value(x);
    const double target =
        fx + 0.5 * sigma_eta(kernel) * eps * eps * weighted_A(f, rho, x);
    ConsistencyResidual out;
    out.a_residual =
        std::fabs(averaging_A(rho, kernel, eps, f.value, x) - target);
    out.abar_residual =
        std::fabs(averaging_Abar(rho, kernel, eps, f.value, x) - target);
    return out;
}

BridgePair discrete_to_nonlocal_check(const EpsGraph& g,
                                      const DensityModel& rho,
                                      const std::vector<double>& f,
                                      const Vec4& x) {
    if (rho.M != g.cloud.M) {
        throw std::invalid_argument("graph and density use different manifolds");
    }
    const double eps = g.eps;
    BridgePair out;
    const ScalarField interp = [&](const Vec4& y) {
        return interpolate(g, f, y);
    };
    out.lhs = std::fabs(nonlocal_laplacian(rho, g.kernel, eps, interp, x));

    const std::vector<double> lf = graph_laplacian_apply(g, f);
    const int n = g.cloud.n;
    const int d = g.cloud.d;
    const double eps2 = eps * eps;
    double sup_ball = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* p = g.cloud.row(i);
        double d2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double diff = x[k] - p[k];
            d2 += diff * diff;
        }
        if (d2 <= eps2) sup_ball = std::max(sup_ball, std::fabs(lf[i]));
    }
    out.rhs = sup_ball + oscillation(g, f, x, 2.0 * eps);
    const Norms nf = norms(f);
    const Norms nl = norms(lf);
    out.rhs_improved = nl.linf + eps * nf.linf;
    return out;
}

double nonlocal_regularity_constant(const DensityModel& rho,
                                    const KernelModel& kernel, double eps,
                                    const ScalarField& f, const Vec4& x,
                                    const Vec4& y) {
    check_eps(rho, eps);
    const Manifold& M = *rho.M;
    const double num = std::fabs(f(x) - f(y));
    if (num == 0.0) return 0.0;
    double supf = 0.0;
    double supl = 0.0;
    for (const Vec4& p : M.covering_net(eps / 4.0)) {
        supf = std::max(supf, std::fabs(f(p)));
        supl = std::max(supl, std::fabs(nonlocal_laplacian(rho, kernel, eps, f, p)));
    }
    return num / ((supf + supl) * (M.geodesic_distance(x, y) + eps));
}

double nonlocal_interior_constant(const DensityModel& rho,
                                  const KernelModel& kernel, double eps,
                                  const ScalarField& f, const Vec4& x0,
                                  double r, const Vec4& x, const Vec4& y) {
    check_eps(rho, eps);
    if (r <= 0.0) throw std::invalid_argument("radius must be positive");
    const Manifold& M = *rho.M;
    if (M.geodesic_distance(x0, x) > r || M.geodesic_distance(x0, y) > r) {
        throw std::invalid_argument("query points outside the inner ball");
    }
    const double num = std::fabs(f(x) - f(y));
    if (num == 0.0) return 0.0;
    double supf = 0.0;
    double supl = 0.0;
    for (const Vec4& p : M.covering_net(eps / 4.0)) {
        if (M.geodesic_distance(x0, p) > 7.0 * r) continue;
        supf = std::max(supf, std::fabs(f(p)));
        supl = std::max(supl, std::fabs(nonlocal_laplacian(rho, kernel, eps, f, p)));
    }
    const double dm = M.geodesic_distance(x, y);
    const double le = std::fabs(std::log(eps));
    const double den = (dm / r + eps * le / r) * supf +
                       (r * dm + eps * r / le) * supl;
    return den > 0.0 ? num / den : 0.0;
}

} // namespace cloudlap
