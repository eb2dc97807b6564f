#pragma once

#include <functional>
#include <vector>

#include "cloudlap/density.hpp"
#include "cloudlap/discrete_ops.hpp"
#include "cloudlap/graph.hpp"
#include "cloudlap/kernel.hpp"
#include "cloudlap/testfunctions.hpp"

namespace cloudlap {

using ScalarField = std::function<double(const Vec4&)>;

// d_eps(x) = integral over B_M(x, eps) of eps^{-m} eta(d_M/eps) rho dVol;
// equals rho(x) up to O(eps^2).
double continuum_degree(const DensityModel& rho, const KernelModel& kernel,
                        double eps, const Vec4& x);

// Degree-normalized kernel average over the geodesic ball. Maps constants
// to constants exactly (shared quadrature nodes with the degree).
double averaging_A(const DensityModel& rho, const KernelModel& kernel,
                   double eps, const ScalarField& f, const Vec4& x);

// Tangent-plane average: integral over the unit tangent ball of
// eta(|w|) (1 + eps <w, grad log rho(x)>) f(Exp_x(eps w)) dw, Lebesgue
// measure, no normalization.
double averaging_Abar(const DensityModel& rho, const KernelModel& kernel,
                      double eps, const ScalarField& f, const Vec4& x);

// eps^{-(m+2)} integral of eta(d_M/eps) (f(x) - f(y)) rho(y) dVol(y);
// equals -d_eps(x) (A_eps f(x) - f(x)) / eps^2 up to quadrature error.
double nonlocal_laplacian(const DensityModel& rho, const KernelModel& kernel,
                          double eps, const ScalarField& f, const Vec4& x);

// Defects of the second-order mean-value expansions
//   A_eps f = f + (sigma/2) eps^2 (lb f + 2 <grad f, grad log rho>) + O(eps^3)
// for both averaging operators; log-log sweeps in eps should give slope
// >= 2.7.
struct ConsistencyResidual {
    double a_residual = 0.0;
    double abar_residual = 0.0;
};
ConsistencyResidual consistency_residual(const DensityModel& rho,
                                         const KernelModel& kernel, double eps,
                                         const TestFunction& f, const Vec4& x);

// Bridge check: lhs = |nonlocal Laplacian of the interpolant of f at x|;
// rhs couples the graph Laplacian sup over the ambient eps-ball with the
// oscillation over the 2eps-ball; rhs_improved uses global norms
// ||Lf||_inf + eps ||f||_inf.
struct BridgePair {
    double lhs = 0.0;
    double rhs = 0.0;
    double rhs_improved = 0.0;
};
BridgePair discrete_to_nonlocal_check(const EpsGraph& g,
                                      const DensityModel& rho,
                                      const std::vector<double>& f,
                                      const Vec4& x);

// |f(x) - f(y)| / ((sup|f| + sup|Lap_eps f|) (d_M(x,y) + eps)) with the
// sups taken over covering_net(eps/4). 0 for constant fields.
double nonlocal_regularity_constant(const DensityModel& rho,
                                    const KernelModel& kernel, double eps,
                                    const ScalarField& f, const Vec4& x,
                                    const Vec4& y);

// Local variant: x, y inside B_M(x0, r); the two-term bound uses sups of
// |f| and |Lap_eps f| over net points within B_M(x0, 7r) and the
// (d/r + eps|log eps|/r, r d + eps r/|log eps|) weights.
double nonlocal_interior_constant(const DensityModel& rho,
                                  const KernelModel& kernel, double eps,
                                  const ScalarField& f, const Vec4& x0,
                                  double r, const Vec4& x, const Vec4& y);

} // namespace cloudlap
