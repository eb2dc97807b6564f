#pragma once

#include <functional>
#include <vector>

#include "cloudlap/manifold.hpp"

namespace cloudlap {

// Default orders for the ball rules below; enough for 1e-10 stability on
// every smooth integrand in the test suite (verified by doubling checks).
inline constexpr int kBallRadialOrder = 48;
inline constexpr int kBallAngularOrder = 96;

struct GaussLegendre {
    std::vector<double> nodes;   // ascending, on [-1, 1]
    std::vector<double> weights;
};

// Cached Gauss-Legendre rule; thread-safe.
const GaussLegendre& gauss_legendre(int order);

double integrate_gl(const std::function<double(double)>& f, double a,
                    double b, int order);

// Doubles the order from 16 until successive values differ by less than
// rel_tol in relative terms (with a tiny absolute floor for zero integrals).
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol);

// Surface integral of g over M on a fixed parameter grid: periodic
// trapezoid in every angle, Gauss-Legendre in the sphere's polar direction.
// resolution is the node count per direction.
double integrate(const Manifold& M,
                 const std::function<double(const Vec4&)>& g, int resolution);

// Doubles resolution from 32 until the change drops below tol.
double integrate_auto(const Manifold& M,
                      const std::function<double(const Vec4&)>& g,
                      double tol = 1e-10);

// Integral over the geodesic ball B(x, r), r below the injectivity radius,
// of F(y, t) dVol(y) with t the geodesic distance from x to y. Evaluated in
// normal coordinates: radial Gauss-Legendre times angular trapezoid, with
// the exact volume factor (sin t on the sphere, t on the flat surfaces).
// The circle uses one Gauss-Legendre panel per direction so kernels with a
// kink at 0 stay smooth per panel.
double ball_integral(const Manifold& M, const Vec4& x, double r,
                     const std::function<double(const Vec4&, double)>& F,
                     int radial = kBallRadialOrder,
                     int angular = kBallAngularOrder);

// Integral over the unit ball of the tangent space at x, Lebesgue measure,
// of F(w, |w|) where w is handed to F as ambient tangent components in a
// deterministic orthonormal frame.
double tangent_ball_integral(
    const Manifold& M, const Vec4& x,
    const std::function<double(const Vec4&, double)>& F,
    int radial = kBallRadialOrder, int angular = kBallAngularOrder);

} // namespace cloudlap
