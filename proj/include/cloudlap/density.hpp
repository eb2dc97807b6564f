#pragma once

#include "cloudlap/manifold.hpp"
#include "cloudlap/vec.hpp"

#include <string>

namespace cloudlap {

enum class DensityKind { uniform, tilted };

// Sampling density on a reference manifold. The tilted family is
// rho(x) = (1 + a <x, axis>) / Z with |a| < 1 and an ambient unit axis;
// the linear term integrates to zero on all three manifolds, so Z is the
// manifold volume in every case. On the torus the default axis e1 makes
// <x, axis> = cos(theta_1).
struct DensityModel {
    DensityKind kind = DensityKind::uniform;
    double a = 0.0;
    Vec4 axis;
    double Z = 1.0;
    const Manifold* M = nullptr;

    static DensityModel uniform(const Manifold& M);
    static DensityModel tilted(const Manifold& M, double a);
    static DensityModel tilted(const Manifold& M, double a, const Vec4& axis);

    double rho(const Vec4& x) const;
    // Tangential gradient of log(rho); zero vector for the uniform density
    // and at critical points of the tilt.
    Vec4 grad_log_rho(const Vec4& x) const;
    // Closed-form supremum of |grad log rho| over M: a / sqrt(1 - a^2).
    double sup_grad_log_rho() const;
    double rho_max() const;

    std::string label() const;
};

} // namespace cloudlap
