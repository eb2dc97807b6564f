#include "cloudlap/density.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cloudlap {
namespace {

Vec4 default_axis(const Manifold& M) {
    switch (M.kind()) {
        case ManifoldKind::circle: return Vec4{1.0, 0.0};
        case ManifoldKind::sphere2: return Vec4{0.0, 0.0, 1.0};
        case ManifoldKind::flat_torus2: return Vec4{1.0, 0.0, 0.0, 0.0};
    }
    return Vec4{};
}

} // namespace

DensityModel DensityModel::uniform(const Manifold& M) {
    DensityModel d;
    d.kind = DensityKind::uniform;
    d.M = &M;
    d.Z = M.volume();
    return d;
}

DensityModel DensityModel::tilted(const Manifold& M, double a) {
    return tilted(M, a, default_axis(M));
}

DensityModel DensityModel::tilted(const Manifold& M, double a,
                                  const Vec4& axis) {
    if (std::fabs(a) >= 1.0) {
        throw std::invalid_argument(
            "tilt strength must satisfy |a| < 1 to keep the density positive");
    }
    const double an = norm(axis);
    if (std::fabs(an - 1.0) > 1e-12) {
        throw std::invalid_argument("tilt axis must be an ambient unit vector");
    }
    DensityModel d;
    d.kind = DensityKind::tilted;
    d.a = a;
    d.axis = axis;
    d.M = &M;
    d.Z = M.volume();
    return d;
}

double DensityModel::rho(const Vec4& x) const {
    if (kind == DensityKind::uniform) return 1.0 / Z;
    return (1.0 + a * dot(x, axis)) / Z;
}

Vec4 DensityModel::grad_log_rho(const Vec4& x) const {
    if (kind == DensityKind::uniform) return Vec4{};
    const double denom = 1.0 + a * dot(x, axis);
    Vec4 g = M->project_tangent(x, axis);
    g *= a / denom;
    return g;
}

double DensityModel::sup_grad_log_rho() const {
    if (kind == DensityKind::uniform) return 0.0;
    const double aa = std::fabs(a);
    return aa / std::sqrt(1.0 - aa * aa);
}

double DensityModel::rho_max() const {
    if (kind == DensityKind::uniform) return 1.0 / Z;
    return (1.0 + std::fabs(a)) / Z;
}

std::string DensityModel::label() const {
    if (kind == DensityKind::uniform) return "uniform";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "tilted:%g", a);
    return buf;
}

} // namespace cloudlap
