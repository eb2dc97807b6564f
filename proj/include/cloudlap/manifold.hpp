#pragma once

#include <array>
#include <string>
#include <vector>

#include "cloudlap/rng.hpp"
#include "cloudlap/vec.hpp"

namespace cloudlap {

enum class ManifoldKind { circle, sphere2, flat_torus2 };

// Tangent vector carried with its base point. Components are ambient
// coordinates orthogonal to the embedding constraint at the base.
struct TangentVector {
    Vec4 base;
    Vec4 comp;

    double length() const { return norm(comp); }
};

// Closed-form geometry for the three reference manifolds: the unit circle in
// R^2, the unit sphere in R^3, and the flat 2-torus in R^4 embedded as
// (cos t1, sin t1, cos t2, sin t2) so each factor circle has radius 1.
// All operations are pure and thread-safe.
class Manifold {
  public:
    static const Manifold& circle();
    static const Manifold& sphere2();
    static const Manifold& flat_torus2();
    static const Manifold& get(ManifoldKind kind);

    ManifoldKind kind() const { return kind_; }
    int intrinsic_dim() const { return m_; }
    int ambient_dim() const { return d_; }
    double injectivity_radius() const { return iota_; }
    double reach() const { return reach_; }
    double volume() const { return volume_; }
    double diameter() const { return diameter_; }

    bool on_manifold(const Vec4& x, double tol = 1e-9) const;
    // Throws std::invalid_argument when x violates the embedding constraint.
    void check_point(const Vec4& x) const;

    double geodesic_distance(const Vec4& x, const Vec4& y) const;

    // Point reached after unit time along the geodesic with initial
    // velocity v. Requires |v| < injectivity radius.
    Vec4 exp_map(const TangentVector& v) const;
    Vec4 exp_map(const Vec4& x, const Vec4& comp) const;

    // Inverse of exp_map: tangent at x pointing to y with |result| =
    // geodesic distance. Throws when x and y are (nearly) cut-locus pairs,
    // where the minimizing geodesic is not unique.
    TangentVector log_map(const Vec4& x, const Vec4& y) const;

    // Parallel transport of v (based at x) along the minimizing geodesic to
    // y. Linear isometry; same cut-locus restriction as log_map.
    TangentVector parallel_transport(const Vec4& x, const Vec4& y,
                                     const TangentVector& v) const;

    // Deterministic orthonormal tangent basis; entries [0, intrinsic_dim).
    std::array<TangentVector, 2> tangent_frame(const Vec4& x) const;

    // Orthogonal projection of an ambient vector onto the tangent space.
    Vec4 project_tangent(const Vec4& x, const Vec4& u) const;

    // One point distributed uniformly with respect to the volume measure.
    Vec4 random_point(Rng& rng) const;

    // Volume of the geodesic ball B(x, r), in closed form.
    double ball_volume(double r) const;

    // |Vol(B(x,r)) - vol(unit ball of R^m) r^m| / r^{m+2}; identically zero
    // on the flat manifolds, tends to pi/12 on the sphere.
    double ball_volume_residual(const Vec4& x, double r) const;

    // Combined second-order defect of the geodesic quadrilateral spanned by
    // Exp_x(s v) and Exp_y(s w): |L(s) - |t0 z + s(P_{y,x} w - v)|^2| where
    // L(s) is the squared distance between the swept endpoints and t0 z =
    // log_map(x, y).
    double quadrilateral_residual(const Vec4& x, const Vec4& y,
                                  const TangentVector& v,
                                  const TangentVector& w, double s) const;

    // Explicit parameter-grid net with covering radius at most h and
    // O(h^{-m}) points.
    std::vector<Vec4> covering_net(double h) const;

    // Angle coordinates backing the fast distance kernels: circle writes 1
    // angle, the torus 2; the sphere has none (returns false).
    bool angle_coords(const Vec4& x, double* out) const;

  private:
    Manifold(ManifoldKind kind);

    ManifoldKind kind_;
    int m_;
    int d_;
    double iota_;
    double reach_;
    double volume_;
    double diameter_;
};

ManifoldKind manifold_kind_from_string(const std::string& name);
std::string to_string(ManifoldKind kind);

} // namespace cloudlap
