#pragma once

#include <cstdint>

#include "cloudlap/density.hpp"
#include "cloudlap/kernel.hpp"
#include "cloudlap/manifold.hpp"
#include "cloudlap/rng.hpp"
#include "cloudlap/vec.hpp"

namespace cloudlap {

// Parameters of the kernel-driven walk with density drift. The bounds keep
// every exponential map and parallel transport strictly inside the
// injectivity radius and the drift branch probability eps |grad log rho|
// below 1/2.
struct WalkConfig {
    const Manifold* M = nullptr;
    DensityModel rho;
    KernelModel kernel;
    double eps = 0.0;
    Vec4 x0;      // base point carrying the reference tangent frame
    double r = 0.0;  // absorbing radius around x0
    std::uint64_t seed = 0;  // base of the per-trial draw streams

    // Throws std::invalid_argument when a bound fails.
    void validate() const;
};

// Shared randomness of one step: w is a kernel-distributed unit-ball draw,
// wb the drift draw tilted toward the first axis, b the branch variable in
// [0,1). Draw coordinates live in R^m; trailing entries stay zero.
struct StepDraws {
    Vec4 w;
    Vec4 wb;
    double b = 0.0;
};

// Inverse CDF of the radial part of the measure eta(|w|) dw on the unit
// ball of R^m (closed forms per kernel); exposed for distribution tests.
double kernel_radius_icdf(const KernelModel& kernel, double u);

// Draw with density eta(|w|) on the unit ball. Consumes exactly two
// uniforms: radius then sign (m = 1) or angle (m = 2).
Vec4 sample_ball(Rng& rng, const KernelModel& kernel);

// Draw with density proportional to eta(|w|)(1 + <w, e1>), by rejection
// against sample_ball; first moment along e1 equals the second kernel
// moment. Consumes a variable number of uniforms.
Vec4 sample_biased_ball(Rng& rng, const KernelModel& kernel);

// The full per-step draw triple, consumed in the order w, wb, b.
StepDraws sample_step(Rng& rng, const KernelModel& kernel);

// Rotation with first column e (unit vector, m entries): the plane rotation
// carrying the first axis to e for m = 2, the scalar e itself for m = 1.
// q receives the m x m matrix row-major.
void minimal_rotation(const double* e, int m, double* q);

// Drift alignment isometry at x, as an m x m matrix (row-major) acting on
// coordinates in the frame transported from cfg.x0. Carries the first axis
// to the normalized density gradient at x; identity where the gradient
// vanishes. Assembled from two rotation charts that agree on their overlap.
void drift_rotation(const WalkConfig& cfg, const Vec4& x, double* q);

// Alignment used by the mirrored chain: same charts, but chart selection
// reads the gradient class of the driver position x while the rotation
// aligns the gradient at y, in the frame reaching y through x.
void drift_rotation_pair(const WalkConfig& cfg, const Vec4& x, const Vec4& y,
                         double* q);

// Reflection of v across the hyperplane orthogonal to z; returns v when
// z = 0. Isometric involution mapping z to -z.
Vec4 reflect_across(const Vec4& v, const Vec4& z);

// One transition driven by d: absorbing once x leaves the open ball
// B(x0, r); otherwise an exponential step of length eps |w| along the
// transported draw when b >= eps |grad log rho(x)|, and a drift step along
// the alignment isometry applied to wb when b is below that threshold.
Vec4 step_x(const WalkConfig& cfg, const Vec4& x, const StepDraws& d);

// Mirror transition of the coupled chain: same draws as the driver. The
// kernel branch reflects the increment across the geodesic from x to y
// before transporting it; the drift branch aligns wb at y via
// drift_rotation_pair. The branch test reads the gradient at y. x is the
// driver position before its own update.
Vec4 step_y(const WalkConfig& cfg, const Vec4& x, const Vec4& y,
            const StepDraws& d);

} // namespace cloudlap
