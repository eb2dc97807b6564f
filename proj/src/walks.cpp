#include "cloudlap/walks.hpp"

#include <cmath>
#include <stdexcept>

namespace cloudlap {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Chart caps on the unit sphere of the tangent space, by first coordinate.
// kWide bounds the wide caps used to pick a chart; kNarrow bounds the
// narrow caps used along the mirrored chain, whose chart is pinned by the
// driver and must stay valid across the whole cap.
const double kWide = std::cos(5.0 * kPi / 9.0);    // about -0.1736
const double kNarrow = std::cos(8.0 * kPi / 9.0);  // about -0.9397

// Frame at x obtained by transporting the deterministic base frame of
// cfg.x0. Valid while x stays within the injectivity radius of x0.
struct Frame {
    Vec4 e[2];
    int m = 0;
};

Frame frame_at(const WalkConfig& cfg, const Vec4& x) {
    Frame f;
    f.m = cfg.M->intrinsic_dim();
    const auto base = cfg.M->tangent_frame(cfg.x0);
    for (int i = 0; i < f.m; ++i) {
        f.e[i] = cfg.M->parallel_transport(cfg.x0, x, base[i]).comp;
    }
    return f;
}

Frame push_frame(const WalkConfig& cfg, const Frame& at_x, const Vec4& x,
                 const Vec4& y) {
    Frame f;
    f.m = at_x.m;
    for (int i = 0; i < f.m; ++i) {
        f.e[i] =
            cfg.M->parallel_transport(x, y, TangentVector{x, at_x.e[i]}).comp;
    }
    return f;
}

// The two chart matrices coincide wherever both caps are defined, so the
// selector only decides which closed form evaluates; behavior is a single
// continuous field on each chart domain.
void chart_matrix(const double* c, int m, bool first_chart, double* q) {
    if (first_chart) {
        minimal_rotation(c, m, q);
        return;
    }
    double flipped[2] = {-c[0], 0.0};
    if (m == 2) flipped[1] = -c[1];
    minimal_rotation(flipped, m, q);
    for (int i = 0; i < m * m; ++i) q[i] = -q[i];
}

void identity_matrix(int m, double* q) {
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) q[i * m + j] = (i == j) ? 1.0 : 0.0;
    }
}

// Coordinates of the unit gradient direction in the given frame; returns
// false when the gradient vanishes. For m = 1 the coordinate is snapped to
// its sign, the only isometry value.
bool gradient_coords(const WalkConfig& cfg, const Vec4& x, const Frame& f,
                     double* c) {
    const Vec4 g = cfg.rho.grad_log_rho(x);
    const double gn = norm(g);
    if (gn == 0.0) return false;
    const double inv = 1.0 / gn;
    for (int i = 0; i < f.m; ++i) c[i] = dot(g, f.e[i]) * inv;
    if (f.m == 1) c[0] = (c[0] >= 0.0) ? 1.0 : -1.0;
    return true;
}

Vec4 from_coords(const Frame& f, const double* u) {
    Vec4 v = u[0] * f.e[0];
    if (f.m == 2) v += u[1] * f.e[1];
    return v;
}

void apply_matrix(const double* q, int m, const Vec4& in, double* out) {
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += q[i * m + j] * in[j];
        out[i] = s;
    }
}

} // namespace

void WalkConfig::validate() const {
    if (M == nullptr) throw std::invalid_argument("walk: missing manifold");
    M->check_point(x0);
    if (rho.M != M) {
        throw std::invalid_argument("walk: density bound to another manifold");
    }
    if (kernel.m != M->intrinsic_dim()) {
        throw std::invalid_argument(
            "walk: kernel dimension does not match the manifold");
    }
    if (!(eps > 0.0)) throw std::invalid_argument("walk: eps must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("walk: r must be positive");
    const double iota = M->injectivity_radius();
    if (!(eps < 0.5 * iota)) {
        throw std::invalid_argument(
            "walk: eps must stay below half the injectivity radius");
    }
    if (!(r < 0.5 * iota)) {
        throw std::invalid_argument(
            "walk: r must stay below half the injectivity radius");
    }
    if (!(eps * rho.sup_grad_log_rho() < 0.5)) {
        throw std::invalid_argument(
            "walk: eps times the gradient bound must stay below 1/2");
    }
}

double kernel_radius_icdf(const KernelModel& kernel, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::invalid_argument("kernel_radius_icdf: u outside [0,1]");
    }
    double r = 0.0;
    if (kernel.m == 1) {
        switch (kernel.kind) {
            case KernelKind::uniform:
                r = u;
                break;
            case KernelKind::triangular:
                // F(r) = 2r - r^2
                r = 1.0 - std::sqrt(1.0 - u);
                break;
            case KernelKind::quadratic_taper:
                // F(r) = (3r - r^3) / 2; real root of r^3 - 3r + 2u in [0,1]
                r = 2.0 * std::cos((std::acos(-u) + 4.0 * kPi) / 3.0);
                break;
        }
    } else {
        switch (kernel.kind) {
            case KernelKind::uniform:
                // F(r) = r^2
                r = std::sqrt(u);
                break;
            case KernelKind::triangular:
                // F(r) = 3r^2 - 2r^3
                r = 0.5 - std::sin(std::asin(1.0 - 2.0 * u) / 3.0);
                break;
            case KernelKind::quadratic_taper:
                // F(r) = 2r^2 - r^4
                r = std::sqrt(1.0 - std::sqrt(1.0 - u));
                break;
        }
    }
    if (r < 0.0) r = 0.0;
    if (r > 1.0) r = 1.0;
    return r;
}

Vec4 sample_ball(Rng& rng, const KernelModel& kernel) {
    const double r = kernel_radius_icdf(kernel, rng.u01());
    if (kernel.m == 1) {
        const double s = (rng.u01() < 0.5) ? -1.0 : 1.0;
        return Vec4{s * r, 0.0};
    }
    const double alpha = 2.0 * kPi * rng.u01();
    return Vec4{r * std::cos(alpha), r * std::sin(alpha)};
}

Vec4 sample_biased_ball(Rng& rng, const KernelModel& kernel) {
    for (;;) {
        const Vec4 w = sample_ball(rng, kernel);
        if (2.0 * rng.u01() <= 1.0 + w[0]) return w;
    }
}

StepDraws sample_step(Rng& rng, const KernelModel& kernel) {
    StepDraws d;
    d.w = sample_ball(rng, kernel);
    d.wb = sample_biased_ball(rng, kernel);
    d.b = rng.u01();
    return d;
}

void minimal_rotation(const double* e, int m, double* q) {
    if (m == 1) {
        q[0] = e[0];
        return;
    }
    if (m != 2) {
        throw std::invalid_argument("minimal_rotation: m must be 1 or 2");
    }
    q[0] = e[0];
    q[1] = -e[1];
    q[2] = e[1];
    q[3] = e[0];
}

void drift_rotation(const WalkConfig& cfg, const Vec4& x, double* q) {
    const Frame f = frame_at(cfg, x);
    double c[2] = {0.0, 0.0};
    if (!gradient_coords(cfg, x, f, c)) {
        identity_matrix(f.m, q);
        return;
    }
    chart_matrix(c, f.m, c[0] > kWide, q);
}

void drift_rotation_pair(const WalkConfig& cfg, const Vec4& x, const Vec4& y,
                         double* q) {
    const Frame fx = frame_at(cfg, x);
    const Frame fy = push_frame(cfg, fx, x, y);
    double c[2] = {0.0, 0.0};
    if (!gradient_coords(cfg, y, fy, c)) {
        identity_matrix(fy.m, q);
        return;
    }
    double s[2] = {0.0, 0.0};
    bool first_chart;
    if (!gradient_coords(cfg, x, fx, s)) {
        // No gradient class at the driver: fall back to the wide caps at y.
        first_chart = c[0] > kWide;
    } else if (s[0] > kWide) {
        // Driver in the forward cap: y uses the forward chart on all of its
        // domain, switching only deep inside the backward cap.
        first_chart = c[0] > kNarrow;
    } else {
        first_chart = c[0] >= -kNarrow;
    }
    chart_matrix(c, fy.m, first_chart, q);
}

Vec4 reflect_across(const Vec4& v, const Vec4& z) {
    const double zz = norm2(z);
    if (zz == 0.0) return v;
    return v - (2.0 * dot(v, z) / zz) * z;
}

Vec4 step_x(const WalkConfig& cfg, const Vec4& x, const StepDraws& d) {
    if (cfg.M->geodesic_distance(cfg.x0, x) >= cfg.r) return x;
    const Frame f = frame_at(cfg, x);
    const double gn = norm(cfg.rho.grad_log_rho(x));
    Vec4 v;
    if (d.b >= cfg.eps * gn) {
        const double u[2] = {d.w[0], d.w[1]};
        v = from_coords(f, u);
    } else {
        double q[4];
        drift_rotation(cfg, x, q);
        double u[2] = {0.0, 0.0};
        apply_matrix(q, f.m, d.wb, u);
        v = from_coords(f, u);
    }
    return cfg.M->exp_map(x, cfg.eps * v);
}

Vec4 step_y(const WalkConfig& cfg, const Vec4& x, const Vec4& y,
            const StepDraws& d) {
    const double gn = norm(cfg.rho.grad_log_rho(y));
    if (d.b >= cfg.eps * gn) {
        const Frame fx = frame_at(cfg, x);
        const double u[2] = {d.w[0], d.w[1]};
        Vec4 v = from_coords(fx, u);
        const Vec4 z = cfg.M->log_map(x, y).comp;
        v = reflect_across(v, z);
        const Vec4 vy =
            cfg.M->parallel_transport(x, y, TangentVector{x, v}).comp;
        return cfg.M->exp_map(y, cfg.eps * vy);
    }
    double q[4];
    drift_rotation_pair(cfg, x, y, q);
    const Frame fx = frame_at(cfg, x);
    const Frame fy = push_frame(cfg, fx, x, y);
    double u[2] = {0.0, 0.0};
    apply_matrix(q, fy.m, d.wb, u);
    return cfg.M->exp_map(y, cfg.eps * from_coords(fy, u));
}

} // namespace cloudlap
