#include "cloudlap/manifold.hpp"

#include <cmath>
#include <stdexcept>

namespace cloudlap {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_signed(double a) {
    // Reduce to (-pi, pi].
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    if (a > kPi) a -= kTwoPi;
    return a;
}

double wrap_gap(double a, double b) {
    // Shortest angular gap; must match the simd circle kernels exactly,
    // so the arithmetic is |a-b| against 2*pi - |a-b| with no fmod.
    const double g = std::fabs(a - b);
    const double h = kTwoPi - g;
    return g < h ? g : h;
}

Vec4 circle_point(double theta) { return Vec4{std::cos(theta), std::sin(theta)}; }

Vec4 torus_point(double t1, double t2) {
    return Vec4{std::cos(t1), std::sin(t1), std::cos(t2), std::sin(t2)};
}

[[noreturn]] void cut_locus_error(const char* what) {
    throw std::domain_error(std::string("minimizing geodesic not unique: ") +
                            what);
}

} // namespace

Manifold::Manifold(ManifoldKind kind) : kind_(kind) {
    switch (kind) {
        case ManifoldKind::circle:
            m_ = 1; d_ = 2; iota_ = kPi; reach_ = 1.0;
            volume_ = kTwoPi; diameter_ = kPi;
            break;
        case ManifoldKind::sphere2:
            m_ = 2; d_ = 3; iota_ = kPi; reach_ = 1.0;
            volume_ = 4.0 * kPi; diameter_ = kPi;
            break;
        case ManifoldKind::flat_torus2:
            m_ = 2; d_ = 4; iota_ = kPi; reach_ = 1.0;
            volume_ = 4.0 * kPi * kPi; diameter_ = kPi * std::sqrt(2.0);
            break;
    }
}

const Manifold& Manifold::circle() {
    static const Manifold m(ManifoldKind::circle);
    return m;
}
const Manifold& Manifold::sphere2() {
    static const Manifold m(ManifoldKind::sphere2);
    return m;
}
const Manifold& Manifold::flat_torus2() {
    static const Manifold m(ManifoldKind::flat_torus2);
    return m;
}
const Manifold& Manifold::get(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::circle: return circle();
        case ManifoldKind::sphere2: return sphere2();
        case ManifoldKind::flat_torus2: return flat_torus2();
    }
    throw std::invalid_argument("unknown manifold kind");
}

bool Manifold::on_manifold(const Vec4& x, double tol) const {
    switch (kind_) {
        case ManifoldKind::circle:
            return std::fabs(x[0] * x[0] + x[1] * x[1] - 1.0) <= tol &&
                   x[2] == 0.0 && x[3] == 0.0;
        case ManifoldKind::sphere2:
            return std::fabs(norm2(x) - 1.0) <= tol && x[3] == 0.0;
        case ManifoldKind::flat_torus2:
            return std::fabs(x[0] * x[0] + x[1] * x[1] - 1.0) <= tol &&
                   std::fabs(x[2] * x[2] + x[3] * x[3] - 1.0) <= tol;
    }
    return false;
}

void Manifold::check_point(const Vec4& x) const {
    if (!on_manifold(x)) {
        throw std::invalid_argument("point violates the embedding constraint");
    }
}

bool Manifold::angle_coords(const Vec4& x, double* out) const {
    switch (kind_) {
        case ManifoldKind::circle:
            out[0] = std::atan2(x[1], x[0]);
            return true;
        case ManifoldKind::flat_torus2:
            out[0] = std::atan2(x[1], x[0]);
            out[1] = std::atan2(x[3], x[2]);
            return true;
        case ManifoldKind::sphere2:
            return false;
    }
    return false;
}

double Manifold::geodesic_distance(const Vec4& x, const Vec4& y) const {
    check_point(x);
    check_point(y);
    switch (kind_) {
        case ManifoldKind::circle: {
            const double tx = std::atan2(x[1], x[0]);
            const double ty = std::atan2(y[1], y[0]);
            return wrap_gap(tx, ty);
        }
        case ManifoldKind::sphere2: {
            // atan2 of the cross and dot products stays accurate for both
            // nearly-equal and nearly-antipodal points, unlike acos.
            const double dp = (x[0] * y[0] + x[1] * y[1]) + x[2] * y[2];
            const Vec4 c = cross3(x, y);
            const double cn =
                std::sqrt((c[0] * c[0] + c[1] * c[1]) + c[2] * c[2]);
            return std::atan2(cn, dp);
        }
        case ManifoldKind::flat_torus2: {
            const double g1 = std::fabs(std::atan2(x[1], x[0]) -
                                        std::atan2(y[1], y[0]));
            const double h1 = kTwoPi - g1;
            const double w1 = g1 < h1 ? g1 : h1;
            const double g2 = std::fabs(std::atan2(x[3], x[2]) -
                                        std::atan2(y[3], y[2]));
            const double h2 = kTwoPi - g2;
            const double w2 = g2 < h2 ? g2 : h2;
            return std::sqrt(w1 * w1 + w2 * w2);
        }
    }
    return 0.0;
}

Vec4 Manifold::exp_map(const Vec4& x, const Vec4& comp) const {
    const double len = norm(comp);
    if (len >= iota_) {
        throw std::domain_error("tangent vector length exceeds the "
                                "injectivity radius");
    }
    switch (kind_) {
        case ManifoldKind::circle: {
            const double theta = std::atan2(x[1], x[0]);
            // Signed length along the counterclockwise unit tangent.
            const double s = comp[0] * -x[1] + comp[1] * x[0];
            return circle_point(theta + s);
        }
        case ManifoldKind::sphere2: {
            if (len == 0.0) return x;
            const Vec4 u = (1.0 / len) * comp;
            return std::cos(len) * x + std::sin(len) * u;
        }
        case ManifoldKind::flat_torus2: {
            const double t1 = std::atan2(x[1], x[0]);
            const double t2 = std::atan2(x[3], x[2]);
            const double s1 = comp[0] * -x[1] + comp[1] * x[0];
            const double s2 = comp[2] * -x[3] + comp[3] * x[2];
            return torus_point(t1 + s1, t2 + s2);
        }
    }
    return x;
}

Vec4 Manifold::exp_map(const TangentVector& v) const {
    return exp_map(v.base, v.comp);
}

TangentVector Manifold::log_map(const Vec4& x, const Vec4& y) const {
    constexpr double kCutTol = 1e-9;
    switch (kind_) {
        case ManifoldKind::circle: {
            const double tx = std::atan2(x[1], x[0]);
            const double ty = std::atan2(y[1], y[0]);
            const double delta = wrap_signed(ty - tx);
            if (std::fabs(std::fabs(delta) - kPi) < kCutTol) {
                cut_locus_error("antipodal points on the circle");
            }
            return {x, Vec4{delta * -x[1], delta * x[0]}};
        }
        case ManifoldKind::sphere2: {
            const double t = geodesic_distance(x, y);
            if (t < 1e-15) return {x, Vec4{}};
            if (kPi - t < kCutTol) {
                cut_locus_error("antipodal points on the sphere");
            }
            const double dp = dot(x, y);
            Vec4 dir = y - dp * x;
            const double dn = norm(dir);
            dir *= t / dn;
            return {x, dir};
        }
        case ManifoldKind::flat_torus2: {
            const double d1 = wrap_signed(std::atan2(y[1], y[0]) -
                                          std::atan2(x[1], x[0]));
            const double d2 = wrap_signed(std::atan2(y[3], y[2]) -
                                          std::atan2(x[3], x[2]));
            if (std::fabs(std::fabs(d1) - kPi) < kCutTol ||
                std::fabs(std::fabs(d2) - kPi) < kCutTol) {
                cut_locus_error("factor angle at half turn on the torus");
            }
            return {x, Vec4{d1 * -x[1], d1 * x[0], d2 * -x[3], d2 * x[2]}};
        }
    }
    return {x, Vec4{}};
}

TangentVector Manifold::parallel_transport(const Vec4& x, const Vec4& y,
                                           const TangentVector& v) const {
    switch (kind_) {
        case ManifoldKind::circle: {
            // Components along the counterclockwise tangent are constant.
            const double s = v.comp[0] * -x[1] + v.comp[1] * x[0];
            return {y, Vec4{s * -y[1], s * y[0]}};
        }
        case ManifoldKind::sphere2: {
            const double t = geodesic_distance(x, y);
            if (t < 1e-15) return {y, v.comp};
            if (kPi - t < 1e-9) {
                cut_locus_error("transport between antipodal points");
            }
            const double dp = dot(x, y);
            Vec4 u = y - dp * x;
            u *= 1.0 / norm(u);
            // Rotate the in-plane part by t in span{x, u}; the orthogonal
            // part rides along unchanged.
            const double a = dot(v.comp, u);
            const Vec4 res =
                v.comp + a * ((std::cos(t) - 1.0) * u - std::sin(t) * x);
            return {y, res};
        }
        case ManifoldKind::flat_torus2: {
            const double s1 = v.comp[0] * -x[1] + v.comp[1] * x[0];
            const double s2 = v.comp[2] * -x[3] + v.comp[3] * x[2];
            return {y, Vec4{s1 * -y[1], s1 * y[0], s2 * -y[3], s2 * y[2]}};
        }
    }
    return {y, v.comp};
}

std::array<TangentVector, 2> Manifold::tangent_frame(const Vec4& x) const {
    switch (kind_) {
        case ManifoldKind::circle:
            return {TangentVector{x, Vec4{-x[1], x[0]}}, TangentVector{}};
        case ManifoldKind::sphere2: {
            // Reference axis switched away from near-parallel x to keep the
            // frame well conditioned; deterministic in x.
            const Vec4 a = std::fabs(x[2]) < 0.9 ? Vec4{0.0, 0.0, 1.0}
                                                 : Vec4{1.0, 0.0, 0.0};
            Vec4 u1 = a - dot(a, x) * x;
            u1 *= 1.0 / norm(u1);
            const Vec4 u2 = cross3(x, u1);
            return {TangentVector{x, u1}, TangentVector{x, u2}};
        }
        case ManifoldKind::flat_torus2:
            return {TangentVector{x, Vec4{-x[1], x[0], 0.0, 0.0}},
                    TangentVector{x, Vec4{0.0, 0.0, -x[3], x[2]}}};
    }
    return {};
}

Vec4 Manifold::project_tangent(const Vec4& x, const Vec4& u) const {
    switch (kind_) {
        case ManifoldKind::circle: {
            const double s = u[0] * -x[1] + u[1] * x[0];
            return Vec4{s * -x[1], s * x[0]};
        }
        case ManifoldKind::sphere2:
            return u - dot(u, x) * x;
        case ManifoldKind::flat_torus2: {
            const double s1 = u[0] * -x[1] + u[1] * x[0];
            const double s2 = u[2] * -x[3] + u[3] * x[2];
            return Vec4{s1 * -x[1], s1 * x[0], s2 * -x[3], s2 * x[2]};
        }
    }
    return Vec4{};
}

Vec4 Manifold::random_point(Rng& rng) const {
    switch (kind_) {
        case ManifoldKind::circle:
            return circle_point(kTwoPi * rng.u01());
        case ManifoldKind::sphere2: {
            const double z = 2.0 * rng.u01() - 1.0;
            const double phi = kTwoPi * rng.u01();
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            return Vec4{s * std::cos(phi), s * std::sin(phi), z};
        }
        case ManifoldKind::flat_torus2:
            return torus_point(kTwoPi * rng.u01(), kTwoPi * rng.u01());
    }
    return Vec4{};
}

double Manifold::ball_volume(double r) const {
    if (r < 0.0) throw std::invalid_argument("negative ball radius");
    switch (kind_) {
        case ManifoldKind::circle:
            return r >= kPi ? kTwoPi : 2.0 * r;
        case ManifoldKind::sphere2:
            return r >= kPi ? 4.0 * kPi : kTwoPi * (1.0 - std::cos(r));
        case ManifoldKind::flat_torus2:
            // Valid below the injectivity radius, where the ball is an
            // isometric flat disc.
            if (r >= iota_) {
                throw std::domain_error("torus ball volume only below the "
                                        "injectivity radius");
            }
            return kPi * r * r;
    }
    return 0.0;
}

double Manifold::ball_volume_residual(const Vec4& x, double r) const {
    check_point(x);
    if (r <= 0.0) throw std::invalid_argument("radius must be positive");
    const double flat = m_ == 1 ? 2.0 * r : kPi * r * r;
    const double scale = m_ == 1 ? r * r * r : r * r * r * r;
    return std::fabs(ball_volume(r) - flat) / scale;
}

double Manifold::quadrilateral_residual(const Vec4& x, const Vec4& y,
                                        const TangentVector& v,
                                        const TangentVector& w,
                                        double s) const {
    const double third = iota_ / 3.0;
    if (geodesic_distance(x, y) >= third || v.length() >= third ||
        w.length() >= third) {
        throw std::domain_error("quadrilateral residual requires separation "
                                "and speeds below a third of the injectivity "
                                "radius");
    }
    if (s < 0.0 || s > 1.0) {
        throw std::invalid_argument("sweep parameter outside [0, 1]");
    }
    const Vec4 xs = exp_map(x, s * v.comp);
    const Vec4 ys = exp_map(y, s * w.comp);
    const double ls = geodesic_distance(xs, ys);
    const TangentVector t0z = log_map(x, y);
    const TangentVector wx = parallel_transport(y, x, w);
    const Vec4 chord = t0z.comp + s * (wx.comp - v.comp);
    return std::fabs(ls * ls - norm2(chord));
}

std::vector<Vec4> Manifold::covering_net(double h) const {
    if (h <= 0.0) throw std::invalid_argument("net spacing must be positive");
    std::vector<Vec4> net;
    switch (kind_) {
        case ManifoldKind::circle: {
            const int n = static_cast<int>(std::ceil(kTwoPi / h));
            net.reserve(n);
            for (int k = 0; k < n; ++k) {
                net.push_back(circle_point(kTwoPi * k / n));
            }
            break;
        }
        case ManifoldKind::flat_torus2: {
            // Axis spacing h/sqrt(2) keeps the worst-case cell diagonal
            // within h.
            const int n =
                static_cast<int>(std::ceil(kTwoPi / (h / std::sqrt(2.0))));
            net.reserve(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    net.push_back(
                        torus_point(kTwoPi * i / n, kTwoPi * j / n));
                }
            }
            break;
        }
        case ManifoldKind::sphere2: {
            // Latitude bands at spacing h/sqrt(2), each filled with azimuth
            // steps whose arc length at the band's widest parallel also
            // stays within that spacing.
            const double step = h / std::sqrt(2.0);
            const int nbands = static_cast<int>(std::ceil(kPi / step));
            const double band = kPi / nbands;
            for (int i = 0; i < nbands; ++i) {
                const double phi = (i + 0.5) * band;
                const double lo = phi - 0.5 * band;
                const double hi = phi + 0.5 * band;
                double smax = std::sin(phi);
                smax = std::max(smax, std::sin(lo));
                smax = std::max(smax, std::sin(hi));
                if (lo <= kPi / 2.0 && hi >= kPi / 2.0) smax = 1.0;
                const int naz = std::max(
                    1, static_cast<int>(std::ceil(kTwoPi * smax / band)));
                for (int j = 0; j < naz; ++j) {
                    const double lam = kTwoPi * j / naz;
                    net.push_back(Vec4{std::sin(phi) * std::cos(lam),
                                       std::sin(phi) * std::sin(lam),
                                       std::cos(phi)});
                }
            }
            break;
        }
    }
    return net;
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
    if (name == "circle") return ManifoldKind::circle;
    if (name == "sphere2") return ManifoldKind::sphere2;
    if (name == "flat_torus2") return ManifoldKind::flat_torus2;
    throw std::invalid_argument("unknown manifold '" + name +
                                "' (expected circle, sphere2, flat_torus2)");
}

std::string to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::circle: return "circle";
        case ManifoldKind::sphere2: return "sphere2";
        case ManifoldKind::flat_torus2: return "flat_torus2";
    }
    return "?";
}

} // namespace cloudlap
