#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cloudlap/manifold.hpp"
#include "cloudlap/rng.hpp"
#include "cloudlap/vec.hpp"

using namespace cloudlap;

namespace {

constexpr double kPi = 3.14159265358979323846;

const Manifold* kAll[3] = {&Manifold::circle(), &Manifold::sphere2(),
                           &Manifold::flat_torus2()};

Vec4 circle_point(double theta) {
    return Vec4{std::cos(theta), std::sin(theta), 0.0, 0.0};
}

// Random tangent vector at x with length at most `cap`.
TangentVector random_tangent(const Manifold& M, const Vec4& x, Rng& rng,
                             double cap) {
    const auto frame = M.tangent_frame(x);
    Vec4 comp{};
    for (int k = 0; k < M.intrinsic_dim(); ++k) {
        const double c = rng.sym();
        for (int a = 0; a < 4; ++a) comp[a] += c * frame[k].comp[a];
    }
    const double len = norm(comp);
    if (len > 0.0) {
        const double target = cap * rng.u01();
        for (int a = 0; a < 4; ++a) comp[a] *= target / len;
    }
    return TangentVector{x, comp};
}

} // namespace

TEST_CASE("closed-form distances on the named point pairs") {
    const Manifold& S = Manifold::sphere2();
    const Vec4 north{0.0, 0.0, 1.0, 0.0};
    const Vec4 south{0.0, 0.0, -1.0, 0.0};
    CHECK(S.geodesic_distance(north, south) == doctest::Approx(kPi).epsilon(1e-12));

    const Manifold& C = Manifold::circle();
    CHECK(C.geodesic_distance(circle_point(0.0), circle_point(kPi / 2)) ==
          doctest::Approx(kPi / 2).epsilon(1e-12));

    const Vec4 x{1.0, 0.0, 0.0, 0.0};
    const Vec4 y{std::cos(0.3), std::sin(0.3), 0.0, 0.0};
    CHECK(S.geodesic_distance(x, y) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(norm(y - x) == doctest::Approx(2.0 * std::sin(0.15)).epsilon(1e-12));
}

TEST_CASE("distance is a metric and chord-arc sandwich holds") {
    for (const Manifold* M : kAll) {
        Rng rng(101);
        const double R = M->reach();
        for (int i = 0; i < 400; ++i) {
            const Vec4 a = M->random_point(rng);
            const Vec4 b = M->random_point(rng);
            const Vec4 c = M->random_point(rng);
            const double dab = M->geodesic_distance(a, b);
            const double dba = M->geodesic_distance(b, a);
            CHECK(dab == doctest::Approx(dba).epsilon(1e-12));
            CHECK(dab >= 0.0);
            CHECK(M->geodesic_distance(a, a) == 0.0);
            CHECK(dab <= M->geodesic_distance(a, c) +
                             M->geodesic_distance(c, b) + 1e-10);
            const double chord = norm(a - b);
            CHECK(dab >= chord - 1e-12);
            if (chord <= R / 2) {
                CHECK(dab <= chord + (8.0 / (R * R)) * chord * chord * chord + 1e-12);
            }
        }
    }
}

TEST_CASE("points off the embedding are rejected") {
    const Vec4 bad{1.1, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(Manifold::circle().check_point(bad), std::invalid_argument);
    CHECK_FALSE(Manifold::sphere2().on_manifold(Vec4{0.5, 0.5, 0.5, 0.0}));
}

TEST_CASE("exponential map fixed cases") {
    const Manifold& S = Manifold::sphere2();
    const Vec4 e3{0.0, 0.0, 1.0, 0.0};
    const Vec4 e1{1.0, 0.0, 0.0, 0.0};
    const Vec4 up = S.exp_map(e3, Vec4{kPi / 2, 0.0, 0.0, 0.0});
    CHECK(norm(up - e1) < 1e-12);

    const Manifold& C = Manifold::circle();
    Rng rng(103);
    for (int i = 0; i < 100; ++i) {
        const double theta = 2.0 * kPi * rng.u01();
        const double s = 2.0 * rng.sym();
        const Vec4 x = circle_point(theta);
        const auto frame = C.tangent_frame(x);
        const Vec4 y = C.exp_map(x, s * frame[0].comp);
        // The frame is the counterclockwise unit tangent, so the signed step
        // adds to the angle.
        CHECK(norm(y - circle_point(theta + s)) < 1e-12);
    }
}

TEST_CASE("exponential map moves by exactly the tangent length") {
    for (const Manifold* M : kAll) {
        Rng rng(104);
        for (int i = 0; i < 300; ++i) {
            const Vec4 x = M->random_point(rng);
            const TangentVector v =
                random_tangent(*M, x, rng, 0.9 * M->injectivity_radius());
            const Vec4 y = M->exp_map(v);
            CHECK(M->on_manifold(y, 1e-12));
            CHECK(M->geodesic_distance(x, y) ==
                  doctest::Approx(v.length()).epsilon(1e-10));
        }
        const Vec4 x = M->random_point(rng);
        CHECK(norm(M->exp_map(x, Vec4{}) - x) < 1e-12);
        const auto frame = M->tangent_frame(x);
        CHECK_THROWS_AS(
            (void)M->exp_map(x, (M->injectivity_radius() + 0.1) * frame[0].comp),
            std::domain_error);
    }
}

TEST_CASE("log map inverts exp map and rejects cut-locus pairs") {
    for (const Manifold* M : kAll) {
        Rng rng(105);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const Vec4 x = M->random_point(rng);
            const TangentVector v =
                random_tangent(*M, x, rng, 0.49 * M->injectivity_radius());
            const Vec4 y = M->exp_map(v);
            const TangentVector back = M->log_map(x, y);
            CHECK(back.length() ==
                  doctest::Approx(M->geodesic_distance(x, y)).epsilon(1e-10));
            worst = std::max(worst, norm(M->exp_map(back) - y));
            const TangentVector zero = M->log_map(x, x);
            CHECK(zero.length() == 0.0);
        }
        CHECK(worst < 1e-9);
    }
    const Manifold& S = Manifold::sphere2();
    const Vec4 e3{0.0, 0.0, 1.0, 0.0};
    CHECK_THROWS_AS((void)S.log_map(e3, Vec4{0.0, 0.0, -1.0, 0.0}),
                    std::domain_error);

    const TangentVector l =
        S.log_map(e3, Vec4{1.0, 0.0, 0.0, 0.0});
    CHECK(norm(l.comp - Vec4{kPi / 2, 0.0, 0.0, 0.0}) < 1e-12);
}

TEST_CASE("parallel transport is an isometry with inverse along the reverse path") {
    for (const Manifold* M : kAll) {
        Rng rng(106);
        for (int i = 0; i < 1000; ++i) {
            const Vec4 x = M->random_point(rng);
            const TangentVector step =
                random_tangent(*M, x, rng, 0.45 * M->injectivity_radius());
            const Vec4 y = M->exp_map(step);
            const TangentVector v = random_tangent(*M, x, rng, 2.0);
            const TangentVector pv = M->parallel_transport(x, y, v);
            CHECK(std::fabs(pv.length() - v.length()) < 1e-12);
            // Result must be tangent at y: projection changes nothing.
            CHECK(norm(M->project_tangent(y, pv.comp) - pv.comp) < 1e-10);
            const TangentVector round = M->parallel_transport(y, x, pv);
            CHECK(norm(round.comp - v.comp) < 1e-10);
        }
        const Vec4 x = M->random_point(rng);
        const TangentVector v = random_tangent(*M, x, rng, 1.0);
        const TangentVector same = M->parallel_transport(x, x, v);
        CHECK(norm(same.comp - v.comp) < 1e-14);
    }
}

TEST_CASE("transport perpendicular to the motion is unchanged on the sphere") {
    const Manifold& S = Manifold::sphere2();
    const Vec4 e3{0.0, 0.0, 1.0, 0.0};
    const Vec4 e1{1.0, 0.0, 0.0, 0.0};
    const TangentVector v{e3, Vec4{0.0, 1.0, 0.0, 0.0}};
    const TangentVector moved = S.parallel_transport(e3, e1, v);
    CHECK(norm(moved.comp - Vec4{0.0, 1.0, 0.0, 0.0}) < 1e-12);
}

TEST_CASE("tangent frames are orthonormal and transport preserves that") {
    for (const Manifold* M : kAll) {
        Rng rng(107);
        const int m = M->intrinsic_dim();
        for (int i = 0; i < 1000; ++i) {
            const Vec4 x = M->random_point(rng);
            const auto frame = M->tangent_frame(x);
            for (int a = 0; a < m; ++a) {
                CHECK(std::fabs(norm(frame[a].comp) - 1.0) < 1e-12);
                CHECK(norm(M->project_tangent(x, frame[a].comp) -
                           frame[a].comp) < 1e-10);
                for (int b = a + 1; b < m; ++b) {
                    CHECK(std::fabs(dot(frame[a].comp, frame[b].comp)) < 1e-12);
                }
            }
        }
        // Transported frames stay orthonormal.
        const Vec4 x = M->random_point(rng);
        const Vec4 y = M->exp_map(random_tangent(*M, x, rng, 1.0));
        const auto frame = M->tangent_frame(x);
        std::vector<TangentVector> moved;
        for (int a = 0; a < m; ++a) {
            moved.push_back(M->parallel_transport(x, y, frame[a]));
        }
        for (int a = 0; a < m; ++a) {
            CHECK(std::fabs(moved[a].length() - 1.0) < 1e-12);
            for (int b = a + 1; b < m; ++b) {
                CHECK(std::fabs(dot(moved[a].comp, moved[b].comp)) < 1e-12);
            }
        }
    }

    const Manifold& C = Manifold::circle();
    const Vec4 x = circle_point(0.7);
    const auto frame = C.tangent_frame(x);
    CHECK(norm(frame[0].comp - Vec4{-std::sin(0.7), std::cos(0.7), 0.0, 0.0}) <
          1e-12);
}

TEST_CASE("ball volumes and their curvature residuals") {
    const Manifold& C = Manifold::circle();
    const Manifold& S = Manifold::sphere2();
    const Manifold& T = Manifold::flat_torus2();
    Rng rng(108);
    const Vec4 xc = C.random_point(rng);
    const Vec4 xs = S.random_point(rng);
    const Vec4 xt = T.random_point(rng);
    for (double r : {0.5, 0.1, 0.01}) {
        CHECK(C.ball_volume_residual(xc, r) == 0.0);
        CHECK(T.ball_volume_residual(xt, r) == 0.0);
    }
    // Vol(B(x,r)) = 2 pi (1 - cos r) on the sphere, so the normalized gap
    // tends to pi/12. Smaller radii hit catastrophic cancellation in the
    // volume difference, so stop at r = 1e-2.
    CHECK(S.ball_volume_residual(xs, 1e-2) ==
          doctest::Approx(kPi / 12).epsilon(1e-3));
    CHECK(S.ball_volume(kPi) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    CHECK(C.ball_volume(0.25) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("quadrilateral defect vanishes where geometry is flat") {
    Rng rng(109);
    for (const Manifold* M : {&Manifold::circle(), &Manifold::flat_torus2()}) {
        for (int i = 0; i < 200; ++i) {
            const Vec4 x = M->random_point(rng);
            const TangentVector t =
                random_tangent(*M, x, rng, M->injectivity_radius() / 4);
            const Vec4 y = M->exp_map(t);
            const TangentVector v =
                random_tangent(*M, x, rng, M->injectivity_radius() / 4);
            const TangentVector w =
                random_tangent(*M, y, rng, M->injectivity_radius() / 4);
            const double res = M->quadrilateral_residual(x, y, v, w, rng.u01());
            CHECK(res < 1e-10);
        }
    }
}

TEST_CASE("quadrilateral defect has the stated second-order scaling on the sphere") {
    const Manifold& S = Manifold::sphere2();
    Rng rng(110);
    double worst_ratio = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const Vec4 x = S.random_point(rng);
        const TangentVector dir = random_tangent(S, x, rng, 1.0);
        const TangentVector v0 = random_tangent(S, x, rng, 1.0);
        for (int kt = 1; kt <= 5; ++kt) {
            const double t0 = std::pow(2.0, -kt);
            Vec4 scaled = dir.comp;
            const double len = norm(scaled);
            if (len == 0.0) continue;
            for (int a = 0; a < 4; ++a) scaled[a] *= t0 / len;
            const Vec4 y = S.exp_map(x, scaled);
            const TangentVector w = S.parallel_transport(x, y, v0);
            for (int ks = 1; ks <= 5; ++ks) {
                const double s = std::pow(2.0, -ks);
                const double res = S.quadrilateral_residual(x, y, v0, w, s);
                const double denom =
                    s * s * t0 * t0 +
                    std::pow(s, 4) * (norm2(v0.comp) + norm2(w.comp));
                worst_ratio = std::max(worst_ratio, res / denom);
            }
        }
    }
    CHECK(worst_ratio < 10.0);

    // Zero sides collapse the quadrilateral exactly.
    const Vec4 x = S.random_point(rng);
    const Vec4 y = S.exp_map(random_tangent(S, x, rng, 0.5));
    const TangentVector zx{x, Vec4{}};
    const TangentVector zy{y, Vec4{}};
    CHECK(S.quadrilateral_residual(x, y, zx, zy, 0.7) < 1e-12);
}

TEST_CASE("covering nets have the promised size scaling and radius") {
    const Manifold& C = Manifold::circle();
    CHECK(C.covering_net(kPi / 8).size() == 16);

    for (const Manifold* M : kAll) {
        const double h = 0.4;
        const double grow =
            static_cast<double>(M->covering_net(h / 2).size()) /
            static_cast<double>(M->covering_net(h).size());
        const double m = M->intrinsic_dim();
        CHECK(grow >= std::pow(2.0, m - 0.5));
        CHECK(grow <= std::pow(2.0, m + 0.5));
    }

    const Manifold& S = Manifold::sphere2();
    const auto net = S.covering_net(0.1);
    Rng rng(111);
    double maxmin = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec4 x = S.random_point(rng);
        double best = 1e300;
        for (const Vec4& p : net) {
            best = std::min(best, S.geodesic_distance(x, p));
        }
        maxmin = std::max(maxmin, best);
    }
    CHECK(maxmin <= 0.1);
}

TEST_CASE("angle coordinates agree with the embeddings") {
    Rng rng(112);
    double t[2];
    const Manifold& C = Manifold::circle();
    for (int i = 0; i < 50; ++i) {
        const Vec4 x = C.random_point(rng);
        REQUIRE(C.angle_coords(x, t));
        CHECK(norm(circle_point(t[0]) - x) < 1e-12);
    }
    const Manifold& T = Manifold::flat_torus2();
    for (int i = 0; i < 50; ++i) {
        const Vec4 x = T.random_point(rng);
        REQUIRE(T.angle_coords(x, t));
        const Vec4 rebuilt{std::cos(t[0]), std::sin(t[0]), std::cos(t[1]),
                           std::sin(t[1])};
        CHECK(norm(rebuilt - x) < 1e-12);
    }
    CHECK_FALSE(Manifold::sphere2().angle_coords(
        Vec4{0.0, 0.0, 1.0, 0.0}, t));
}

TEST_CASE("kind names round-trip") {
    for (const char* name : {"circle", "sphere2", "flat_torus2"}) {
        CHECK(to_string(manifold_kind_from_string(name)) == name);
    }
    CHECK_THROWS_AS((void)manifold_kind_from_string("klein_bottle"),
                    std::invalid_argument);
}
