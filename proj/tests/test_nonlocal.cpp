#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cloudlap/cloud.hpp"
#include "cloudlap/density.hpp"
#include "cloudlap/graph.hpp"
#include "cloudlap/kernel.hpp"
#include "cloudlap/manifold.hpp"
#include "cloudlap/nonlocal.hpp"
#include "cloudlap/rng.hpp"
#include "cloudlap/testfunctions.hpp"

using namespace cloudlap;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec4 circle_point(double theta) {
    return Vec4{std::cos(theta), std::sin(theta), 0.0, 0.0};
}

// Least-squares slope of log(res) against log(eps).
double loglog_slope(const std::vector<double>& eps,
                    const std::vector<double>& res) {
    const int k = static_cast<int>(eps.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < k; ++i) {
        const double x = std::log(eps[i]);
        const double y = std::log(res[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

} // namespace

TEST_CASE("degree equals the density exactly on the uniform circle") {
    const Manifold& C = Manifold::circle();
    const DensityModel u = DensityModel::uniform(C);
    Rng rng(111);
    for (KernelKind kk : {KernelKind::uniform, KernelKind::triangular,
                          KernelKind::quadratic_taper}) {
        const KernelModel k = KernelModel::make(kk, 1);
        for (double eps : {0.5, 0.2, 0.05}) {
            const Vec4 x = C.random_point(rng);
            CHECK(continuum_degree(u, k, eps, x) ==
                  doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-10));
        }
    }
}

TEST_CASE("degree stays within O(eps^2) of the density elsewhere") {
    const Manifold& S = Manifold::sphere2();
    const DensityModel rho = DensityModel::tilted(S, 0.5);
    const KernelModel k = KernelModel::make(KernelKind::triangular, 2);
    Rng rng(112);
    for (int rep = 0; rep < 5; ++rep) {
        const Vec4 x = S.random_point(rng);
        for (double eps : {0.4, 0.2, 0.1}) {
            const double d = continuum_degree(rho, k, eps, x);
            CHECK(std::fabs(d - rho.rho(x)) / (eps * eps) < 1.0);
        }
    }
}

TEST_CASE("both averages fix constants and respect the range") {
    const Manifold& S = Manifold::sphere2();
    const DensityModel rho = DensityModel::tilted(S, 0.6);
    const KernelModel k = KernelModel::make(KernelKind::quadratic_taper, 2);
    const ScalarField c = [](const Vec4&) { return -3.25; };
    Rng rng(113);
    for (int rep = 0; rep < 5; ++rep) {
        const Vec4 x = S.random_point(rng);
        CHECK(averaging_A(rho, k, 0.3, c, x) ==
              doctest::Approx(-3.25).epsilon(1e-12));
        CHECK(averaging_Abar(rho, k, 0.3, c, x) ==
              doctest::Approx(-3.25).epsilon(1e-10));
        const double l =
            nonlocal_laplacian(rho, k, 0.3, c, x);
        CHECK(std::fabs(l) < 1e-10);
    }
    // Height function is pinched between its extremes by any average.
    const ScalarField h = [](const Vec4& x) { return x[2]; };
    for (int rep = 0; rep < 10; ++rep) {
        const Vec4 x = S.random_point(rng);
        const double a = averaging_A(rho, k, 0.5, h, x);
        CHECK(a >= -1.0);
        CHECK(a <= 1.0);
    }
}

TEST_CASE("uniform circle cosine has closed-form averages") {
    const Manifold& C = Manifold::circle();
    const DensityModel u = DensityModel::uniform(C);
    const KernelModel k = KernelModel::make(KernelKind::uniform, 1);
    const ScalarField f = [](const Vec4& x) { return x[0]; }; // cos(theta)
    for (double theta : {0.0, 0.7, 2.4}) {
        const Vec4 x = circle_point(theta);
        for (double eps : {0.5, 0.25, 0.1}) {
            const double want = std::cos(theta) * std::sin(eps) / eps;
            CHECK(averaging_A(u, k, eps, f, x) ==
                  doctest::Approx(want).epsilon(1e-10));
            CHECK(averaging_Abar(u, k, eps, f, x) ==
                  doctest::Approx(want).epsilon(1e-10));
            // Same data, so the two averages coincide here.
            CHECK(std::fabs(averaging_A(u, k, eps, f, x) -
                            averaging_Abar(u, k, eps, f, x)) < 1e-10);
            const double lap = std::cos(theta) * (1.0 - std::sin(eps) / eps) /
                               (2.0 * kPi * eps * eps);
            CHECK(nonlocal_laplacian(u, k, eps, f, x) ==
                  doctest::Approx(lap).epsilon(1e-8));
        }
    }
}

TEST_CASE("laplacian, degree, and average satisfy their exchange identity") {
    // lap = -d_eps(x) (A f(x) - f(x)) / eps^2 at random points and widths.
    const Manifold& S = Manifold::sphere2();
    const DensityModel rho = DensityModel::tilted(S, 0.4);
    const KernelModel k = KernelModel::make(KernelKind::triangular, 2);
    const ScalarField f = [](const Vec4& x) {
        return std::sin(2.0 * x[0]) + x[1] * x[2];
    };
    Rng rng(114);
    for (int rep = 0; rep < 50; ++rep) {
        const Vec4 x = S.random_point(rng);
        const double eps = 0.05 + 0.45 * rng.u01();
        const double lap = nonlocal_laplacian(rho, k, eps, f, x);
        const double d = continuum_degree(rho, k, eps, x);
        const double a = averaging_A(rho, k, eps, f, x);
        const double want = -d * (a - f(x)) / (eps * eps);
        CHECK(lap == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("expansion defects shrink at third order in the width") {
    const std::vector<double> epses = {0.4, 0.2, 0.1, 0.05};
    struct Pick {
        const Manifold* M;
        double tilt;
        KernelKind kk;
    };
    const Pick picks[] = {
        {&Manifold::circle(), 0.0, KernelKind::uniform},
        {&Manifold::circle(), 0.5, KernelKind::triangular},
        {&Manifold::sphere2(), 0.5, KernelKind::triangular},
        {&Manifold::flat_torus2(), 0.4, KernelKind::quadratic_taper},
    };
    Rng rng(115);
    for (const Pick& p : picks) {
        const DensityModel rho = p.tilt == 0.0
                                     ? DensityModel::uniform(*p.M)
                                     : DensityModel::tilted(*p.M, p.tilt);
        const KernelModel k = KernelModel::make(p.kk, p.M->intrinsic_dim());
        for (const TestFunction& f : test_function_library(*p.M)) {
            const Vec4 x = p.M->random_point(rng);
            std::vector<double> ra, rb;
            for (double eps : epses) {
                const ConsistencyResidual r =
                    consistency_residual(rho, k, eps, f, x);
                ra.push_back(r.a_residual);
                rb.push_back(r.abar_residual);
            }
            // Quadrature noise floor: a residual this small has converged
            // beyond third order already.
            const auto clean = [](const std::vector<double>& v) {
                for (double r : v) {
                    if (r < 1e-12) return false;
                }
                return true;
            };
            if (clean(ra)) CHECK(loglog_slope(epses, ra) >= 2.7);
            if (clean(rb)) CHECK(loglog_slope(epses, rb) >= 2.7);
        }
    }
}

TEST_CASE("uniform-everything ball averages reduce to the mean-value law") {
    // Uniform kernel, uniform density: the drift dies and sigma/2 becomes
    // 1/(2(m+2)), so the residual of A f - f - eps^2/(2(m+2)) lb f is the
    // same third-order defect.
    const Manifold& S = Manifold::sphere2();
    const DensityModel u = DensityModel::uniform(S);
    const KernelModel k = KernelModel::make(KernelKind::uniform, 2);
    REQUIRE(sigma_eta(k) == doctest::Approx(1.0 / 4.0).epsilon(1e-12));
    const std::vector<double> epses = {0.4, 0.2, 0.1, 0.05};
    Rng rng(116);
    for (const TestFunction& f : test_function_library(S)) {
        const Vec4 x = S.random_point(rng);
        std::vector<double> res;
        for (double eps : epses) {
            const double ball = averaging_A(u, k, eps, f.value, x);
            const double taylor =
                f.value(x) +
                eps * eps / (2.0 * (2.0 + 2.0)) * f.laplace_beltrami(x);
            res.push_back(std::fabs(ball - taylor));
        }
        bool clean = true;
        for (double r : res) clean = clean && r >= 1e-12;
        if (clean) CHECK(loglog_slope(epses, res) >= 2.7);
    }
}

TEST_CASE("the two averages drift apart no faster than eps^2") {
    const Manifold& S = Manifold::sphere2();
    const DensityModel rho = DensityModel::tilted(S, 0.5);
    const KernelModel k = KernelModel::make(KernelKind::triangular, 2);
    const ScalarField f = [](const Vec4& x) { return x[0] + 0.5 * x[2] * x[2]; };
    const double supf = 1.5;
    Rng rng(117);
    for (int rep = 0; rep < 5; ++rep) {
        const Vec4 x = S.random_point(rng);
        for (double eps : {0.4, 0.2, 0.1}) {
            const double gap = std::fabs(averaging_A(rho, k, eps, f, x) -
                                         averaging_Abar(rho, k, eps, f, x));
            CHECK(gap / (eps * eps * supf) < 5.0);
        }
    }
}

TEST_CASE("the operator is positive at a strict maximum") {
    const Manifold& C = Manifold::circle();
    const DensityModel uc = DensityModel::uniform(C);
    const KernelModel k1 = KernelModel::make(KernelKind::triangular, 1);
    const ScalarField cosf = [](const Vec4& x) { return x[0]; };
    for (double eps : {0.4, 0.1}) {
        CHECK(nonlocal_laplacian(uc, k1, eps, cosf, circle_point(0.0)) > 0.0);
    }

    const Manifold& S = Manifold::sphere2();
    const DensityModel us = DensityModel::tilted(S, 0.3);
    const KernelModel k2 = KernelModel::make(KernelKind::uniform, 2);
    const ScalarField height = [](const Vec4& x) { return x[2]; };
    CHECK(nonlocal_laplacian(us, k2, 0.3, height, Vec4{0, 0, 1, 0}) > 0.0);
}

TEST_CASE("interpolant rows are controlled by the discrete data") {
    const Manifold& C = Manifold::circle();
    const DensityModel u = DensityModel::uniform(C);
    const KernelModel k = KernelModel::make(KernelKind::triangular, 1);
    const Cloud cloud = sample_cloud(C, u, 800, 118);
    const EpsGraph g = build_eps_graph(cloud, 0.25, k);

    // Constant data: the interpolant is constant on the covered band, so
    // the nonlocal row at a cloud point nearly vanishes.
    const std::vector<double> c(cloud.n, 2.0);
    const BridgePair flat = discrete_to_nonlocal_check(g, u, c, cloud.point(0));
    CHECK(flat.lhs < 1e-10);
    CHECK(flat.rhs == 0.0);

    std::vector<double> f(cloud.n);
    for (int i = 0; i < cloud.n; ++i) {
        const Vec4 x = cloud.point(i);
        f[i] = x[0] + 0.3 * x[1] * x[1];
    }
    const BridgePair bp = discrete_to_nonlocal_check(g, u, f, cloud.point(7));
    CHECK(bp.lhs > 0.0);
    CHECK(bp.rhs > 0.0);
    CHECK(bp.rhs_improved > 0.0);
    // Frozen empirical headroom: the continuum row built from the
    // interpolant stays a small multiple of either discrete bound.
    CHECK(bp.lhs <= 10.0 * bp.rhs);
    CHECK(bp.lhs <= 10.0 * bp.rhs_improved);

    const DensityModel wrong = DensityModel::uniform(Manifold::sphere2());
    CHECK_THROWS_AS(
        (void)discrete_to_nonlocal_check(g, wrong, f, cloud.point(0)),
        std::invalid_argument);
}

TEST_CASE("continuum regularity quotients ignore amplitude") {
    const Manifold& C = Manifold::circle();
    const DensityModel rho = DensityModel::tilted(C, 0.4);
    const KernelModel k = KernelModel::make(KernelKind::uniform, 1);
    const double eps = 0.3;
    const ScalarField f = [](const Vec4& x) { return x[0] + 0.2 * x[1]; };
    const ScalarField f3 = [](const Vec4& x) {
        return 3.0 * (x[0] + 0.2 * x[1]);
    };
    const ScalarField c = [](const Vec4&) { return 1.5; };
    const Vec4 x = circle_point(0.2);
    const Vec4 y = circle_point(1.1);

    CHECK(nonlocal_regularity_constant(rho, k, eps, c, x, y) == 0.0);
    const double base = nonlocal_regularity_constant(rho, k, eps, f, x, y);
    CHECK(base > 0.0);
    CHECK(nonlocal_regularity_constant(rho, k, eps, f3, x, y) ==
          doctest::Approx(base).epsilon(1e-10));

    const Vec4 x0 = circle_point(0.5);
    const double r = 0.7;
    const double inner =
        nonlocal_interior_constant(rho, k, eps, f, x0, r, x, y);
    CHECK(inner > 0.0);
    CHECK(nonlocal_interior_constant(rho, k, eps, f3, x0, r, x, y) ==
          doctest::Approx(inner).epsilon(1e-10));
    CHECK(nonlocal_interior_constant(rho, k, eps, c, x0, r, x, y) == 0.0);
    // Queries must stay inside the inner ball.
    CHECK_THROWS_AS((void)nonlocal_interior_constant(rho, k, eps, f, x0, 0.1,
                                                     x, circle_point(2.8)),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)nonlocal_interior_constant(rho, k, eps, f, x0, -1.0, x, y),
        std::invalid_argument);
}

TEST_CASE("width outside the geometry gate is rejected") {
    const Manifold& S = Manifold::sphere2();
    const DensityModel u = DensityModel::uniform(S);
    const KernelModel k = KernelModel::make(KernelKind::uniform, 2);
    const ScalarField f = [](const Vec4& x) { return x[0]; };
    const Vec4 x{0, 0, 1, 0};
    CHECK_THROWS_AS((void)continuum_degree(u, k, 0.0, x),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)continuum_degree(u, k, 4.0, x),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)averaging_A(u, k, -0.5, f, x),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)averaging_Abar(u, k, 3.2, f, x),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)nonlocal_laplacian(u, k, 3.2, f, x),
                    std::invalid_argument);
}
