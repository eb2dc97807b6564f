#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cloudlap/kernel.hpp"
#include "cloudlap/rng.hpp"

using namespace cloudlap;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct KernelFacts {
    KernelKind kind;
    int m;
    double sigma;  // second directional moment, closed form
    double eta0;   // value at the origin, closed form
};

// All three profiles are polynomials, so these rationals are exact.
const std::vector<KernelFacts> kFacts = {
    {KernelKind::uniform, 1, 1.0 / 3.0, 0.5},
    {KernelKind::uniform, 2, 1.0 / 4.0, 1.0 / kPi},
    {KernelKind::triangular, 1, 1.0 / 6.0, 1.0},
    {KernelKind::triangular, 2, 3.0 / 20.0, 3.0 / kPi},
    {KernelKind::quadratic_taper, 1, 1.0 / 5.0, 3.0 / 4.0},
    {KernelKind::quadratic_taper, 2, 1.0 / 6.0, 2.0 / kPi},
};

// Composite Simpson on [0,1]; exact for the cubic-and-below integrands the
// polynomial profiles produce.
double simpson01(const std::function<double(double)>& g, int panels) {
    const double h = 1.0 / panels;
    double s = g(0.0) + g(1.0);
    for (int i = 1; i < panels; ++i) {
        s += (i % 2 == 1 ? 4.0 : 2.0) * g(i * h);
    }
    return s * h / 3.0;
}

} // namespace

TEST_CASE("kernel values match closed forms at the origin and beyond support") {
    for (const auto& kf : kFacts) {
        const KernelModel k = KernelModel::make(kf.kind, kf.m);
        CHECK(k.eta(0.0) == doctest::Approx(kf.eta0).epsilon(1e-12));
        CHECK(k.eta(1.0 + 1e-12) == 0.0);
        CHECK(k.eta(2.0) == 0.0);
        CHECK(k.normalization > 0.0);
    }
}

TEST_CASE("profiles are nonincreasing and Lipschitz within the stated bound") {
    Rng rng(31);
    for (const auto& kf : kFacts) {
        const KernelModel k = KernelModel::make(kf.kind, kf.m);
        double prev = k.eta(0.0);
        for (int i = 1; i <= 1200; ++i) {
            const double v = k.eta(i * 1e-3);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        for (int i = 0; i < 2000; ++i) {
            const double a = rng.u01();
            const double b = rng.u01();
            CHECK(std::fabs(k.eta(a) - k.eta(b)) <=
                  k.lipschitz_bound * std::fabs(a - b) + 1e-12);
        }
    }
}

TEST_CASE("radial mass integrates to one in the kernel's own dimension") {
    for (const auto& kf : kFacts) {
        const KernelModel k = KernelModel::make(kf.kind, kf.m);
        double mass = 0.0;
        if (kf.m == 1) {
            mass = 2.0 * simpson01([&](double r) { return k.eta(r); }, 2000);
        } else {
            mass = 2.0 * kPi *
                   simpson01([&](double r) { return k.eta(r) * r; }, 2000);
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("second moment equals its closed form") {
    for (const auto& kf : kFacts) {
        const KernelModel k = KernelModel::make(kf.kind, kf.m);
        const double s = sigma_eta(k);
        CHECK(s > 0.0);
        CHECK(s == doctest::Approx(kf.sigma).epsilon(1e-10));
    }
}

TEST_CASE("Monte Carlo oracle confirms the quadrature moment within 3 sigma") {
    for (const auto& kf : kFacts) {
        const KernelModel k = KernelModel::make(kf.kind, kf.m);
        double se = 0.0;
        const double mc = sigma_eta_mc(k, 2000000, 77, &se);
        CHECK(se > 0.0);
        CHECK(std::fabs(mc - sigma_eta(k)) <= 3.0 * se);
    }
}

TEST_CASE("kind names round-trip and bad names are rejected") {
    for (const char* name : {"uniform", "triangular", "quadratic_taper"}) {
        CHECK(to_string(kernel_kind_from_string(name)) == name);
    }
    CHECK_THROWS_AS((void)kernel_kind_from_string("gaussian"),
                    std::invalid_argument);
}
