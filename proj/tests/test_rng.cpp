#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cloudlap/rng.hpp"

using namespace cloudlap;

TEST_CASE("identical keys replay identical sequences") {
    Rng a(123, 7);
    Rng b(123, 7);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("distinct streams of one seed diverge immediately") {
    Rng a(123, 0);
    Rng b(123, 1);
    int equal = 0;
    for (int i = 0; i < 64; ++i) {
        if (a.next_u64() == b.next_u64()) ++equal;
    }
    CHECK(equal == 0);
}

TEST_CASE("uniform draws stay inside their ranges") {
    Rng rng(5);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 100000; ++i) {
        const double s = rng.sym();
        CHECK(s > -1.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("u01 first moments match the uniform law") {
    Rng rng(9);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.u01();
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    // SE of the mean is 1/sqrt(12 n).
    CHECK(std::fabs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
    CHECK(std::fabs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("below produces every residue and respects the bound") {
    Rng rng(11);
    CHECK(rng.below(1) == 0);
    std::vector<int> hits(13, 0);
    for (int i = 0; i < 13000; ++i) {
        const std::uint64_t v = rng.below(13);
        CHECK(v < 13);
        ++hits[static_cast<std::size_t>(v)];
    }
    for (int h : hits) {
        // Expected 1000 per cell; 5 sigma of a binomial(13000, 1/13).
        CHECK(h > 1000 - 5 * 31);
        CHECK(h < 1000 + 5 * 31);
    }
}

TEST_CASE("normal deviates match the first two moments") {
    Rng rng(13);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    // Var of z^2 is 2, so SE of the variance estimate is sqrt(2/n).
    CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
