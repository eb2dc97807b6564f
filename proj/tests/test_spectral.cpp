#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cloudlap/cloud.hpp"
#include "cloudlap/density.hpp"
#include "cloudlap/discrete_ops.hpp"
#include "cloudlap/graph.hpp"
#include "cloudlap/kernel.hpp"
#include "cloudlap/manifold.hpp"
#include "cloudlap/quadrature.hpp"
#include "cloudlap/rng.hpp"
#include "cloudlap/spectral.hpp"

using namespace cloudlap;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dense symmetric residual |A v - theta v|_inf for row-major a.
double pair_residual(const std::vector<double>& a, int n,
                     const std::vector<double>& v, int row, double theta) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a[i * n + j] * v[row * n + j];
        worst = std::max(worst, std::fabs(s - theta * v[row * n + i]));
    }
    return worst;
}

std::vector<double> random_sym(int n, Rng& rng) {
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = rng.sym();
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    return a;
}

} // namespace

TEST_CASE("two-by-two exchange matrix has the closed-form pair") {
    const double c = 0.7;
    const std::vector<double> a = {c, -c, -c, c};
    const EighResult r = dense_eigh(a, 2);
    CHECK(r.values[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.values[1] == doctest::Approx(2.0 * c).epsilon(1e-14));
    // Eigenvectors are (1,1)/sqrt(2) and (1,-1)/sqrt(2) up to sign.
    CHECK(std::fabs(r.vectors[0] - r.vectors[1]) < 1e-12);
    CHECK(std::fabs(r.vectors[2] + r.vectors[3]) < 1e-12);
    const double norm0 = std::hypot(r.vectors[0], r.vectors[1]);
    CHECK(norm0 == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("diagonal input returns its entries sorted") {
    const std::vector<double> a = {3.0, 0.0, 0.0, 0.0, -1.0, 0.0,
                                   0.0, 0.0, 2.0};
    const EighResult r = dense_eigh(a, 3);
    CHECK(r.values == std::vector<double>{-1.0, 2.0, 3.0});
}

TEST_CASE("dense solver reconstructs random symmetric matrices") {
    Rng rng(211);
    for (int n : {5, 24, 60}) {
        const std::vector<double> a = random_sym(n, rng);
        const EighResult r = dense_eigh(a, n);
        REQUIRE(r.n == n);
        CHECK(std::is_sorted(r.values.begin(), r.values.end()));
        double scale = 0.0;
        for (double v : a) scale = std::max(scale, std::fabs(v));
        for (int k = 0; k < n; ++k) {
            CHECK(pair_residual(a, n, r.vectors, k, r.values[k]) <=
                  1e-10 * n * std::max(1.0, scale));
        }
        // Orthonormal rows.
        for (int p = 0; p < n; p += std::max(1, n / 6)) {
            for (int q = 0; q <= p; q += std::max(1, n / 6)) {
                double d = 0.0;
                for (int i = 0; i < n; ++i) {
                    d += r.vectors[p * n + i] * r.vectors[q * n + i];
                }
                CHECK(std::fabs(d - (p == q ? 1.0 : 0.0)) < 1e-11);
            }
        }
        // Trace is preserved.
        double tr = 0.0, sum = 0.0;
        for (int i = 0; i < n; ++i) {
            tr += a[i * n + i];
            sum += r.values[i];
        }
        CHECK(sum == doctest::Approx(tr).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)dense_eigh(std::vector<double>(1200 * 1200, 0.0), 1200),
                    std::invalid_argument);
}

TEST_CASE("dense solver is bit-stable across repeat calls") {
    Rng rng(212);
    const std::vector<double> a = random_sym(40, rng);
    const EighResult r1 = dense_eigh(a, 40);
    const EighResult r2 = dense_eigh(a, 40);
    CHECK(r1.values == r2.values);
    CHECK(r1.vectors == r2.vectors);
}

TEST_CASE("iterative pairs match the dense oracle on a real graph") {
    const Manifold& C = Manifold::circle();
    const Cloud cloud = sample_cloud(C, DensityModel::uniform(C), 500, 213);
    const KernelModel kern = KernelModel::make(KernelKind::uniform, 1);
    const EpsGraph g = build_eps_graph(cloud, 0.35, kern);
    REQUIRE(g.connected);

    const int k = 10;
    const SpectralResult dense = smallest_eigenpairs_dense(g, k);
    const SpectralResult fast = smallest_eigenpairs_lanczos(g, k, 214);
    CHECK(dense.solver == "dense");
    CHECK(fast.solver == "lanczos");
    for (int i = 0; i < k; ++i) {
        CHECK(fast.eigenvalues[i] ==
              doctest::Approx(dense.eigenvalues[i]).epsilon(1e-8));
        CHECK(fast.residuals[i] <= 1e-8 * (1.0 + std::fabs(fast.eigenvalues[i])));
        // Subspace agreement: simple eigenvalues up to sign, so compare
        // |<u, v>| under the empirical product when the local gap is clear.
        const bool gap_below =
            i == 0 || dense.eigenvalues[i] - dense.eigenvalues[i - 1] > 1e-4;
        const bool gap_above = i + 1 >= k || dense.eigenvalues[i + 1] -
                                                 dense.eigenvalues[i] > 1e-4;
        if (gap_below && gap_above) {
            double ip = 0.0;
            for (int j = 0; j < cloud.n; ++j) {
                ip += dense.eigenvectors[i][j] * fast.eigenvectors[i][j];
            }
            ip /= cloud.n;
            CHECK(std::fabs(std::fabs(ip) - 1.0) < 1e-6);
        }
    }

    // First pair: zero eigenvalue with the constant eigenvector.
    CHECK(dense.eigenvalues[0] >= -1e-10);
    CHECK(std::fabs(dense.eigenvalues[0]) < 1e-10);
    for (double v : dense.eigenvectors[0]) {
        CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }

    // Empirical normalization: mean square of every eigenvector is 1.
    for (int i = 0; i < k; ++i) {
        double ms = 0.0;
        for (double v : fast.eigenvectors[i]) ms += v * v;
        ms /= cloud.n;
        CHECK(ms == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("iterative solver replays bit-identically under one seed") {
    const Manifold& S = Manifold::sphere2();
    const Cloud cloud = sample_cloud(S, DensityModel::uniform(S), 400, 215);
    const KernelModel kern = KernelModel::make(KernelKind::triangular, 2);
    const EpsGraph g = build_eps_graph(cloud, 0.45, kern);
    const SpectralResult a = smallest_eigenpairs_lanczos(g, 6, 99);
    const SpectralResult b = smallest_eigenpairs_lanczos(g, 6, 99);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
    CHECK(a.residuals == b.residuals);
}

TEST_CASE("size dispatch picks the dense oracle only for small graphs") {
    const Manifold& C = Manifold::circle();
    const KernelModel kern = KernelModel::make(KernelKind::uniform, 1);
    const Cloud small = sample_cloud(C, DensityModel::uniform(C), 200, 216);
    const EpsGraph gs = build_eps_graph(small, 0.5, kern);
    CHECK(smallest_eigenpairs(gs, 4, 1).solver == "dense");
    const Cloud big = sample_cloud(C, DensityModel::uniform(C), 300, 216);
    const EpsGraph gb = build_eps_graph(big, 0.5, kern);
    CHECK(smallest_eigenpairs(gb, 4, 1).solver == "lanczos");
}

TEST_CASE("catalog entries are genuine eigenpairs of the limit operator") {
    // Spot-check by finite differences: for each catalog function ftilde,
    // (sigma rho / 2)^-1 ... the weighted operator at uniform rho reduces to
    // (sigma/(2 rho_const)) lb ftilde = eigenvalue * ftilde with lb taken by
    // geodesic second differences along a frame.
    Rng rng(217);
    for (const Manifold* M :
         {&Manifold::circle(), &Manifold::sphere2(), &Manifold::flat_torus2()}) {
        const DensityModel u = DensityModel::uniform(*M);
        const KernelModel kern =
            KernelModel::make(KernelKind::triangular, M->intrinsic_dim());
        const double sigma = sigma_eta(kern);
        const double rho0 = u.rho(M->random_point(rng));
        const int cap = M->kind() == ManifoldKind::circle ? 9 : 9;
        const auto catalog = analytic_eigenpairs(*M, u, kern, cap);
        REQUIRE(!catalog.empty());

        CHECK(catalog[0].eigenvalue == 0.0);
        CHECK(catalog[0].multiplicity == 1);
        // Constant leading eigenfunction.
        const Vec4 p0 = M->random_point(rng);
        const Vec4 p1 = M->random_point(rng);
        CHECK(catalog[0].eigenspace[0](p0) ==
              doctest::Approx(catalog[0].eigenspace[0](p1)).epsilon(1e-12));

        int counted = 0;
        double prev = -1.0;
        for (const AnalyticEigenpair& pair : catalog) {
            CHECK(pair.eigenvalue > prev);
            prev = pair.eigenvalue;
            counted += pair.multiplicity;
            CHECK(static_cast<int>(pair.eigenspace.size()) ==
                  pair.multiplicity);

            const double h = 1e-4;
            for (const ScalarField& ft : pair.eigenspace) {
                for (int rep = 0; rep < 20; ++rep) {
                    const Vec4 x = M->random_point(rng);
                    double lb = 0.0;
                    const auto frame = M->tangent_frame(x);
                    for (int a = 0; a < M->intrinsic_dim(); ++a) {
                        const Vec4 e = frame[a].comp;
                        const double fp = ft(M->exp_map(x, h * e));
                        const double fm = ft(M->exp_map(x, -h * e));
                        lb += (fp + fm - 2.0 * ft(x)) / (h * h);
                    }
                    const double want = -pair.eigenvalue * ft(x);
                    const double got = (sigma * rho0 / 2.0) * lb;
                    CHECK(std::fabs(got - want) <=
                          1e-4 * (1.0 + std::fabs(want)));
                }
            }
        }
        CHECK(counted >= cap);
    }
}

TEST_CASE("circle catalog values follow the quadratic ladder") {
    const Manifold& C = Manifold::circle();
    const DensityModel u = DensityModel::uniform(C);
    const KernelModel kern = KernelModel::make(KernelKind::uniform, 1);
    const auto catalog = analytic_eigenpairs(C, u, kern, 9);
    const double sigma = sigma_eta(kern); // 1/3
    REQUIRE(catalog.size() >= 5);
    CHECK(catalog[1].eigenvalue ==
          doctest::Approx(sigma / (4.0 * kPi)).epsilon(1e-12));
    CHECK(catalog[1].eigenvalue ==
          doctest::Approx(1.0 / (12.0 * kPi)).epsilon(1e-12));
    for (std::size_t j = 1; j < catalog.size(); ++j) {
        CHECK(catalog[j].multiplicity == 2);
        CHECK(catalog[j].eigenvalue ==
              doctest::Approx(sigma * static_cast<double>(j * j) /
                              (4.0 * kPi))
                  .epsilon(1e-12));
    }
}

TEST_CASE("sphere and torus catalogs carry the textbook multiplicities") {
    const Manifold& S = Manifold::sphere2();
    const DensityModel us = DensityModel::uniform(S);
    const KernelModel k2 = KernelModel::make(KernelKind::triangular, 2);
    const auto sphere_cat = analytic_eigenpairs(S, us, k2, 9);
    const double sig = sigma_eta(k2);
    std::vector<int> mults;
    for (const auto& p : sphere_cat) mults.push_back(p.multiplicity);
    CHECK(mults == std::vector<int>{1, 3, 5});
    CHECK(sphere_cat[1].eigenvalue ==
          doctest::Approx(sig * 2.0 / (8.0 * kPi)).epsilon(1e-12));
    CHECK(sphere_cat[2].eigenvalue ==
          doctest::Approx(sig * 6.0 / (8.0 * kPi)).epsilon(1e-12));
    CHECK_THROWS_AS((void)analytic_eigenpairs(S, us, k2, 10),
                    std::invalid_argument);

    const Manifold& T = Manifold::flat_torus2();
    const DensityModel ut = DensityModel::uniform(T);
    const auto torus_cat = analytic_eigenpairs(T, ut, k2, 21);
    // Lattice norms 0,1,2,4,5 with counts 1,4,4,4,8.
    std::vector<int> tm;
    std::vector<double> tv;
    for (const auto& p : torus_cat) {
        tm.push_back(p.multiplicity);
        tv.push_back(p.eigenvalue);
    }
    CHECK(tm == std::vector<int>{1, 4, 4, 4, 8});
    const double unit = sig / (8.0 * kPi * kPi);
    CHECK(tv[1] == doctest::Approx(1.0 * unit).epsilon(1e-12));
    CHECK(tv[2] == doctest::Approx(2.0 * unit).epsilon(1e-12));
    CHECK(tv[3] == doctest::Approx(4.0 * unit).epsilon(1e-12));
    CHECK(tv[4] == doctest::Approx(5.0 * unit).epsilon(1e-12));
    CHECK_THROWS_AS((void)analytic_eigenpairs(T, ut, k2, 22),
                    std::invalid_argument);

    const DensityModel tilted = DensityModel::tilted(S, 0.5);
    CHECK_THROWS_AS((void)analytic_eigenpairs(S, tilted, k2, 4),
                    std::invalid_argument);
}

TEST_CASE("catalog eigenspaces are orthonormal in the sampling measure") {
    // Gram matrix against rho dVol via quadrature must be the identity.
    for (const Manifold* M : {&Manifold::sphere2(), &Manifold::flat_torus2()}) {
        const DensityModel u = DensityModel::uniform(*M);
        const KernelModel kern = KernelModel::make(KernelKind::uniform, 2);
        const auto catalog = analytic_eigenpairs(*M, u, kern, 9);
        std::vector<const ScalarField*> fns;
        for (const auto& p : catalog) {
            for (const auto& f : p.eigenspace) fns.push_back(&f);
        }
        for (std::size_t a = 0; a < fns.size(); ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                const double g = integrate_auto(
                    *M, [&](const Vec4& x) {
                        return (*fns[a])(x) * (*fns[b])(x) * u.rho(x);
                    });
                CHECK(std::fabs(g - (a == b ? 1.0 : 0.0)) < 1e-8);
            }
        }
    }
}

TEST_CASE("clustering assigns values by the quarter-gap rule") {
    const Manifold& C = Manifold::circle();
    const DensityModel u = DensityModel::uniform(C);
    const KernelModel kern = KernelModel::make(KernelKind::uniform, 1);
    const auto catalog = analytic_eigenpairs(C, u, kern, 5);
    // Analytic values: 0, s/(4pi), 4s/(4pi) with s = 1/3.
    const double l1 = catalog[1].eigenvalue;
    const double l2 = catalog[2].eigenvalue;
    // Nearest distinct neighbor of l1 is 0, so its capture radius is l1/4;
    // for l2 the neighbor is l1 and the radius (l2 - l1)/4.
    std::vector<double> computed = {
        0.0,
        l1 - 0.20 * l1,              // joins the first nonzero cluster
        l1 + 0.24 * l1,              // still inside the quarter-gap window
        l1 + 0.60 * l1,              // stranded between clusters
        l2 + 0.10 * (l2 - l1),       // joins the second cluster
    };
    const auto clusters = cluster_eigenvalues(computed, catalog);
    REQUIRE(clusters.size() == catalog.size());
    CHECK(clusters[0].members == std::vector<int>{0});
    CHECK(clusters[1].members == std::vector<int>{1, 2});
    CHECK(clusters[2].members == std::vector<int>{4});
    CHECK(clusters[1].analytic_value == doctest::Approx(l1));
}

TEST_CASE("alignment against the catalog is tight for a fine circle graph") {
    const Manifold& C = Manifold::circle();
    const DensityModel u = DensityModel::uniform(C);
    const Cloud cloud = sample_cloud(C, u, 2500, 218);
    const KernelModel kern = KernelModel::make(KernelKind::uniform, 1);
    const double eps = 0.20;
    const EpsGraph g = build_eps_graph(cloud, eps, kern);
    REQUIRE(g.connected);

    const SpectralResult sp = smallest_eigenpairs(g, 5, 7);
    const auto catalog = analytic_eigenpairs(C, u, kern, 5);
    const auto clusters = cluster_eigenvalues(sp.eigenvalues, catalog);

    // Zero mode aligns to the constant with negligible error.
    REQUIRE(clusters[0].members.size() == 1);
    const AlignReport zero =
        eigenspace_align(g, sp, clusters[0], catalog[0]);
    CHECK(zero.max_value_error < 1e-10);
    CHECK(zero.max_linf_error < 1e-8);

    // First nonzero pair lands close to sigma/(4 pi) with small sup gaps.
    REQUIRE(clusters[1].members.size() == 2);
    const AlignReport first =
        eigenspace_align(g, sp, clusters[1], catalog[1]);
    CHECK(first.max_value_error < 0.15 * catalog[1].eigenvalue);
    CHECK(first.max_linf_error < 0.3);
    CHECK(first.max_lip_error < 2.0);
    // Raw values repeat the spectrum.
    for (std::size_t i = 0; i < clusters[1].members.size(); ++i) {
        CHECK(first.computed_values[i] ==
              sp.eigenvalues[clusters[1].members[i]]);
    }

    // A deliberately wrong multiplicity is refused.
    EigenCluster broken = clusters[1];
    broken.members.pop_back();
    CHECK_THROWS_AS((void)eigenspace_align(g, sp, broken, catalog[1]),
                    std::runtime_error);
}

TEST_CASE("alignment rejects vectors foreign to the eigenspace") {
    const Manifold& C = Manifold::circle();
    const DensityModel u = DensityModel::uniform(C);
    const Cloud cloud = sample_cloud(C, u, 600, 219);
    const KernelModel kern = KernelModel::make(KernelKind::uniform, 1);
    const EpsGraph g = build_eps_graph(cloud, 0.3, kern);
    const SpectralResult sp = smallest_eigenpairs(g, 5, 7);
    const auto catalog = analytic_eigenpairs(C, u, kern, 5);
    const auto clusters = cluster_eigenvalues(sp.eigenvalues, catalog);

    // Pair the zero-mode cluster with the first nonzero catalog entry: the
    // constant vector has no mass there, and the sizes disagree anyway; a
    // size-matched foreign cluster must also be refused for lack of mass.
    REQUIRE(clusters[0].members.size() == 1);
    EigenCluster fake;
    fake.analytic_index = 1;
    fake.analytic_value = catalog[1].eigenvalue;
    fake.members = clusters[0].members;
    SpectralResult padded = sp;
    // Duplicate the constant so the size matches multiplicity 2.
    padded.eigenvalues.push_back(padded.eigenvalues[0]);
    padded.eigenvectors.push_back(padded.eigenvectors[0]);
    padded.residuals.push_back(padded.residuals[0]);
    fake.members.push_back(static_cast<int>(padded.eigenvalues.size()) - 1);
    CHECK_THROWS_AS((void)eigenspace_align(g, padded, fake, catalog[1]),
                    std::runtime_error);
}
