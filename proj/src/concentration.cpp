#include "cloudlap/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cloudlap/cloud.hpp"
#include "cloudlap/nonlocal.hpp"
#include "cloudlap/quadrature.hpp"
#include "cloudlap/results.hpp"
#include "cloudlap/threads.hpp"

namespace cloudlap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_common(const Manifold& M, const DensityModel& rho, int n,
                     double eps, int seeds) {
    if (rho.M != &M) {
        throw std::invalid_argument("density is bound to another manifold");
    }
    if (n < 1) throw std::invalid_argument("need at least 1 point");
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (seeds < 1) throw std::invalid_argument("need at least 1 seed");
}

void finalize(ConcentrationReport& rep) {
    rep.median = median(rep.per_seed);
    rep.max = *std::max_element(rep.per_seed.begin(), rep.per_seed.end());
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

} // namespace

ConcentrationReport degree_uniformity(const Manifold& M,
                                      const DensityModel& rho,
                                      const KernelModel& kernel, int n,
                                      double eps, int seeds,
                                      std::uint64_t base_seed) {
    validate_common(M, rho, n, eps, seeds);
    const int m = M.intrinsic_dim();
    if (kernel.m != m) {
        throw std::invalid_argument(
            "kernel dimension does not match the manifold");
    }
    const double regime =
        0.5 * std::pow(std::log(static_cast<double>(n)) / n,
                       1.0 / (m + 4.0));
    if (eps < regime) {
        throw std::invalid_argument(
            "eps is below the connectivity regime (log n / n)^{1/(m+4)} / 2");
    }

    const std::vector<Vec4> net = M.covering_net(eps * eps);
    std::vector<double> cont(net.size());
    parallel_for_blocks(net.size(), 8, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            cont[k] = continuum_degree(rho, kernel, eps, net[k]);
        }
    });

    ConcentrationReport rep;
    rep.statistic = "degree_uniformity";
    rep.per_seed.resize(seeds);
    rep.rate_reference = eps * eps;
    parallel_for_blocks(seeds, 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            const Cloud cloud = sample_cloud(M, rho, n, base_seed + s);
            const EpsGraph g = build_eps_graph(cloud, eps, kernel, false);
            double sup = 0.0;
            for (const Vec4& x : net) {
                sup = std::max(sup,
                               std::fabs(discrete_degree(g, x) -
                                         cont[&x - net.data()]));
            }
            rep.per_seed[s] = sup;
        }
    });
    finalize(rep);
    rep.pass = all_finite(rep.per_seed);
    return rep;
}

ConcentrationReport ball_count_check(const Manifold& M,
                                     const DensityModel& rho, int n,
                                     double eps, int seeds,
                                     std::uint64_t base_seed) {
    validate_common(M, rho, n, eps, seeds);
    const int m = M.intrinsic_dim();
    const KernelModel kernel = KernelModel::make(KernelKind::uniform, m);
    const std::vector<Vec4> net = M.covering_net(eps * eps);

    // Reference mass of one ball; past the injectivity radius the count can
    // only saturate at n, which the whole-volume mass covers.
    const double mass = eps < M.injectivity_radius() ? M.ball_volume(eps)
                                                     : M.volume();
    double rho_min = rho.rho(net[0]);
    double rho_max = rho_min;
    for (const Vec4& x : net) {
        rho_min = std::min(rho_min, rho.rho(x));
        rho_max = std::max(rho_max, rho.rho(x));
    }
    const double scale = mass / std::pow(eps, m);

    ConcentrationReport rep;
    rep.statistic = "ball_count";
    rep.per_seed.resize(seeds);
    rep.per_seed_aux.resize(seeds);
    rep.rate_reference = scale;
    parallel_for_blocks(seeds, 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            const Cloud cloud = sample_cloud(M, rho, n, base_seed + s);
            const EpsGraph g = build_eps_graph(cloud, eps, kernel, false);
            const double norm = static_cast<double>(n) * std::pow(eps, m);
            double rmin = std::numeric_limits<double>::infinity();
            double rmax = 0.0;
            for (const Vec4& x : net) {
                const double ratio = ball_count(g, x, eps) / norm;
                rmin = std::min(rmin, ratio);
                rmax = std::max(rmax, ratio);
            }
            rep.per_seed[s] = rmax;
            rep.per_seed_aux[s] = rmin;
        }
    });
    finalize(rep);
    bool ok = all_finite(rep.per_seed) && all_finite(rep.per_seed_aux);
    for (int s = 0; s < seeds && ok; ++s) {
        ok = rep.per_seed_aux[s] >= 0.2 * scale * rho_min &&
             rep.per_seed[s] <= 5.0 * scale * rho_max;
    }
    rep.pass = ok;
    return rep;
}

ConcentrationReport annulus_count_check(const Manifold& M,
                                        const DensityModel& rho, int n,
                                        double eps, double t, int seeds,
                                        std::uint64_t base_seed) {
    validate_common(M, rho, n, eps, seeds);
    if (!(t >= eps * eps && t <= 1.0)) {
        throw std::invalid_argument("annulus width t must be in [eps^2, 1]");
    }
    const int m = M.intrinsic_dim();
    const KernelModel kernel = KernelModel::make(KernelKind::uniform, m);
    const std::vector<Vec4> net = M.covering_net(eps * eps);

    const double iota = M.injectivity_radius();
    const double outer = (1.0 + t) * eps < iota
                             ? M.ball_volume((1.0 + t) * eps)
                             : M.volume();
    const double inner = (1.0 - t) * eps < iota
                             ? M.ball_volume((1.0 - t) * eps)
                             : M.volume();
    const double scale = (outer - inner) / (std::pow(eps, m) * t);
    double rho_max = rho.rho(net[0]);
    for (const Vec4& x : net) rho_max = std::max(rho_max, rho.rho(x));

    ConcentrationReport rep;
    rep.statistic = "annulus_count";
    rep.per_seed.resize(seeds);
    rep.per_seed_aux.resize(seeds);
    rep.rate_reference = scale;
    parallel_for_blocks(seeds, 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            const Cloud cloud = sample_cloud(M, rho, n, base_seed + s);
            const EpsGraph g = build_eps_graph(cloud, eps, kernel, false);
            const double norm = static_cast<double>(n) * std::pow(eps, m) * t;
            double rmin = std::numeric_limits<double>::infinity();
            double rmax = 0.0;
            for (const Vec4& x : net) {
                const double ratio = annulus_count(g, x, eps, t) / norm;
                rmin = std::min(rmin, ratio);
                rmax = std::max(rmax, ratio);
            }
            rep.per_seed[s] = rmax;
            rep.per_seed_aux[s] = rmin;
        }
    });
    finalize(rep);
    bool ok = all_finite(rep.per_seed);
    for (int s = 0; s < seeds && ok; ++s) {
        ok = rep.per_seed[s] <= 5.0 * scale * rho_max;
    }
    rep.pass = ok;
    return rep;
}

double double_convolution_discrete(const EpsGraph& g, const DensityModel& rho,
                                   const Vec4& x, const Vec4& y) {
    const double eps = g.eps;
    const double eps2 = eps * eps;
    double s = 0.0;
    for_candidates(g.grid, g.cloud, x, 1, [&](std::int32_t j) {
        const Vec4 p = g.cloud.point(j);
        const double dx2 = norm2(p - x);
        if (dx2 > eps2) return;
        const double dy2 = norm2(p - y);
        if (dy2 > eps2) return;
        const double w = g.kernel.eta(std::sqrt(dx2) / eps) *
                         g.kernel.eta(std::sqrt(dy2) / eps);
        if (w != 0.0) s += w / rho.rho(p);
    });
    return s / (static_cast<double>(g.cloud.n) * std::pow(eps, g.m));
}

double double_convolution_continuum(const Manifold& M,
                                    const KernelModel& kernel, double eps,
                                    const Vec4& x, const Vec4& y) {
    // Ambient distance never exceeds geodesic distance, so the Euclidean
    // support ball of radius eps sits inside the geodesic ball of radius
    // kappa * eps with kappa the arc-to-chord ratio at the clamped radius.
    const double half = 0.5 * std::min(eps, 2.0);
    const double kappa = half < 1e-8 ? 1.0 : std::asin(half) / half;
    const double r = std::min(kappa * eps, 0.99 * M.injectivity_radius());
    const double integral = ball_integral(
        M, x, r,
        [&](const Vec4& z, double) {
            const double dx = norm(z - x);
            if (dx > eps) return 0.0;
            const double dy = norm(z - y);
            if (dy > eps) return 0.0;
            return kernel.eta(dx / eps) * kernel.eta(dy / eps);
        },
        32, 64);
    return integral / std::pow(eps, kernel.m);
}

ConcentrationReport double_convolution_check(const Manifold& M,
                                             const DensityModel& rho,
                                             const KernelModel& kernel, int n,
                                             double eps, int seeds,
                                             std::uint64_t base_seed) {
    validate_common(M, rho, n, eps, seeds);
    const int m = M.intrinsic_dim();
    if (kernel.m != m) {
        throw std::invalid_argument(
            "kernel dimension does not match the manifold");
    }
    if (2.0 * eps >= M.injectivity_radius()) {
        throw std::invalid_argument(
            "pair radius 2 eps must stay below the injectivity radius");
    }

    // Pair net: coarse base points, 8 tangent directions, 4 radii up to the
    // support diameter 2 eps.
    const std::vector<Vec4> base = M.covering_net(M.diameter() / 16.0);
    const double radii[4] = {0.5 * eps, eps, 1.5 * eps, 2.0 * eps};
    std::vector<Vec4> xs;
    std::vector<Vec4> ys;
    for (const Vec4& x : base) {
        const auto frame = M.tangent_frame(x);
        for (int k = 0; k < 8; ++k) {
            Vec4 dir;
            if (m == 1) {
                dir = (k % 2 == 0 ? 1.0 : -1.0) * frame[0].comp;
            } else {
                const double a = 2.0 * kPi * k / 8.0;
                dir = std::cos(a) * frame[0].comp +
                      std::sin(a) * frame[1].comp;
            }
            for (double rad : radii) {
                xs.push_back(x);
                ys.push_back(M.exp_map(x, rad * dir));
            }
        }
    }

    std::vector<double> cont(xs.size());
    parallel_for_blocks(xs.size(), 4, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            cont[p] = double_convolution_continuum(M, kernel, eps, xs[p],
                                                   ys[p]);
        }
    });

    ConcentrationReport rep;
    rep.statistic = "double_convolution";
    rep.per_seed.resize(seeds);
    rep.rate_reference = eps * eps;
    parallel_for_blocks(seeds, 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            const Cloud cloud = sample_cloud(M, rho, n, base_seed + s);
            const EpsGraph g = build_eps_graph(cloud, eps, kernel, false);
            double sup = 0.0;
            for (std::size_t p = 0; p < xs.size(); ++p) {
                const double d =
                    double_convolution_discrete(g, rho, xs[p], ys[p]);
                sup = std::max(sup, std::fabs(d - cont[p]));
            }
            rep.per_seed[s] = sup;
        }
    });
    finalize(rep);
    rep.pass = all_finite(rep.per_seed);
    return rep;
}

void write_concentration_csv(const ConcentrationReport& rep,
                             const std::string& path) {
    const bool aux = !rep.per_seed_aux.empty();
    std::string out = aux ? "seed,value,aux\n" : "seed,value\n";
    char line[96];
    for (std::size_t s = 0; s < rep.per_seed.size(); ++s) {
        if (aux) {
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", s,
                          rep.per_seed[s], rep.per_seed_aux[s]);
        } else {
            std::snprintf(line, sizeof line, "%zu,%.17g\n", s,
                          rep.per_seed[s]);
        }
        out += line;
    }
    write_text_file(path, out);
}

void write_concentration_json(const ConcentrationReport& rep,
                              const std::string& path) {
    JsonBuilder j;
    j.begin_object().field("statistic", rep.statistic);
    j.key("per_seed").begin_array();
    for (double v : rep.per_seed) j.value(v);
    j.end_array();
    if (!rep.per_seed_aux.empty()) {
        j.key("per_seed_aux").begin_array();
        for (double v : rep.per_seed_aux) j.value(v);
        j.end_array();
    }
    j.field("median", rep.median)
        .field("max", rep.max)
        .field("rate_reference", rep.rate_reference)
        .field("pass", rep.pass)
        .end_object();
    write_text_file(path, j.str() + "\n");
}

} // namespace cloudlap
