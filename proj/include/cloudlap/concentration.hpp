#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cloudlap/density.hpp"
#include "cloudlap/graph.hpp"
#include "cloudlap/kernel.hpp"
#include "cloudlap/manifold.hpp"

namespace cloudlap {

// One Monte-Carlo sup statistic evaluated over independent clouds. The
// per-seed vectors always hold one entry per requested seed.
struct ConcentrationReport {
    std::string statistic;
    std::vector<double> per_seed;      // primary value (sup / max ratio)
    std::vector<double> per_seed_aux;  // secondary value; empty when unused
    double median = 0.0;               // median of per_seed
    double max = 0.0;                  // max of per_seed
    double rate_reference = 0.0;       // scale the statistic is compared to
    bool pass = false;
};

// Sup over covering_net(eps^2) of |scaled sample degree - continuum degree|,
// one cloud per seed (streams base_seed + s). Requires the graph regime
// eps >= (log n / n)^{1/(m+4)} / 2. The statistic isolates sampling noise,
// so at fixed eps its median decays like n^{-1/2}.
ConcentrationReport degree_uniformity(const Manifold& M,
                                      const DensityModel& rho,
                                      const KernelModel& kernel, int n,
                                      double eps, int seeds,
                                      std::uint64_t base_seed = 0);

// Min (aux) and max (primary) over the same net of
// #{i : |x_i - x| <= eps} / (n eps^m). Passes when across all seeds the
// ratios stay within [0.2, 5] times the flat reference ball mass times the
// density extremes over the net.
ConcentrationReport ball_count_check(const Manifold& M,
                                     const DensityModel& rho, int n,
                                     double eps, int seeds,
                                     std::uint64_t base_seed = 0);

// Min (aux) and max (primary) over the net of
// #{i : (1-t) eps <= |x_i - x| <= (1+t) eps} / (n eps^m t). Passes when the
// max stays within 5 times the flat annulus reference mass; no lower bound
// (thin annuli may be empty).
ConcentrationReport annulus_count_check(const Manifold& M,
                                        const DensityModel& rho, int n,
                                        double eps, double t, int seeds,
                                        std::uint64_t base_seed = 0);

// eps^m (1/n) sum_i eta_eps(|x_i - x|) eta_eps(|x_i - y|) / rho(x_i) with
// eta_eps(t) = eps^{-m} eta(t / eps); the grid must have been built at eps.
double double_convolution_discrete(const EpsGraph& g, const DensityModel& rho,
                                   const Vec4& x, const Vec4& y);

// eps^m integral of eta_eps(|z - x|) eta_eps(|z - y|) dVol(z). The kernel
// arguments are ambient distances, so the domain is the geodesic ball at x
// whose radius inflates eps by the chord-to-arc factor.
double double_convolution_continuum(const Manifold& M,
                                    const KernelModel& kernel, double eps,
                                    const Vec4& x, const Vec4& y);

// Sup of |discrete - continuum| over a structured net of pairs: coarse net
// points crossed with 8 tangent directions and geodesic radii
// {0.5, 1, 1.5, 2} eps, one cloud per seed.
ConcentrationReport double_convolution_check(const Manifold& M,
                                             const DensityModel& rho,
                                             const KernelModel& kernel, int n,
                                             double eps, int seeds,
                                             std::uint64_t base_seed = 0);

// Rows: seed, value and, when present, the auxiliary value.
void write_concentration_csv(const ConcentrationReport& rep,
                             const std::string& path);
// Full report including the pass flag and rate reference.
void write_concentration_json(const ConcentrationReport& rep,
                              const std::string& path);

} // namespace cloudlap
