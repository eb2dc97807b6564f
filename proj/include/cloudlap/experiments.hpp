#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cloudlap/concentration.hpp"
#include "cloudlap/coupling.hpp"
#include "cloudlap/density.hpp"
#include "cloudlap/kernel.hpp"
#include "cloudlap/manifold.hpp"
#include "cloudlap/results.hpp"
#include "cloudlap/spectral.hpp"
#include "cloudlap/testfunctions.hpp"
#include "cloudlap/walks.hpp"

namespace cloudlap {

// Graph radius selection for n-sweeps: a fixed value, or the connectivity
// regime scaling c (log n / n)^{1/(m+4)}.
struct EpsRule {
    bool is_fixed = false;
    double c = 1.0;
    double value = 0.0;

    double eps_for(int n, int m) const;
    static EpsRule regime(double c);
    static EpsRule fixed_value(double v);
    // Accepts "regime:<c>", "fixed:<v>", or a bare number (fixed).
    static EpsRule parse(const std::string& text);
    std::string label() const;
};

// One (n, seed, cluster) record. Disconnected graphs produce a single row
// with cluster = -1 and NaN errors; rows whose cluster could not be aligned
// keep connected = true but NaN errors. NaN rows are excluded from medians
// and slope fits.
struct ConvergenceCell {
    int n = 0;
    double eps = 0.0;
    int seed = 0;
    int cluster = -1;
    double lambda_err = 0.0;
    double linf_err = 0.0;
    double lip_err = 0.0;
    bool connected = false;
};

struct ClusterSlopes {
    int cluster = 0;
    double analytic_value = 0.0;
    SlopeFit lambda;  // NaN slope when a median vanishes (exact clusters)
    SlopeFit linf;
    SlopeFit lip;
};

struct ConvergenceTable {
    std::vector<int> ns;
    std::vector<double> epses;  // one per n, from the rule
    int clusters = 0;
    int seeds = 0;
    std::vector<ConvergenceCell> cells;
    // Median over completed seeds, indexed [eps_index * clusters + cluster];
    // NaN when every seed failed.
    std::vector<double> lambda_median;
    std::vector<double> linf_median;
    std::vector<double> lip_median;
    std::vector<double> analytic_values;  // one per cluster
    std::vector<ClusterSlopes> slopes;    // log-log vs eps, bootstrap bands
    int failed = 0;                       // disconnected or unalignable cells
};

// For each (n, seed): sample, build the graph at rule(n), solve k pairs,
// cluster against the closed-form eigenvalues, align eigenspaces, and
// record per-cluster worst-member errors. Cell streams are independent
// (base_seed xor cell index).
ConvergenceTable eigen_convergence_experiment(
    const Manifold& M, const DensityModel& rho, const KernelModel& kernel,
    const std::vector<int>& ns, const EpsRule& rule, int k, int seeds,
    std::uint64_t base_seed = 0);

void write_convergence_csv(const ConvergenceTable& tab,
                           const std::string& path);
void write_convergence_json(const ConvergenceTable& tab,
                            const std::string& path);

// Scale-free regularity statistics of one computed eigenpair:
//   statistic1 = [f]_{eps,Xn} / (lambda + 1)^{m+1}
//   statistic2 = ||f||_inf / ((lambda + 1)^m ||f||_1)
struct RegularityRow {
    int index = 0;
    double lambda = 0.0;
    double statistic1 = 0.0;
    double statistic2 = 0.0;
};

// Rows for every computed pair with eigenvalue below lambda_max.
std::vector<RegularityRow> eigen_regularity_experiment(
    const EpsGraph& g, const SpectralResult& sp, double lambda_max);

struct RegularitySweepRow {
    int n = 0;
    double eps = 0.0;
    int seed = 0;
    RegularityRow row;
};

struct RegularitySweep {
    std::vector<int> ns;
    std::vector<double> epses;
    int seeds = 0;
    std::vector<RegularitySweepRow> rows;
    // Per-n per-seed max over rows, indexed [eps_index][seed]; NaN marks a
    // failed cell.
    std::vector<std::vector<double>> stat1_cells;
    std::vector<std::vector<double>> stat2_cells;
    SlopeFit stat1_slope;  // log-log vs n; flat spectra give slope near 0
    SlopeFit stat2_slope;
    int failed = 0;
};

RegularitySweep eigen_regularity_sweep(const Manifold& M,
                                       const DensityModel& rho,
                                       const KernelModel& kernel,
                                       const std::vector<int>& ns,
                                       const EpsRule& rule, int k,
                                       double lambda_max, int seeds,
                                       std::uint64_t base_seed = 0);

void write_regularity_csv(const RegularitySweep& sw, const std::string& path);
void write_regularity_json(const RegularitySweep& sw, const std::string& path);

// Second-order expansion residuals of both averaging operators, maximized
// over a coarse probe net, for every library test function. gap_ratio is
// |A f - Abar f| / (eps^2 sup |f|), which the averaging comparison keeps
// bounded.
struct ConsistencySweep {
    std::string manifold;
    std::string density;
    std::string kernel;
    std::vector<double> epses;
    std::vector<std::string> function_ids;
    // Indexed [fn * epses.size() + eps_index].
    std::vector<double> a_residual;
    std::vector<double> abar_residual;
    std::vector<double> gap_ratio;
    std::vector<double> a_slope;     // per function, log-log vs eps
    std::vector<double> abar_slope;
    double min_slope = 0.0;
    double max_gap_ratio = 0.0;
};

ConsistencySweep consistency_sweep(const Manifold& M, const DensityModel& rho,
                                   const KernelModel& kernel,
                                   const std::vector<double>& epses);

void write_consistency_csv(const ConsistencySweep& sw,
                           const std::string& path);
void write_consistency_json(const ConsistencySweep& sw,
                            const std::string& path);

// One-step Monte Carlo mean of f after a single walk step from cfg.x0,
// against the tangent-ball average quadrature. Passes within 4 standard
// errors.
struct GeneratorCheck {
    double mc_mean = 0.0;
    double standard_error = 0.0;
    double quadrature = 0.0;
    std::int64_t trials = 0;
    bool pass = false;
};

GeneratorCheck generator_check(const WalkConfig& cfg, const TestFunction& f,
                               std::int64_t trials);

// Mean stopping time across a shrinking-eps ladder at fixed (r, d0), with
// a log-log fit (bootstrap over trials). The mean-stopping-time bound
// scales like eps^{-2}, so the fitted slope sits near -2.
struct CouplingSlopeResult {
    std::vector<double> epses;
    std::vector<double> mean_taus;
    SlopeFit fit;
    std::vector<CouplingStatistics> stats;  // one per eps
};

CouplingSlopeResult coupling_tau_slope(const Manifold& M,
                                       const DensityModel& rho,
                                       const KernelModel& kernel,
                                       const Vec4& x0, double r, double d0,
                                       const std::vector<double>& epses,
                                       int trials,
                                       std::uint64_t base_seed = 0);

void write_coupling_slope_json(const CouplingSlopeResult& res,
                               const std::string& path);

// degree_uniformity across an n-ladder at fixed eps, with the sampling
// noise decay fitted vs n (bootstrap bands).
struct ConcentrationSweep {
    std::vector<int> ns;
    std::vector<ConcentrationReport> reports;
    SlopeFit fit;
};

ConcentrationSweep degree_uniformity_sweep(const Manifold& M,
                                           const DensityModel& rho,
                                           const KernelModel& kernel,
                                           const std::vector<int>& ns,
                                           double eps, int seeds,
                                           std::uint64_t base_seed = 0);

void write_concentration_sweep_csv(const ConcentrationSweep& sw,
                                   const std::string& path);
void write_concentration_sweep_json(const ConcentrationSweep& sw,
                                    const std::string& path);

} // namespace cloudlap
