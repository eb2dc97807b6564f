#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cloudlap/vec.hpp"
#include "cloudlap/walks.hpp"

namespace cloudlap {

enum class CouplingExit { coalesced, separated, exited_ball };

const char* to_string(CouplingExit e);

// One coupled trajectory pair, stopped at the first index where the chains
// are within 3 eps of each other, at least r apart, or the driver has left
// B(x0, r). Both chains freeze at the stopped state.
struct CouplingRun {
    std::vector<Vec4> x_path;
    std::vector<Vec4> y_path;
    int tau = 0;
    CouplingExit exit_reason = CouplingExit::coalesced;
    double d_final = 0.0;    // d_M(X_tau, Y_tau)
    double d_base = 0.0;     // d_M(X_tau, x0)
    bool truncated = false;  // stopped by max_steps instead of the predicate
};

// Runs the coupled pair on the shared draw stream Rng(cfg.seed, trial).
// Requires d_M(cfg.x0, y0) < r; a start inside 3 eps stops at tau = 0.
// max_steps <= 0 selects 50x the mean-stopping-time bound.
CouplingRun run_coupling(const WalkConfig& cfg, const Vec4& y0,
                         std::uint64_t trial, int max_steps = 0);

// One-sided 95% Monte Carlo test: pass when the estimate does not exceed
// the bound by more than 1.645 standard errors.
struct BoundCheck {
    std::string name;
    double estimate = 0.0;
    double standard_error = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct CouplingStatistics {
    int trials = 0;
    int truncated = 0;  // excluded from every estimate
    double d0 = 0.0;
    double mean_tau = 0.0;
    double mean_d_base_sq = 0.0;
    double p_separated = 0.0;  // P(d_final >= r)
    double p_exited = 0.0;     // P(d_base >= r)
    std::vector<BoundCheck> checks;
    bool all_pass = false;
    // Per-trial records, indexed by trial.
    std::vector<int> taus;
    std::vector<CouplingExit> exits;
    std::vector<double> d_finals;
    std::vector<double> d_bases;
    std::vector<std::uint8_t> truncated_flags;
};

// Estimates the four stopping-time bounds over independent trials: the
// mean of tau against 2 r d0 / (sigma eps^2), the separation and exit
// probabilities against (3/r) d0 and (3m/r) d0, and the paired mean of
// d_base^2 - (3/2) m sigma eps^2 tau against zero. Trials run on streams
// keyed by (cfg.seed, trial), so the record is independent of scheduling.
// Throws when d_M(x0, y0) is outside (3 eps, r), trials < 2, or fewer than
// half the trials complete within max_steps.
CouplingStatistics coupling_statistics(const WalkConfig& cfg, const Vec4& y0,
                                       int trials, int max_steps = 0);

// Per-trial rows: trial, tau, exit_reason, d_final.
void write_coupling_csv(const CouplingStatistics& st, const std::string& path);
// Configuration echo plus the four bound checks.
void write_coupling_json(const WalkConfig& cfg, const Vec4& y0,
                         const CouplingStatistics& st,
                         const std::string& path);

} // namespace cloudlap
