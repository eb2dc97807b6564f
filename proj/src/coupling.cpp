#include "cloudlap/coupling.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cloudlap/kernel.hpp"
#include "cloudlap/results.hpp"
#include "cloudlap/threads.hpp"

namespace cloudlap {

const char* to_string(CouplingExit e) {
    switch (e) {
        case CouplingExit::coalesced: return "coalesced";
        case CouplingExit::separated: return "separated";
        case CouplingExit::exited_ball: return "exited_ball";
    }
    return "unknown";
}

namespace {

struct TrialRecord {
    int tau = 0;
    CouplingExit exit = CouplingExit::coalesced;
    double d_final = 0.0;
    double d_base = 0.0;
    bool truncated = false;
};

int default_max_steps(const WalkConfig& cfg, double d0) {
    const double sigma = sigma_eta(cfg.kernel);
    const double bound = 2.0 * cfg.r * d0 / (sigma * cfg.eps * cfg.eps);
    return 50 * static_cast<int>(std::ceil(bound));
}

TrialRecord run_trial(const WalkConfig& cfg, const Vec4& y0,
                      std::uint64_t trial, int max_steps,
                      std::vector<Vec4>* xp, std::vector<Vec4>* yp) {
    Rng rng(cfg.seed, trial);
    Vec4 x = cfg.x0;
    Vec4 y = y0;
    if (xp != nullptr) {
        xp->clear();
        yp->clear();
        xp->push_back(x);
        yp->push_back(y);
    }
    TrialRecord rec;
    for (int n = 0;; ++n) {
        const double dxy = cfg.M->geodesic_distance(x, y);
        const double dxb = cfg.M->geodesic_distance(cfg.x0, x);
        bool stop = true;
        if (dxy <= 3.0 * cfg.eps) {
            rec.exit = CouplingExit::coalesced;
        } else if (dxy >= cfg.r) {
            rec.exit = CouplingExit::separated;
        } else if (dxb >= cfg.r) {
            rec.exit = CouplingExit::exited_ball;
        } else {
            stop = false;
        }
        if (stop || n == max_steps) {
            rec.tau = n;
            rec.d_final = dxy;
            rec.d_base = dxb;
            rec.truncated = !stop;
            return rec;
        }
        const StepDraws d = sample_step(rng, cfg.kernel);
        const Vec4 y_next = step_y(cfg, x, y, d);
        x = step_x(cfg, x, d);
        y = y_next;
        if (xp != nullptr) {
            xp->push_back(x);
            yp->push_back(y);
        }
    }
}

} // namespace

CouplingRun run_coupling(const WalkConfig& cfg, const Vec4& y0,
                         std::uint64_t trial, int max_steps) {
    cfg.validate();
    cfg.M->check_point(y0);
    const double d0 = cfg.M->geodesic_distance(cfg.x0, y0);
    if (!(d0 < cfg.r)) {
        throw std::invalid_argument(
            "run_coupling: start separation must be below r");
    }
    if (max_steps <= 0) max_steps = default_max_steps(cfg, std::max(d0, cfg.eps));

    CouplingRun run;
    const TrialRecord rec =
        run_trial(cfg, y0, trial, max_steps, &run.x_path, &run.y_path);
    run.tau = rec.tau;
    run.exit_reason = rec.exit;
    run.d_final = rec.d_final;
    run.d_base = rec.d_base;
    run.truncated = rec.truncated;
    return run;
}

CouplingStatistics coupling_statistics(const WalkConfig& cfg, const Vec4& y0,
                                       int trials, int max_steps) {
    cfg.validate();
    cfg.M->check_point(y0);
    const double d0 = cfg.M->geodesic_distance(cfg.x0, y0);
    if (!(d0 > 3.0 * cfg.eps && d0 < cfg.r)) {
        throw std::invalid_argument(
            "coupling_statistics: start separation must lie in (3 eps, r)");
    }
    if (trials < 2) {
        throw std::invalid_argument("coupling_statistics: trials < 2");
    }
    if (max_steps <= 0) max_steps = default_max_steps(cfg, d0);

    CouplingStatistics st;
    st.trials = trials;
    st.d0 = d0;
    st.taus.resize(trials);
    st.exits.resize(trials);
    st.d_finals.resize(trials);
    st.d_bases.resize(trials);
    st.truncated_flags.resize(trials);

    parallel_for_blocks(trials, 16, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            const TrialRecord rec =
                run_trial(cfg, y0, t, max_steps, nullptr, nullptr);
            st.taus[t] = rec.tau;
            st.exits[t] = rec.exit;
            st.d_finals[t] = rec.d_final;
            st.d_bases[t] = rec.d_base;
            st.truncated_flags[t] = rec.truncated ? 1 : 0;
        }
    });

    int completed = 0;
    for (int t = 0; t < trials; ++t) {
        if (st.truncated_flags[t] == 0) ++completed;
    }
    st.truncated = trials - completed;
    if (completed < std::max(2, trials / 2)) {
        throw std::runtime_error(
            "coupling_statistics: too few completed runs");
    }

    const double sigma = sigma_eta(cfg.kernel);
    const int m = cfg.M->intrinsic_dim();
    const double c_pair = 1.5 * m * sigma * cfg.eps * cfg.eps;
    const double nn = static_cast<double>(completed);

    double sum_tau = 0.0;
    double sum_d2 = 0.0;
    double n_sep = 0.0;
    double n_exit = 0.0;
    double sum_u = 0.0;
    for (int t = 0; t < trials; ++t) {
        if (st.truncated_flags[t] != 0) continue;
        sum_tau += st.taus[t];
        sum_d2 += st.d_bases[t] * st.d_bases[t];
        if (st.d_finals[t] >= cfg.r) n_sep += 1.0;
        if (st.d_bases[t] >= cfg.r) n_exit += 1.0;
        sum_u += st.d_bases[t] * st.d_bases[t] - c_pair * st.taus[t];
    }
    st.mean_tau = sum_tau / nn;
    st.mean_d_base_sq = sum_d2 / nn;
    st.p_separated = n_sep / nn;
    st.p_exited = n_exit / nn;
    const double mean_u = sum_u / nn;

    double var_tau = 0.0;
    double var_u = 0.0;
    for (int t = 0; t < trials; ++t) {
        if (st.truncated_flags[t] != 0) continue;
        const double dt = st.taus[t] - st.mean_tau;
        var_tau += dt * dt;
        const double du =
            st.d_bases[t] * st.d_bases[t] - c_pair * st.taus[t] - mean_u;
        var_u += du * du;
    }
    var_tau /= (nn - 1.0);
    var_u /= (nn - 1.0);

    auto check = [&](const std::string& name, double est, double se,
                     double bound) {
        BoundCheck b;
        b.name = name;
        b.estimate = est;
        b.standard_error = se;
        b.bound = bound;
        b.pass = est <= bound + 1.645 * se;
        st.checks.push_back(b);
    };
    check("mean stopping time", st.mean_tau, std::sqrt(var_tau / nn),
          2.0 * cfg.r * d0 / (sigma * cfg.eps * cfg.eps));
    check("separation probability", st.p_separated,
          std::sqrt(st.p_separated * (1.0 - st.p_separated) / nn),
          3.0 * d0 / cfg.r);
    check("exit probability", st.p_exited,
          std::sqrt(st.p_exited * (1.0 - st.p_exited) / nn),
          3.0 * m * d0 / cfg.r);
    // Paired test: mean of d_base^2 - c tau against zero, so the Monte
    // Carlo error of E[tau] cancels instead of inflating the bound.
    check("mean squared displacement minus step budget", mean_u,
          std::sqrt(var_u / nn), 0.0);

    st.all_pass = true;
    for (const auto& b : st.checks) st.all_pass = st.all_pass && b.pass;
    return st;
}

void write_coupling_csv(const CouplingStatistics& st,
                        const std::string& path) {
    std::string out = "trial,tau,exit_reason,d_final\n";
    char line[128];
    for (int t = 0; t < st.trials; ++t) {
        std::snprintf(line, sizeof line, "%d,%d,%s,%.17g\n", t, st.taus[t],
                      st.truncated_flags[t] != 0 ? "truncated"
                                                 : to_string(st.exits[t]),
                      st.d_finals[t]);
        out += line;
    }
    write_text_file(path, out);
}

void write_coupling_json(const WalkConfig& cfg, const Vec4& y0,
                         const CouplingStatistics& st,
                         const std::string& path) {
    JsonBuilder j;
    j.begin_object()
        .field("manifold", to_string(cfg.M->kind()))
        .field("density", cfg.rho.label())
        .field("kernel", to_string(cfg.kernel.kind))
        .field("eps", cfg.eps)
        .field("r", cfg.r)
        .field("d0", st.d0)
        .field("seed", cfg.seed)
        .field("trials", st.trials)
        .field("truncated", st.truncated)
        .field("mean_tau", st.mean_tau)
        .field("mean_d_base_sq", st.mean_d_base_sq)
        .field("p_separated", st.p_separated)
        .field("p_exited", st.p_exited);
    j.key("y0").begin_array();
    for (int i = 0; i < 4; ++i) j.value(y0[i]);
    j.end_array();
    j.key("checks").begin_array();
    for (const auto& b : st.checks) {
        j.begin_object()
            .field("name", b.name)
            .field("estimate", b.estimate)
            .field("standard_error", b.standard_error)
            .field("bound", b.bound)
            .field("pass", b.pass)
            .end_object();
    }
    j.end_array();
    j.field("all_pass", st.all_pass).end_object();
    write_text_file(path, j.str() + "\n");
}

} // namespace cloudlap
