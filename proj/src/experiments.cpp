#include "cloudlap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "cloudlap/cloud.hpp"
#include "cloudlap/nonlocal.hpp"
#include "cloudlap/threads.hpp"

namespace cloudlap {

namespace {

const double kNan = std::nan("");

SlopeFit nan_fit() { return SlopeFit{kNan, kNan, kNan}; }

// Bootstrap slope that degrades to NaN instead of throwing when a cell is
// empty or a median is nonpositive (exact zero errors on trivial clusters).
SlopeFit safe_slope(const std::vector<double>& x,
                    const std::vector<std::vector<double>>& ys,
                    std::uint64_t seed) {
    for (const auto& cell : ys) {
        if (cell.empty()) return nan_fit();
        for (double v : cell) {
            if (!(v > 0.0) || !std::isfinite(v)) return nan_fit();
        }
    }
    try {
        return loglog_slope_bootstrap(x, ys, seed);
    } catch (const std::exception&) {
        return nan_fit();
    }
}

double median_or_nan(std::vector<double> v) {
    if (v.empty()) return kNan;
    return median(v);
}

void append_fit(JsonBuilder& j, const char* name, const SlopeFit& f) {
    j.key(name)
        .begin_object()
        .field("slope", f.slope)
        .field("lo", f.lo)
        .field("hi", f.hi)
        .end_object();
}

} // namespace

double EpsRule::eps_for(int n, int m) const {
    if (is_fixed) return value;
    if (n < 2) throw std::invalid_argument("regime rule needs n >= 2");
    return c * std::pow(std::log(static_cast<double>(n)) / n,
                        1.0 / (m + 4.0));
}

EpsRule EpsRule::regime(double c) {
    if (c <= 0.0) throw std::invalid_argument("regime multiplier must be positive");
    EpsRule r;
    r.is_fixed = false;
    r.c = c;
    return r;
}

EpsRule EpsRule::fixed_value(double v) {
    if (v <= 0.0) throw std::invalid_argument("eps must be positive");
    EpsRule r;
    r.is_fixed = true;
    r.value = v;
    return r;
}

EpsRule EpsRule::parse(const std::string& text) {
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse eps rule number: " + s);
        }
        if (used != s.size()) {
            throw std::invalid_argument("cannot parse eps rule number: " + s);
        }
        return v;
    };
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) return fixed_value(number(text));
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    if (head == "regime") return regime(number(tail));
    if (head == "fixed") return fixed_value(number(tail));
    throw std::invalid_argument("unknown eps rule: " + head);
}

std::string EpsRule::label() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s:%.17g", is_fixed ? "fixed" : "regime",
                  is_fixed ? value : c);
    return buf;
}

ConvergenceTable eigen_convergence_experiment(
    const Manifold& M, const DensityModel& rho, const KernelModel& kernel,
    const std::vector<int>& ns, const EpsRule& rule, int k, int seeds,
    std::uint64_t base_seed) {
    if (ns.empty()) throw std::invalid_argument("need at least one n");
    if (k < 1) throw std::invalid_argument("need k >= 1");
    if (seeds < 1) throw std::invalid_argument("need at least 1 seed");
    const int m = M.intrinsic_dim();

    const std::vector<AnalyticEigenpair> analytic =
        analytic_eigenpairs(M, rho, kernel, k);
    const int clusters = static_cast<int>(analytic.size());

    ConvergenceTable tab;
    tab.ns = ns;
    tab.seeds = seeds;
    tab.clusters = clusters;
    for (int n : ns) tab.epses.push_back(rule.eps_for(n, m));
    for (const auto& p : analytic) tab.analytic_values.push_back(p.eigenvalue);

    const int ncells = static_cast<int>(ns.size()) * seeds;
    std::vector<std::vector<ConvergenceCell>> rows(ncells);
    parallel_for_blocks(ncells, 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t cell = lo; cell < hi; ++cell) {
            const int ie = static_cast<int>(cell) / seeds;
            const int s = static_cast<int>(cell) % seeds;
            const int n = ns[ie];
            const double eps = tab.epses[ie];
            const std::uint64_t cs = base_seed ^ static_cast<std::uint64_t>(cell);
            ConvergenceCell base;
            base.n = n;
            base.eps = eps;
            base.seed = s;

            const Cloud cloud = sample_cloud(M, rho, n, cs);
            const EpsGraph g = build_eps_graph(cloud, eps, kernel);
            if (!g.connected) {
                base.cluster = -1;
                base.lambda_err = base.linf_err = base.lip_err = kNan;
                base.connected = false;
                rows[cell].push_back(base);
                continue;
            }
            base.connected = true;
            SpectralResult sp;
            try {
                sp = smallest_eigenpairs(g, k, cs ^ 0x9E3779B97F4A7C15ULL);
            } catch (const std::exception&) {
                base.cluster = -1;
                base.lambda_err = base.linf_err = base.lip_err = kNan;
                rows[cell].push_back(base);
                continue;
            }
            const std::vector<EigenCluster> cl =
                cluster_eigenvalues(sp.eigenvalues, analytic);
            for (int c = 0; c < clusters; ++c) {
                ConvergenceCell row = base;
                row.cluster = c;
                row.lambda_err = row.linf_err = row.lip_err = kNan;
                if (static_cast<int>(cl[c].members.size()) ==
                    analytic[c].multiplicity) {
                    try {
                        const AlignReport rep =
                            eigenspace_align(g, sp, cl[c], analytic[c]);
                        row.lambda_err = rep.max_value_error;
                        row.linf_err = rep.max_linf_error;
                        row.lip_err = rep.max_lip_error;
                    } catch (const std::exception&) {
                    }
                }
                rows[cell].push_back(row);
            }
        }
    });

    for (const auto& r : rows) {
        for (const auto& c : r) {
            tab.cells.push_back(c);
            const bool bad = c.cluster < 0 || !std::isfinite(c.lambda_err) ||
                             !std::isfinite(c.linf_err) ||
                             !std::isfinite(c.lip_err);
            if (bad) ++tab.failed;
        }
    }

    const std::size_t ne = ns.size();
    tab.lambda_median.assign(ne * clusters, kNan);
    tab.linf_median.assign(ne * clusters, kNan);
    tab.lip_median.assign(ne * clusters, kNan);
    for (std::size_t ie = 0; ie < ne; ++ie) {
        for (int c = 0; c < clusters; ++c) {
            std::vector<double> le;
            std::vector<double> li;
            std::vector<double> lp;
            for (const auto& cell : tab.cells) {
                if (cell.n != ns[ie] || cell.cluster != c) continue;
                if (!std::isfinite(cell.lambda_err)) continue;
                le.push_back(cell.lambda_err);
                li.push_back(cell.linf_err);
                lp.push_back(cell.lip_err);
            }
            tab.lambda_median[ie * clusters + c] = median_or_nan(le);
            tab.linf_median[ie * clusters + c] = median_or_nan(li);
            tab.lip_median[ie * clusters + c] = median_or_nan(lp);
        }
    }

    for (int c = 0; c < clusters; ++c) {
        std::vector<std::vector<double>> le(ne);
        std::vector<std::vector<double>> li(ne);
        std::vector<std::vector<double>> lp(ne);
        for (const auto& cell : tab.cells) {
            if (cell.cluster != c || !std::isfinite(cell.lambda_err)) continue;
            const std::size_t ie =
                std::find(ns.begin(), ns.end(), cell.n) - ns.begin();
            le[ie].push_back(cell.lambda_err);
            li[ie].push_back(cell.linf_err);
            lp[ie].push_back(cell.lip_err);
        }
        ClusterSlopes cs;
        cs.cluster = c;
        cs.analytic_value = analytic[c].eigenvalue;
        cs.lambda = safe_slope(tab.epses, le, base_seed ^ (3 * c + 1));
        cs.linf = safe_slope(tab.epses, li, base_seed ^ (3 * c + 2));
        cs.lip = safe_slope(tab.epses, lp, base_seed ^ (3 * c + 3));
        tab.slopes.push_back(cs);
    }
    return tab;
}

void write_convergence_csv(const ConvergenceTable& tab,
                           const std::string& path) {
    std::string out = "n,eps,seed,cluster,lambda_err,linf_err,lip_err,connected\n";
    char line[256];
    for (const auto& c : tab.cells) {
        std::snprintf(line, sizeof line, "%d,%.17g,%d,%d,%.17g,%.17g,%.17g,%d\n",
                      c.n, c.eps, c.seed, c.cluster, c.lambda_err, c.linf_err,
                      c.lip_err, c.connected ? 1 : 0);
        out += line;
    }
    write_text_file(path, out);
}

void write_convergence_json(const ConvergenceTable& tab,
                            const std::string& path) {
    JsonBuilder j;
    j.begin_object();
    j.key("ns").begin_array();
    for (int n : tab.ns) j.value(n);
    j.end_array();
    j.key("epses").begin_array();
    for (double e : tab.epses) j.value(e);
    j.end_array();
    j.field("clusters", tab.clusters)
        .field("seeds", tab.seeds)
        .field("failed", tab.failed);
    j.key("analytic_values").begin_array();
    for (double v : tab.analytic_values) j.value(v);
    j.end_array();
    j.key("medians").begin_array();
    for (std::size_t ie = 0; ie < tab.ns.size(); ++ie) {
        for (int c = 0; c < tab.clusters; ++c) {
            j.begin_object()
                .field("n", tab.ns[ie])
                .field("eps", tab.epses[ie])
                .field("cluster", c)
                .field("lambda_err", tab.lambda_median[ie * tab.clusters + c])
                .field("linf_err", tab.linf_median[ie * tab.clusters + c])
                .field("lip_err", tab.lip_median[ie * tab.clusters + c])
                .end_object();
        }
    }
    j.end_array();
    j.key("slopes").begin_array();
    for (const auto& s : tab.slopes) {
        j.begin_object()
            .field("cluster", s.cluster)
            .field("analytic_value", s.analytic_value);
        append_fit(j, "lambda", s.lambda);
        append_fit(j, "linf", s.linf);
        append_fit(j, "lip", s.lip);
        j.end_object();
    }
    j.end_array();
    j.end_object();
    write_text_file(path, j.str() + "\n");
}

std::vector<RegularityRow> eigen_regularity_experiment(
    const EpsGraph& g, const SpectralResult& sp, double lambda_max) {
    std::vector<RegularityRow> rows;
    const int m = g.m;
    for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
        const double lam = sp.eigenvalues[k];
        if (!(lam < lambda_max)) continue;
        const std::vector<double>& f = sp.eigenvectors[k];
        RegularityRow row;
        row.index = static_cast<int>(k);
        row.lambda = lam;
        row.statistic1 = approx_lipschitz_seminorm(g, f, g.eps).value /
                         std::pow(lam + 1.0, m + 1);
        const Norms nm = norms(f);
        row.statistic2 = nm.linf / (std::pow(lam + 1.0, m) * nm.l1);
        rows.push_back(row);
    }
    return rows;
}

RegularitySweep eigen_regularity_sweep(const Manifold& M,
                                       const DensityModel& rho,
                                       const KernelModel& kernel,
                                       const std::vector<int>& ns,
                                       const EpsRule& rule, int k,
                                       double lambda_max, int seeds,
                                       std::uint64_t base_seed) {
    if (ns.empty()) throw std::invalid_argument("need at least one n");
    if (k < 1) throw std::invalid_argument("need k >= 1");
    if (seeds < 1) throw std::invalid_argument("need at least 1 seed");
    const int m = M.intrinsic_dim();

    RegularitySweep sw;
    sw.ns = ns;
    sw.seeds = seeds;
    for (int n : ns) sw.epses.push_back(rule.eps_for(n, m));
    sw.stat1_cells.assign(ns.size(), {});
    sw.stat2_cells.assign(ns.size(), {});

    const int ncells = static_cast<int>(ns.size()) * seeds;
    std::vector<std::vector<RegularityRow>> cell_rows(ncells);
    std::vector<double> cell_s1(ncells, kNan);
    std::vector<double> cell_s2(ncells, kNan);
    parallel_for_blocks(ncells, 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t cell = lo; cell < hi; ++cell) {
            const int ie = static_cast<int>(cell) / seeds;
            const int n = ns[ie];
            const double eps = sw.epses[ie];
            const std::uint64_t cs = base_seed ^ static_cast<std::uint64_t>(cell);
            const Cloud cloud = sample_cloud(M, rho, n, cs);
            const EpsGraph g = build_eps_graph(cloud, eps, kernel);
            if (!g.connected) continue;
            SpectralResult sp;
            try {
                sp = smallest_eigenpairs(g, k, cs ^ 0x9E3779B97F4A7C15ULL);
            } catch (const std::exception&) {
                continue;
            }
            cell_rows[cell] = eigen_regularity_experiment(g, sp, lambda_max);
            double s1 = 0.0;
            double s2 = 0.0;
            for (const auto& row : cell_rows[cell]) {
                s1 = std::max(s1, row.statistic1);
                s2 = std::max(s2, row.statistic2);
            }
            if (!cell_rows[cell].empty()) {
                cell_s1[cell] = s1;
                cell_s2[cell] = s2;
            }
        }
    });

    for (int cell = 0; cell < ncells; ++cell) {
        const int ie = cell / seeds;
        const int s = cell % seeds;
        if (!std::isfinite(cell_s1[cell])) {
            ++sw.failed;
            continue;
        }
        for (const auto& row : cell_rows[cell]) {
            sw.rows.push_back(RegularitySweepRow{sw.ns[ie], sw.epses[ie], s, row});
        }
        sw.stat1_cells[ie].push_back(cell_s1[cell]);
        sw.stat2_cells[ie].push_back(cell_s2[cell]);
    }

    std::vector<double> nd(ns.begin(), ns.end());
    sw.stat1_slope = safe_slope(nd, sw.stat1_cells, base_seed ^ 0xA1);
    sw.stat2_slope = safe_slope(nd, sw.stat2_cells, base_seed ^ 0xA2);
    return sw;
}

void write_regularity_csv(const RegularitySweep& sw,
                          const std::string& path) {
    std::string out = "n,eps,seed,index,lambda,statistic1,statistic2\n";
    char line[192];
    for (const auto& r : sw.rows) {
        std::snprintf(line, sizeof line, "%d,%.17g,%d,%d,%.17g,%.17g,%.17g\n",
                      r.n, r.eps, r.seed, r.row.index, r.row.lambda,
                      r.row.statistic1, r.row.statistic2);
        out += line;
    }
    write_text_file(path, out);
}

void write_regularity_json(const RegularitySweep& sw,
                           const std::string& path) {
    JsonBuilder j;
    j.begin_object();
    j.key("ns").begin_array();
    for (int n : sw.ns) j.value(n);
    j.end_array();
    j.key("epses").begin_array();
    for (double e : sw.epses) j.value(e);
    j.end_array();
    j.field("seeds", sw.seeds).field("failed", sw.failed);
    j.key("stat1_cells").begin_array();
    for (const auto& cell : sw.stat1_cells) {
        j.begin_array();
        for (double v : cell) j.value(v);
        j.end_array();
    }
    j.end_array();
    j.key("stat2_cells").begin_array();
    for (const auto& cell : sw.stat2_cells) {
        j.begin_array();
        for (double v : cell) j.value(v);
        j.end_array();
    }
    j.end_array();
    append_fit(j, "statistic1", sw.stat1_slope);
    append_fit(j, "statistic2", sw.stat2_slope);
    j.end_object();
    write_text_file(path, j.str() + "\n");
}

ConsistencySweep consistency_sweep(const Manifold& M, const DensityModel& rho,
                                   const KernelModel& kernel,
                                   const std::vector<double>& epses) {
    if (epses.size() < 2) {
        throw std::invalid_argument("need at least two eps values");
    }
    const std::vector<TestFunction> fns = test_function_library(M);
    const std::vector<Vec4> probes = M.covering_net(M.diameter() / 4.0);

    ConsistencySweep sw;
    sw.manifold = to_string(M.kind());
    sw.density = rho.label();
    sw.kernel = to_string(kernel.kind);
    sw.epses = epses;
    const std::size_t ne = epses.size();
    sw.a_residual.assign(fns.size() * ne, 0.0);
    sw.abar_residual.assign(fns.size() * ne, 0.0);
    sw.gap_ratio.assign(fns.size() * ne, 0.0);
    for (const auto& f : fns) sw.function_ids.push_back(f.id);

    std::vector<double> supf(fns.size(), 0.0);
    for (std::size_t fi = 0; fi < fns.size(); ++fi) {
        for (const Vec4& x : probes) {
            supf[fi] = std::max(supf[fi], std::fabs(fns[fi].value(x)));
        }
    }

    const std::size_t cells = fns.size() * ne;
    parallel_for_blocks(cells, 1, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t cell = lo; cell < hi; ++cell) {
            const std::size_t fi = cell / ne;
            const std::size_t ei = cell % ne;
            const double eps = epses[ei];
            double ra = 0.0;
            double rb = 0.0;
            double rg = 0.0;
            for (const Vec4& x : probes) {
                const ConsistencyResidual cr =
                    consistency_residual(rho, kernel, eps, fns[fi], x);
                ra = std::max(ra, std::fabs(cr.a_residual));
                rb = std::max(rb, std::fabs(cr.abar_residual));
                const double gap =
                    std::fabs(averaging_A(rho, kernel, eps, fns[fi].value, x) -
                              averaging_Abar(rho, kernel, eps, fns[fi].value, x));
                rg = std::max(rg, gap / (eps * eps * supf[fi]));
            }
            sw.a_residual[cell] = ra;
            sw.abar_residual[cell] = rb;
            sw.gap_ratio[cell] = rg;
        }
    });

    sw.min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t fi = 0; fi < fns.size(); ++fi) {
        const std::vector<double> ya(sw.a_residual.begin() + fi * ne,
                                     sw.a_residual.begin() + (fi + 1) * ne);
        const std::vector<double> yb(sw.abar_residual.begin() + fi * ne,
                                     sw.abar_residual.begin() + (fi + 1) * ne);
        auto fit = [&](const std::vector<double>& y) {
            for (double v : y) {
                if (!(v > 0.0)) return kNan;
            }
            return loglog_slope(epses, y);
        };
        sw.a_slope.push_back(fit(ya));
        sw.abar_slope.push_back(fit(yb));
        if (std::isfinite(sw.a_slope.back())) {
            sw.min_slope = std::min(sw.min_slope, sw.a_slope.back());
        }
        if (std::isfinite(sw.abar_slope.back())) {
            sw.min_slope = std::min(sw.min_slope, sw.abar_slope.back());
        }
    }
    sw.max_gap_ratio =
        *std::max_element(sw.gap_ratio.begin(), sw.gap_ratio.end());
    return sw;
}

void write_consistency_csv(const ConsistencySweep& sw,
                           const std::string& path) {
    // slope_running is the pairwise log-log slope against the previous eps;
    // the first row of each sweep has none.
    std::string out = "function,operator,epsilon,residual,slope_running\n";
    char line[224];
    const std::size_t ne = sw.epses.size();
    auto emit = [&](const std::string& id, const char* op,
                    const double* res) {
        for (std::size_t ei = 0; ei < ne; ++ei) {
            double running = std::nan("");
            if (ei > 0 && res[ei] > 0.0 && res[ei - 1] > 0.0) {
                running = std::log(res[ei] / res[ei - 1]) /
                          std::log(sw.epses[ei] / sw.epses[ei - 1]);
            }
            std::snprintf(line, sizeof line, "%s,%s,%.17g,%.17g,%.17g\n",
                          id.c_str(), op, sw.epses[ei], res[ei], running);
            out += line;
        }
    };
    for (std::size_t fi = 0; fi < sw.function_ids.size(); ++fi) {
        emit(sw.function_ids[fi], "ball_average", sw.a_residual.data() + fi * ne);
        emit(sw.function_ids[fi], "tangent_average",
             sw.abar_residual.data() + fi * ne);
    }
    write_text_file(path, out);
}

void write_consistency_json(const ConsistencySweep& sw,
                            const std::string& path) {
    JsonBuilder j;
    j.begin_object();
    j.field("manifold", sw.manifold)
        .field("density", sw.density)
        .field("kernel", sw.kernel);
    j.key("epses").begin_array();
    for (double e : sw.epses) j.value(e);
    j.end_array();
    j.key("functions").begin_array();
    for (std::size_t fi = 0; fi < sw.function_ids.size(); ++fi) {
        j.begin_object()
            .field("id", sw.function_ids[fi])
            .field("a_slope", sw.a_slope[fi])
            .field("abar_slope", sw.abar_slope[fi])
            .end_object();
    }
    j.end_array();
    j.field("min_slope", sw.min_slope)
        .field("max_gap_ratio", sw.max_gap_ratio)
        .end_object();
    write_text_file(path, j.str() + "\n");
}

GeneratorCheck generator_check(const WalkConfig& cfg, const TestFunction& f,
                               std::int64_t trials) {
    cfg.validate();
    if (trials < 2) throw std::invalid_argument("need at least 2 trials");
    std::vector<double> vals(static_cast<std::size_t>(trials));
    parallel_for_blocks(
        static_cast<std::size_t>(trials), 4096,
        [&](std::size_t lo, std::size_t hi) {
            for (std::size_t t = lo; t < hi; ++t) {
                Rng rng(cfg.seed, t);
                const StepDraws d = sample_step(rng, cfg.kernel);
                vals[t] = f.value(step_x(cfg, cfg.x0, d));
            }
        });
    double sum = 0.0;
    for (double v : vals) sum += v;
    const double mean = sum / static_cast<double>(trials);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(trials - 1);

    GeneratorCheck chk;
    chk.trials = trials;
    chk.mc_mean = mean;
    chk.standard_error = std::sqrt(var / static_cast<double>(trials));
    chk.quadrature =
        averaging_Abar(cfg.rho, cfg.kernel, cfg.eps, f.value, cfg.x0);
    chk.pass = std::fabs(mean - chk.quadrature) <=
               4.0 * chk.standard_error + 1e-12;
    return chk;
}

CouplingSlopeResult coupling_tau_slope(const Manifold& M,
                                       const DensityModel& rho,
                                       const KernelModel& kernel,
                                       const Vec4& x0, double r, double d0,
                                       const std::vector<double>& epses,
                                       int trials,
                                       std::uint64_t base_seed) {
    if (epses.size() < 2) {
        throw std::invalid_argument("need at least two eps values");
    }
    const auto frame = M.tangent_frame(x0);
    const Vec4 y0 = M.exp_map(x0, d0 * frame[0].comp);

    CouplingSlopeResult res;
    res.epses = epses;
    for (std::size_t ie = 0; ie < epses.size(); ++ie) {
        WalkConfig cfg;
        cfg.M = &M;
        cfg.rho = rho;
        cfg.kernel = kernel;
        cfg.eps = epses[ie];
        cfg.x0 = x0;
        cfg.r = r;
        cfg.seed = base_seed + ie;
        res.stats.push_back(coupling_statistics(cfg, y0, trials));
        res.mean_taus.push_back(res.stats.back().mean_tau);
    }

    // Bootstrap over trials within each eps, refitting the mean each time.
    std::vector<std::vector<double>> taus(epses.size());
    for (std::size_t ie = 0; ie < epses.size(); ++ie) {
        const CouplingStatistics& st = res.stats[ie];
        for (int t = 0; t < st.trials; ++t) {
            if (st.truncated_flags[t] == 0) {
                taus[ie].push_back(st.taus[t]);
            }
        }
    }
    const int reps = 400;
    Rng rg(base_seed, 0xB00757EDULL);
    std::vector<double> slopes;
    slopes.reserve(reps);
    std::vector<double> my(epses.size());
    for (int rep = 0; rep < reps; ++rep) {
        for (std::size_t ie = 0; ie < epses.size(); ++ie) {
            const std::vector<double>& pool = taus[ie];
            double s = 0.0;
            for (std::size_t t = 0; t < pool.size(); ++t) {
                s += pool[rg.below(pool.size())];
            }
            my[ie] = s / static_cast<double>(pool.size());
        }
        slopes.push_back(loglog_slope(epses, my));
    }
    std::sort(slopes.begin(), slopes.end());
    res.fit.slope = loglog_slope(epses, res.mean_taus);
    res.fit.lo = slopes[static_cast<std::size_t>(0.025 * (reps - 1))];
    res.fit.hi = slopes[static_cast<std::size_t>(0.975 * (reps - 1))];
    return res;
}

void write_coupling_slope_json(const CouplingSlopeResult& res,
                               const std::string& path) {
    JsonBuilder j;
    j.begin_object();
    j.key("epses").begin_array();
    for (double e : res.epses) j.value(e);
    j.end_array();
    j.key("mean_taus").begin_array();
    for (double t : res.mean_taus) j.value(t);
    j.end_array();
    append_fit(j, "fit", res.fit);
    j.end_object();
    write_text_file(path, j.str() + "\n");
}

ConcentrationSweep degree_uniformity_sweep(const Manifold& M,
                                           const DensityModel& rho,
                                           const KernelModel& kernel,
                                           const std::vector<int>& ns,
                                           double eps, int seeds,
                                           std::uint64_t base_seed) {
    if (ns.size() < 2) {
        throw std::invalid_argument("need at least two n values");
    }
    ConcentrationSweep sw;
    sw.ns = ns;
    std::vector<std::vector<double>> ys;
    for (std::size_t ie = 0; ie < ns.size(); ++ie) {
        sw.reports.push_back(degree_uniformity(
            M, rho, kernel, ns[ie], eps, seeds,
            base_seed + ie * static_cast<std::uint64_t>(seeds)));
        ys.push_back(sw.reports.back().per_seed);
    }
    std::vector<double> nd(ns.begin(), ns.end());
    sw.fit = safe_slope(nd, ys, base_seed ^ 0xD06);
    return sw;
}

void write_concentration_sweep_csv(const ConcentrationSweep& sw,
                                   const std::string& path) {
    std::string out = "n,seed,value\n";
    char line[96];
    for (std::size_t ie = 0; ie < sw.ns.size(); ++ie) {
        const auto& per = sw.reports[ie].per_seed;
        for (std::size_t s = 0; s < per.size(); ++s) {
            std::snprintf(line, sizeof line, "%d,%zu,%.17g\n", sw.ns[ie], s,
                          per[s]);
            out += line;
        }
    }
    write_text_file(path, out);
}

void write_concentration_sweep_json(const ConcentrationSweep& sw,
                                    const std::string& path) {
    JsonBuilder j;
    j.begin_object();
    j.key("ns").begin_array();
    for (int n : sw.ns) j.value(n);
    j.end_array();
    j.key("medians").begin_array();
    for (const auto& rep : sw.reports) j.value(rep.median);
    j.end_array();
    append_fit(j, "fit", sw.fit);
    j.end_object();
    write_text_file(path, j.str() + "\n");
}

} // namespace cloudlap
