// Experiment runner: one subcommand per study, deterministic artifacts.
// Exit codes: 0 success, 1 usage or I/O error, 2 experiment-level failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cloudlap/cloud.hpp"
#include "cloudlap/concentration.hpp"
#include "cloudlap/coupling.hpp"
#include "cloudlap/density.hpp"
#include "cloudlap/experiments.hpp"
#include "cloudlap/graph.hpp"
#include "cloudlap/kernel.hpp"
#include "cloudlap/manifold.hpp"
#include "cloudlap/results.hpp"
#include "cloudlap/spectral.hpp"
#include "cloudlap/threads.hpp"
#include "cloudlap/walks.hpp"

namespace {

using namespace cloudlap;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string cmd;
    std::string manifold = "circle";
    std::string density = "uniform";
    std::string kernel = "uniform";
    std::string n = "1000";
    std::string eps;
    std::string eps_rule;
    int k = 8;
    double lambda_max = std::numeric_limits<double>::infinity();
    double t = 0.5;
    std::uint64_t seed = 0;
    int seeds = 1;
    int trials = 10000;
    double r = 0.5;
    double d0 = 0.1;
    std::string out = ".";
    int threads = 0;
    bool dry_run = false;
};

long long to_int(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != s.size()) {
        throw UsageError("bad integer for " + key + ": " + s);
    }
    return v;
}

double to_double(const std::string& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != s.size()) {
        throw UsageError("bad number for " + key + ": " + s);
    }
    return v;
}

// Config file values arrive as JSON scalars or lists; every field also has a
// textual form on the command line, so both funnel through one setter.
void apply_config_value(Options& o, const std::string& key,
                        const std::string& value) {
    if (key == "manifold") o.manifold = value;
    else if (key == "density") o.density = value;
    else if (key == "kernel") o.kernel = value;
    else if (key == "n") o.n = value;
    else if (key == "eps") o.eps = value;
    else if (key == "eps-rule" || key == "eps_rule") o.eps_rule = value;
    else if (key == "k") o.k = static_cast<int>(to_int(value, key));
    else if (key == "lambda-max" || key == "lambda_max") o.lambda_max = to_double(value, key);
    else if (key == "t") o.t = to_double(value, key);
    else if (key == "seed") o.seed = static_cast<std::uint64_t>(to_int(value, key));
    else if (key == "seeds") o.seeds = static_cast<int>(to_int(value, key));
    else if (key == "trials") o.trials = static_cast<int>(to_int(value, key));
    else if (key == "r") o.r = to_double(value, key);
    else if (key == "d0") o.d0 = to_double(value, key);
    else if (key == "out") o.out = value;
    else if (key == "threads") o.threads = static_cast<int>(to_int(value, key));
    else if (key == "dry-run" || key == "dry_run") o.dry_run = value == "true" || value == "1";
    else throw UsageError("unknown config key: " + key);
}

std::string scalar_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean() || v.is_number()) return v.dump();
    throw UsageError("config values must be scalars or lists of scalars");
}

void load_config(Options& o, const CLI::App& cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        std::string flag = "--" + key;
        for (char& c : flag) {
            if (c == '_') c = '-';
        }
        // Flags given on the command line take precedence over the file.
        if (cmd.count(flag) > 0) continue;
        if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ',';
                joined += scalar_text(item);
            }
            apply_config_value(o, key, joined);
        } else {
            apply_config_value(o, key, scalar_text(value));
        }
    }
}

std::vector<int> parse_int_list(const std::string& s, const char* flag) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        out.push_back(static_cast<int>(to_int(tok, flag)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw UsageError(std::string("empty list for ") + flag);
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        out.push_back(to_double(tok, flag));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw UsageError(std::string("empty list for ") + flag);
    return out;
}

DensityModel parse_density(const Manifold& M, const std::string& s) {
    if (s == "uniform") return DensityModel::uniform(M);
    if (s.rfind("tilted:", 0) == 0) {
        return DensityModel::tilted(M, to_double(s.substr(7), "--density"));
    }
    throw UsageError("unknown density: " + s);
}

EpsRule resolve_rule(const Options& o) {
    if (!o.eps_rule.empty() && !o.eps.empty()) {
        throw UsageError("pass either --eps or --eps-rule, not both");
    }
    if (!o.eps_rule.empty()) {
        try {
            return EpsRule::parse(o.eps_rule);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    if (!o.eps.empty()) {
        return EpsRule::fixed_value(to_double(o.eps, "--eps"));
    }
    throw UsageError("this command needs --eps or --eps-rule");
}

double require_eps(const Options& o) {
    if (o.eps.empty()) throw UsageError("this command needs --eps");
    return to_double(o.eps, "--eps");
}

std::string join_path(const std::string& dir, const char* name) {
    return dir + "/" + name;
}

// Deterministic canonical line hashed into the manifest; field order fixed.
std::string canonical_config(const Options& o) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "cmd=%s manifold=%s density=%s kernel=%s n=%s eps=%s "
                  "eps_rule=%s k=%d lambda_max=%.17g t=%.17g seed=%llu "
                  "seeds=%d trials=%d r=%.17g d0=%.17g",
                  o.cmd.c_str(), o.manifold.c_str(), o.density.c_str(),
                  o.kernel.c_str(), o.n.c_str(), o.eps.c_str(),
                  o.eps_rule.c_str(), o.k, o.lambda_max, o.t,
                  static_cast<unsigned long long>(o.seed), o.seeds, o.trials,
                  o.r, o.d0);
    return buf;
}

void write_two_column(const std::string& path, const std::vector<double>& x,
                      const std::vector<double>& y) {
    std::string out;
    char line[80];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g %.17g\n", x[i], y[i]);
        out += line;
    }
    write_text_file(path, out);
}

struct PlotSchema {
    JsonBuilder j;
    bool open = false;
    void add(const std::string& file, const char* xlabel, const char* ylabel,
             bool loglog) {
        if (!open) {
            j.begin_object().key("curves").begin_array();
            open = true;
        }
        j.begin_object()
            .field("file", file)
            .field("x", xlabel)
            .field("y", ylabel)
            .field("xscale", loglog ? "log" : "linear")
            .field("yscale", loglog ? "log" : "linear")
            .end_object();
    }
    void finish(const std::string& path) {
        if (!open) return;
        j.end_array().end_object();
        write_text_file(path, j.str() + "\n");
    }
};

int cmd_sample(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const std::vector<int> ns = parse_int_list(o.n, "--n");
    if (o.dry_run) {
        std::printf("sample: manifold=%s density=%s n=%d seed=%llu\n",
                    o.manifold.c_str(), o.density.c_str(), ns[0],
                    static_cast<unsigned long long>(o.seed));
        return 0;
    }
    const Cloud cloud = sample_cloud(M, rho, ns[0], o.seed);
    write_cloud_csv(cloud, join_path(o.out, "cloud.csv"));
    return 0;
}

int cmd_graph(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const KernelModel kernel =
        KernelModel::make(kernel_kind_from_string(o.kernel), M.intrinsic_dim());
    const std::vector<int> ns = parse_int_list(o.n, "--n");
    const double eps = require_eps(o);
    if (o.dry_run) {
        std::printf("graph: n=%d eps=%.17g kernel=%s\n", ns[0], eps,
                    o.kernel.c_str());
        return 0;
    }
    const Cloud cloud = sample_cloud(M, rho, ns[0], o.seed);
    const EpsGraph g = build_eps_graph(cloud, eps, kernel);
    write_graph_csv(g, join_path(o.out, "graph.csv"));
    write_graph_sidecar(g, join_path(o.out, "graph.json"));
    return 0;
}

int cmd_eigs(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const KernelModel kernel =
        KernelModel::make(kernel_kind_from_string(o.kernel), M.intrinsic_dim());
    const std::vector<int> ns = parse_int_list(o.n, "--n");
    const double eps = require_eps(o);
    if (o.dry_run) {
        std::printf("eigs: n=%d eps=%.17g k=%d seed=%llu\n", ns[0], eps, o.k,
                    static_cast<unsigned long long>(o.seed));
        return 0;
    }
    const Cloud cloud = sample_cloud(M, rho, ns[0], o.seed);
    const EpsGraph g = build_eps_graph(cloud, eps, kernel);
    const SpectralResult sp = smallest_eigenpairs(g, o.k, o.seed);

    std::string csv = "index,eigenvalue,residual\n";
    char line[96];
    std::vector<double> idx;
    for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i) {
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i,
                      sp.eigenvalues[i], sp.residuals[i]);
        csv += line;
        idx.push_back(static_cast<double>(i));
    }
    write_text_file(join_path(o.out, "eigs.csv"), csv);

    JsonBuilder j;
    j.begin_object().field("solver", sp.solver).field("connected", g.connected);
    j.key("eigenvalues").begin_array();
    for (double v : sp.eigenvalues) j.value(v);
    j.end_array();
    j.key("residuals").begin_array();
    for (double v : sp.residuals) j.value(v);
    j.end_array();
    j.end_object();
    write_text_file(join_path(o.out, "eigs.json"), j.str() + "\n");

    write_two_column(join_path(o.out, "eigs_spectrum.dat"), idx, sp.eigenvalues);
    PlotSchema ps;
    ps.add("eigs_spectrum.dat", "index", "eigenvalue", false);
    ps.finish(join_path(o.out, "plots.json"));
    return 0;
}

int cmd_regularity(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const KernelModel kernel =
        KernelModel::make(kernel_kind_from_string(o.kernel), M.intrinsic_dim());
    const std::vector<int> ns = parse_int_list(o.n, "--n");
    const EpsRule rule = resolve_rule(o);
    if (o.dry_run) {
        for (int n : ns) {
            std::printf("regularity: n=%d eps=%.17g k=%d seeds=%d\n", n,
                        rule.eps_for(n, M.intrinsic_dim()), o.k, o.seeds);
        }
        return 0;
    }
    const RegularitySweep sw = eigen_regularity_sweep(
        M, rho, kernel, ns, rule, o.k, o.lambda_max, o.seeds, o.seed);
    write_regularity_csv(sw, join_path(o.out, "regularity.csv"));
    write_regularity_json(sw, join_path(o.out, "regularity.json"));

    auto finite_median = [](const std::vector<double>& cell) {
        std::vector<double> keep;
        for (double v : cell) {
            if (std::isfinite(v)) keep.push_back(v);
        }
        return keep.empty() ? std::nan("") : median(keep);
    };
    std::vector<double> nd(sw.ns.begin(), sw.ns.end());
    std::vector<double> m1;
    std::vector<double> m2;
    for (std::size_t ie = 0; ie < sw.ns.size(); ++ie) {
        m1.push_back(finite_median(sw.stat1_cells[ie]));
        m2.push_back(finite_median(sw.stat2_cells[ie]));
    }
    write_two_column(join_path(o.out, "regularity_stat1.dat"), nd, m1);
    write_two_column(join_path(o.out, "regularity_stat2.dat"), nd, m2);
    PlotSchema ps;
    ps.add("regularity_stat1.dat", "n", "median statistic1", true);
    ps.add("regularity_stat2.dat", "n", "median statistic2", true);
    ps.finish(join_path(o.out, "plots.json"));

    const bool ok = sw.failed == 0 && std::isfinite(sw.stat1_slope.slope) &&
                    std::isfinite(sw.stat2_slope.slope) &&
                    std::fabs(sw.stat1_slope.slope) <= 0.2 &&
                    std::fabs(sw.stat2_slope.slope) <= 0.2;
    return ok ? 0 : 2;
}

int cmd_converge(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const KernelModel kernel =
        KernelModel::make(kernel_kind_from_string(o.kernel), M.intrinsic_dim());
    const std::vector<int> ns = parse_int_list(o.n, "--n");
    const EpsRule rule = resolve_rule(o);
    if (o.dry_run) {
        for (int n : ns) {
            std::printf("converge: n=%d eps=%.17g k=%d seeds=%d\n", n,
                        rule.eps_for(n, M.intrinsic_dim()), o.k, o.seeds);
        }
        return 0;
    }
    const ConvergenceTable tab = eigen_convergence_experiment(
        M, rho, kernel, ns, rule, o.k, o.seeds, o.seed);
    write_convergence_csv(tab, join_path(o.out, "converge.csv"));
    write_convergence_json(tab, join_path(o.out, "converge.json"));

    PlotSchema ps;
    for (int c = 0; c < tab.clusters; ++c) {
        std::vector<double> lam;
        std::vector<double> linf;
        std::vector<double> lip;
        for (std::size_t ie = 0; ie < tab.ns.size(); ++ie) {
            lam.push_back(tab.lambda_median[ie * tab.clusters + c]);
            linf.push_back(tab.linf_median[ie * tab.clusters + c]);
            lip.push_back(tab.lip_median[ie * tab.clusters + c]);
        }
        char name[64];
        std::snprintf(name, sizeof name, "converge_lambda_c%d.dat", c);
        write_two_column(join_path(o.out, name), tab.epses, lam);
        ps.add(name, "eps", "median |lambda - analytic|", true);
        std::snprintf(name, sizeof name, "converge_linf_c%d.dat", c);
        write_two_column(join_path(o.out, name), tab.epses, linf);
        ps.add(name, "eps", "median sup error", true);
        std::snprintf(name, sizeof name, "converge_lip_c%d.dat", c);
        write_two_column(join_path(o.out, name), tab.epses, lip);
        ps.add(name, "eps", "median Lipschitz error", true);
    }
    ps.finish(join_path(o.out, "plots.json"));
    return tab.failed == 0 ? 0 : 2;
}

int cmd_nonlocal(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const KernelModel kernel =
        KernelModel::make(kernel_kind_from_string(o.kernel), M.intrinsic_dim());
    std::vector<double> epses = o.eps.empty()
                                    ? std::vector<double>{0.4, 0.2, 0.1, 0.05}
                                    : parse_double_list(o.eps, "--eps");
    if (o.dry_run) {
        for (double e : epses) {
            std::printf("nonlocal: eps=%.17g\n", e);
        }
        return 0;
    }
    const ConsistencySweep sw = consistency_sweep(M, rho, kernel, epses);
    write_consistency_csv(sw, join_path(o.out, "nonlocal.csv"));
    write_consistency_json(sw, join_path(o.out, "nonlocal.json"));

    PlotSchema ps;
    const std::size_t ne = sw.epses.size();
    for (std::size_t fi = 0; fi < sw.function_ids.size(); ++fi) {
        const std::vector<double> ya(sw.a_residual.begin() + fi * ne,
                                     sw.a_residual.begin() + (fi + 1) * ne);
        const std::vector<double> yb(sw.abar_residual.begin() + fi * ne,
                                     sw.abar_residual.begin() + (fi + 1) * ne);
        char name[64];
        std::snprintf(name, sizeof name, "nonlocal_a_f%zu.dat", fi);
        write_two_column(join_path(o.out, name), sw.epses, ya);
        ps.add(name, "eps", "ball average residual", true);
        std::snprintf(name, sizeof name, "nonlocal_abar_f%zu.dat", fi);
        write_two_column(join_path(o.out, name), sw.epses, yb);
        ps.add(name, "eps", "tangent average residual", true);
    }
    ps.finish(join_path(o.out, "plots.json"));

    const bool ok = std::isfinite(sw.min_slope) && sw.min_slope >= 2.7 &&
                    std::isfinite(sw.max_gap_ratio);
    return ok ? 0 : 2;
}

int cmd_couple(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const KernelModel kernel =
        KernelModel::make(kernel_kind_from_string(o.kernel), M.intrinsic_dim());
    const double eps = require_eps(o);
    if (o.dry_run) {
        std::printf("couple: eps=%.17g r=%.17g d0=%.17g trials=%d seed=%llu\n",
                    eps, o.r, o.d0, o.trials,
                    static_cast<unsigned long long>(o.seed));
        return 0;
    }
    WalkConfig cfg;
    cfg.M = &M;
    cfg.rho = rho;
    cfg.kernel = kernel;
    cfg.eps = eps;
    cfg.x0 = M.covering_net(M.diameter())[0];
    cfg.r = o.r;
    cfg.seed = o.seed;
    const auto frame = M.tangent_frame(cfg.x0);
    const Vec4 y0 = M.exp_map(cfg.x0, o.d0 * frame[0].comp);

    const CouplingStatistics st = coupling_statistics(cfg, y0, o.trials);
    write_coupling_csv(st, join_path(o.out, "couple.csv"));
    write_coupling_json(cfg, y0, st, join_path(o.out, "couple.json"));
    return st.all_pass ? 0 : 2;
}

int cmd_concentration(const Options& o) {
    const Manifold& M = Manifold::get(manifold_kind_from_string(o.manifold));
    const DensityModel rho = parse_density(M, o.density);
    const KernelModel kernel =
        KernelModel::make(kernel_kind_from_string(o.kernel), M.intrinsic_dim());
    const std::vector<int> ns = parse_int_list(o.n, "--n");
    const double eps = require_eps(o);
    if (o.dry_run) {
        for (int n : ns) {
            std::printf("concentration: n=%d eps=%.17g seeds=%d\n", n, eps,
                        o.seeds);
        }
        return 0;
    }
    const int nlast = ns.back();
    const ConcentrationReport ball =
        ball_count_check(M, rho, nlast, eps, o.seeds, o.seed);
    const ConcentrationReport annulus =
        annulus_count_check(M, rho, nlast, eps, o.t, o.seeds, o.seed);
    const ConcentrationReport dconv =
        double_convolution_check(M, rho, kernel, nlast, eps, o.seeds, o.seed);
    write_concentration_csv(ball, join_path(o.out, "ball_count.csv"));
    write_concentration_json(ball, join_path(o.out, "ball_count.json"));
    write_concentration_csv(annulus, join_path(o.out, "annulus_count.csv"));
    write_concentration_json(annulus, join_path(o.out, "annulus_count.json"));
    write_concentration_csv(dconv, join_path(o.out, "double_convolution.csv"));
    write_concentration_json(dconv, join_path(o.out, "double_convolution.json"));

    bool ok = ball.pass && annulus.pass && dconv.pass;
    if (ns.size() >= 2) {
        const ConcentrationSweep sw =
            degree_uniformity_sweep(M, rho, kernel, ns, eps, o.seeds, o.seed);
        write_concentration_sweep_csv(sw,
                                      join_path(o.out, "degree_uniformity.csv"));
        write_concentration_sweep_json(
            sw, join_path(o.out, "degree_uniformity.json"));
        std::vector<double> nd(sw.ns.begin(), sw.ns.end());
        std::vector<double> med;
        for (const auto& rep : sw.reports) med.push_back(rep.median);
        write_two_column(join_path(o.out, "concentration_degree.dat"), nd, med);
        PlotSchema ps;
        ps.add("concentration_degree.dat", "n", "median sup degree gap", true);
        ps.finish(join_path(o.out, "plots.json"));
        ok = ok && std::isfinite(sw.fit.slope) &&
             std::fabs(sw.fit.slope + 0.5) <= 0.15;
    } else {
        const ConcentrationReport deg =
            degree_uniformity(M, rho, kernel, nlast, eps, o.seeds, o.seed);
        write_concentration_csv(deg, join_path(o.out, "degree_uniformity.csv"));
        write_concentration_json(deg,
                                 join_path(o.out, "degree_uniformity.json"));
        ok = ok && deg.pass;
    }
    return ok ? 0 : 2;
}

int run(const Options& o) {
    if (o.cmd == "sample") return cmd_sample(o);
    if (o.cmd == "graph") return cmd_graph(o);
    if (o.cmd == "eigs") return cmd_eigs(o);
    if (o.cmd == "regularity") return cmd_regularity(o);
    if (o.cmd == "converge") return cmd_converge(o);
    if (o.cmd == "nonlocal") return cmd_nonlocal(o);
    if (o.cmd == "couple") return cmd_couple(o);
    if (o.cmd == "concentration") return cmd_concentration(o);
    throw UsageError("unknown command: " + o.cmd);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-cloud Laplacian operators, walks, and experiments"};
    app.name("cloudlap");
    app.require_subcommand(1);

    Options o;
    std::string config_path;
    auto add_common = [&](const char* name, const char* what) {
        CLI::App* cmd = app.add_subcommand(name, what);
        cmd->add_option("--manifold", o.manifold,
                        "circle, sphere2, or flat_torus2")
            ->capture_default_str();
        cmd->add_option("--density", o.density, "uniform or tilted:<a>")
            ->capture_default_str();
        cmd->add_option("--kernel", o.kernel,
                        "uniform, triangular, or quadratic")
            ->capture_default_str();
        cmd->add_option("--n", o.n, "cloud size, or comma list for sweeps")
            ->capture_default_str();
        cmd->add_option("--eps", o.eps,
                        "graph radius; comma list for residual sweeps");
        cmd->add_option("--eps-rule", o.eps_rule,
                        "regime:<c> for c(log n/n)^{1/(m+4)}, or fixed:<v>");
        cmd->add_option("--k", o.k, "eigenpair count")->capture_default_str();
        cmd->add_option("--lambda-max", o.lambda_max,
                        "regularity eigenvalue ceiling");
        cmd->add_option("--t", o.t, "annulus half-width fraction")
            ->capture_default_str();
        cmd->add_option("--seed", o.seed, "base seed")->capture_default_str();
        cmd->add_option("--seeds", o.seeds, "independent replicate count")
            ->capture_default_str();
        cmd->add_option("--trials", o.trials, "Monte Carlo trials")
            ->capture_default_str();
        cmd->add_option("--r", o.r, "coupling ball radius")
            ->capture_default_str();
        cmd->add_option("--d0", o.d0, "coupling start separation")
            ->capture_default_str();
        cmd->add_option("--out", o.out, "artifact directory")
            ->capture_default_str();
        cmd->add_option("--threads", o.threads, "worker threads, 0 = auto");
        cmd->add_option("--config", config_path,
                        "flat JSON config file; flags override it");
        cmd->add_flag("--dry-run", o.dry_run,
                      "print the resolved plan without computing");
        cmd->callback([&o, name] { o.cmd = name; });
        return cmd;
    };
    add_common("sample", "draw a point cloud and write it as CSV");
    add_common("graph", "build the eps-graph; write edges and a sidecar");
    add_common("eigs", "smallest eigenpairs of the graph Laplacian");
    add_common("regularity", "eigenvector regularity statistics over n");
    add_common("converge", "spectral error rates against closed forms");
    add_common("nonlocal", "averaging-operator expansion residual sweep");
    add_common("couple", "coupled-walk stopping-time bound checks");
    add_common("concentration", "degree/ball/annulus concentration checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    try {
        if (!config_path.empty()) {
            load_config(o, *app.get_subcommands().front(), config_path);
        }
        if (o.threads > 0) set_thread_count(o.threads);
        if (!o.dry_run) {
            std::error_code ec;
            std::filesystem::create_directories(o.out, ec);
            if (ec) throw UsageError("cannot create output directory: " + o.out);
        }
        code = run(o);
        if (!o.dry_run) {
            write_manifest(join_path(o.out, "manifest.json"),
                           canonical_config(o));
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "experiment failed: %s\n", e.what());
        return 2;
    }
    // Wall time goes to stderr, not into the manifest, so that repeated runs
    // with one seed emit byte-identical artifacts.
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    std::fprintf(stderr, "wall time: %.3f s\n", elapsed.count());
    return code;
}
