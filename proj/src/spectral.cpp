#include "cloudlap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "cloudlap/simd.hpp"

namespace cloudlap {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Largest-magnitude entry made positive (first index wins ties) so solver
// output is reproducible across backends.
void fix_sign(std::vector<double>& v) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double m = std::fabs(v[i]);
        if (m > best) {
            best = m;
            arg = i;
        }
    }
    if (v[arg] < 0.0) {
        for (double& x : v) x = -x;
    }
}

SpectralResult assemble(const EpsGraph& g, std::vector<double> values,
                        std::vector<std::vector<double>> unit_vectors,
                        std::vector<double> residuals, std::string solver) {
    const double root_n = std::sqrt(static_cast<double>(g.cloud.n));
    SpectralResult out;
    out.eigenvalues = std::move(values);
    out.residuals = std::move(residuals);
    out.solver = std::move(solver);
    out.eigenvectors.resize(unit_vectors.size());
    for (std::size_t k = 0; k < unit_vectors.size(); ++k) {
        fix_sign(unit_vectors[k]);
        for (double& x : unit_vectors[k]) x *= root_n;
        out.eigenvectors[k] = std::move(unit_vectors[k]);
    }
    return out;
}

double residual_norm(const SparseSym& a, const std::vector<double>& v,
                     double lambda) {
    std::vector<double> r = sparse_apply(a, v);
    const auto& ops = simd::active_ops();
    ops.axpy(-lambda, v.data(), r.data(), r.size());
    return std::sqrt(ops.nrm2sq(r.data(), r.size()));
}

} // namespace

SpectralResult smallest_eigenpairs_dense(const EpsGraph& g, int k) {
    const int n = g.cloud.n;
    if (k < 1 || k > n) {
        throw std::invalid_argument("smallest_eigenpairs_dense: k out of range");
    }
    const SparseSym a = graph_laplacian_matrix(g);
    EighResult full = dense_eigh(sparse_dense(a), n);

    std::vector<double> values(full.values.begin(), full.values.begin() + k);
    std::vector<std::vector<double>> vecs(k);
    std::vector<double> res(k);
    for (int i = 0; i < k; ++i) {
        vecs[i].assign(full.vectors.begin() + (std::size_t)i * n,
                       full.vectors.begin() + (std::size_t)(i + 1) * n);
        res[i] = residual_norm(a, vecs[i], values[i]);
    }
    return assemble(g, std::move(values), std::move(vecs), std::move(res),
                    "dense");
}

SpectralResult smallest_eigenpairs_lanczos(const EpsGraph& g, int k,
                                           std::uint64_t seed,
                                           const LanczosOptions& opt) {
    const int n = g.cloud.n;
    if (k < 1 || k > n) {
        throw std::invalid_argument(
            "smallest_eigenpairs_lanczos: k out of range");
    }
    const SparseSym a = graph_laplacian_matrix(g);
    LanczosResult lr = lanczos_smallest(a, k, seed, opt);

    std::vector<std::vector<double>> vecs(k);
    for (int i = 0; i < k; ++i) {
        vecs[i].assign(lr.vectors.begin() + (std::size_t)i * n,
                       lr.vectors.begin() + (std::size_t)(i + 1) * n);
    }
    return assemble(g, std::move(lr.values), std::move(vecs),
                    std::move(lr.residuals), "lanczos");
}

SpectralResult smallest_eigenpairs(const EpsGraph& g, int k,
                                   std::uint64_t seed, double tol) {
    if (g.cloud.n <= 256) return smallest_eigenpairs_dense(g, k);
    LanczosOptions opt;
    opt.tol = tol;
    return smallest_eigenpairs_lanczos(g, k, seed, opt);
}

std::vector<AnalyticEigenpair> analytic_eigenpairs(const Manifold& M,
                                                   const DensityModel& rho,
                                                   const KernelModel& kernel,
                                                   int k) {
    if (rho.kind != DensityKind::uniform) {
        throw std::invalid_argument(
            "analytic_eigenpairs: closed forms exist only for the uniform "
            "density");
    }
    if (kernel.m != M.intrinsic_dim()) {
        throw std::invalid_argument(
            "analytic_eigenpairs: kernel dimension does not match the "
            "manifold");
    }
    if (k < 1) throw std::invalid_argument("analytic_eigenpairs: k < 1");

    const double sig = sigma_eta(kernel);
    const double r2 = std::sqrt(2.0);
    std::vector<AnalyticEigenpair> out;
    int total = 0;
    auto push = [&](double value, std::vector<ScalarField> fns,
                    std::string label) {
        AnalyticEigenpair p;
        p.eigenvalue = value;
        p.multiplicity = static_cast<int>(fns.size());
        p.eigenspace = std::move(fns);
        p.label = std::move(label);
        total += p.multiplicity;
        out.push_back(std::move(p));
    };

    switch (M.kind()) {
        case ManifoldKind::circle: {
            push(0.0, {[](const Vec4&) { return 1.0; }}, "constant");
            for (int j = 1; total < k; ++j) {
                if (j > 64) {
                    throw std::invalid_argument(
                        "analytic_eigenpairs: catalog covers 129 entries on "
                        "the circle");
                }
                const double lam = sig * j * j / (4.0 * kPi);
                char lab[32];
                std::snprintf(lab, sizeof lab, "frequency %d", j);
                push(lam,
                     {[j, r2](const Vec4& x) {
                          return r2 * std::cos(j * std::atan2(x[1], x[0]));
                      },
                      [j, r2](const Vec4& x) {
                          return r2 * std::sin(j * std::atan2(x[1], x[0]));
                      }},
                     lab);
            }
            break;
        }
        case ManifoldKind::sphere2: {
            if (k > 9) {
                throw std::invalid_argument(
                    "analytic_eigenpairs: catalog covers 9 entries on the "
                    "sphere");
            }
            push(0.0, {[](const Vec4&) { return 1.0; }}, "constant");
            if (total < k) {
                const double s3 = std::sqrt(3.0);
                push(sig / (4.0 * kPi),
                     {[s3](const Vec4& x) { return s3 * x[0]; },
                      [s3](const Vec4& x) { return s3 * x[1]; },
                      [s3](const Vec4& x) { return s3 * x[2]; }},
                     "degree 1");
            }
            if (total < k) {
                const double s5 = std::sqrt(5.0);
                const double s15 = std::sqrt(15.0);
                push(3.0 * sig / (4.0 * kPi),
                     {[s5](const Vec4& x) {
                          return 0.5 * s5 * (3.0 * x[2] * x[2] - 1.0);
                      },
                      [s15](const Vec4& x) { return s15 * x[0] * x[2]; },
                      [s15](const Vec4& x) { return s15 * x[1] * x[2]; },
                      [s15](const Vec4& x) { return s15 * x[0] * x[1]; },
                      [s15](const Vec4& x) {
                          return 0.5 * s15 * (x[0] * x[0] - x[1] * x[1]);
                      }},
                     "degree 2");
            }
            break;
        }
        case ManifoldKind::flat_torus2: {
            if (k > 21) {
                throw std::invalid_argument(
                    "analytic_eigenpairs: catalog covers 21 entries on the "
                    "torus");
            }
            // Angle factors: index 0 is the constant, 2j-1 and 2j are the
            // unit-normalized cosine and sine at frequency j.
            auto factor = [r2](int idx, double theta) {
                if (idx == 0) return 1.0;
                const int j = (idx + 1) / 2;
                return (idx % 2 == 1) ? r2 * std::cos(j * theta)
                                      : r2 * std::sin(j * theta);
            };
            auto mode = [&](int i1, int i2) -> ScalarField {
                return [factor, i1, i2](const Vec4& x) {
                    return factor(i1, std::atan2(x[1], x[0])) *
                           factor(i2, std::atan2(x[3], x[2]));
                };
            };
            auto freq = [](int idx) {
                return idx == 0 ? 0 : (idx + 1) / 2;
            };
            // Distinct values of j1^2 + j2^2 reachable with j <= 2.
            const int sums[] = {0, 1, 2, 4, 5};
            for (int sval : sums) {
                if (total >= k) break;
                std::vector<ScalarField> fns;
                for (int i1 = 0; i1 <= 4; ++i1) {
                    for (int i2 = 0; i2 <= 4; ++i2) {
                        const int f1 = freq(i1);
                        const int f2 = freq(i2);
                        if (f1 * f1 + f2 * f2 != sval) continue;
                        // The constant factor has one representative, not
                        // a cos/sin pair.
                        if ((f1 == 0 && i1 != 0) || (f2 == 0 && i2 != 0)) {
                            continue;
                        }
                        fns.push_back(mode(i1, i2));
                    }
                }
                char lab[40];
                std::snprintf(lab, sizeof lab, "frequency sum %d", sval);
                push(sig * sval / (8.0 * kPi * kPi), std::move(fns), lab);
            }
            break;
        }
    }
    return out;
}

std::vector<EigenCluster> cluster_eigenvalues(
    const std::vector<double>& computed,
    const std::vector<AnalyticEigenpair>& analytic) {
    const int m = static_cast<int>(analytic.size());
    if (m == 0) return {};

    std::vector<double> radius(m);
    for (int j = 0; j < m; ++j) {
        double gap = std::numeric_limits<double>::infinity();
        if (j > 0) {
            gap = std::min(gap,
                           analytic[j].eigenvalue - analytic[j - 1].eigenvalue);
        }
        if (j + 1 < m) {
            gap = std::min(gap,
                           analytic[j + 1].eigenvalue - analytic[j].eigenvalue);
        }
        if (!std::isfinite(gap)) {
            gap = 1.0 + std::fabs(analytic[j].eigenvalue);
        }
        radius[j] = 0.25 * gap;
    }

    std::vector<EigenCluster> out(m);
    for (int j = 0; j < m; ++j) {
        out[j].analytic_index = j;
        out[j].analytic_value = analytic[j].eigenvalue;
    }
    for (std::size_t i = 0; i < computed.size(); ++i) {
        int arg = 0;
        double best = std::fabs(computed[i] - analytic[0].eigenvalue);
        for (int j = 1; j < m; ++j) {
            const double d = std::fabs(computed[i] - analytic[j].eigenvalue);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        if (best <= radius[arg]) {
            out[arg].members.push_back(static_cast<int>(i));
        }
    }
    return out;
}

namespace {

// In-place lower Cholesky factor of a row-major SPD matrix.
void cholesky(std::vector<double>& g, int p) {
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = g[(std::size_t)i * p + j];
            for (int t = 0; t < j; ++t) {
                s -= g[(std::size_t)i * p + t] * g[(std::size_t)j * p + t];
            }
            if (i == j) {
                if (s <= 1e-12) {
                    throw std::runtime_error(
                        "eigenspace_align: eigenspace basis is numerically "
                        "degenerate on this cloud");
                }
                g[(std::size_t)i * p + i] = std::sqrt(s);
            } else {
                g[(std::size_t)i * p + j] = s / g[(std::size_t)j * p + j];
            }
        }
    }
}

void cholesky_solve(const std::vector<double>& l, int p,
                    std::vector<double>& b) {
    for (int i = 0; i < p; ++i) {
        double s = b[i];
        for (int t = 0; t < i; ++t) s -= l[(std::size_t)i * p + t] * b[t];
        b[i] = s / l[(std::size_t)i * p + i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double s = b[i];
        for (int t = i + 1; t < p; ++t) s -= l[(std::size_t)t * p + i] * b[t];
        b[i] = s / l[(std::size_t)i * p + i];
    }
}

} // namespace

AlignReport eigenspace_align(const EpsGraph& g, const SpectralResult& sp,
                             const EigenCluster& cluster,
                             const AnalyticEigenpair& pair) {
    const int n = g.cloud.n;
    const int p = pair.multiplicity;
    if (static_cast<int>(cluster.members.size()) != p) {
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "eigenspace_align: cluster at %.17g has %d members, "
                      "expected multiplicity %d (first computed value %.17g)",
                      pair.eigenvalue,
                      static_cast<int>(cluster.members.size()), p,
                      cluster.members.empty()
                          ? std::nan("")
                          : sp.eigenvalues[cluster.members.front()]);
        throw std::runtime_error(msg);
    }

    std::vector<std::vector<double>> F(p, std::vector<double>(n));
    for (int kk = 0; kk < p; ++kk) {
        for (int i = 0; i < n; ++i) {
            F[kk][i] = pair.eigenspace[kk](g.cloud.point(i));
        }
    }
    std::vector<double> gram((std::size_t)p * p, 0.0);
    for (int a = 0; a < p; ++a) {
        for (int b = a; b < p; ++b) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += F[a][i] * F[b][i];
            s /= n;
            gram[(std::size_t)a * p + b] = s;
            gram[(std::size_t)b * p + a] = s;
        }
    }
    cholesky(gram, p);

    AlignReport rep;
    rep.analytic_value = pair.eigenvalue;
    for (int mi : cluster.members) {
        const std::vector<double>& f = sp.eigenvectors[mi];
        std::vector<double> c(p);
        for (int kk = 0; kk < p; ++kk) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += F[kk][i] * f[i];
            c[kk] = s / n;
        }
        cholesky_solve(gram, p, c);

        // The basis is orthonormal against rho dVol, so the coefficient
        // norm is the exact continuum norm of the projection.
        double mass = 0.0;
        for (double x : c) mass += x * x;
        mass = std::sqrt(mass);
        if (mass < 0.5) {
            char msg[224];
            std::snprintf(msg, sizeof msg,
                          "eigenspace_align: eigenvector at %.17g carries "
                          "only %.3f of its mass in the eigenspace at %.17g",
                          sp.eigenvalues[mi], mass, pair.eigenvalue);
            throw std::runtime_error(msg);
        }
        for (double& x : c) x /= mass;

        std::vector<double> diff(n);
        double linf = 0.0;
        for (int i = 0; i < n; ++i) {
            double ft = 0.0;
            for (int kk = 0; kk < p; ++kk) ft += c[kk] * F[kk][i];
            diff[i] = f[i] - ft;
            linf = std::max(linf, std::fabs(diff[i]));
        }
        const double lip = approx_lipschitz_seminorm(g, diff, g.eps).value;

        rep.computed_values.push_back(sp.eigenvalues[mi]);
        rep.value_errors.push_back(
            std::fabs(sp.eigenvalues[mi] - pair.eigenvalue));
        rep.linf_errors.push_back(linf);
        rep.lip_errors.push_back(lip);
    }
    rep.max_value_error =
        *std::max_element(rep.value_errors.begin(), rep.value_errors.end());
    rep.max_linf_error =
        *std::max_element(rep.linf_errors.begin(), rep.linf_errors.end());
    rep.max_lip_error =
        *std::max_element(rep.lip_errors.begin(), rep.lip_errors.end());
    return rep;
}

} // namespace cloudlap
