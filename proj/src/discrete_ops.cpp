#include "cloudlap/discrete_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cloudlap/simd.hpp"
#include "cloudlap/threads.hpp"

namespace cloudlap {
namespace {

void check_shape(const EpsGraph& g, const std::vector<double>& f) {
    if (static_cast<int>(f.size()) != g.cloud.n) {
        throw std::invalid_argument("function length does not match the graph");
    }
}

double lap_scale(const EpsGraph& g) {
    double epow = g.eps * g.eps; // eps^{m+2} built by repeated multiplication
    for (int k = 0; k < g.m; ++k) epow *= g.eps;
    return 1.0 / (static_cast<double>(g.cloud.n) * epow);
}

} // namespace

std::vector<double> graph_laplacian_apply(const EpsGraph& g,
                                          const std::vector<double>& f) {
    check_shape(g, f);
    g.require_edges();
    const int n = g.cloud.n;
    const double scale = lap_scale(g);
    const auto& ops = simd::active_ops();
    std::vector<double> out(n);
    parallel_for_blocks(static_cast<std::size_t>(n), 512,
                        [&](std::size_t lo_i, std::size_t hi_i) {
        for (std::size_t i = lo_i; i < hi_i; ++i) {
            const std::int64_t lo = g.rowptr[i];
            const std::size_t len =
                static_cast<std::size_t>(g.rowptr[i + 1] - lo);
            const double s = ops.lap_row(f[i], g.w.data() + lo,
                                         g.col.data() + lo, f.data(), len);
            out[i] = scale * s;
        }
    });
    return out;
}

SparseSym graph_laplacian_matrix(const EpsGraph& g) {
    g.require_edges();
    const int n = g.cloud.n;
    const double scale = lap_scale(g);
    SparseSym a;
    a.n = n;
    a.rowptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        a.rowptr[i + 1] = a.rowptr[i] + (g.rowptr[i + 1] - g.rowptr[i]) + 1;
    }
    a.col.resize(static_cast<std::size_t>(a.rowptr[n]));
    a.val.resize(static_cast<std::size_t>(a.rowptr[n]));
    for (int i = 0; i < n; ++i) {
        std::int64_t q = a.rowptr[i];
        bool placed = false;
        for (std::int64_t p = g.rowptr[i]; p < g.rowptr[i + 1]; ++p) {
            const std::int32_t j = g.col[static_cast<std::size_t>(p)];
            if (!placed && j > i) {
                a.col[static_cast<std::size_t>(q)] = i;
                a.val[static_cast<std::size_t>(q)] = scale * g.wdeg[i];
                ++q;
                placed = true;
            }
            a.col[static_cast<std::size_t>(q)] = j;
            a.val[static_cast<std::size_t>(q)] =
                -scale * g.w[static_cast<std::size_t>(p)];
            ++q;
        }
        if (!placed) {
            a.col[static_cast<std::size_t>(q)] = i;
            a.val[static_cast<std::size_t>(q)] = scale * g.wdeg[i];
        }
    }
    return a;
}

std::vector<double> sparse_apply(const SparseSym& a,
                                 const std::vector<double>& f) {
    if (static_cast<int>(f.size()) != a.n) {
        throw std::invalid_argument("function length does not match the matrix");
    }
    const auto& ops = simd::active_ops();
    std::vector<double> out(a.n);
    for (int i = 0; i < a.n; ++i) {
        const std::int64_t lo = a.rowptr[i];
        const std::size_t len = static_cast<std::size_t>(a.rowptr[i + 1] - lo);
        out[i] = ops.row_gather_dot(a.val.data() + lo, a.col.data() + lo,
                                    f.data(), len);
    }
    return out;
}

std::vector<double> sparse_dense(const SparseSym& a) {
    std::vector<double> dense(static_cast<std::size_t>(a.n) * a.n, 0.0);
    for (int i = 0; i < a.n; ++i) {
        for (std::int64_t p = a.rowptr[i]; p < a.rowptr[i + 1]; ++p) {
            dense[static_cast<std::size_t>(i) * a.n +
                  a.col[static_cast<std::size_t>(p)]] =
                a.val[static_cast<std::size_t>(p)];
        }
    }
    return dense;
}

double interpolate(const EpsGraph& g, const std::vector<double>& f,
                   const Vec4& x) {
    check_shape(g, f);
    const int d = g.cloud.d;
    const double eps2 = g.eps * g.eps;
    double xq[4] = {x[0], x[1], x[2], x[3]};
    double num = 0.0;
    double den = 0.0;
    for_candidates(g.grid, g.cloud, x, 1, [&](std::int32_t j) {
        double d2 = 0.0;
        const double* p = g.cloud.row(j);
        for (int k = 0; k < d; ++k) {
            const double diff = xq[k] - p[k];
            d2 += diff * diff;
        }
        if (d2 > eps2) return;
        const double wj = g.kernel.eta(std::sqrt(d2) / g.eps);
        num += wj * f[j];
        den += wj;
    });
    // The common 1/(n eps^m) factor cancels between the weighted sum and
    // the degree; only the zero-degree convention needs the raw mass.
    return den > 0.0 ? num / den : 0.0;
}

Norms norms(const std::vector<double>& f) {
    Norms out;
    const std::size_t n = f.size();
    if (n == 0) return out;
    double s1 = 0.0;
    double s2 = 0.0;
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(f[i]);
        s1 += a;
        s2 += f[i] * f[i];
        if (a > mx) mx = a;
    }
    out.l1 = s1 / static_cast<double>(n);
    out.l2 = std::sqrt(s2 / static_cast<double>(n));
    out.linf = mx;
    return out;
}

double oscillation(const EpsGraph& g, const std::vector<double>& f,
                   const Vec4& x, double r) {
    check_shape(g, f);
    if (r < 0.0) throw std::invalid_argument("negative radius");
    const double r2 = r * r;
    const int d = g.cloud.d;
    double xq[4] = {x[0], x[1], x[2], x[3]};
    const int reach = static_cast<int>(std::ceil(r / g.grid.cell)) + 1;
    int inside = 0;
    double lo = 0.0;
    double hi = 0.0;
    for_candidates(g.grid, g.cloud, x, reach, [&](std::int32_t j) {
        double d2 = 0.0;
        const double* p = g.cloud.row(j);
        for (int k = 0; k < d; ++k) {
            const double diff = xq[k] - p[k];
            d2 += diff * diff;
        }
        if (d2 > r2) return;
        if (inside == 0) {
            lo = hi = f[j];
        } else {
            lo = std::min(lo, f[j]);
            hi = std::max(hi, f[j]);
        }
        ++inside;
    });
    return inside <= 1 ? 0.0 : hi - lo;
}

SeminormReport approx_lipschitz_seminorm(const EpsGraph& g,
                                         const std::vector<double>& f,
                                         double delta) {
    check_shape(g, f);
    if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
    const int n = g.cloud.n;
    SeminormReport rep;
    rep.delta = delta;
    const auto& ops = simd::active_ops();
    const std::size_t grain = 32;
    const std::size_t nblocks = (static_cast<std::size_t>(n) + grain - 1) / grain;
    std::vector<double> block_best(nblocks, 0.0);
    std::vector<int> block_arg(nblocks, -1);
    parallel_for_blocks(static_cast<std::size_t>(n), grain,
                        [&](std::size_t lo, std::size_t hi) {
        std::vector<double> dist(n);
        double best = 0.0;
        int arg = -1;
        for (std::size_t i = lo; i < hi; ++i) {
            geodesic_distance_row(g.cloud, static_cast<int>(i), dist.data());
            const double row = ops.ratio_max(f[i], f.data(), dist.data(),
                                             delta, static_cast<std::size_t>(n),
                                             i);
            if (row > best) {
                best = row;
                arg = static_cast<int>(i);
            }
        }
        block_best[lo / grain] = best;
        block_arg[lo / grain] = arg;
    });
    int best_i = -1;
    double best = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        if (block_best[b] > best) {
            best = block_best[b];
            best_i = block_arg[b];
        }
    }
    if (best_i < 0) return rep; // constant f: value 0, no pair
    std::vector<double> dist(n);
    geodesic_distance_row(g.cloud, best_i, dist.data());
    for (int j = 0; j < n; ++j) {
        if (j == best_i) continue;
        const double r = std::fabs(f[best_i] - f[j]) / (dist[j] + delta);
        if (r == best) {
            rep.value = best;
            rep.pair_i = best_i;
            rep.pair_j = j;
            return rep;
        }
    }
    // Unreachable unless the rescan arithmetic diverges from ratio_max.
    throw std::logic_error("seminorm argmax rescan failed");
}

double lambda_f(const EpsGraph& g, const std::vector<double>& f) {
    check_shape(g, f);
    const Norms nf = norms(f);
    if (nf.linf == 0.0) throw std::invalid_argument("zero function");
    const Norms nl = norms(graph_laplacian_apply(g, f));
    return nl.linf / nf.linf;
}

double global_regularity_constant(const EpsGraph& g,
                                  const std::vector<double>& f) {
    check_shape(g, f);
    const SeminormReport sem = approx_lipschitz_seminorm(g, f, g.eps);
    if (sem.value == 0.0) return 0.0;
    const double supf = norms(f).linf;
    const double supl = norms(graph_laplacian_apply(g, f)).linf;
    return sem.value / (supf + supl);
}

double interior_regularity_constant(const EpsGraph& g,
                                    const std::vector<double>& f,
                                    const Vec4& x, double r) {
    check_shape(g, f);
    if (r <= 0.0) throw std::invalid_argument("radius must be positive");
    const int n = g.cloud.n;
    std::vector<double> dist(n);
    geodesic_distance_row(g.cloud, x, dist.data());
    std::vector<std::int32_t> ball;
    double supf7 = 0.0;
    double supl7 = 0.0;
    const std::vector<double> lf = graph_laplacian_apply(g, f);
    for (int i = 0; i < n; ++i) {
        if (dist[i] <= r) ball.push_back(i);
        if (dist[i] <= 7.0 * r) {
            supf7 = std::max(supf7, std::fabs(f[i]));
            supl7 = std::max(supl7, std::fabs(lf[i]));
        }
    }
    if (ball.size() < 2) {
        throw std::invalid_argument("fewer than 2 cloud points in the ball");
    }
    const double eps = g.eps;
    const double le = std::fabs(std::log(eps));
    const double f_offset = eps * le / r;
    const double l_offset = eps * r / le;
    double best = 0.0;
    const Manifold& M = *g.cloud.M;
    for (std::size_t a = 0; a + 1 < ball.size(); ++a) {
        const Vec4 pa = g.cloud.point(ball[a]);
        for (std::size_t b = a + 1; b < ball.size(); ++b) {
            const double num = std::fabs(f[ball[a]] - f[ball[b]]);
            if (num == 0.0) continue;
            const double dm = M.geodesic_distance(pa, g.cloud.point(ball[b]));
            const double den = (dm / r + f_offset) * supf7 +
                               (r * dm + l_offset) * supl7;
            if (den > 0.0) best = std::max(best, num / den);
        }
    }
    return best;
}

RegularityReport regularity_report(const EpsGraph& g,
                                   const std::vector<double>& f,
                                   double delta) {
    check_shape(g, f);
    RegularityReport rep;
    const Norms nf = norms(f);
    rep.sup_norm = nf.linf;
    rep.l1_norm = nf.l1;
    rep.l2_norm = nf.l2;
    rep.eps_used = g.eps;
    const SeminormReport sem = approx_lipschitz_seminorm(g, f, delta);
    rep.lipschitz_constant_emp = sem.value;
    rep.pair_i = sem.pair_i;
    rep.pair_j = sem.pair_j;
    rep.lambda = nf.linf > 0.0 ? lambda_f(g, f) : 0.0;
    return rep;
}

} // namespace cloudlap
