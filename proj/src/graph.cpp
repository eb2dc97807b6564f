#include "cloudlap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "cloudlap/simd.hpp"

namespace cloudlap {
namespace {

// Canonical squared distance: coordinates accumulate in increasing order,
// one rounding per step. The simd dist2 kernels reproduce this exactly.
inline double dist2(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

double eps_power_m(double eps, int m) { return m == 1 ? eps : eps * eps; }

void compute_connected(EpsGraph& g) {
    const int n = g.cloud.n;
    std::vector<char> seen(n, 0);
    std::vector<std::int32_t> stack;
    stack.push_back(0);
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        const std::int32_t i = stack.back();
        stack.pop_back();
        for (std::int64_t p = g.rowptr[i]; p < g.rowptr[i + 1]; ++p) {
            const std::int32_t j = g.col[static_cast<std::size_t>(p)];
            if (!seen[j]) {
                seen[j] = 1;
                ++visited;
                stack.push_back(j);
            }
        }
    }
    g.connected = visited == n;
}

void assemble_csr(EpsGraph& g, const std::vector<std::int32_t>& ei,
                  const std::vector<std::int32_t>& ej,
                  const std::vector<double>& ew) {
    const int n = g.cloud.n;
    const std::size_t ne = ei.size();
    g.rowptr.assign(n + 1, 0);
    for (std::size_t e = 0; e < ne; ++e) {
        ++g.rowptr[ei[e] + 1];
        ++g.rowptr[ej[e] + 1];
    }
    for (int i = 0; i < n; ++i) g.rowptr[i + 1] += g.rowptr[i];
    g.col.resize(2 * ne);
    g.w.resize(2 * ne);
    std::vector<std::int64_t> cursor(g.rowptr.begin(), g.rowptr.end() - 1);
    for (std::size_t e = 0; e < ne; ++e) {
        const std::int64_t pi = cursor[ei[e]]++;
        g.col[static_cast<std::size_t>(pi)] = ej[e];
        g.w[static_cast<std::size_t>(pi)] = ew[e];
        const std::int64_t pj = cursor[ej[e]]++;
        g.col[static_cast<std::size_t>(pj)] = ei[e];
        g.w[static_cast<std::size_t>(pj)] = ew[e];
    }
    // Canonical ascending column order within each row.
    std::vector<std::int32_t> perm;
    std::vector<std::int32_t> tmp_col;
    std::vector<double> tmp_w;
    for (int i = 0; i < n; ++i) {
        const std::int64_t lo = g.rowptr[i];
        const std::int64_t hi = g.rowptr[i + 1];
        const std::size_t len = static_cast<std::size_t>(hi - lo);
        if (len < 2) continue;
        perm.resize(len);
        std::iota(perm.begin(), perm.end(), 0);
        const std::int32_t* cols = g.col.data() + lo;
        std::sort(perm.begin(), perm.end(),
                  [cols](std::int32_t a, std::int32_t b) {
                      return cols[a] < cols[b];
                  });
        tmp_col.assign(g.col.begin() + lo, g.col.begin() + hi);
        tmp_w.assign(g.w.begin() + lo, g.w.begin() + hi);
        for (std::size_t k = 0; k < len; ++k) {
            g.col[static_cast<std::size_t>(lo) + k] = tmp_col[perm[k]];
            g.w[static_cast<std::size_t>(lo) + k] = tmp_w[perm[k]];
        }
    }
    g.wdeg.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::int64_t p = g.rowptr[i]; p < g.rowptr[i + 1]; ++p) {
            s += g.w[static_cast<std::size_t>(p)];
        }
        g.wdeg[i] = s;
    }
    g.edge_count = static_cast<std::int64_t>(ne);
    g.edges_materialized = true;
    compute_connected(g);
}

} // namespace

CellGrid build_cell_grid(const Cloud& cloud, double cell) {
    if (cell <= 0.0) throw std::invalid_argument("cell size must be positive");
    CellGrid grid;
    grid.dims = cloud.d;
    grid.cell = cell;
    const int n = cloud.n;
    for (int k = 0; k < grid.dims; ++k) {
        double lo = cloud.pts[k];
        double hi = cloud.pts[k];
        for (int i = 1; i < n; ++i) {
            const double v = cloud.pts[static_cast<std::size_t>(i) * cloud.d + k];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        grid.mins[k] = lo;
        grid.ncells[k] =
            std::max(1, static_cast<int>(std::floor((hi - lo) / cell)) + 1);
    }
    std::vector<std::uint64_t> key(n);
    for (int i = 0; i < n; ++i) {
        const double* p = cloud.row(i);
        std::uint64_t k64 = 0;
        for (int k = 0; k < grid.dims; ++k) {
            int c = static_cast<int>(std::floor((p[k] - grid.mins[k]) / cell));
            if (c < 0) c = 0;
            if (c >= grid.ncells[k]) c = grid.ncells[k] - 1;
            k64 = k64 * static_cast<std::uint64_t>(grid.ncells[k]) +
                  static_cast<std::uint64_t>(c);
        }
        key[i] = k64;
    }
    grid.order.resize(n);
    std::iota(grid.order.begin(), grid.order.end(), 0);
    std::sort(grid.order.begin(), grid.order.end(),
              [&key](std::int32_t a, std::int32_t b) {
                  return key[a] != key[b] ? key[a] < key[b] : a < b;
              });
    for (int p = 0; p < n; ++p) {
        const std::uint64_t k64 = key[grid.order[p]];
        if (p == 0 || k64 != grid.cell_keys.back()) {
            grid.cell_keys.push_back(k64);
            grid.starts.push_back(p);
        }
    }
    grid.starts.push_back(n);
    return grid;
}

void EpsGraph::require_edges() const {
    if (!edges_materialized) {
        throw std::logic_error(
            "graph was built without materialized edges; rebuild with "
            "with_edges=true for Laplacian operations");
    }
}

EpsGraph build_eps_graph(const Cloud& cloud, double eps,
                         const KernelModel& kernel, bool with_edges) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (cloud.n < 1) throw std::invalid_argument("need at least 1 point");
    if (kernel.m != cloud.M->intrinsic_dim()) {
        throw std::invalid_argument(
            "kernel dimension does not match the manifold");
    }
    EpsGraph g;
    g.cloud = cloud;
    g.eps = eps;
    g.m = cloud.M->intrinsic_dim();
    g.kernel = kernel;
    g.grid = build_cell_grid(g.cloud, eps);
    if (!with_edges) return g;

    const int n = g.cloud.n;
    const int d = g.cloud.d;
    const double eps2 = eps * eps;
    std::vector<std::int32_t> ei;
    std::vector<std::int32_t> ej;
    std::vector<double> ew;
    for (int i = 0; i < n; ++i) {
        const double* pi = g.cloud.row(i);
        const Vec4 q = g.cloud.point(i);
        for_candidates(g.grid, g.cloud, q, 1, [&](std::int32_t j) {
            if (j <= i) return;
            const double d2 = dist2(pi, g.cloud.row(j), d);
            if (d2 > eps2) return;
            const double wij = g.kernel.eta(std::sqrt(d2) / eps);
            if (wij > 0.0) {
                ei.push_back(i);
                ej.push_back(j);
                ew.push_back(wij);
            }
        });
    }
    assemble_csr(g, ei, ej, ew);
    return g;
}

EpsGraph build_eps_graph_brute(const Cloud& cloud, double eps,
                               const KernelModel& kernel) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (cloud.n < 1) throw std::invalid_argument("need at least 1 point");
    EpsGraph g;
    g.cloud = cloud;
    g.eps = eps;
    g.m = cloud.M->intrinsic_dim();
    g.kernel = kernel;
    g.grid = build_cell_grid(g.cloud, eps);
    const int n = g.cloud.n;
    const int d = g.cloud.d;
    const double eps2 = eps * eps;
    std::vector<double> row(n);
    std::vector<std::int32_t> ei;
    std::vector<std::int32_t> ej;
    std::vector<double> ew;
    const auto& ops = simd::active_ops();
    for (int i = 0; i < n; ++i) {
        ops.dist2_rows(g.cloud.row(i), g.cloud.pts.data(),
                       static_cast<std::size_t>(n),
                       static_cast<std::size_t>(d), row.data());
        for (int j = i + 1; j < n; ++j) {
            if (row[j] > eps2) continue;
            const double wij = g.kernel.eta(std::sqrt(row[j]) / eps);
            if (wij > 0.0) {
                ei.push_back(i);
                ej.push_back(j);
                ew.push_back(wij);
            }
        }
    }
    assemble_csr(g, ei, ej, ew);
    return g;
}

double discrete_degree(const EpsGraph& g, const Vec4& x) {
    const int d = g.cloud.d;
    const double eps2 = g.eps * g.eps;
    double xq[4] = {x[0], x[1], x[2], x[3]};
    double s = 0.0;
    for_candidates(g.grid, g.cloud, x, 1, [&](std::int32_t j) {
        const double d2 = dist2(xq, g.cloud.row(j), d);
        if (d2 <= eps2) s += g.kernel.eta(std::sqrt(d2) / g.eps);
    });
    return s / (static_cast<double>(g.cloud.n) * eps_power_m(g.eps, g.m));
}

double discrete_degree_vertex(const EpsGraph& g, int i) {
    g.require_edges();
    const double s = g.wdeg[i] + g.kernel.eta(0.0);
    return s / (static_cast<double>(g.cloud.n) * eps_power_m(g.eps, g.m));
}

int annulus_count(const EpsGraph& g, const Vec4& x, double eps, double t) {
    if (!(t >= eps * eps && t <= 1.0)) {
        throw std::invalid_argument("annulus width must satisfy eps^2 <= t <= 1");
    }
    if (eps > 2.0 * g.eps) {
        throw std::invalid_argument("annulus radius exceeds the grid reach");
    }
    const double lo = (1.0 - t) * eps;
    const double hi = (1.0 + t) * eps;
    const double lo2 = lo * lo;
    const double hi2 = hi * hi;
    const int d = g.cloud.d;
    double xq[4] = {x[0], x[1], x[2], x[3]};
    const int reach = static_cast<int>(std::ceil(hi / g.grid.cell)) + 1;
    int count = 0;
    for_candidates(g.grid, g.cloud, x, reach, [&](std::int32_t j) {
        const double d2 = dist2(xq, g.cloud.row(j), d);
        if (d2 >= lo2 && d2 <= hi2) ++count;
    });
    return count;
}

int ball_count(const EpsGraph& g, const Vec4& x, double r) {
    if (r < 0.0) throw std::invalid_argument("negative radius");
    const double r2 = r * r;
    const int d = g.cloud.d;
    double xq[4] = {x[0], x[1], x[2], x[3]};
    const int reach = static_cast<int>(std::ceil(r / g.grid.cell)) + 1;
    int count = 0;
    for_candidates(g.grid, g.cloud, x, reach, [&](std::int32_t j) {
        const double d2 = dist2(xq, g.cloud.row(j), d);
        if (d2 <= r2) ++count;
    });
    return count;
}

void write_graph_csv(const EpsGraph& g, const std::string& path) {
    g.require_edges();
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    std::fprintf(f, "i,j,w\n");
    for (int i = 0; i < g.cloud.n; ++i) {
        for (std::int64_t p = g.rowptr[i]; p < g.rowptr[i + 1]; ++p) {
            const std::int32_t j = g.col[static_cast<std::size_t>(p)];
            if (j > i) {
                std::fprintf(f, "%d,%d,%.17g\n", i, j,
                             g.w[static_cast<std::size_t>(p)]);
            }
        }
    }
    std::fclose(f);
}

void write_graph_sidecar(const EpsGraph& g, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    std::fprintf(f,
                 "{\n  \"n\": %d,\n  \"eps\": %.17g,\n  \"kernel\": \"%s\",\n"
                 "  \"m\": %d,\n  \"connected\": %s\n}\n",
                 g.cloud.n, g.eps, to_string(g.kernel.kind).c_str(), g.m,
                 g.connected ? "true" : "false");
    std::fclose(f);
}

} // namespace cloudlap
