#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cloudlap/cloud.hpp"
#include "cloudlap/kernel.hpp"

namespace cloudlap {

// Uniform cell grid over the ambient bounding box, cell edge = the graph
// radius. Candidate neighbors of a query come from the 3^d (or 5^d for the
// annulus queries) surrounding cells.
struct CellGrid {
    int dims = 0;
    double cell = 0.0;
    double mins[4] = {0.0, 0.0, 0.0, 0.0};
    int ncells[4] = {1, 1, 1, 1};
    // Point indices sorted by (cell key, index); starts[k] is the offset of
    // sorted cell number k inside `order`.
    std::vector<std::int32_t> order;
    std::vector<std::uint64_t> cell_keys; // ascending unique keys
    std::vector<std::int64_t> starts;     // size cell_keys.size() + 1
};

CellGrid build_cell_grid(const Cloud& cloud, double cell);

// Calls visit(j) for every cloud index j whose cell is within `reach` cells
// of the query point in every axis, in deterministic (cell, index) order.
template <typename Visit>
void for_candidates(const CellGrid& grid, const Cloud& cloud, const Vec4& q,
                    int reach, Visit&& visit);

// Weighted eps-neighborhood graph: w_ij = eta(|x_i - x_j| / eps) with the
// ambient Euclidean distance, no diagonal, stored weights all positive.
// Edge arrays are CSR with both directions present and columns ascending.
struct EpsGraph {
    Cloud cloud;
    double eps = 0.0;
    int m = 0; // intrinsic dimension used in the degree scaling
    KernelModel kernel;
    CellGrid grid;

    bool edges_materialized = false;
    std::vector<std::int64_t> rowptr;
    std::vector<std::int32_t> col;
    std::vector<double> w;
    std::vector<double> wdeg; // per-vertex sum of incident weights
    bool connected = false;
    std::int64_t edge_count = 0; // undirected count

    void require_edges() const;
};

// Cell-grid construction. with_edges=false builds only the grid (degree and
// count queries stay available; Laplacian operations require edges).
EpsGraph build_eps_graph(const Cloud& cloud, double eps,
                         const KernelModel& kernel, bool with_edges = true);

// O(n^2) reference construction; must agree with build_eps_graph exactly.
EpsGraph build_eps_graph_brute(const Cloud& cloud, double eps,
                               const KernelModel& kernel);

// Scaled degree at an arbitrary ambient point:
// (1/n) sum_i eps^{-m} eta(|x - x_i| / eps). Zero far from the cloud.
double discrete_degree(const EpsGraph& g, const Vec4& x);

// Same value at a cloud vertex, assembled from the stored row plus the
// vertex's own kernel mass.
double discrete_degree_vertex(const EpsGraph& g, int i);

// #{i : (1-t) eps <= |x_i - x| <= (1+t) eps}; requires eps^2 <= t <= 1.
int annulus_count(const EpsGraph& g, const Vec4& x, double eps, double t);

// #{i : |x_i - x| <= r}; any r >= 0, the cell reach scales with r.
int ball_count(const EpsGraph& g, const Vec4& x, double r);

// Three-column CSV (i, j, w_ij) with i < j, plus a JSON sidecar
// {n, eps, kernel, m, connected}.
void write_graph_csv(const EpsGraph& g, const std::string& path);
void write_graph_sidecar(const EpsGraph& g, const std::string& path);

// Implementation of the candidate walk; kept in the header so callers can
// inline their visit lambdas.
template <typename Visit>
void for_candidates(const CellGrid& grid, const Cloud& cloud, const Vec4& q,
                    int reach, Visit&& visit) {
    int base[4];
    for (int k = 0; k < grid.dims; ++k) {
        const double qk = q[k];
        int c = static_cast<int>(std::floor((qk - grid.mins[k]) / grid.cell));
        base[k] = c;
    }
    int lo[4] = {0, 0, 0, 0};
    int hi[4] = {0, 0, 0, 0};
    for (int k = 0; k < grid.dims; ++k) {
        lo[k] = base[k] - reach < 0 ? 0 : base[k] - reach;
        const int top = grid.ncells[k] - 1;
        hi[k] = base[k] + reach > top ? top : base[k] + reach;
        if (base[k] + reach < 0 || base[k] - reach > top) return;
    }
    int c[4] = {lo[0], lo[1], lo[2], lo[3]};
    for (;;) {
        std::uint64_t key = 0;
        for (int k = 0; k < grid.dims; ++k) {
            key = key * static_cast<std::uint64_t>(grid.ncells[k]) +
                  static_cast<std::uint64_t>(c[k]);
        }
        const auto it = std::lower_bound(grid.cell_keys.begin(),
                                         grid.cell_keys.end(), key);
        if (it != grid.cell_keys.end() && *it == key) {
            const std::size_t cellno =
                static_cast<std::size_t>(it - grid.cell_keys.begin());
            for (std::int64_t p = grid.starts[cellno];
                 p < grid.starts[cellno + 1]; ++p) {
                visit(grid.order[static_cast<std::size_t>(p)]);
            }
        }
        int k = grid.dims - 1;
        for (; k >= 0; --k) {
            if (++c[k] <= hi[k]) break;
            c[k] = lo[k];
        }
        if (k < 0) break;
    }
    (void)cloud;
}

} // namespace cloudlap
