#pragma once

#include <cstdint>
#include <vector>

#include "cloudlap/graph.hpp"

namespace cloudlap {

// Graph functions are plain vectors indexed like the cloud; every operation
// validates the length against the graph it is applied to.

struct Norms {
    double l1 = 0.0;   // (1/n) sum |f_i|
    double l2 = 0.0;   // sqrt((1/n) sum f_i^2)
    double linf = 0.0; // max |f_i|
};

// (Lf)(x_i) = (1/(n eps^{m+2})) sum_j w_ij (f_i - f_j). Exact zero on
// constants; symmetric PSD under the (1/n) sum inner product.
std::vector<double> graph_laplacian_apply(const EpsGraph& g,
                                          const std::vector<double>& f);

// Assembled (D - W) / (n eps^{m+2}), CSR with the diagonal included and
// columns ascending in every row.
struct SparseSym {
    int n = 0;
    std::vector<std::int64_t> rowptr;
    std::vector<std::int32_t> col;
    std::vector<double> val;
};
SparseSym graph_laplacian_matrix(const EpsGraph& g);
std::vector<double> sparse_apply(const SparseSym& a,
                                 const std::vector<double>& f);
std::vector<double> sparse_dense(const SparseSym& a); // row-major n*n

// Kernel-weighted average of f at an ambient point, normalized by the
// degree there; 0 where the degree vanishes. Bounded by [min f, max f]
// whenever the degree is positive.
double interpolate(const EpsGraph& g, const std::vector<double>& f,
                   const Vec4& x);

Norms norms(const std::vector<double>& f);

// sup - inf of f over the cloud points inside the ambient ball B(x, r);
// 0 when the ball holds at most one point.
double oscillation(const EpsGraph& g, const std::vector<double>& f,
                   const Vec4& x, double r);

struct SeminormReport {
    double value = 0.0;
    int pair_i = -1;
    int pair_j = -1;
    double delta = 0.0;
};

// max over vertex pairs of |f_i - f_j| / (d_M(x_i, x_j) + delta), geodesic
// distances, dense O(n^2); records the attaining pair (lowest indices on
// ties).
SeminormReport approx_lipschitz_seminorm(const EpsGraph& g,
                                         const std::vector<double>& f,
                                         double delta);

// ||Lf||_inf / ||f||_inf; equals the eigenvalue when f is an eigenvector.
double lambda_f(const EpsGraph& g, const std::vector<double>& f);

// max over pairs of |f_i - f_j| / ((||f||_inf + ||Lf||_inf) (d_M + eps));
// 0 for constant f.
double global_regularity_constant(const EpsGraph& g,
                                  const std::vector<double>& f);

// Empirical constant of the two-term local bound: over pairs x_i, x_j in
// the geodesic ball B_M(x, r),
//   |f_i - f_j| <= C [ (d_M/r + eps|log eps|/r) sup_{B(x,7r)} |f|
//                    + (r d_M + eps r/|log eps|) sup_{B(x,7r)} |Lf| ],
// returning the smallest C that makes every pair inequality tight.
// Requires at least 2 cloud points inside B_M(x, r).
double interior_regularity_constant(const EpsGraph& g,
                                    const std::vector<double>& f,
                                    const Vec4& x, double r);

struct RegularityReport {
    double lipschitz_constant_emp = 0.0; // [f]_{delta} value
    int pair_i = -1;
    int pair_j = -1;
    double eps_used = 0.0;
    double lambda = 0.0; // ||Lf||_inf / ||f||_inf
    double sup_norm = 0.0;
    double l1_norm = 0.0;
    double l2_norm = 0.0;
};

RegularityReport regularity_report(const EpsGraph& g,
                                   const std::vector<double>& f, double delta);

} // namespace cloudlap
