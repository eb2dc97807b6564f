#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cloudlap/discrete_ops.hpp"
#include "cloudlap/graph.hpp"
#include "cloudlap/nonlocal.hpp"

namespace cloudlap {

// Full symmetric eigendecomposition, values ascending. Row k of `vectors`
// (length n, starting at k*n) is the unit eigenvector of values[k].
struct EighResult {
    int n = 0;
    std::vector<double> values;
    std::vector<double> vectors;
};

// Cyclic Jacobi on a dense symmetric matrix (row-major). Deterministic
// rotation order, no threading, so results are bit-stable. Intended as the
// small-n oracle; throws std::invalid_argument for n > 1024.
EighResult dense_eigh(std::vector<double> a, int n);

// Eigendecomposition of a symmetric tridiagonal matrix in place: QL with
// implicit shifts. diag holds the diagonal (becomes the eigenvalues,
// ascending), sub the n-1 subdiagonal entries. z is a row-major nrows x n
// matrix whose rows accumulate the transposed rotations; pass the identity
// to receive eigenvectors as columns indexed like diag. Throws
// std::runtime_error if an eigenvalue fails to converge.
void tridiag_eigh(std::vector<double>& diag, std::vector<double>& sub,
                  std::vector<double>& z, int n, int nrows);

struct LanczosOptions {
    int max_iter = 700;   // also capped at n
    int checkpoint = 50;  // convergence test cadence, in iterations
    double tol = 1e-10;   // residual target, relative to max(1, |theta|)
};

struct LanczosResult {
    int n = 0;
    int iterations = 0;
    std::vector<double> values;     // k smallest, ascending
    std::vector<double> vectors;    // row k: unit Ritz vector for values[k]
    std::vector<double> residuals;  // |A v - theta v|_2 per pair
};

// k smallest eigenpairs of a sparse symmetric matrix by Lanczos with full
// reorthogonalization (classical Gram-Schmidt applied twice per step). The
// start vector is drawn from Rng(seed), so runs are reproducible. Throws
// std::runtime_error with the best residual when the cap is hit before all
// k pairs meet the tolerance.
LanczosResult lanczos_smallest(const SparseSym& a, int k, std::uint64_t seed,
                               const LanczosOptions& opt = {});

// Eigenpairs of the graph Laplacian of g. Eigenvectors are normalized in
// the empirical inner product (mean of squares equal to 1) and sign-fixed
// so the entry of largest magnitude is positive. residuals[k] is
// |A v - lambda v|_2 for the Euclidean-unit v.
struct SpectralResult {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
    std::vector<double> residuals;
    std::string solver;
};

SpectralResult smallest_eigenpairs_dense(const EpsGraph& g, int k);
SpectralResult smallest_eigenpairs_lanczos(const EpsGraph& g, int k,
                                           std::uint64_t seed,
                                           const LanczosOptions& opt = {});
// Dispatches on size: dense Jacobi when n <= 256, Lanczos otherwise.
SpectralResult smallest_eigenpairs(const EpsGraph& g, int k,
                                   std::uint64_t seed, double tol = 1e-10);

// One closed-form eigenvalue of the weighted limit operator together with
// an orthonormal basis of its eigenspace (unit norm against the sampling
// measure rho dVol).
struct AnalyticEigenpair {
    double eigenvalue = 0.0;
    int multiplicity = 0;
    std::vector<ScalarField> eigenspace;
    std::string label;
};

// Catalog of low eigenpairs for the uniform density, smallest first,
// covering at least k entries counted with multiplicity. Throws
// std::invalid_argument for non-uniform densities and when k exceeds the
// catalog (9 on the sphere, 21 on the torus).
std::vector<AnalyticEigenpair> analytic_eigenpairs(const Manifold& M,
                                                   const DensityModel& rho,
                                                   const KernelModel& kernel,
                                                   int k);

// Computed eigenvalues grouped around one catalog value. A value joins the
// group when it lies within a quarter of the gap separating the catalog
// value from its nearest distinct neighbor.
struct EigenCluster {
    int analytic_index = -1;
    double analytic_value = 0.0;
    std::vector<int> members;  // indices into the computed spectrum
};

std::vector<EigenCluster> cluster_eigenvalues(
    const std::vector<double>& computed,
    const std::vector<AnalyticEigenpair>& analytic);

// Per-eigenvector comparison against the best matching unit function in
// the analytic eigenspace.
struct AlignReport {
    double analytic_value = 0.0;
    std::vector<double> computed_values;
    std::vector<double> value_errors;  // |lambda - analytic_value|
    std::vector<double> linf_errors;   // sup over the cloud of |f - ftilde|
    std::vector<double> lip_errors;    // [f - ftilde] at delta = eps
    double max_value_error = 0.0;
    double max_linf_error = 0.0;
    double max_lip_error = 0.0;
};

// Projects each computed eigenvector of the cluster onto the analytic
// eigenspace (least squares in the empirical inner product), rescales the
// projection to a unit eigenfunction, and reports pointwise and Lipschitz
// gaps. Throws std::runtime_error when the cluster size differs from the
// catalog multiplicity or when a vector has less than half its mass in the
// eigenspace.
AlignReport eigenspace_align(const EpsGraph& g, const SpectralResult& sp,
                             const EigenCluster& cluster,
                             const AnalyticEigenpair& pair);

} // namespace cloudlap
