#pragma once

#include <cstdint>
#include <string>

namespace cloudlap {

// Radial weight profiles. All are nonincreasing on [0, infinity), supported
// on [0, 1], and Lipschitz on [0, 1]; kernels with unbounded support are
// deliberately out of scope.
enum class KernelKind { uniform, triangular, quadratic_taper };

struct KernelModel {
    KernelKind kind;
    int m;                  // dimension the normalization refers to (1 or 2)
    double normalization;   // c with integral of c * profile(|w|) over the
                            // unit ball of R^m equal to 1
    double lipschitz_bound; // Lipschitz constant of eta on [0, 1]

    static KernelModel make(KernelKind kind, int m);

    // Normalized kernel value; zero for r > 1. r must be nonnegative.
    double eta(double r) const;

    // Unnormalized shape on [0, 1].
    static double profile(KernelKind kind, double r);
};

// Second directional moment: the integral of <w, e1>^2 eta(|w|) over R^m,
// reduced to (omega_{m-1}/m) * integral_0^1 eta(r) r^{m+1} dr and evaluated
// by doubling Gauss-Legendre panels until the relative change is below 1e-10.
double sigma_eta(const KernelModel& kernel);

// Monte Carlo estimate of the same moment over the unit ball, used as an
// independent oracle. Returns the estimate; *standard_error receives the
// sample standard error when non-null.
double sigma_eta_mc(const KernelModel& kernel, std::uint64_t samples,
                    std::uint64_t seed, double* standard_error);

KernelKind kernel_kind_from_string(const std::string& name);
std::string to_string(KernelKind kind);

} // namespace cloudlap
