#include "cloudlap/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "cloudlap/quadrature.hpp"
#include "cloudlap/rng.hpp"

namespace cloudlap {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Surface measure of the unit sphere S^{m-1}.
double omega(int m) { return m == 1 ? 2.0 : 2.0 * kPi; }

} // namespace

double KernelModel::profile(KernelKind kind, double r) {
    if (r > 1.0) return 0.0;
    switch (kind) {
        case KernelKind::uniform: return 1.0;
        case KernelKind::triangular: return 1.0 - r;
        case KernelKind::quadratic_taper: return 1.0 - r * r;
    }
    return 0.0;
}

KernelModel KernelModel::make(KernelKind kind, int m) {
    if (m != 1 && m != 2) {
        throw std::invalid_argument("kernel dimension must be 1 or 2");
    }
    KernelModel k;
    k.kind = kind;
    k.m = m;
    switch (kind) {
        case KernelKind::uniform:
            k.normalization = m == 1 ? 0.5 : 1.0 / kPi;
            k.lipschitz_bound = 0.0;
            break;
        case KernelKind::triangular:
            k.normalization = m == 1 ? 1.0 : 3.0 / kPi;
            k.lipschitz_bound = k.normalization;
            break;
        case KernelKind::quadratic_taper:
            k.normalization = m == 1 ? 0.75 : 2.0 / kPi;
            k.lipschitz_bound = 2.0 * k.normalization;
            break;
    }
    return k;
}

double KernelModel::eta(double r) const {
    if (r > 1.0) return 0.0;
    return normalization * profile(kind, r);
}

double sigma_eta(const KernelModel& kernel) {
    const int m = kernel.m;
    const double radial = integrate_adaptive(
        [&](double r) { return kernel.eta(r) * std::pow(r, m + 1); }, 0.0,
        1.0, 1e-12);
    return omega(m) / m * radial;
}

double sigma_eta_mc(const KernelModel& kernel, std::uint64_t samples,
                    std::uint64_t seed, double* standard_error) {
    // Uniform proposal over the unit ball; the integral of w1^2 eta(|w|)
    // equals ball_volume * E[w1^2 eta(|w|)].
    Rng rng(seed, 0x5157u);
    const int m = kernel.m;
    const double ball_volume = m == 1 ? 2.0 : kPi;
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        double w1 = 0.0;
        double rr = 0.0;
        if (m == 1) {
            w1 = rng.sym();
            rr = std::fabs(w1);
        } else {
            double w2 = 0.0;
            do {
                w1 = rng.sym();
                w2 = rng.sym();
                rr = w1 * w1 + w2 * w2;
            } while (rr > 1.0);
            rr = std::sqrt(rr);
        }
        const double v = ball_volume * w1 * w1 * kernel.eta(rr);
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    if (standard_error != nullptr) {
        const double var = std::max(0.0, sumsq / n - mean * mean);
        *standard_error = std::sqrt(var / n);
    }
    return mean;
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "uniform") return KernelKind::uniform;
    if (name == "triangular") return KernelKind::triangular;
    if (name == "quadratic_taper") return KernelKind::quadratic_taper;
    throw std::invalid_argument(
        "unknown kernel '" + name +
        "' (expected uniform, triangular, quadratic_taper)");
}

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::uniform: return "uniform";
        case KernelKind::triangular: return "triangular";
        case KernelKind::quadratic_taper: return "quadratic_taper";
    }
    return "?";
}

} // namespace cloudlap
