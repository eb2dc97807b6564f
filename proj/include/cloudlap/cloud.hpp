#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cloudlap/density.hpp"
#include "cloudlap/manifold.hpp"

namespace cloudlap {

// Immutable sample of n manifold points, stored row-major with the ambient
// dimension as stride. Circle and torus clouds also cache their angle
// coordinates, which back the vectorized distance kernels.
struct Cloud {
    const Manifold* M = nullptr;
    int n = 0;
    int d = 0;
    std::uint64_t seed = 0;
    std::vector<double> pts;
    std::vector<double> theta1;
    std::vector<double> theta2;

    Vec4 point(int i) const {
        Vec4 p;
        for (int k = 0; k < d; ++k) p[k] = pts[static_cast<std::size_t>(i) * d + k];
        return p;
    }
    const double* row(int i) const {
        return pts.data() + static_cast<std::size_t>(i) * d;
    }
};

// i.i.d. sample from the density via rejection against the uniform proposal
// with the closed-form envelope rho_max. Deterministic given the seed.
Cloud sample_cloud(const Manifold& M, const DensityModel& rho, int n,
                   std::uint64_t seed);

// Cloud from explicit points (used by tests); angle caches are filled and
// every point is validated against the embedding constraint.
Cloud cloud_from_points(const Manifold& M, const std::vector<Vec4>& points);

// dist[j] = geodesic distance from cloud point i (or from query q) to every
// cloud point. Uses the vectorized per-manifold kernels; bit-identical to
// calling geodesic_distance pointwise.
void geodesic_distance_row(const Cloud& cloud, int i, double* dist);
void geodesic_distance_row(const Cloud& cloud, const Vec4& q, double* dist);

// CSV with header line `# manifold=<kind> n=<n> d=<d> seed=<seed>` and one
// point per row at 17 significant digits.
void write_cloud_csv(const Cloud& cloud, const std::string& path);

} // namespace cloudlap
