#include "cloudlap/cloud.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cloudlap/simd.hpp"

namespace cloudlap {
namespace {

void fill_angle_cache(Cloud& c) {
    const int n = c.n;
    switch (c.M->kind()) {
        case ManifoldKind::circle:
            c.theta1.resize(n);
            for (int i = 0; i < n; ++i) {
                const double* p = c.row(i);
                c.theta1[i] = std::atan2(p[1], p[0]);
            }
            break;
        case ManifoldKind::flat_torus2:
            c.theta1.resize(n);
            c.theta2.resize(n);
            for (int i = 0; i < n; ++i) {
                const double* p = c.row(i);
                c.theta1[i] = std::atan2(p[1], p[0]);
                c.theta2[i] = std::atan2(p[3], p[2]);
            }
            break;
        case ManifoldKind::sphere2:
            break;
    }
}

} // namespace

Cloud sample_cloud(const Manifold& M, const DensityModel& rho, int n,
                   std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("cloud size must be >= 1");
    if (rho.M != &M) {
        throw std::invalid_argument("density belongs to a different manifold");
    }
    Cloud c;
    c.M = &M;
    c.n = n;
    c.d = M.ambient_dim();
    c.seed = seed;
    c.pts.resize(static_cast<std::size_t>(n) * c.d);
    Rng rng(seed);
    const double envelope = rho.rho_max();
    for (int i = 0; i < n; ++i) {
        Vec4 p;
        for (;;) {
            p = M.random_point(rng);
            if (rho.kind == DensityKind::uniform) break;
            if (rng.u01() * envelope <= rho.rho(p)) break;
        }
        for (int k = 0; k < c.d; ++k) {
            c.pts[static_cast<std::size_t>(i) * c.d + k] = p[k];
        }
    }
    fill_angle_cache(c);
    return c;
}

Cloud cloud_from_points(const Manifold& M, const std::vector<Vec4>& points) {
    if (points.empty()) throw std::invalid_argument("empty point list");
    Cloud c;
    c.M = &M;
    c.n = static_cast<int>(points.size());
    c.d = M.ambient_dim();
    c.seed = 0;
    c.pts.resize(static_cast<std::size_t>(c.n) * c.d);
    for (int i = 0; i < c.n; ++i) {
        M.check_point(points[i]);
        for (int k = 0; k < c.d; ++k) {
            c.pts[static_cast<std::size_t>(i) * c.d + k] = points[i][k];
        }
    }
    fill_angle_cache(c);
    return c;
}

void geodesic_distance_row(const Cloud& cloud, const Vec4& q, double* dist) {
    const auto& ops = simd::active_ops();
    const std::size_t n = static_cast<std::size_t>(cloud.n);
    switch (cloud.M->kind()) {
        case ManifoldKind::circle: {
            const double tq = std::atan2(q[1], q[0]);
            ops.circle_dist(tq, cloud.theta1.data(), n, dist);
            break;
        }
        case ManifoldKind::flat_torus2: {
            const double t1 = std::atan2(q[1], q[0]);
            const double t2 = std::atan2(q[3], q[2]);
            ops.torus_dist(t1, t2, cloud.theta1.data(), cloud.theta2.data(),
                           n, dist);
            break;
        }
        case ManifoldKind::sphere2: {
            const double qv[3] = {q[0], q[1], q[2]};
            ops.sphere_dist(qv, cloud.pts.data(), n,
                            static_cast<std::size_t>(cloud.d), dist);
            break;
        }
    }
}

void geodesic_distance_row(const Cloud& cloud, int i, double* dist) {
    geodesic_distance_row(cloud, cloud.point(i), dist);
}

void write_cloud_csv(const Cloud& cloud, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    std::fprintf(f, "# manifold=%s n=%d d=%d seed=%llu\n",
                 to_string(cloud.M->kind()).c_str(), cloud.n, cloud.d,
                 static_cast<unsigned long long>(cloud.seed));
    for (int i = 0; i < cloud.n; ++i) {
        const double* p = cloud.row(i);
        for (int k = 0; k < cloud.d; ++k) {
            std::fprintf(f, k == 0 ? "%.17g" : ",%.17g", p[k]);
        }
        std::fputc('\n', f);
    }
    std::fclose(f);
}

} // namespace cloudlap
