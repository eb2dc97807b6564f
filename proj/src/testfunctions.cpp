#include "cloudlap/testfunctions.hpp"

#include <stdexcept>

namespace cloudlap {
namespace {

TestFunction linear_field(const Manifold& M, const std::string& id,
                          const Vec4& v, double lb_factor) {
    TestFunction f;
    f.id = id;
    f.M = &M;
    f.value = [v](const Vec4& x) { return dot(x, v); };
    f.gradient = [&M, v](const Vec4& x) { return M.project_tangent(x, v); };
    f.laplace_beltrami = [v, lb_factor](const Vec4& x) {
        return lb_factor * dot(x, v);
    };
    return f;
}

} // namespace

std::vector<TestFunction> test_function_library(const Manifold& M) {
    std::vector<TestFunction> lib;
    switch (M.kind()) {
    case ManifoldKind::circle: {
        // Restrictions of cos, sin, cos(2 theta); eigenfields of d^2/dtheta^2.
        lib.push_back(linear_field(M, "coord_x", Vec4(1.0, 0.0), -1.0));
        lib.push_back(linear_field(M, "coord_y", Vec4(0.0, 1.0), -1.0));
        TestFunction f;
        f.id = "double_angle";
        f.M = &M;
        f.value = [](const Vec4& x) { return x[0] * x[0] - x[1] * x[1]; };
        f.gradient = [&M](const Vec4& x) {
            return M.project_tangent(x, Vec4(2.0 * x[0], -2.0 * x[1]));
        };
        f.laplace_beltrami = [](const Vec4& x) {
            return -4.0 * (x[0] * x[0] - x[1] * x[1]);
        };
        lib.push_back(f);
        break;
    }
    case ManifoldKind::sphere2: {
        // Degree-1 and degree-2 harmonic polynomials restricted to the sphere.
        lib.push_back(linear_field(M, "coord_x", Vec4(1.0, 0.0, 0.0), -2.0));
        lib.push_back(linear_field(M, "coord_z", Vec4(0.0, 0.0, 1.0), -2.0));
        TestFunction f;
        f.id = "zonal_quad";
        f.M = &M;
        f.value = [](const Vec4& x) { return 3.0 * x[2] * x[2] - 1.0; };
        f.gradient = [&M](const Vec4& x) {
            return M.project_tangent(x, Vec4(0.0, 0.0, 6.0 * x[2]));
        };
        f.laplace_beltrami = [](const Vec4& x) {
            return -6.0 * (3.0 * x[2] * x[2] - 1.0);
        };
        lib.push_back(f);
        break;
    }
    case ManifoldKind::flat_torus2: {
        // cos(theta1), sin(theta2), and their product; coordinates are
        // (cos t1, sin t1, cos t2, sin t2).
        lib.push_back(linear_field(M, "angle1_cos", Vec4(1.0, 0.0, 0.0, 0.0),
                                   -1.0));
        lib.push_back(linear_field(M, "angle2_sin", Vec4(0.0, 0.0, 0.0, 1.0),
                                   -1.0));
        TestFunction f;
        f.id = "angle_product";
        f.M = &M;
        f.value = [](const Vec4& x) { return x[0] * x[2]; };
        f.gradient = [&M](const Vec4& x) {
            return M.project_tangent(x, Vec4(x[2], 0.0, x[0], 0.0));
        };
        f.laplace_beltrami = [](const Vec4& x) { return -2.0 * x[0] * x[2]; };
        lib.push_back(f);
        break;
    }
    }
    if (lib.empty()) throw std::logic_error("unknown manifold kind");
    return lib;
}

double weighted_A(const TestFunction& f, const DensityModel& rho,
                  const Vec4& x) {
    return f.laplace_beltrami(x) + 2.0 * dot(f.gradient(x), rho.grad_log_rho(x));
}

} // namespace cloudlap
