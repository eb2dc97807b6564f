#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cloudlap/density.hpp"
#include "cloudlap/manifold.hpp"

namespace cloudlap {

// Smooth fields with closed-form derivatives, used as ground truth in the
// continuum checks. All are restrictions of low-degree ambient polynomials,
// so the tangential gradient is the projected Euclidean gradient and the
// Laplace-Beltrami values (sum-of-second-derivatives sign: lb(cos) = -cos
// on the circle) are exact.
struct TestFunction {
    std::string id;
    const Manifold* M = nullptr;
    std::function<double(const Vec4&)> value;
    std::function<Vec4(const Vec4&)> gradient; // ambient tangent components
    std::function<double(const Vec4&)> laplace_beltrami;
};

// Fixed per-manifold menu (three fields each).
std::vector<TestFunction> test_function_library(const Manifold& M);

// Drift-weighted operator lb(f) + 2 <grad f, grad log rho>.
double weighted_A(const TestFunction& f, const DensityModel& rho,
                  const Vec4& x);

} // namespace cloudlap
