#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace cloudlap {

// Ambient points and tangent vectors live in at most 4 coordinates
// (flat 2-torus embeds in R^4). Unused trailing coordinates stay zero,
// so generic loops can always run over all four lanes.
struct Vec4 {
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

    Vec4() = default;
    Vec4(double x, double y) : c{x, y, 0.0, 0.0} {}
    Vec4(double x, double y, double z) : c{x, y, z, 0.0} {}
    Vec4(double x, double y, double z, double w) : c{x, y, z, w} {}

    double& operator[](std::size_t i) { return c[i]; }
    double operator[](std::size_t i) const { return c[i]; }

    Vec4& operator+=(const Vec4& o) {
        for (int i = 0; i < 4; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec4& operator-=(const Vec4& o) {
        for (int i = 0; i < 4; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec4& operator*=(double s) {
        for (int i = 0; i < 4; ++i) c[i] *= s;
        return *this;
    }
};

inline Vec4 operator+(Vec4 a, const Vec4& b) { return a += b; }
inline Vec4 operator-(Vec4 a, const Vec4& b) { return a -= b; }
inline Vec4 operator*(double s, Vec4 a) { return a *= s; }
inline Vec4 operator*(Vec4 a, double s) { return a *= s; }
inline Vec4 operator-(const Vec4& a) { return Vec4{-a[0], -a[1], -a[2], -a[3]}; }

inline double dot(const Vec4& a, const Vec4& b) {
    // Fixed evaluation order; geometry code depends on run-to-run stability.
    return ((a[0] * b[0] + a[1] * b[1]) + a[2] * b[2]) + a[3] * b[3];
}

inline double norm2(const Vec4& a) { return dot(a, a); }
inline double norm(const Vec4& a) { return std::sqrt(norm2(a)); }

// Cross product of the leading 3 coordinates; used for sphere geometry.
inline Vec4 cross3(const Vec4& a, const Vec4& b) {
    return Vec4{a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0]};
}

} // namespace cloudlap
