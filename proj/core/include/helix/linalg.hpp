#pragma once

#include <cmath>

// Minimal fixed-size plane algebra used throughout the library.  Position and
// velocity vectors live in the vertical x-z plane; 2x2 matrices show up in the
// guidance error dynamics and the stability certificates.

namespace helix {

// ============================================================================
// Vec2
// ============================================================================

struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; z += o.z; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; z -= o.z; return *this; }
    constexpr Vec2& operator*=(double c) { x *= c; z *= c; return *this; }

    constexpr bool operator==(const Vec2&) const = default;
};

[[nodiscard]] constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
[[nodiscard]] constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
[[nodiscard]] constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.z}; }
[[nodiscard]] constexpr Vec2 operator*(double c, Vec2 a) { return a *= c; }
[[nodiscard]] constexpr Vec2 operator*(Vec2 a, double c) { return a *= c; }
[[nodiscard]] constexpr Vec2 operator/(Vec2 a, double c) { return a *= 1.0 / c; }

[[nodiscard]] constexpr double dot(const Vec2& a, const Vec2& b) {
    return a.x * b.x + a.z * b.z;
}

[[nodiscard]] constexpr double norm_sq(const Vec2& a) { return dot(a, a); }

[[nodiscard]] inline double norm(const Vec2& a) { return std::hypot(a.x, a.z); }

// Counter-clockwise quarter turn: perp(v) = R(pi/2) v.
[[nodiscard]] constexpr Vec2 perp(const Vec2& a) { return {-a.z, a.x}; }

// Rotation by `angle` radians (counter-clockwise in the x-z plane).
[[nodiscard]] inline Vec2 rotate(const Vec2& a, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * a.x - s * a.z, s * a.x + c * a.z};
}

// Unit vector at `angle` from the +x axis.
[[nodiscard]] inline Vec2 unit_vector(double angle) {
    return {std::cos(angle), std::sin(angle)};
}

// ============================================================================
// Mat2
// ============================================================================

struct Mat2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;

    [[nodiscard]] static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    [[nodiscard]] static constexpr Mat2 diagonal(double d0, double d1) {
        return {d0, 0.0, 0.0, d1};
    }

    [[nodiscard]] constexpr Mat2 transpose() const { return {m00, m10, m01, m11}; }
    [[nodiscard]] constexpr double trace() const { return m00 + m11; }
    [[nodiscard]] constexpr double det() const { return m00 * m11 - m01 * m10; }

    constexpr bool operator==(const Mat2&) const = default;
};

[[nodiscard]] constexpr Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}
[[nodiscard]] constexpr Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
}
[[nodiscard]] constexpr Mat2 operator*(double c, const Mat2& a) {
    return {c * a.m00, c * a.m01, c * a.m10, c * a.m11};
}
[[nodiscard]] constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}
[[nodiscard]] constexpr Vec2 operator*(const Mat2& a, const Vec2& v) {
    return {a.m00 * v.x + a.m01 * v.z, a.m10 * v.x + a.m11 * v.z};
}

// Quadratic form [u v] M [u v]^T for a (not necessarily symmetric) M.
[[nodiscard]] constexpr double quad_form(const Mat2& m, double u, double v) {
    return m.m00 * u * u + (m.m01 + m.m10) * u * v + m.m11 * v * v;
}

// Eigenvalues of a symmetric 2x2 matrix (closed form; uses (m01+m10)/2 so a
// numerically almost-symmetric input is handled gracefully).
[[nodiscard]] inline double sym_eigen_min(const Mat2& m) {
    const double mean = 0.5 * (m.m00 + m.m11);
    const double off = 0.5 * (m.m01 + m.m10);
    return mean - std::hypot(0.5 * (m.m00 - m.m11), off);
}

[[nodiscard]] inline double sym_eigen_max(const Mat2& m) {
    const double mean = 0.5 * (m.m00 + m.m11);
    const double off = 0.5 * (m.m01 + m.m10);
    return mean + std::hypot(0.5 * (m.m00 - m.m11), off);
}

// Positive definiteness of a symmetric matrix via Sylvester's criterion.
[[nodiscard]] constexpr bool sym_positive_definite(const Mat2& m) {
    return m.m00 > 0.0 && m.det() > 0.0;
}

}  // namespace helix
