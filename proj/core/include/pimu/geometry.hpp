#pragma once

#include <array>
#include <cmath>

namespace pimu {

struct vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr vec3() = default;
    constexpr vec3(double xv, double yv, double zv) : x(xv), y(yv), z(zv) {}

    constexpr vec3 operator+(const vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr vec3 operator-(const vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr vec3 operator-() const { return {-x, -y, -z}; }
    vec3& operator+=(const vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    vec3& operator-=(const vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr bool operator==(const vec3&) const = default;

    constexpr double dot(const vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr vec3 cross(const vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    constexpr double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    vec3 normalized() const { return *this / norm(); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr vec3 operator*(double s, const vec3& v) { return v * s; }

/// Row-major 3x3 matrix.
struct mat3 {
    std::array<double, 9> m{};

    double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
    double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

    static mat3 identity() {
        mat3 out;
        out.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return out;
    }
    static mat3 rotation_x(double a) {
        const double c = std::cos(a), s = std::sin(a);
        mat3 out;
        out.m = {1, 0, 0, 0, c, -s, 0, s, c};
        return out;
    }
    static mat3 rotation_y(double a) {
        const double c = std::cos(a), s = std::sin(a);
        mat3 out;
        out.m = {c, 0, s, 0, 1, 0, -s, 0, c};
        return out;
    }
    static mat3 rotation_z(double a) {
        const double c = std::cos(a), s = std::sin(a);
        mat3 out;
        out.m = {c, -s, 0, s, c, 0, 0, 0, 1};
        return out;
    }
    static mat3 from_columns(const vec3& c0, const vec3& c1, const vec3& c2) {
        mat3 out;
        out.m = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
        return out;
    }

    vec3 column(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }

    vec3 operator*(const vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    mat3 operator*(const mat3& o) const {
        mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out(r, c) = (*this)(r, 0) * o(0, c) + (*this)(r, 1) * o(1, c) + (*this)(r, 2) * o(2, c);
        return out;
    }
    mat3 transposed() const {
        mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out(r, c) = (*this)(c, r);
        return out;
    }
};

}  // namespace pimu
