// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ntnpos {

// Table II convention, not the CODATA value.
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfCoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw DegenerateGeometryError("cannot normalize zero vector");
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// 2D angle of departure in the global frame: elevation in [-pi/2, pi/2],
/// azimuth in (-pi, pi].
struct Aod {
    double elevation = 0.0;
    double azimuth = 0.0;
};

/// Unit direction vector u(theta) for a given AoD.
inline Vec3 unit_direction(const Aod& aod) {
    const double ce = std::cos(aod.elevation);
    return {ce * std::cos(aod.azimuth), ce * std::sin(aod.azimuth), std::sin(aod.elevation)};
}

}  // namespace ntnpos
