// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ntnpos/types.hpp"

namespace ntnpos {

/// Antenna positions of the BS array, in the BS local frame (aligned with the
/// global frame). carrier_wavelength is in meters.
struct ArrayLayout {
    std::vector<Vec3> element_offsets;
    double carrier_wavelength = 0.0;

    int size() const { return static_cast<int>(element_offsets.size()); }

    /// sqrt(L) x sqrt(L) uniform planar array in the local y-z plane at
    /// half-wavelength spacing, centered on the phase center.
    static ArrayLayout upa(int elements, double wavelength) {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(elements))));
        if (side * side != elements || elements <= 0)
            throw DegenerateGeometryError("UPA element count must be a positive perfect square");
        ArrayLayout layout;
        layout.carrier_wavelength = wavelength;
        layout.element_offsets.reserve(elements);
        const double pitch = wavelength / 2.0;
        const double mid = (side - 1) / 2.0;
        for (int iy = 0; iy < side; ++iy)
            for (int iz = 0; iz < side; ++iz)
                layout.element_offsets.push_back({0.0, (iy - mid) * pitch, (iz - mid) * pitch});
        return layout;
    }
};

/// Quadratic expansion of a propagation delay around t = 0:
/// tau(t) ~= tau0_p + psi * t + mu * t^2 / 2.
struct DelayExpansion {
    double tau0_p = 0.0;  // seconds
    double psi = 0.0;     // radial velocity / c
    double mu = 0.0;      // radial pseudo-acceleration / c, 1/seconds
};

struct SatelliteState {
    Vec3 position;
    Vec3 velocity;
};

inline Vec3 ue_position(const Vec3& p0, const Vec3& v, double t) { return p0 + v * t; }

inline Aod aod_from_positions(const Vec3& p_ue, const Vec3& p_bs) {
    const Vec3 r = p_ue - p_bs;
    const double d = r.norm();
    if (d == 0.0) throw DegenerateGeometryError("AoD undefined for coincident positions");
    Aod aod;
    aod.elevation = std::asin(r.z / d);
    aod.azimuth = (r.x == 0.0 && r.y == 0.0) ? 0.0 : std::atan2(r.y, r.x);
    return aod;
}

inline Eigen::VectorXcd steering_vector(const Aod& aod, const ArrayLayout& layout) {
    const Vec3 u = unit_direction(aod);
    const double k = 2.0 * kPi / layout.carrier_wavelength;
    Eigen::VectorXcd a(layout.size());
    for (int l = 0; l < layout.size(); ++l) {
        const double phase = k * u.dot(layout.element_offsets[l]);
        a(l) = cplx(std::cos(phase), std::sin(phase));
    }
    return a;
}

inline DelayExpansion quadratic_delay_expansion(const Vec3& p0, const Vec3& p_i,
                                                const Vec3& v_rel) {
    const Vec3 r = p0 - p_i;
    const double d = r.norm();
    if (d == 0.0) throw DegenerateGeometryError("delay expansion undefined for coincident positions");
    DelayExpansion e;
    e.tau0_p = d / kSpeedOfLight;
    e.psi = r.dot(v_rel) / (kSpeedOfLight * d);
    e.mu = (v_rel.dot(v_rel) - (kSpeedOfLight * e.psi) * (kSpeedOfLight * e.psi)) /
           (kSpeedOfLight * d);
    return e;
}

/// Spherical-Earth slant range from a ground anchor to a satellite seen at the
/// given elevation.
inline double slant_range(double elevation, double altitude, double earth_radius) {
    const double s = std::sin(elevation);
    return std::sqrt(earth_radius * earth_radius * s * s +
                     2.0 * earth_radius * altitude + altitude * altitude) -
           earth_radius * s;
}

/// Places the satellite at the spherical-Earth slant range along the
/// (elevation, azimuth) direction from the anchor; velocity is along the
/// configured orbit direction.
inline SatelliteState satellite_state(double elevation, double azimuth, double altitude,
                                      double earth_radius, const Vec3& anchor,
                                      const Vec3& orbit_direction, double speed) {
    const double d = slant_range(elevation, altitude, earth_radius);
    const Vec3 u = unit_direction(Aod{elevation, azimuth});
    SatelliteState s;
    s.position = anchor + u * d;
    s.velocity = orbit_direction * speed;
    return s;
}

/// Free-space path gain of the BS-UE link with an elevation-dependent element
/// pattern sqrt(cos^q_exp(theta_el)).
inline double channel_gain_bs(const Vec3& p_ue, const Vec3& p_bs, double wavelength,
                              double q_exp) {
    const Vec3 r = p_ue - p_bs;
    const double d = r.norm();
    if (d == 0.0) throw DegenerateGeometryError("channel gain undefined at zero distance");
    const double el = std::asin(r.z / d);
    return std::sqrt(std::pow(std::cos(el), q_exp)) * wavelength / (4.0 * kPi * d);
}

/// Free-space path gain of the satellite-UE link.
inline double channel_gain_sat(const Vec3& p_ue, const Vec3& p_sat, double wavelength) {
    const double d = (p_ue - p_sat).norm();
    if (d == 0.0) throw DegenerateGeometryError("channel gain undefined at zero distance");
    return wavelength / (4.0 * kPi * d);
}

}  // namespace ntnpos
