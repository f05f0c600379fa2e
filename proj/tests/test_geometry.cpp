// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ntnpos/geometry.hpp"

using namespace ntnpos;

TEST_CASE("upa layout is a centered half-wavelength lattice in the y-z plane") {
    const double lambda = 0.15;
    const ArrayLayout layout = ArrayLayout::upa(64, lambda);
    CHECK(layout.size() == 64);
    Vec3 centroid{0.0, 0.0, 0.0};
    for (const Vec3& q : layout.element_offsets) {
        CHECK(q.x == 0.0);
        centroid += q;
    }
    CHECK(centroid.norm() < 1.0e-12);
    // nearest-neighbor pitch is lambda/2
    const double pitch = (layout.element_offsets[1] - layout.element_offsets[0]).norm();
    CHECK(pitch == doctest::Approx(lambda / 2.0));
    CHECK_THROWS_AS(ArrayLayout::upa(63, lambda), DegenerateGeometryError);
}

TEST_CASE("steering vector has unit-modulus entries and norm sqrt(L)") {
    const ArrayLayout layout = ArrayLayout::upa(16, 0.15);
    const Aod aod{0.3, -1.1};
    const Eigen::VectorXcd a = steering_vector(aod, layout);
    for (int l = 0; l < a.size(); ++l) CHECK(std::abs(a(l)) == doctest::Approx(1.0));
    CHECK(a.norm() == doctest::Approx(4.0));
}

TEST_CASE("steering vector is invariant under the front/back azimuth mirror") {
    // The y-z planar array cannot distinguish az from pi - az.
    const ArrayLayout layout = ArrayLayout::upa(64, 0.15);
    const Aod aod{-0.2, 0.7};
    const Aod mirror{-0.2, kPi - 0.7};
    const Eigen::VectorXcd a = steering_vector(aod, layout);
    const Eigen::VectorXcd b = steering_vector(mirror, layout);
    CHECK((a - b).norm() < 1.0e-12);
}

TEST_CASE("aod_from_positions inverts unit_direction") {
    const Aod aod{0.4, 2.1};
    const Vec3 p_bs{1.0, -2.0, 3.0};
    const Vec3 p_ue = p_bs + unit_direction(aod) * 37.5;
    const Aod back = aod_from_positions(p_ue, p_bs);
    CHECK(back.elevation == doctest::Approx(aod.elevation).epsilon(1.0e-12));
    CHECK(back.azimuth == doctest::Approx(aod.azimuth).epsilon(1.0e-12));
    CHECK_THROWS_AS(aod_from_positions(p_bs, p_bs), DegenerateGeometryError);
}

TEST_CASE("quadratic delay expansion matches numerical derivatives") {
    const Vec3 p0{20.0, 50.0, 1.5};
    const Vec3 p_i{2.0e4, 0.0, 6.0e5};
    const Vec3 v_rel{-7800.0, 465.0, 0.0};
    const DelayExpansion e = quadratic_delay_expansion(p0, p_i, v_rel);

    auto delay_at = [&](double t) { return (p0 + v_rel * t - p_i).norm() / kSpeedOfLight; };
    const double h = 1.0e-3;
    const double d1 = (delay_at(h) - delay_at(-h)) / (2.0 * h);
    const double d2 = (delay_at(h) - 2.0 * delay_at(0.0) + delay_at(-h)) / (h * h);
    CHECK(e.tau0_p == doctest::Approx(delay_at(0.0)).epsilon(1.0e-12));
    CHECK(e.psi == doctest::Approx(d1).epsilon(1.0e-6));
    CHECK(e.mu == doctest::Approx(d2).epsilon(1.0e-4));
}

TEST_CASE("slant range closes the spherical triangle") {
    const double re = 6371.0e3, h = 600.0e3;
    SUBCASE("zenith") { CHECK(slant_range(kPi / 2.0, h, re) == doctest::Approx(h)); }
    SUBCASE("frozen 88 degrees") {
        CHECK(slant_range(88.0 * kPi / 180.0, h, re) ==
              doctest::Approx(6.0033422262e+05).epsilon(1.0e-9));
    }
    SUBCASE("law of cosines holds") {
        const double el = 0.9;
        const double d = slant_range(el, h, re);
        // |r_e + d u|^2 == (r_e + h)^2 with u at elevation el from the anchor
        const double lhs = re * re + d * d + 2.0 * re * d * std::sin(el);
        CHECK(lhs == doctest::Approx((re + h) * (re + h)).epsilon(1.0e-12));
    }
}

TEST_CASE("satellite state sits on the requested ray") {
    const Vec3 anchor{0.0, 0.0, 5.0};
    const SatelliteState s =
        satellite_state(1.2, 0.4, 600.0e3, 6371.0e3, anchor, Vec3{1.0, 0.0, 0.0}, 7800.0);
    const Aod seen = aod_from_positions(s.position, anchor);
    CHECK(seen.elevation == doctest::Approx(1.2).epsilon(1.0e-12));
    CHECK(seen.azimuth == doctest::Approx(0.4).epsilon(1.0e-12));
    CHECK(s.velocity.norm() == doctest::Approx(7800.0));
}

TEST_CASE("path gains are free-space scaled and positive") {
    const double lambda = 0.15;
    const Vec3 bs{0.0, 0.0, 5.0};
    const Vec3 ue{20.0, 50.0, 1.5};
    const double g1 = channel_gain_bs(ue, bs, lambda, 0.57);
    const double g2 = channel_gain_bs(ue * 2.0, bs * 2.0, lambda, 0.57);
    CHECK(g1 > 0.0);
    CHECK(g1 > g2);  // farther means weaker
    // the satellite link carries no elevation pattern
    const double d = 600.0e3;
    CHECK(channel_gain_sat(ue, Vec3{0.0, 0.0, d}, lambda) ==
          doctest::Approx(lambda / (4.0 * kPi * (Vec3{0.0, 0.0, d} - ue).norm())));
}
