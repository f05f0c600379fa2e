// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "ntnpos/solver.hpp"

using namespace ntnpos;

namespace {

struct Fixture {
    Scenario sc;
    GroundTruth truth;
    SolverInputs in;

    explicit Fixture(std::function<void(Scenario&)> tweak = {}) {
        if (tweak) tweak(sc);
        truth = compute_truth(sc);
        in = make_solver_inputs(truth.chi, sc, truth);
    }
};

}  // namespace

TEST_CASE("position solve inverts the delay-difference equation") {
    const Fixture f;
    const Vec3 p0 = solve_position(f.in);
    CHECK((p0 - f.sc.ue_position).norm() < 1.0e-4);
    // output lies on the AoD ray
    const Vec3 u = unit_direction(f.in.chi.aod);
    const Vec3 r = p0 - f.sc.bs_position;
    CHECK((r - u * r.norm()).norm() < 1.0e-9);
}

TEST_CASE("clock solve recovers the initial offset") {
    const Fixture f;
    const Vec3 p0 = solve_position(f.in);
    CHECK(solve_clock(f.in, p0) == doctest::Approx(f.sc.clock_offset_s).epsilon(1.0e-4));
}

TEST_CASE("clock weights sum to one for any distance ratio") {
    // equal residual delays on both paths must pass through unchanged
    Fixture f;
    const Vec3 p0 = f.sc.ue_position;
    const double d_bs = (p0 - f.in.p_bs).norm();
    const double d_sat = (p0 - f.in.p_sat).norm();
    const double delta = 7.7e-9;
    f.in.chi.tau_b = d_bs / kSpeedOfLight + delta;
    f.in.chi.tau_s_res = d_sat / kSpeedOfLight - f.in.precomp.tau_bs + delta;
    CHECK(solve_clock(f.in, p0) == doctest::Approx(delta).epsilon(1.0e-12));
}

TEST_CASE("speed and CFO closed forms invert the Doppler model") {
    const Fixture f;
    const Vec3 p0 = solve_position(f.in);
    const auto [speed, eta] = solve_speed_cfo(f.in, p0);
    CHECK(speed == doctest::Approx(f.sc.ue_speed_mps).epsilon(1.0e-4));
    CHECK(eta == doctest::Approx(f.sc.cfo).epsilon(1.0e-3));
}

TEST_CASE("stationary UE maps the BS Doppler estimate to pure CFO") {
    const Fixture f([](Scenario& sc) {
        sc.ue_speed_mps = 0.0;
        sc.cfo = 3.3e-7;
    });
    const auto [speed, eta] = solve_speed_cfo(f.in, f.sc.ue_position);
    CHECK(std::abs(speed) < 1.0e-4);
    CHECK(eta == doctest::Approx(f.in.chi.gamma_b).epsilon(1.0e-9));
}

TEST_CASE("full positional chain is an exact inverse at ground truth") {
    const Fixture f;
    const PositionalParams out = solve_positional(ModelKind::CCFOD, f.in);
    CHECK((out.p0 - f.truth.chi_pos.p0).norm() < 1.0e-4);
    CHECK(out.delta_t0 == doctest::Approx(f.truth.chi_pos.delta_t0).epsilon(1.0e-4));
    CHECK(out.speed == doctest::Approx(f.truth.chi_pos.speed).epsilon(1.0e-4));
    CHECK(out.eta == doctest::Approx(f.truth.chi_pos.eta).epsilon(1.0e-3));
}

TEST_CASE("the Comm chain leaves speed and CFO undefined") {
    const Fixture f;
    const PositionalParams out = solve_positional(ModelKind::Comm, f.in);
    CHECK((out.p0 - f.truth.chi_pos.p0).norm() < 1.0e-4);
    CHECK(std::isnan(out.speed));
    CHECK(std::isnan(out.eta));
}

TEST_CASE("infeasible delay differences raise out-of-coverage") {
    Fixture f;
    f.in.chi.tau_s_res += 2.0e-6;  // ~600 m of spurious satellite delay
    CHECK_THROWS_AS(solve_position(f.in), OutOfCoverageError);
}

TEST_CASE("heading orthogonal to the BS ray is ill-conditioned") {
    // UE level with the BS phase center, heading straight up: the heading is
    // exactly orthogonal to the BS line of sight
    Fixture f([](Scenario& sc) { sc.ue_position = Vec3{20.0, 50.0, 5.0}; });
    f.in.heading = Vec3{0.0, 0.0, 1.0};
    CHECK_THROWS_AS(solve_speed_cfo(f.in, f.sc.ue_position), IllConditionedError);
}

TEST_CASE("delay perturbation moves the fix along the ray by the TDOA sensitivity") {
    Fixture f;
    const Vec3 base = solve_position(f.in);
    const double dt = 1.0e-9;
    f.in.chi.tau_b += dt;
    const Vec3 moved = solve_position(f.in);
    const double shift = (moved - base).norm();
    // numerical sensitivity: d(delay difference)/d(beta) along the ray
    const Vec3 u = unit_direction(f.in.chi.aod);
    const double beta = (base - f.in.p_bs).norm();
    const double h = 1.0e-3;
    auto delay_diff = [&](double b) {
        const Vec3 p = f.in.p_bs + u * b;
        return (b - (p - f.in.p_sat).norm()) / kSpeedOfLight;
    };
    const double slope = (delay_diff(beta + h) - delay_diff(beta - h)) / (2.0 * h);
    CHECK(shift == doctest::Approx(dt / slope).epsilon(1.0e-3));
}
