// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "ntnpos/clocking.hpp"
#include "ntnpos/params.hpp"
#include "ntnpos/waveform.hpp"

namespace ntnpos {

/// Everything the positional solvers need besides the channel estimates.
struct SolverInputs {
    ChannelParams chi;  // absolute tau_b / post-timing-advance tau_s_res
    Precomp precomp;
    Vec3 p_bs;
    Vec3 p_sat;
    Vec3 v_leo;
    Vec3 v_earth;
    Vec3 heading;  // unit UE heading
};

SolverInputs make_solver_inputs(const ChannelParams& chi, const Scenario& sc,
                                const GroundTruth& truth);

/// TDOA-along-the-AoD-ray position fix: minimizes the delay-difference
/// mismatch over the ray p_bs + beta * u(aod), beta in (0, beta_max].
/// Throws OutOfCoverageError when the objective has no interior minimum.
Vec3 solve_position(const SolverInputs& in, double beta_max = 10.0e3);

/// Distance-weighted combination of the two residual delays.
double solve_clock(const SolverInputs& in, const Vec3& p0_hat);

/// (speed, eta) from the two slow-time Doppler estimates; throws
/// IllConditionedError when the heading is orthogonal to the BS line of sight.
std::pair<double, double> solve_speed_cfo(const SolverInputs& in, const Vec3& p0_hat);

/// Full chain: position, clock, and (except under Comm) speed and CFO.
/// Comm leaves speed/eta as NaN.
PositionalParams solve_positional(ModelKind kind, const SolverInputs& in);

}  // namespace ntnpos
