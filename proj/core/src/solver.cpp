// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ntnpos {

SolverInputs make_solver_inputs(const ChannelParams& chi, const Scenario& sc,
                                const GroundTruth& truth) {
    SolverInputs in;
    in.chi = chi;
    in.precomp = truth.precomp;
    in.p_bs = sc.bs_position;
    in.p_sat = truth.sat.position;
    in.v_leo = truth.sat.velocity;
    in.v_earth = truth.v_earth;
    in.heading = sc.ue_heading.normalized();
    return in;
}

namespace {

/// Squared delay-difference mismatch along the AoD ray.
double ray_mismatch(double beta, const Vec3& p_bs, const Vec3& p_sat, const Vec3& u,
                    double delta) {
    const Vec3 p0 = p_bs + u * beta;
    const double r = beta / kSpeedOfLight - (p0 - p_sat).norm() / kSpeedOfLight - delta;
    return r * r;
}

}  // namespace

Vec3 solve_position(const SolverInputs& in, double beta_max) {
    const Vec3 u = unit_direction(in.chi.aod);
    const double delta = in.chi.tau_b - in.chi.tau_s_res - in.precomp.tau_bs;

    // 1 m coarse grid over (0, beta_max]; keep the smallest-beta interior
    // local minimum (the UE is assumed in BS proximity).
    const int points = static_cast<int>(beta_max);
    std::vector<double> f(points);
    for (int i = 0; i < points; ++i)
        f[i] = ray_mismatch(static_cast<double>(i + 1), in.p_bs, in.p_sat, u, delta);
    int coarse = -1;
    for (int i = 1; i + 1 < points; ++i) {
        if (f[i] <= f[i - 1] && f[i] < f[i + 1]) {
            coarse = i;
            break;
        }
    }
    if (coarse < 0) throw OutOfCoverageError("delay-difference objective has no minimum on the ray");

    // Golden-section refinement to 1e-6 m around the coarse cell.
    double lo = static_cast<double>(coarse);       // i-1 step is beta = i
    double hi = static_cast<double>(coarse + 2);   // bracketing neighbors
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = ray_mismatch(x1, in.p_bs, in.p_sat, u, delta);
    double f2 = ray_mismatch(x2, in.p_bs, in.p_sat, u, delta);
    while (hi - lo > 1.0e-6) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = ray_mismatch(x1, in.p_bs, in.p_sat, u, delta);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = ray_mismatch(x2, in.p_bs, in.p_sat, u, delta);
        }
    }
    const double beta = 0.5 * (lo + hi);
    return in.p_bs + u * beta;
}

double solve_clock(const SolverInputs& in, const Vec3& p0_hat) {
    const double d_bs = (p0_hat - in.p_bs).norm();
    const double d_sat = (p0_hat - in.p_sat).norm();
    const double d = d_bs / d_sat;  // weight ratio: trust the BS delay more
    const double res_bs = in.chi.tau_b - d_bs / kSpeedOfLight;
    const double res_sat = in.chi.tau_s_res + in.precomp.tau_bs - d_sat / kSpeedOfLight;
    return res_bs / (d + 1.0) + res_sat * d / (d + 1.0);
}

std::pair<double, double> solve_speed_cfo(const SolverInputs& in, const Vec3& p0_hat) {
    const Vec3 r_bs = p0_hat - in.p_bs;
    const Vec3 r_sat = p0_hat - in.p_sat;
    const double d_bs = r_bs.norm();
    const double d_sat = r_sat.norm();
    // Heading-direction Doppler factors per unit speed.
    const double psi_nb = r_bs.dot(in.heading) / (kSpeedOfLight * d_bs);
    const double psi_ns = r_sat.dot(in.heading) / (kSpeedOfLight * d_sat);
    // Known satellite/Earth contribution to the satellite-path Doppler.
    const double psi_ts = r_sat.dot(in.v_leo - in.v_earth) / (kSpeedOfLight * d_sat);
    if (psi_nb == 0.0)
        throw IllConditionedError("heading orthogonal to the BS line of sight");

    const double ratio = psi_ns / psi_nb;
    const double eta = (in.chi.gamma_s - (ratio * in.chi.gamma_b - psi_ts)) /
                       (1.0 - (ratio - psi_ts));
    const double speed = (in.chi.gamma_b - eta) / ((1.0 - eta) * psi_nb);
    return {speed, eta};
}

PositionalParams solve_positional(ModelKind kind, const SolverInputs& in) {
    PositionalParams out;
    out.p0 = solve_position(in);
    out.delta_t0 = solve_clock(in, out.p0);
    if (kind == ModelKind::Comm) {
        out.speed = std::numeric_limits<double>::quiet_NaN();
        out.eta = std::numeric_limits<double>::quiet_NaN();
    } else {
        std::tie(out.speed, out.eta) = solve_speed_cfo(in, out.p0);
    }
    out.alpha_b = in.chi.alpha_b;
    out.alpha_s = in.chi.alpha_s;
    return out;
}

}  // namespace ntnpos
