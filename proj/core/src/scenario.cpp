// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/scenario.hpp"

#include <cmath>

namespace ntnpos {

GroundTruth compute_truth(const Scenario& sc) {
    GroundTruth t;

    const double el = sc.sat_elevation_deg * kPi / 180.0;
    const double az = sc.sat_azimuth_deg * kPi / 180.0;
    t.sat = satellite_state(el, az, sc.sat_altitude_m, sc.earth_radius_m, sc.bs_position,
                            sc.orbit_direction, sc.sat_speed_mps);
    t.v_earth = sc.earth_rotation_dir * sc.earth_rotation_mps;
    t.ue_velocity = sc.ue_heading * sc.ue_speed_mps;
    t.clock = ClockState{sc.clock_offset_s, sc.cfo};

    t.precomp = doppler_precomp(sc.bs_position, t.sat.position, t.sat.velocity, t.v_earth,
                                sc.fc_hz);

    // BS and UE share the rotating ground frame, so only the UE velocity is
    // relative; the satellite additionally sees Earth rotation.
    t.exp_b = quadratic_delay_expansion(sc.ue_position, sc.bs_position, t.ue_velocity);
    t.exp_s = quadratic_delay_expansion(sc.ue_position, t.sat.position,
                                        (t.ue_velocity + t.v_earth) - t.sat.velocity);

    t.eff_b = effective_params(t.exp_b, t.clock);
    t.eff_s = effective_params(t.exp_s, t.clock);
    t.tau_s_res = t.eff_s.tau - t.precomp.tau_bs;
    t.tau0 = sampling_origin(t.eff_b.tau, t.tau_s_res, t.clock.eta);

    t.aod0 = aod_from_positions(sc.ue_position, sc.bs_position);
    t.alpha_b0 = channel_gain_bs(sc.ue_position, sc.bs_position, sc.wavelength(),
                                 sc.fspl_exponent);
    t.alpha_s0 = channel_gain_sat(sc.ue_position, t.sat.position, sc.wavelength());

    t.chi.alpha_b = cplx(t.alpha_b0, 0.0);
    t.chi.alpha_s = cplx(t.alpha_s0, 0.0);
    t.chi.tau_b = t.eff_b.tau;
    t.chi.tau_s_res = t.tau_s_res;
    t.chi.aod = t.aod0;
    t.chi.gamma_b = t.eff_b.gamma;
    t.chi.gamma_s = t.eff_s.gamma;

    t.chi_pos.p0 = sc.ue_position;
    t.chi_pos.delta_t0 = sc.clock_offset_s;
    t.chi_pos.speed = sc.ue_speed_mps;
    t.chi_pos.eta = sc.cfo;
    t.chi_pos.alpha_b = t.chi.alpha_b;
    t.chi_pos.alpha_s = t.chi.alpha_s;
    return t;
}

double scenario_sigma2(const Scenario& sc, const GroundTruth& truth) {
    if (sc.noise_sigma2 >= 0.0) return sc.noise_sigma2;
    return sc.sat_power_w() * truth.alpha_s0 * truth.alpha_s0 *
           std::pow(10.0, -sc.sat_snr_db / 10.0);
}

double received_snr(PathId path, const Scenario& sc, const GroundTruth& truth, double sigma2) {
    const double p = (path == PathId::Bs) ? sc.bs_power_w() : sc.sat_power_w();
    const double a = (path == PathId::Bs) ? truth.alpha_b0 : truth.alpha_s0;
    return 10.0 * std::log10(p * a * a / sigma2);
}

}  // namespace ntnpos
