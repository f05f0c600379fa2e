// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

#include "ntnpos/geometry.hpp"
#include "ntnpos/types.hpp"

namespace ntnpos {

/// UE clock state: t' = t/(1-eta) + delta_t0 maps network time to UE time.
struct ClockState {
    double delta_t0 = 0.0;  // seconds
    double eta = 0.0;       // fractional CFO
};

/// Per-path delay/Doppler parameters as seen in the UE's skewed time frame.
struct EffectiveParams {
    double gamma = 0.0;    // effective Doppler shift factor
    double epsilon = 0.0;  // effective Doppler rate, 1/seconds
    double tau = 0.0;      // effective delay, seconds
};

/// Known satellite-to-BS Doppler/delay used for transmit-side compensation.
struct Precomp {
    double psi_bs_bar = 0.0;  // satellite-BS radial Doppler factor
    double tau_bs = 0.0;      // satellite-BS delay, seconds
    double fc_bar = 0.0;      // pre-shifted carrier, Hz
};

inline double ue_time(double t, const ClockState& clock) {
    return t / (1.0 - clock.eta) + clock.delta_t0;
}

inline double network_time(double t_prime, const ClockState& clock) {
    return (t_prime - clock.delta_t0) * (1.0 - clock.eta);
}

inline EffectiveParams effective_params(const DelayExpansion& exp, const ClockState& clock) {
    const double one_m_eta = 1.0 - clock.eta;
    EffectiveParams p;
    p.gamma = exp.psi * one_m_eta + clock.eta -
              exp.mu * one_m_eta * one_m_eta * clock.delta_t0;
    p.epsilon = 0.5 * exp.mu * one_m_eta * one_m_eta;
    p.tau = exp.tau0_p + clock.delta_t0 * one_m_eta * (1.0 - exp.psi) +
            0.5 * exp.mu * clock.delta_t0 * clock.delta_t0 * one_m_eta * one_m_eta;
    return p;
}

inline Precomp doppler_precomp(const Vec3& p_bs, const Vec3& p_sat, const Vec3& v_leo,
                               const Vec3& v_earth, double f_c) {
    const Vec3 r = p_bs - p_sat;
    const double d = r.norm();
    if (d == 0.0) throw DegenerateGeometryError("precompensation undefined for coincident BS/satellite");
    Precomp pc;
    pc.psi_bs_bar = r.dot(v_earth - v_leo) / (kSpeedOfLight * d);
    pc.tau_bs = d / kSpeedOfLight;
    pc.fc_bar = f_c / (1.0 - pc.psi_bs_bar);
    return pc;
}

/// Start of the receiver sampling clock: the smallest path delay in the UE
/// time frame. tau_s must be the post-timing-advance residual total delay.
inline double sampling_origin(double tau_b, double tau_s, double eta) {
    return std::min(tau_b / (1.0 - eta), tau_s / (1.0 - eta));
}

/// Width of the unambiguous interval for the satellite slow-time Doppler.
inline double gamma_unambiguous_range(double f_c, double t_s, double psi_bs_bar) {
    return (1.0 - psi_bs_bar) / (f_c * t_s);
}

/// Restores the absolute satellite Doppler factor from a residual estimate by
/// re-applying the integer number of unambiguous intervals contained in the
/// known precompensation value.
inline double wrap_gamma_s(double gamma_res, double psi_bs_bar, double range) {
    return gamma_res + std::round(psi_bs_bar / range) * range;
}

}  // namespace ntnpos
