// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "ntnpos/clocking.hpp"
#include "ntnpos/geometry.hpp"
#include "ntnpos/params.hpp"
#include "ntnpos/types.hpp"

namespace ntnpos {

/// Full ground-truth world state: geometry, kinematics, waveform numerology,
/// impairments and powers. Defaults correspond to the reference simulation
/// setup (2 GHz carrier, 30 kHz spacing, 64-antenna UPA, 600 km satellite).
struct Scenario {
    // Waveform numerology
    double fc_hz = 2.0e9;
    int subcarriers = 3300;  // N
    double subcarrier_spacing_hz = 30.0e3;
    int symbols = 64;  // M
    double cyclic_prefix_s = 2.3e-6;
    int antennas = 64;   // L
    int beam_repeat = 4;  // P: symbols sharing the fixed beam

    // Geometry / kinematics
    Vec3 bs_position{0.0, 0.0, 5.0};
    Vec3 ue_position{20.0, 50.0, 1.5};
    Vec3 ue_heading{1.0, 0.0, 0.0};
    double ue_speed_mps = 15.0 / 3.6;
    double sat_elevation_deg = 88.0;
    double sat_azimuth_deg = 0.0;
    double sat_altitude_m = 600.0e3;
    double sat_speed_mps = 7800.0;
    Vec3 orbit_direction{1.0, 0.0, 0.0};
    double earth_radius_m = 6371.0e3;
    double earth_rotation_mps = 465.0;
    Vec3 earth_rotation_dir{1.0, 0.0, 0.0};

    // Impairments
    double clock_offset_s = 1.0e-9;
    double cfo = 1.0e-8;

    // Powers / noise
    double bs_power_dbm = 35.0;
    double sat_power_dbm = 65.0;
    /// Per-sample complex noise variance; negative means "derive from
    /// sat_snr_db via the received-SNR definition".
    double noise_sigma2 = -1.0;
    double sat_snr_db = 40.0;
    double fspl_exponent = 0.57;

    // Deterministic pilot / beam codebook seeds
    std::uint64_t pilot_seed = 1;
    std::uint64_t codebook_seed = 2;

    // AoD search sector (degrees); also defines the beam sweep coverage.
    // Azimuth is limited to the front hemisphere of the panel array (its
    // response is symmetric under az -> pi - az).
    double search_el_min_deg = -60.0;
    double search_el_max_deg = 60.0;
    double search_az_min_deg = -90.0;
    double search_az_max_deg = 90.0;

    double wavelength() const { return kSpeedOfLight / fc_hz; }
    double t0_s() const { return 1.0 / subcarrier_spacing_hz; }
    double ts_s() const { return t0_s() + cyclic_prefix_s; }
    double bs_power_w() const { return std::pow(10.0, (bs_power_dbm - 30.0) / 10.0); }
    double sat_power_w() const { return std::pow(10.0, (sat_power_dbm - 30.0) / 10.0); }

    /// Reduced profile that preserves every structural effect while keeping
    /// Monte-Carlo sweeps fast.
    void apply_desk_profile() {
        subcarriers = 512;
        symbols = 32;
    }
};

/// Derived ground truth for one scenario instant (frame start).
struct GroundTruth {
    SatelliteState sat;
    Vec3 v_earth;       // Earth-rotation velocity applied to ground frame
    Vec3 ue_velocity;   // v = speed * heading
    ClockState clock;
    Precomp precomp;
    DelayExpansion exp_b, exp_s;
    EffectiveParams eff_b, eff_s;  // eff_s.tau is the absolute total delay
    double tau_s_res = 0.0;        // eff_s.tau - precomp.tau_bs
    double tau0 = 0.0;             // receiver sampling origin
    Aod aod0;
    double alpha_b0 = 0.0, alpha_s0 = 0.0;
    ChannelParams chi;             // channel-domain truth
    PositionalParams chi_pos;      // positional truth
};

GroundTruth compute_truth(const Scenario& sc);

/// Per-sample noise variance implied by the scenario (explicit value or the
/// configured satellite received SNR).
double scenario_sigma2(const Scenario& sc, const GroundTruth& truth);

/// Received per-sample SNR (dB) for one path: 10*log10(P_i*|alpha_i(0)|^2/sigma2).
enum class PathId { Bs, Sat };
double received_snr(PathId path, const Scenario& sc, const GroundTruth& truth, double sigma2);

}  // namespace ntnpos
