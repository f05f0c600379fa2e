// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>

#include "ntnpos/params.hpp"
#include "ntnpos/scenario.hpp"
#include "ntnpos/types.hpp"

namespace ntnpos {

struct Numerology {
    int N = 0;          // subcarriers
    int M = 0;          // symbols
    double delta_f = 0.0;
    double T0 = 0.0;    // useful symbol duration, 1/delta_f
    double Tcp = 0.0;   // cyclic prefix duration
    double Ts = 0.0;    // total symbol duration
    double fc = 0.0;    // carrier frequency

    double g() const { return Tcp / T0; }  // cyclic-prefix fraction

    static Numerology from_scenario(const Scenario& sc) {
        Numerology n;
        n.N = sc.subcarriers;
        n.M = sc.symbols;
        n.delta_f = sc.subcarrier_spacing_hz;
        n.T0 = sc.t0_s();
        n.Tcp = sc.cyclic_prefix_s;
        n.Ts = n.T0 + n.Tcp;
        n.fc = sc.fc_hz;
        return n;
    }
};

/// Unit-modulus QPSK pilots; even subcarriers carry the BS, odd the satellite.
struct PilotGrid {
    Eigen::MatrixXcd values;  // N x M
};

PilotGrid generate_pilots(const Numerology& num, std::uint64_t seed);

/// Per-symbol beamforming weights: the first repeat_prefix symbols share one
/// fixed beam; the remainder sweep the configured angular sector.
struct PrecoderSchedule {
    Eigen::MatrixXcd weights;  // M x L, unit-norm rows
    int repeat_prefix = 0;     // P
};

struct AodSector {
    double el_min = 0.0, el_max = 0.0;  // radians
    double az_min = 0.0, az_max = 0.0;
};

PrecoderSchedule generate_precoders(const Numerology& num, const ArrayLayout& layout, int P,
                                    std::uint64_t codebook_seed, const AodSector& sector);

struct ObservationGrid {
    Eigen::MatrixXcd samples;  // N x M
    double noise_variance = 0.0;
};

enum class ModelKind { Comm, SlowD, CCFODnoICI, CCFOD, Generative };

std::string_view model_name(ModelKind kind);
ModelKind model_from_name(std::string_view name);

/// Everything an estimator or synthesizer needs besides the channel
/// parameters themselves.
struct ModelContext {
    Numerology num;
    PilotGrid pilots;
    PrecoderSchedule precoders;
    ArrayLayout layout;
    AodSector sector;
    Precomp precomp;
    double tau0 = 0.0;      // receiver sampling origin
    double power_bs = 0.0;  // watts
    double power_sat = 0.0;
};

ModelContext make_context(const Scenario& sc, const GroundTruth& truth);

/// Structure-preserving switches for the generative synthesis, used to verify
/// model degeneracies.
struct GenOverrides {
    bool zero_doppler_rate = false;      // force the quadratic delay terms to zero
    /// Re-sample the path gains and beam projection at every symbol instead of
    /// holding their t = 0 values. The stop-and-hop default keeps amplitude
    /// and steering constant over a frame; only delay/Doppler phases evolve.
    bool sample_gain_drift = false;
    bool bs_fourier_gamma_zero = false;  // IDFT approximation of the BS Fourier factor
};

/// Full factored synthesis of the noise-free observation.
ObservationGrid build_observation_generative(const Scenario& sc, const GroundTruth& truth,
                                             const ModelContext& ctx,
                                             const GenOverrides& ov = {});

/// Brute-force sampling of the continuous-time baseband signal; reference for
/// build_observation_generative on small instances.
ObservationGrid time_domain_oracle(const Scenario& sc, const GroundTruth& truth,
                                   const ModelContext& ctx, const GenOverrides& ov = {});

/// Factor switches distinguishing the simplified models.
struct ModelFeatures {
    bool slow_time = false;        // per-symbol carrier phase factors
    bool intersubcarrier = false;  // subcarrier-index-dependent Doppler phases
    bool ici = false;              // fast-time carrier ramp + satellite Fourier shift

    static ModelFeatures of(ModelKind kind);
};

ObservationGrid build_observation_simplified(ModelKind kind, const ChannelParams& chi,
                                             const ModelContext& ctx);
ObservationGrid build_observation_simplified(const ModelFeatures& f, const ChannelParams& chi,
                                             const ModelContext& ctx);

ObservationGrid add_noise(const ObservationGrid& y, double sigma2, std::uint64_t seed);

// ---- shared model factors (used by synthesis, estimation and bounds) ----

/// rho(gamma): effective carrier Doppler factor of the satellite path after
/// transmit-side precompensation.
inline double sat_carrier_shift(double gamma, double psi_bs_bar) {
    return 1.0 - (1.0 - gamma) / (1.0 - psi_bs_bar);
}

/// Carrier-scale slow/fast-time Doppler factor for one path.
double carrier_doppler(PathId path, double gamma, const ModelContext& ctx);

/// N x N/2 synthesis matrix mapping one path's subcarriers to time samples:
/// entries exp(j*2*pi*n*((1-gamma)*k/N + g))/sqrt(N) with n even (BS) or odd
/// (satellite). Columns are orthonormal at gamma = 0.
Eigen::MatrixXcd fourier_matrix(PathId path, const Numerology& num, double gamma = 0.0);

/// Length-N/2 delay phase ramp over one path's subcarriers for a residual
/// delay (relative to the sampling origin).
Eigen::VectorXcd delay_steering(PathId path, double tau_res, const Numerology& num);

/// Length-M per-symbol carrier phase vector (the slow-time factor).
Eigen::VectorXcd slow_time_phases(PathId path, double gamma, const ModelContext& ctx,
                                  int count = -1);

/// N/2 x M subcarrier-index-dependent Doppler phase matrix (includes the
/// symbol-independent per-subcarrier offset).
Eigen::MatrixXcd intersubcarrier_matrix(PathId path, double gamma, const Numerology& num);

/// Length-N fast-time carrier ramp (diagonal of the ICI factor).
Eigen::VectorXcd ici_diagonal(PathId path, double gamma, const ModelContext& ctx);

/// Constant carrier phase tied to the slow-time factor (evaluated at the
/// sampling origin plus the cyclic prefix).
cplx path_constant(PathId path, double gamma, const ModelContext& ctx);

/// Length-M beam projection z(theta): per-symbol precoder response toward theta.
Eigen::VectorXcd beam_projection(const Aod& aod, const ModelContext& ctx);

/// Residual delay relative to the sampling origin as it enters the delay ramp.
inline double residual_delay(double tau_abs, double gamma, const ModelContext& ctx) {
    return tau_abs - (1.0 - gamma) * ctx.tau0;
}

inline double absolute_delay(double tau_res, double gamma, const ModelContext& ctx) {
    return tau_res + (1.0 - gamma) * ctx.tau0;
}

}  // namespace ntnpos
