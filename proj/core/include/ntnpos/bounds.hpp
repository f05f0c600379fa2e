// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "ntnpos/estimation.hpp"
#include "ntnpos/waveform.hpp"

namespace ntnpos {

/// Error bounds (square-rooted CRBs) and model-mismatch biases per estimand.
struct BoundReport {
    double peb = 0.0;       // position error bound [m]
    double ceb = 0.0;       // clock error bound [s]
    double speed_eb = 0.0;  // speed error bound [m/s]
    double eta_eb = 0.0;    // CFO error bound
    double bias_pos = 0.0;
    double bias_clock = 0.0;
    double bias_speed = 0.0;
    double bias_eta = 0.0;
    bool converged = true;
};

/// Number of real channel parameters for one model kind (8 without the
/// slow-time Doppler pair, 10 with it).
int channel_param_count(ModelKind kind);

/// Real channel parameter vector <-> ChannelParams, ordered
/// [Re a_b, Im a_b, Re a_s, Im a_s, tau_b, tau_s_res, el, az (, gamma_b, gamma_s)].
Eigen::VectorXd channel_to_vector(ModelKind kind, const ChannelParams& chi);
ChannelParams vector_to_channel(ModelKind kind, const Eigen::VectorXd& v);

/// Positional parameter vector, ordered
/// [Re a_b, Im a_b, Re a_s, Im a_s, px, py, pz, delta_t0, speed, eta].
Eigen::VectorXd positional_to_vector(const PositionalParams& p);
PositionalParams vector_to_positional(const Eigen::VectorXd& v);

/// Channel parameters implied by a positional vector through the
/// geometry/clocking chain (gains pass through untouched).
ChannelParams positional_to_channel(const PositionalParams& pos, const Scenario& base);

/// Channel-domain Fisher information, (2/sigma2) * sum Re{dR^H dR}, with
/// central finite differences through the simplified synthesis.
Eigen::MatrixXd fim_channel(ModelKind kind, const ChannelParams& chi, const Scenario& sc,
                            const ModelContext& ctx, double sigma2);

/// Positional Fisher information J^T F_ch J; J holds d(channel)/d(positional)
/// by central finite differences through the geometry/clocking chain.
Eigen::MatrixXd positional_fim(const Eigen::MatrixXd& f_ch, ModelKind kind,
                               const PositionalParams& pos, const Scenario& sc);

/// Square-rooted diagonal-block traces of the pseudo-inverse of F_pos. Under
/// Comm, speed and CFO are unobservable: the identifiable 8-parameter block is
/// inverted instead and speed_eb/eta_eb come back NaN.
BoundReport crb_report(const Eigen::MatrixXd& f_pos, ModelKind kind);

/// Model-mismatch bias: pseudo-true positional parameters of the simplified
/// model fitted to the noise-free generative observation (gains concentrated
/// by linear least squares), seeded at ground truth and at the estimator
/// output. Fills only the bias fields.
BoundReport mcrb_bias(ModelKind kind, const Scenario& sc, const GroundTruth& truth,
                      const ModelContext& ctx);

/// Convenience: CRB at the ground-truth operating point plus mismatch biases.
BoundReport compute_bounds(ModelKind kind, const Scenario& sc, const GroundTruth& truth,
                           const ModelContext& ctx, double sigma2, bool with_bias = true);

}  // namespace ntnpos
