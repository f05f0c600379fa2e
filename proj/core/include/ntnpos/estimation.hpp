// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ntnpos/waveform.hpp"

namespace ntnpos {

/// Grid resolutions and refinement budget for the channel-domain searches.
struct SearchConfig {
    double delay_lo = 0.0, delay_hi = 0.0;  // residual-delay window [s]
    int delay_points = 0;
    double gamma_halfwidth = 0.0;  // search half-width around the grid center
    int gamma_points = 0;
    int aod_points_el = 64, aod_points_az = 64;
    int refine_max_iters = 200;
    double refine_tol = 1.0e-12;  // relative objective decrease per iteration

    /// Delay window [0, 2*Tcp] with 4N points; gamma half-width of half the
    /// unambiguous range with 8M points; 64x64 angle grid over the sector.
    static SearchConfig defaults(const ModelContext& ctx);
};

struct EstimationReport {
    ChannelParams params;
    double objective = 0.0;         // || Y - reconstruction ||^2 at the estimate
    double coarse_objective = 0.0;  // same residual at the pre-refinement estimate
    int iterations = 0;
    bool refine_flagged = false;  // non-finite value met during refinement
    std::vector<double> peak_candidates;  // residual delays considered (top peaks)
};

/// Projections of the observation onto the two pilot combs: (F_b^H Y, F_s^H Y).
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> separate_paths(const ObservationGrid& y,
                                                             const ModelContext& ctx);

/// Channel-parameter maximum-likelihood estimation under one simplified model.
EstimationReport estimate(ModelKind kind, const ObservationGrid& y, const ModelContext& ctx,
                          const SearchConfig& cfg);

struct RefineResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool flagged = false;  // objective went non-finite; best-so-far returned
};

/// Quasi-Newton (BFGS) minimization with central finite-difference gradients.
/// `scales` holds one natural step per coordinate (the optimizer works in
/// scaled coordinates; gradients use 1e-3 of a scale unit).
RefineResult refine(const std::function<double(const Eigen::VectorXd&)>& objective,
                    const Eigen::VectorXd& init, const Eigen::VectorXd& scales, int max_iters,
                    double tol);

/// Indices of the two highest local maxima (ties to the lower index); a single
/// peak is returned twice.
std::pair<int, int> two_peak_candidates(const Eigen::VectorXd& correlation);

}  // namespace ntnpos
