// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ntnpos/types.hpp"

namespace ntnpos {

/// Channel-domain parameter vector. Delays are absolute values in the UE time
/// frame: tau_b is the total BS-path delay and tau_s_res the post-timing-advance
/// satellite residual. gamma_b/gamma_s are unused by the Comm model.
struct ChannelParams {
    cplx alpha_b{0.0, 0.0};
    cplx alpha_s{0.0, 0.0};
    double tau_b = 0.0;
    double tau_s_res = 0.0;
    Aod aod;
    double gamma_b = 0.0;
    double gamma_s = 0.0;
};

/// Positional parameter vector: UE position, clock offset, speed and CFO plus
/// the complex path gains. speed/eta are undefined under the Comm model.
struct PositionalParams {
    Vec3 p0;
    double delta_t0 = 0.0;
    double speed = 0.0;
    double eta = 0.0;
    cplx alpha_b{0.0, 0.0};
    cplx alpha_s{0.0, 0.0};
};

}  // namespace ntnpos
