// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "ntnpos/waveform.hpp"

namespace ntnpos {

/// Binary observation dump: 24-byte header (magic "TNNTOBS1", N and M as
/// little-endian uint32, noise variance as little-endian float64) followed by
/// the N x M grid in row-major order as little-endian complex64 (two float32).
void dump_observation(const ObservationGrid& grid, std::ostream& os);
void dump_observation(const ObservationGrid& grid, const std::string& path);

ObservationGrid load_observation(std::istream& is);
ObservationGrid load_observation(const std::string& path);

}  // namespace ntnpos
