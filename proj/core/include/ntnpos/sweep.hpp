// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ntnpos/bounds.hpp"
#include "ntnpos/scenario.hpp"

namespace ntnpos {

/// Scenario field swept by the Monte-Carlo harness.
enum class SweepAxis { BsPowerDbm, SatPowerDbm, Eta, SpeedMps, SatElevationDeg };

std::string_view sweep_axis_name(SweepAxis axis);
SweepAxis sweep_axis_from_name(std::string_view name);

/// Applies one axis value to a copy of the base scenario.
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value);

struct SweepSpec {
    SweepAxis axis = SweepAxis::SatPowerDbm;
    std::vector<double> values;
    int trials = 100;
    std::vector<ModelKind> models;
    std::uint64_t seed = 0;
    int threads = 1;
    bool with_bias = true;  // MCRB biases are expensive; CLI may disable them
};

/// One (axis value, model) cell of a sweep.
struct SweepCell {
    double axis_value = 0.0;
    ModelKind model = ModelKind::CCFOD;
    double rmse_pos = 0.0, crb_pos = 0.0, bias_pos = 0.0;
    double rmse_clock = 0.0, crb_clock = 0.0, bias_clock = 0.0;
    double rmse_speed = 0.0, crb_speed = 0.0, bias_speed = 0.0;
    double rmse_eta = 0.0, crb_eta = 0.0, bias_eta = 0.0;
    int trials_used = 0;
    int failures = 0;
    bool valid = true;  // false when failures exceed 10% of trials
    double bs_snr_db = 0.0, sat_snr_db = 0.0;  // received SNRs at this cell
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;  // values-major, models-minor order

    const SweepCell& cell(int value_idx, int model_idx) const {
        return cells[static_cast<std::size_t>(value_idx) * spec.models.size() + model_idx];
    }
};

/// Runs the full sweep: for every axis value, bounds once per model and
/// `trials` paired noise realizations (every model sees the same noisy
/// observation). Deterministic for a fixed seed regardless of thread count.
SweepResult run_sweep(const SweepSpec& spec, const Scenario& scenario);

/// Writes one CSV per (estimand, model) into the directory:
/// <estimand>_<model>.csv with header "axis,RMSE,PEB,Bias", one row per axis
/// value, 9 significant digits, LF line endings. Returns the file paths.
std::vector<std::filesystem::path> emit_csv(const SweepResult& result,
                                            const std::filesystem::path& dir);

}  // namespace ntnpos
