// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ntnpos/rng.hpp"
#include "ntnpos/solver.hpp"

namespace ntnpos {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct AxisName {
    SweepAxis axis;
    std::string_view name;
};

constexpr AxisName kAxisNames[] = {
    {SweepAxis::BsPowerDbm, "bs_power_dbm"},   {SweepAxis::SatPowerDbm, "sat_power_dbm"},
    {SweepAxis::Eta, "eta"},                   {SweepAxis::SpeedMps, "speed_mps"},
    {SweepAxis::SatElevationDeg, "sat_elevation_deg"},
};

}  // namespace

std::string_view sweep_axis_name(SweepAxis axis) {
    for (const AxisName& a : kAxisNames)
        if (a.axis == axis) return a.name;
    throw std::invalid_argument("unknown sweep axis");
}

SweepAxis sweep_axis_from_name(std::string_view name) {
    for (const AxisName& a : kAxisNames)
        if (a.name == name) return a.axis;
    throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
    Scenario sc = base;
    switch (axis) {
        case SweepAxis::BsPowerDbm: sc.bs_power_dbm = value; break;
        case SweepAxis::SatPowerDbm: sc.sat_power_dbm = value; break;
        case SweepAxis::Eta: sc.cfo = value; break;
        case SweepAxis::SpeedMps: sc.ue_speed_mps = value; break;
        case SweepAxis::SatElevationDeg: sc.sat_elevation_deg = value; break;
    }
    return sc;
}

namespace {

/// Per-axis-value precomputed state shared by all trials.
struct CellState {
    Scenario sc;
    GroundTruth truth;
    ModelContext ctx;
    double sigma2 = 0.0;
    Eigen::MatrixXcd clean;  // noise-free generative observation
    std::vector<BoundReport> bounds;  // one per model
};

struct TrialErrors {
    bool ok = false;
    double e_pos = 0.0, e_clock = 0.0, e_speed = 0.0, e_eta = 0.0;
};

/// Runs fn(i) for i in [0, count) on `threads` workers; any exception is
/// rethrown on the caller thread.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min(threads, count);
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double rmse(const std::vector<double>& sq, int used) {
    if (used <= 0) return kNan;
    double acc = 0.0;
    for (double v : sq) acc += v;
    return std::sqrt(acc / used);
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const Scenario& scenario) {
    if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
    if (spec.trials < 1) throw std::invalid_argument("sweep needs at least one trial");
    if (spec.models.empty()) throw std::invalid_argument("sweep needs at least one model");

    const int nv = static_cast<int>(spec.values.size());
    const int nm = static_cast<int>(spec.models.size());

    // Phase 1: per-axis-value state and (optionally) bounds, once per model.
    std::vector<CellState> states(nv);
    parallel_for(nv, spec.threads, [&](int vi) {
        CellState& st = states[vi];
        st.sc = apply_axis(scenario, spec.axis, spec.values[vi]);
        st.truth = compute_truth(st.sc);
        st.ctx = make_context(st.sc, st.truth);
        st.sigma2 = (st.sc.noise_sigma2 == 0.0) ? 0.0 : scenario_sigma2(st.sc, st.truth);
        st.clean = build_observation_generative(st.sc, st.truth, st.ctx).samples;
        st.bounds.resize(nm);
        for (int mi = 0; mi < nm; ++mi) {
            if (st.sigma2 > 0.0) {
                st.bounds[mi] = compute_bounds(spec.models[mi], st.sc, st.truth, st.ctx,
                                               st.sigma2, spec.with_bias);
            } else if (spec.with_bias) {
                st.bounds[mi] = mcrb_bias(spec.models[mi], st.sc, st.truth, st.ctx);
            }
        }
    });

    // Phase 2: paired Monte-Carlo trials; every model sees the same noisy Y.
    std::vector<TrialErrors> records(
        static_cast<std::size_t>(nv) * spec.trials * nm);
    parallel_for(nv * spec.trials, spec.threads, [&](int job) {
        const int vi = job / spec.trials;
        const int ti = job % spec.trials;
        const CellState& st = states[vi];
        ObservationGrid y{st.clean, st.sigma2};
        if (st.sigma2 > 0.0)
            y = add_noise(y, st.sigma2,
                          derive_seed(spec.seed, static_cast<std::uint64_t>(vi),
                                      static_cast<std::uint64_t>(ti)));
        const SearchConfig cfg = SearchConfig::defaults(st.ctx);
        for (int mi = 0; mi < nm; ++mi) {
            TrialErrors& rec =
                records[(static_cast<std::size_t>(vi) * spec.trials + ti) * nm + mi];
            try {
                const EstimationReport rep = estimate(spec.models[mi], y, st.ctx, cfg);
                const PositionalParams est = solve_positional(
                    spec.models[mi], make_solver_inputs(rep.params, st.sc, st.truth));
                rec.e_pos = (est.p0 - st.truth.chi_pos.p0).norm();
                rec.e_clock = std::abs(est.delta_t0 - st.truth.chi_pos.delta_t0);
                rec.e_speed = std::abs(est.speed - st.truth.chi_pos.speed);
                rec.e_eta = std::abs(est.eta - st.truth.chi_pos.eta);
                rec.ok = std::isfinite(rec.e_pos) && std::isfinite(rec.e_clock);
            } catch (const std::exception&) {
                rec.ok = false;
            }
        }
    });

    // Phase 3: sequential order-independent reduction.
    SweepResult result;
    result.spec = spec;
    result.cells.resize(static_cast<std::size_t>(nv) * nm);
    for (int vi = 0; vi < nv; ++vi) {
        const CellState& st = states[vi];
        for (int mi = 0; mi < nm; ++mi) {
            SweepCell& cell = result.cells[static_cast<std::size_t>(vi) * nm + mi];
            cell.axis_value = spec.values[vi];
            cell.model = spec.models[mi];
            const bool has_speed = spec.models[mi] != ModelKind::Comm;

            std::vector<double> sq_pos, sq_clock, sq_speed, sq_eta;
            for (int ti = 0; ti < spec.trials; ++ti) {
                const TrialErrors& rec =
                    records[(static_cast<std::size_t>(vi) * spec.trials + ti) * nm + mi];
                if (!rec.ok) {
                    ++cell.failures;
                    continue;
                }
                sq_pos.push_back(rec.e_pos * rec.e_pos);
                sq_clock.push_back(rec.e_clock * rec.e_clock);
                if (has_speed) {
                    sq_speed.push_back(rec.e_speed * rec.e_speed);
                    sq_eta.push_back(rec.e_eta * rec.e_eta);
                }
            }
            cell.trials_used = spec.trials - cell.failures;
            cell.valid = cell.failures * 10 <= spec.trials;
            if (cell.valid) {
                cell.rmse_pos = rmse(sq_pos, cell.trials_used);
                cell.rmse_clock = rmse(sq_clock, cell.trials_used);
                cell.rmse_speed = has_speed ? rmse(sq_speed, cell.trials_used) : kNan;
                cell.rmse_eta = has_speed ? rmse(sq_eta, cell.trials_used) : kNan;
            } else {
                cell.rmse_pos = cell.rmse_clock = cell.rmse_speed = cell.rmse_eta = kNan;
            }

            const BoundReport& b = st.bounds[mi];
            cell.crb_pos = b.peb;
            cell.crb_clock = b.ceb;
            cell.crb_speed = b.speed_eb;
            cell.crb_eta = b.eta_eb;
            cell.bias_pos = spec.with_bias ? b.bias_pos : kNan;
            cell.bias_clock = spec.with_bias ? b.bias_clock : kNan;
            cell.bias_speed = spec.with_bias ? b.bias_speed : kNan;
            cell.bias_eta = spec.with_bias ? b.bias_eta : kNan;
            cell.bs_snr_db = (st.sigma2 > 0.0)
                                 ? received_snr(PathId::Bs, st.sc, st.truth, st.sigma2)
                                 : kNan;
            cell.sat_snr_db = (st.sigma2 > 0.0)
                                  ? received_snr(PathId::Sat, st.sc, st.truth, st.sigma2)
                                  : kNan;
        }
    }
    return result;
}

namespace {

struct Estimand {
    std::string_view name;
    double SweepCell::*rmse;
    double SweepCell::*crb;
    double SweepCell::*bias;
};

constexpr Estimand kEstimands[] = {
    {"position", &SweepCell::rmse_pos, &SweepCell::crb_pos, &SweepCell::bias_pos},
    {"clock", &SweepCell::rmse_clock, &SweepCell::crb_clock, &SweepCell::bias_clock},
    {"speed", &SweepCell::rmse_speed, &SweepCell::crb_speed, &SweepCell::bias_speed},
    {"eta", &SweepCell::rmse_eta, &SweepCell::crb_eta, &SweepCell::bias_eta},
};

std::string format_row(double axis, double rmse, double crb, double bias) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", axis, rmse, crb, bias);
    return buf;
}

}  // namespace

std::vector<std::filesystem::path> emit_csv(const SweepResult& result,
                                            const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const int nv = static_cast<int>(result.spec.values.size());
    for (const Estimand& est : kEstimands) {
        for (int mi = 0; mi < static_cast<int>(result.spec.models.size()); ++mi) {
            const std::filesystem::path path =
                dir / (std::string(est.name) + "_" +
                       std::string(model_name(result.spec.models[mi])) + ".csv");
            std::ofstream out(path, std::ios::binary);  // binary keeps LF on all hosts
            if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
            out << "axis,RMSE,PEB,Bias\n";
            for (int vi = 0; vi < nv; ++vi) {
                const SweepCell& c = result.cell(vi, mi);
                out << format_row(c.axis_value, c.*est.rmse, c.*est.crb, c.*est.bias);
            }
            if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace ntnpos
