// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ntnpos/rng.hpp"
#include "ntnpos/sweep.hpp"

using namespace ntnpos;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Scenario tiny_scenario() {
    Scenario sc;
    sc.subcarriers = 32;
    sc.symbols = 4;
    return sc;
}

SweepSpec tiny_spec() {
    SweepSpec spec;
    spec.axis = SweepAxis::SatPowerDbm;
    spec.values = {30.0, 40.0};
    spec.trials = 3;
    spec.models = {ModelKind::Comm, ModelKind::CCFOD};
    spec.seed = 7;
    spec.with_bias = false;
    return spec;
}

}  // namespace

TEST_CASE("axis names round-trip") {
    for (SweepAxis a : {SweepAxis::BsPowerDbm, SweepAxis::SatPowerDbm, SweepAxis::Eta,
                        SweepAxis::SpeedMps, SweepAxis::SatElevationDeg})
        CHECK(sweep_axis_from_name(sweep_axis_name(a)) == a);
    CHECK_THROWS(sweep_axis_from_name("bogus"));
}

TEST_CASE("applying an axis value touches exactly the right scenario field") {
    const Scenario base = tiny_scenario();
    CHECK(apply_axis(base, SweepAxis::BsPowerDbm, -3.0).bs_power_dbm == -3.0);
    CHECK(apply_axis(base, SweepAxis::SatPowerDbm, 55.0).sat_power_dbm == 55.0);
    CHECK(apply_axis(base, SweepAxis::Eta, 1.0e-7).cfo == 1.0e-7);
    CHECK(apply_axis(base, SweepAxis::SpeedMps, 12.5).ue_speed_mps == 12.5);
    CHECK(apply_axis(base, SweepAxis::SatElevationDeg, 70.0).sat_elevation_deg == 70.0);
    // untouched fields stay at the base value
    CHECK(apply_axis(base, SweepAxis::Eta, 1.0e-7).ue_speed_mps == base.ue_speed_mps);
}

TEST_CASE("derived trial seeds do not collide across indices") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t v = 0; v < 16; ++v)
        for (std::uint64_t t = 0; t < 64; ++t) seen.insert(derive_seed(5, v, t));
    CHECK(seen.size() == 16u * 64u);
    CHECK(derive_seed(5, 0, 1) != derive_seed(5, 1, 0));
    CHECK(derive_seed(5, 0, 0) != derive_seed(6, 0, 0));
}

TEST_CASE("sweep results are deterministic and thread-count independent") {
    const Scenario sc = tiny_scenario();
    SweepSpec spec = tiny_spec();
    const SweepResult a = run_sweep(spec, sc);
    const SweepResult b = run_sweep(spec, sc);
    spec.threads = 2;
    const SweepResult c = run_sweep(spec, sc);
    REQUIRE(a.cells.size() == b.cells.size());
    REQUIRE(a.cells.size() == c.cells.size());
    // bitwise-equal including NaN cells (invalid cells report NaN statistics)
    const auto same = [](double x, double y) {
        return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(same(a.cells[i].rmse_pos, b.cells[i].rmse_pos));
        CHECK(same(a.cells[i].rmse_clock, b.cells[i].rmse_clock));
        CHECK(same(a.cells[i].crb_pos, b.cells[i].crb_pos));
        CHECK(same(a.cells[i].rmse_pos, c.cells[i].rmse_pos));
        CHECK(same(a.cells[i].rmse_clock, c.cells[i].rmse_clock));
        CHECK(a.cells[i].failures == b.cells[i].failures);
        CHECK(a.cells[i].failures == c.cells[i].failures);
    }
}

TEST_CASE("sweep cells carry sane statistics") {
    Scenario sc = tiny_scenario();
    sc.subcarriers = 64;  // large enough for the estimator to track reliably
    sc.symbols = 8;
    SweepSpec spec;
    spec.axis = SweepAxis::BsPowerDbm;
    spec.values = {-30.0, 10.0};
    spec.trials = 3;
    spec.models = {ModelKind::CCFOD};
    spec.seed = 7;
    spec.with_bias = false;
    const SweepResult r = run_sweep(spec, sc);
    REQUIRE(r.cells.size() == spec.values.size() * spec.models.size());
    for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
        const SweepCell& cell = r.cell(static_cast<int>(vi), 0);
        CHECK(cell.axis_value == spec.values[vi]);
        CHECK(cell.model == ModelKind::CCFOD);
        CHECK(cell.valid);
        CHECK(cell.trials_used == spec.trials);
        CHECK(cell.rmse_pos > 0.0);
        CHECK(cell.crb_pos > 0.0);
        CHECK(std::isfinite(cell.sat_snr_db));
    }
    // more BS power tightens the position bound
    CHECK(r.cell(1, 0).crb_pos < r.cell(0, 0).crb_pos);
}

TEST_CASE("cells where most trials fail are marked invalid") {
    // a large oscillator frequency offset biases the satellite delay far
    // enough that the narrow-model position solve rejects every trial
    Scenario sc = tiny_scenario();
    sc.noise_sigma2 = 0.0;  // noise-free: failures are deterministic
    SweepSpec spec;
    spec.axis = SweepAxis::Eta;
    spec.values = {1.0e-6};
    spec.trials = 2;
    spec.models = {ModelKind::Comm};
    spec.with_bias = false;
    const SweepResult r = run_sweep(spec, sc);
    const SweepCell& cell = r.cell(0, 0);
    CHECK(cell.failures == spec.trials);
    CHECK_FALSE(cell.valid);
    CHECK(std::isnan(cell.rmse_pos));
}

TEST_CASE("CSV emission writes one file per estimand and model") {
    const Scenario sc = tiny_scenario();
    const SweepSpec spec = tiny_spec();
    const SweepResult r = run_sweep(spec, sc);
    const fs::path dir = fs::temp_directory_path() / "ntnpos_csv_test";
    fs::remove_all(dir);
    const auto paths = emit_csv(r, dir);
    CHECK(paths.size() == 4u * spec.models.size());
    for (const auto& p : paths) {
        CAPTURE(p.string());
        REQUIRE(fs::exists(p));
        const std::string text = slurp(p);
        CHECK(text.rfind("axis,RMSE,PEB,Bias\n", 0) == 0);
        CHECK(text.find('\r') == std::string::npos);  // LF endings only
        // header + one row per axis value
        CHECK(std::count(text.begin(), text.end(), '\n') ==
              1 + static_cast<long>(spec.values.size()));
    }
    const std::set<std::string> names = [&] {
        std::set<std::string> s;
        for (const auto& p : paths) s.insert(p.filename().string());
        return s;
    }();
    CHECK(names.count("position_CCFOD.csv") == 1);
    CHECK(names.count("clock_Comm.csv") == 1);

    // emission is byte-stable: writing the same result again matches exactly
    const fs::path dir2 = fs::temp_directory_path() / "ntnpos_csv_test2";
    fs::remove_all(dir2);
    const auto paths2 = emit_csv(r, dir2);
    REQUIRE(paths.size() == paths2.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        CHECK(slurp(paths[i]) == slurp(paths2[i]));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}
