// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ntnpos/estimation.hpp"

using namespace ntnpos;

namespace {

struct Fixture {
    Scenario sc;
    GroundTruth truth;
    ModelContext ctx;

    explicit Fixture(int n = 128, int m = 8) {
        sc.subcarriers = n;
        sc.symbols = m;
        truth = compute_truth(sc);
        ctx = make_context(sc, truth);
    }
};

/// Truth perturbed off any search grid point.
ChannelParams off_grid_truth(const Fixture& f) {
    ChannelParams chi = f.truth.chi;
    const double delay_step = 2.0 * f.ctx.num.Tcp / (4.0 * f.ctx.num.N);
    const double range = gamma_unambiguous_range(f.ctx.num.fc, f.ctx.num.Ts,
                                                 f.ctx.precomp.psi_bs_bar);
    chi.tau_b += 0.37 * delay_step;
    chi.tau_s_res += 0.61 * delay_step;
    chi.gamma_b += 0.23 * range / (8.0 * f.ctx.num.M);
    chi.gamma_s -= 0.41 * range / (8.0 * f.ctx.num.M);
    chi.aod.elevation += 3.1e-3;
    chi.aod.azimuth -= 2.7e-3;
    return chi;
}

}  // namespace

TEST_CASE("two-peak candidate selection") {
    SUBCASE("two clear peaks, ordered by height") {
        Eigen::VectorXd c(7);
        c << 0.1, 0.9, 0.2, 0.1, 1.5, 0.3, 0.1;
        const auto [first, second] = two_peak_candidates(c);
        CHECK(first == 4);
        CHECK(second == 1);
    }
    SUBCASE("a plateau counts as one peak at its trailing edge") {
        Eigen::VectorXd c(6);
        c << 0.0, 1.0, 1.0, 0.0, 0.5, 0.0;
        const auto [first, second] = two_peak_candidates(c);
        CHECK(first == 2);
        CHECK(second == 4);
    }
    SUBCASE("equal-height distinct peaks tie to the lower index") {
        Eigen::VectorXd c(7);
        c << 0.0, 1.0, 0.0, 0.5, 0.0, 1.0, 0.0;
        const auto [first, second] = two_peak_candidates(c);
        CHECK(first == 1);
        CHECK(second == 5);
    }
    SUBCASE("single peak is returned twice") {
        Eigen::VectorXd c(5);
        c << 0.0, 0.2, 1.0, 0.2, 0.0;
        const auto [first, second] = two_peak_candidates(c);
        CHECK(first == 2);
        CHECK(second == 2);
    }
    SUBCASE("monotone input falls back to the global maximum") {
        Eigen::VectorXd c(4);
        c << 0.0, 0.1, 0.2, 0.3;
        const auto [first, second] = two_peak_candidates(c);
        CHECK(first == 3);
    }
}

TEST_CASE("quasi-Newton refinement minimizes an anisotropic quadratic") {
    auto f = [](const Eigen::VectorXd& x) {
        const double a = x(0) - 1.0;
        const double b = x(1) + 2.0;
        return a * a + 10.0 * b * b;
    };
    Eigen::VectorXd init(2), scales(2);
    init << 0.0, 0.0;
    scales << 1.0, 1.0;
    const RefineResult r = refine(f, init, scales, 100, 1.0e-14);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1.0e-5));
    CHECK(r.x(1) == doctest::Approx(-2.0).epsilon(1.0e-5));
    CHECK(r.value < 1.0e-9);
    CHECK_FALSE(r.flagged);
    CHECK(r.iterations > 0);
}

TEST_CASE("refinement survives badly scaled coordinates") {
    // same bowl, but one coordinate lives at 1e-9 scale
    auto f = [](const Eigen::VectorXd& x) {
        const double a = x(0) - 3.0e-9;
        const double b = x(1) - 2.0;
        return 1.0e12 * a * a + b * b;
    };
    Eigen::VectorXd init(2), scales(2);
    init << 0.0, 0.0;
    scales << 1.0e-9, 1.0;
    const RefineResult r = refine(f, init, scales, 200, 1.0e-14);
    CHECK(r.x(0) == doctest::Approx(3.0e-9).epsilon(1.0e-4));
    CHECK(r.x(1) == doctest::Approx(2.0).epsilon(1.0e-5));
}

TEST_CASE("matched estimation recovers off-grid parameters to spec accuracy") {
    const Fixture f;
    const ChannelParams chi = off_grid_truth(f);
    const double tol_delay = f.ctx.num.T0 / (100.0 * f.ctx.num.N);
    const double range = gamma_unambiguous_range(f.ctx.num.fc, f.ctx.num.Ts,
                                                 f.ctx.precomp.psi_bs_bar);
    const double tol_gamma = range / (100.0 * f.ctx.num.M);
    const double tol_angle = 1.0e-4;
    const SearchConfig cfg = SearchConfig::defaults(f.ctx);

    for (ModelKind kind : {ModelKind::Comm, ModelKind::SlowD, ModelKind::CCFODnoICI,
                           ModelKind::CCFOD}) {
        CAPTURE(model_name(kind));
        ChannelParams used = chi;
        if (kind == ModelKind::Comm) {
            used.gamma_b = 0.0;  // Comm synthesis carries no Doppler factors
            used.gamma_s = 0.0;
        }
        const ObservationGrid y = build_observation_simplified(kind, used, f.ctx);
        const EstimationReport rep = estimate(kind, y, f.ctx, cfg);
        CHECK(std::abs(rep.params.tau_b - used.tau_b) < tol_delay);
        CHECK(std::abs(rep.params.tau_s_res - used.tau_s_res) < tol_delay);
        CHECK(std::abs(rep.params.aod.elevation - used.aod.elevation) < tol_angle);
        CHECK(std::abs(rep.params.aod.azimuth - used.aod.azimuth) < tol_angle);
        if (kind != ModelKind::Comm) {
            CHECK(std::abs(rep.params.gamma_b - used.gamma_b) < tol_gamma);
            CHECK(std::abs(rep.params.gamma_s - used.gamma_s) < tol_gamma);
        }
        CHECK(std::abs(rep.params.alpha_b - used.alpha_b) <
              1.0e-3 * std::abs(used.alpha_b));
        CHECK(std::abs(rep.params.alpha_s - used.alpha_s) <
              1.0e-3 * std::abs(used.alpha_s));
        // the reconstruction residual collapses on matched data
        CHECK(rep.objective < 1.0e-10 * y.samples.squaredNorm());
        CHECK(rep.objective <= rep.coarse_objective + 1.0e-12);
    }
}

TEST_CASE("refinement never worsens the coarse objective under noise") {
    const Fixture f;
    const double sigma2 = scenario_sigma2(f.sc, f.truth);
    ObservationGrid y = build_observation_generative(f.sc, f.truth, f.ctx);
    y = add_noise(y, sigma2, 123);
    const SearchConfig cfg = SearchConfig::defaults(f.ctx);
    for (ModelKind kind : {ModelKind::Comm, ModelKind::SlowD, ModelKind::CCFODnoICI,
                           ModelKind::CCFOD}) {
        CAPTURE(model_name(kind));
        const EstimationReport rep = estimate(kind, y, f.ctx, cfg);
        CHECK(rep.objective <= rep.coarse_objective * (1.0 + 1.0e-12));
        CHECK(std::isfinite(rep.objective));
    }
}

TEST_CASE("search configuration defaults are well-formed") {
    const Fixture f;
    const SearchConfig cfg = SearchConfig::defaults(f.ctx);
    CHECK(cfg.delay_lo == 0.0);
    CHECK(cfg.delay_hi > cfg.delay_lo);
    CHECK(cfg.delay_points >= f.ctx.num.N);
    CHECK(cfg.gamma_halfwidth > 0.0);
    CHECK(cfg.gamma_points >= f.ctx.num.M);
}
