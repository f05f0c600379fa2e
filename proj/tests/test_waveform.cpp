// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ntnpos/waveform.hpp"

using namespace ntnpos;

namespace {

Scenario small_scenario() {
    Scenario sc;
    sc.subcarriers = 64;
    sc.symbols = 8;
    return sc;
}

double rel_err(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).norm() / b.norm();
}

}  // namespace

TEST_CASE("pilots are unit-modulus QPSK and deterministic per seed") {
    Scenario sc = small_scenario();
    const Numerology num = Numerology::from_scenario(sc);
    const PilotGrid a = generate_pilots(num, 42);
    const PilotGrid b = generate_pilots(num, 42);
    const PilotGrid c = generate_pilots(num, 43);
    CHECK((a.values - b.values).norm() == 0.0);
    CHECK((a.values - c.values).norm() > 0.0);
    for (int n = 0; n < num.N; ++n)
        for (int m = 0; m < num.M; ++m) {
            CHECK(std::abs(a.values(n, m)) == doctest::Approx(1.0));
            CHECK(std::abs(a.values(n, m).real()) ==
                  doctest::Approx(std::abs(a.values(n, m).imag())));
        }
}

TEST_CASE("pilot golden values for seed 42") {
    Numerology num;
    num.N = 4;
    num.M = 2;
    num.delta_f = 30.0e3;
    num.T0 = 1.0 / num.delta_f;
    num.Tcp = 2.3e-6;
    num.Ts = num.T0 + num.Tcp;
    num.fc = 2.0e9;
    const PilotGrid p = generate_pilots(num, 42);
    const double q = 1.0 / std::sqrt(2.0);
    const cplx expected[4][2] = {{{q, -q}, {-q, q}},
                                 {{q, q}, {q, q}},
                                 {{q, -q}, {q, q}},
                                 {{q, -q}, {q, q}}};
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 2; ++m)
            CHECK(std::abs(p.values(n, m) - expected[n][m]) < 1.0e-12);
}

TEST_CASE("precoder schedule: unit rows, fixed prefix, deterministic sweep") {
    Scenario sc = small_scenario();
    const Numerology num = Numerology::from_scenario(sc);
    const ArrayLayout layout = ArrayLayout::upa(sc.antennas, sc.wavelength());
    const AodSector sector{-1.0, 1.0, -1.5, 1.5};
    const PrecoderSchedule w = generate_precoders(num, layout, sc.beam_repeat, 2, sector);
    CHECK(w.weights.rows() == num.M);
    CHECK(w.weights.cols() == sc.antennas);
    CHECK(w.repeat_prefix == sc.beam_repeat);
    for (int m = 0; m < num.M; ++m)
        CHECK(w.weights.row(m).norm() == doctest::Approx(1.0).epsilon(1.0e-12));
    for (int m = 1; m < w.repeat_prefix; ++m)
        CHECK((w.weights.row(m) - w.weights.row(0)).norm() == 0.0);
    // the sweep portion actually changes beams
    CHECK((w.weights.row(w.repeat_prefix) - w.weights.row(0)).norm() > 1.0e-3);
    const PrecoderSchedule w2 = generate_precoders(num, layout, sc.beam_repeat, 2, sector);
    CHECK((w.weights - w2.weights).norm() == 0.0);
}

TEST_CASE("per-path synthesis matrices are orthonormal at zero Doppler") {
    Scenario sc = small_scenario();
    const Numerology num = Numerology::from_scenario(sc);
    const Eigen::MatrixXcd fb = fourier_matrix(PathId::Bs, num, 0.0);
    const Eigen::MatrixXcd fs = fourier_matrix(PathId::Sat, num, 0.0);
    const int half = num.N / 2;
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(half, half);
    CHECK((fb.adjoint() * fb - eye).norm() < 1.0e-12);
    CHECK((fs.adjoint() * fs - eye).norm() < 1.0e-12);
    CHECK((fb.adjoint() * fs).norm() < 1.0e-12);  // parities do not mix
}

TEST_CASE("generative synthesis matches the brute-force time-domain reference") {
    Scenario sc = small_scenario();
    sc.cfo = 5.0e-7;
    sc.ue_speed_mps = 20.0;
    sc.sat_elevation_deg = 62.0;
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);
    const ObservationGrid oracle = time_domain_oracle(sc, truth, ctx);
    const ObservationGrid gen = build_observation_generative(sc, truth, ctx);
    CHECK(rel_err(gen.samples, oracle.samples) < 1.0e-6);
}

TEST_CASE("model degeneracy chain") {
    Scenario sc = small_scenario();
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);

    SUBCASE("generative with quadratic terms removed equals the richest model") {
        GenOverrides ov;
        ov.zero_doppler_rate = true;
        ov.bs_fourier_gamma_zero = true;
        DelayExpansion eb = truth.exp_b, es = truth.exp_s;
        eb.mu = 0.0;
        es.mu = 0.0;
        const EffectiveParams pb = effective_params(eb, truth.clock);
        const EffectiveParams ps = effective_params(es, truth.clock);
        ChannelParams chi = truth.chi;
        chi.tau_b = pb.tau;
        chi.tau_s_res = ps.tau - ctx.precomp.tau_bs;
        chi.gamma_b = pb.gamma;
        chi.gamma_s = ps.gamma;
        const ObservationGrid gen = build_observation_generative(sc, truth, ctx, ov);
        const ObservationGrid sim = build_observation_simplified(ModelKind::CCFOD, chi, ctx);
        CHECK(rel_err(gen.samples, sim.samples) < 1.0e-12);
    }
    SUBCASE("feature removals walk down the model family exactly") {
        ModelFeatures f = ModelFeatures::of(ModelKind::CCFOD);
        f.ici = false;
        CHECK(rel_err(build_observation_simplified(f, truth.chi, ctx).samples,
                      build_observation_simplified(ModelKind::CCFODnoICI, truth.chi, ctx)
                          .samples) == 0.0);
        f.intersubcarrier = false;
        CHECK(rel_err(build_observation_simplified(f, truth.chi, ctx).samples,
                      build_observation_simplified(ModelKind::SlowD, truth.chi, ctx)
                          .samples) == 0.0);
        f.slow_time = false;
        CHECK(rel_err(build_observation_simplified(f, truth.chi, ctx).samples,
                      build_observation_simplified(ModelKind::Comm, truth.chi, ctx)
                          .samples) == 0.0);
    }
}

TEST_CASE("synthesized energy scales linearly with transmit power") {
    Scenario sc = small_scenario();
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);
    ChannelParams bs_only = truth.chi;
    bs_only.alpha_s = 0.0;
    const double e1 =
        build_observation_simplified(ModelKind::CCFOD, bs_only, ctx).samples.squaredNorm();

    Scenario hot = sc;
    hot.bs_power_dbm += 10.0;
    const ModelContext ctx2 = make_context(hot, compute_truth(hot));
    const double e2 =
        build_observation_simplified(ModelKind::CCFOD, bs_only, ctx2).samples.squaredNorm();
    CHECK(e2 / e1 == doctest::Approx(10.0).epsilon(1.0e-9));
}

TEST_CASE("additive noise has the configured variance and is seed-deterministic") {
    ObservationGrid clean;
    clean.samples = Eigen::MatrixXcd::Zero(128, 32);
    const double sigma2 = 2.5;
    const ObservationGrid a = add_noise(clean, sigma2, 9);
    const ObservationGrid b = add_noise(clean, sigma2, 9);
    const ObservationGrid c = add_noise(clean, sigma2, 10);
    CHECK((a.samples - b.samples).norm() == 0.0);
    CHECK((a.samples - c.samples).norm() > 0.0);
    const double mean_power = a.samples.squaredNorm() / (128.0 * 32.0);
    CHECK(mean_power == doctest::Approx(sigma2).epsilon(0.1));
    CHECK(a.noise_variance == doctest::Approx(sigma2));
}

TEST_CASE("model names round-trip") {
    for (ModelKind k : {ModelKind::Comm, ModelKind::SlowD, ModelKind::CCFODnoICI,
                        ModelKind::CCFOD, ModelKind::Generative})
        CHECK(model_from_name(model_name(k)) == k);
    CHECK_THROWS(model_from_name("nonsense"));
}

TEST_CASE("residual and absolute delays are inverse helpers") {
    Scenario sc = small_scenario();
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);
    const double tau = 1.7e-7, gamma = 3.0e-7;
    CHECK(absolute_delay(residual_delay(tau, gamma, ctx), gamma, ctx) ==
          doctest::Approx(tau).epsilon(1.0e-15));
}

TEST_CASE("out-of-prefix delays are rejected by the generative builder") {
    Scenario sc = small_scenario();
    // delay spread beyond the cyclic prefix: the BS residual exceeds Tcp
    sc.ue_position = Vec3{800.0, 0.0, 1.5};
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);
    CHECK_THROWS_AS(build_observation_generative(sc, truth, ctx), OutOfCoverageError);
}
