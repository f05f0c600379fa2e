// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: synthesize observations, run estimators, evaluate
// error bounds, and drive Monte-Carlo sweeps.

#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "ntnpos/bounds.hpp"
#include "ntnpos/config.hpp"
#include "ntnpos/obs_io.hpp"
#include "ntnpos/rng.hpp"
#include "ntnpos/solver.hpp"
#include "ntnpos/sweep.hpp"

namespace {

using namespace ntnpos;

struct CommonOpts {
    std::string config;
    std::uint64_t seed = 1;
    int trials = 100;
    std::vector<std::string> model_names;
    std::string out;
    int threads = 1;
    bool full = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "scenario config file (key=value lines)");
    cmd->add_option("--seed", o.seed, "base seed for noise realizations");
    cmd->add_option("--trials", o.trials, "Monte-Carlo trials per axis value");
    cmd->add_option("--model", o.model_names, "estimation models (comma separated)")
        ->delimiter(',');
    cmd->add_option("--out", o.out, "output file or directory");
    cmd->add_option("--threads", o.threads, "worker threads for sweeps");
    cmd->add_flag("--full", o.full,
                  "use the full reference numerology instead of the reduced profile");
}

Scenario make_scenario(const CommonOpts& o) {
    Scenario base;
    if (!o.full) base.apply_desk_profile();
    if (!o.config.empty()) base = load_scenario(o.config, base);
    return base;
}

std::vector<ModelKind> parse_models(const CommonOpts& o) {
    if (o.model_names.empty())
        return {ModelKind::Comm, ModelKind::SlowD, ModelKind::CCFODnoICI, ModelKind::CCFOD};
    std::vector<ModelKind> models;
    models.reserve(o.model_names.size());
    for (const std::string& name : o.model_names) models.push_back(model_from_name(name));
    return models;
}

ObservationGrid synthesize(const Scenario& sc, const GroundTruth& truth,
                           const ModelContext& ctx, std::uint64_t seed, double* sigma2_out) {
    const double sigma2 = (sc.noise_sigma2 == 0.0) ? 0.0 : scenario_sigma2(sc, truth);
    if (sigma2_out) *sigma2_out = sigma2;
    ObservationGrid y = build_observation_generative(sc, truth, ctx);
    y.noise_variance = sigma2;
    if (sigma2 > 0.0) y = add_noise(y, sigma2, seed);
    return y;
}

int cmd_synth(const CommonOpts& o) {
    const Scenario sc = make_scenario(o);
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);
    double sigma2 = 0.0;
    const ObservationGrid y = synthesize(sc, truth, ctx, o.seed, &sigma2);
    const std::string path = o.out.empty() ? "observation.bin" : o.out;
    dump_observation(y, path);
    std::printf("wrote %s: N=%d M=%d sigma2=%.9g\n", path.c_str(), sc.subcarriers, sc.symbols,
                sigma2);
    if (sigma2 > 0.0)
        std::printf("received SNR: BS %.3f dB, satellite %.3f dB\n",
                    received_snr(PathId::Bs, sc, truth, sigma2),
                    received_snr(PathId::Sat, sc, truth, sigma2));
    return 0;
}

int cmd_estimate(const CommonOpts& o) {
    const Scenario sc = make_scenario(o);
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);
    double sigma2 = 0.0;
    const ObservationGrid y = synthesize(sc, truth, ctx, o.seed, &sigma2);
    const SearchConfig cfg = SearchConfig::defaults(ctx);
    for (ModelKind kind : parse_models(o)) {
        const EstimationReport rep = estimate(kind, y, ctx, cfg);
        std::printf("model: %s\n", std::string(model_name(kind)).c_str());
        std::printf("  tau_b: %.9g  (truth %.9g)\n", rep.params.tau_b, truth.chi.tau_b);
        std::printf("  tau_s_res: %.9g  (truth %.9g)\n", rep.params.tau_s_res,
                    truth.chi.tau_s_res);
        std::printf("  aod_el: %.9g  aod_az: %.9g  (truth %.9g %.9g)\n",
                    rep.params.aod.elevation, rep.params.aod.azimuth,
                    truth.chi.aod.elevation, truth.chi.aod.azimuth);
        if (kind != ModelKind::Comm)
            std::printf("  gamma_b: %.9g  gamma_s: %.9g  (truth %.9g %.9g)\n",
                        rep.params.gamma_b, rep.params.gamma_s, truth.chi.gamma_b,
                        truth.chi.gamma_s);
        std::printf("  objective: %.9g  iterations: %d  flagged: %d\n", rep.objective,
                    rep.iterations, rep.refine_flagged ? 1 : 0);
        try {
            const PositionalParams est =
                solve_positional(kind, make_solver_inputs(rep.params, sc, truth));
            std::printf("  position: %.9g %.9g %.9g  (error %.9g m)\n", est.p0.x, est.p0.y,
                        est.p0.z, (est.p0 - truth.chi_pos.p0).norm());
            std::printf("  clock_offset: %.9g  (error %.9g s)\n", est.delta_t0,
                        std::abs(est.delta_t0 - truth.chi_pos.delta_t0));
            if (kind != ModelKind::Comm)
                std::printf("  speed: %.9g  eta: %.9g  (errors %.9g m/s, %.9g)\n", est.speed,
                            est.eta, std::abs(est.speed - truth.chi_pos.speed),
                            std::abs(est.eta - truth.chi_pos.eta));
        } catch (const std::exception& e) {
            std::printf("  positional solve failed: %s\n", e.what());
        }
    }
    return 0;
}

int cmd_bounds(const CommonOpts& o, bool no_bias) {
    const Scenario sc = make_scenario(o);
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);
    const double sigma2 = (sc.noise_sigma2 == 0.0) ? 0.0 : scenario_sigma2(sc, truth);
    for (ModelKind kind : parse_models(o)) {
        std::printf("model: %s\n", std::string(model_name(kind)).c_str());
        if (sigma2 > 0.0) {
            const BoundReport r = compute_bounds(kind, sc, truth, ctx, sigma2, !no_bias);
            std::printf("  peb: %.9g m\n  ceb: %.9g s\n  speed_bound: %.9g m/s\n"
                        "  eta_bound: %.9g\n",
                        r.peb, r.ceb, r.speed_eb, r.eta_eb);
            if (!no_bias)
                std::printf("  bias_pos: %.9g m\n  bias_clock: %.9g s\n"
                            "  bias_speed: %.9g m/s\n  bias_eta: %.9g\n  converged: %d\n",
                            r.bias_pos, r.bias_clock, r.bias_speed, r.bias_eta,
                            r.converged ? 1 : 0);
        } else if (!no_bias) {
            const BoundReport r = mcrb_bias(kind, sc, truth, ctx);
            std::printf("  bias_pos: %.9g m\n  bias_clock: %.9g s\n  bias_speed: %.9g m/s\n"
                        "  bias_eta: %.9g\n  converged: %d\n",
                        r.bias_pos, r.bias_clock, r.bias_speed, r.bias_eta,
                        r.converged ? 1 : 0);
        }
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& axis, std::vector<double> values,
              bool no_bias) {
    SweepSpec spec;
    spec.axis = sweep_axis_from_name(axis);
    if (values.empty()) throw std::invalid_argument("sweep requires --values");
    spec.values = std::move(values);
    spec.trials = o.trials;
    spec.models = parse_models(o);
    spec.seed = o.seed;
    spec.threads = o.threads;
    spec.with_bias = !no_bias;
    const Scenario sc = make_scenario(o);
    const SweepResult result = run_sweep(spec, sc);
    const std::string dir = o.out.empty() ? "sweep_out" : o.out;
    const auto files = emit_csv(result, dir);
    for (const SweepCell& c : result.cells)
        std::printf("%s=%.9g model=%s rmse_pos=%.9g peb=%.9g bias_pos=%.9g "
                    "bs_snr=%.3f sat_snr=%.3f failures=%d%s\n",
                    std::string(sweep_axis_name(spec.axis)).c_str(), c.axis_value,
                    std::string(model_name(c.model)).c_str(), c.rmse_pos, c.crb_pos,
                    c.bias_pos, c.bs_snr_db, c.sat_snr_db, c.failures,
                    c.valid ? "" : " INVALID");
    std::printf("wrote %zu CSV files to %s\n", files.size(), dir.c_str());
    return 0;
}

int cmd_verify(const CommonOpts& o) {
    Scenario sc = make_scenario(o);
    sc.subcarriers = 64;
    sc.symbols = 8;
    const GroundTruth truth = compute_truth(sc);
    const ModelContext ctx = make_context(sc, truth);

    const Eigen::MatrixXcd oracle = time_domain_oracle(sc, truth, ctx).samples;
    const Eigen::MatrixXcd gen = build_observation_generative(sc, truth, ctx).samples;
    const double rel_oracle = (oracle - gen).norm() / oracle.norm();
    std::printf("oracle_vs_generative_rel: %.3e\n", rel_oracle);

    GenOverrides ov;
    ov.zero_doppler_rate = true;
    ov.bs_fourier_gamma_zero = true;
    const Eigen::MatrixXcd gen_deg = build_observation_generative(sc, truth, ctx, ov).samples;
    ChannelParams chi = truth.chi;
    {
        // Match the degenerate synthesis: recompute effective parameters with
        // the quadratic delay terms removed.
        DelayExpansion eb = truth.exp_b, es = truth.exp_s;
        eb.mu = 0.0;
        es.mu = 0.0;
        const EffectiveParams pb = effective_params(eb, truth.clock);
        const EffectiveParams ps = effective_params(es, truth.clock);
        chi.tau_b = pb.tau;
        chi.tau_s_res = ps.tau - ctx.precomp.tau_bs;
        chi.gamma_b = pb.gamma;
        chi.gamma_s = ps.gamma;
    }
    const Eigen::MatrixXcd ccfod =
        build_observation_simplified(ModelKind::CCFOD, chi, ctx).samples;
    const double rel_chain = (gen_deg - ccfod).norm() / gen_deg.norm();
    std::printf("generative_mu0_vs_ccfod_rel: %.3e\n", rel_chain);

    ModelFeatures f = ModelFeatures::of(ModelKind::CCFOD);
    f.ici = false;
    const Eigen::MatrixXcd no_ici_a = build_observation_simplified(f, chi, ctx).samples;
    const Eigen::MatrixXcd no_ici_b =
        build_observation_simplified(ModelKind::CCFODnoICI, chi, ctx).samples;
    f.intersubcarrier = false;
    const Eigen::MatrixXcd slowd_a = build_observation_simplified(f, chi, ctx).samples;
    const Eigen::MatrixXcd slowd_b =
        build_observation_simplified(ModelKind::SlowD, chi, ctx).samples;
    f.slow_time = false;
    const Eigen::MatrixXcd comm_a = build_observation_simplified(f, chi, ctx).samples;
    const Eigen::MatrixXcd comm_b =
        build_observation_simplified(ModelKind::Comm, chi, ctx).samples;
    const double rel_noici = (no_ici_a - no_ici_b).norm() / no_ici_b.norm();
    const double rel_slowd = (slowd_a - slowd_b).norm() / slowd_b.norm();
    const double rel_comm = (comm_a - comm_b).norm() / comm_b.norm();
    std::printf("ccfod_ici_off_vs_noici_rel: %.3e\n", rel_noici);
    std::printf("noici_intersubcarrier_off_vs_slowd_rel: %.3e\n", rel_slowd);
    std::printf("slowd_slow_time_off_vs_comm_rel: %.3e\n", rel_comm);

    const bool ok = rel_oracle < 1.0e-6 && rel_chain < 1.0e-12 && rel_noici < 1.0e-12 &&
                    rel_slowd < 1.0e-12 && rel_comm < 1.0e-12;
    std::printf("verify: %s\n", ok ? "ok" : "FAILED");
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positioning simulator for combined terrestrial/LEO downlink OFDM "
                 "observations.\n\nScenario config keys:\n" +
                 config_key_help()};
    app.require_subcommand(1);

    CommonOpts opts;
    bool no_bias = false;
    std::string axis = "sat_power_dbm";
    std::vector<double> values;

    CLI::App* synth = app.add_subcommand("synth", "synthesize and dump one observation");
    add_common(synth, opts);
    CLI::App* estimate = app.add_subcommand("estimate", "one-shot estimation report");
    add_common(estimate, opts);
    CLI::App* bounds = app.add_subcommand("bounds", "CRB and model-mismatch bias report");
    add_common(bounds, opts);
    bounds->add_flag("--no-bias", no_bias, "skip the (slow) mismatch-bias fits");
    CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep with CSV output");
    add_common(sweep, opts);
    sweep->add_option("--axis", axis,
                      "swept scenario field: bs_power_dbm, sat_power_dbm, eta, speed_mps, "
                      "sat_elevation_deg");
    sweep->add_option("--values", values, "axis values (comma separated)")->delimiter(',');
    sweep->add_flag("--no-bias", no_bias, "skip the (slow) mismatch-bias fits");
    CLI::App* verify = app.add_subcommand("verify", "run synthesis equivalence checks");
    add_common(verify, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        std::fprintf(stderr, "%s\n", app.help().c_str());
        return 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(opts);
        if (estimate->parsed()) return cmd_estimate(opts);
        if (bounds->parsed()) return cmd_bounds(opts, no_bias);
        if (sweep->parsed()) return cmd_sweep(opts, axis, values, no_bias);
        if (verify->parsed()) return cmd_verify(opts);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
