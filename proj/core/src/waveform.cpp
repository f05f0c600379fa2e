// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/waveform.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ntnpos/rng.hpp"

namespace ntnpos {

namespace {

cplx unit_phase(double cycles) {
    const double r = std::remainder(cycles, 1.0);
    return {std::cos(2.0 * kPi * r), std::sin(2.0 * kPi * r)};
}

/// Sum over one subcarrier parity class of exp(j*2*pi*n*phi), n = 2i + parity,
/// i = 0..half-1, weighted by per-subcarrier pilots.
cplx pilot_phase_sum(const Eigen::MatrixXcd& pilots, int column, int parity, double phi,
                     int half) {
    // n is an integer, so phi can be reduced modulo 1 exactly.
    const double p = std::remainder(phi, 1.0);
    const cplx ratio = unit_phase(2.0 * p);
    cplx ph = unit_phase(static_cast<double>(parity) * p);
    cplx acc(0.0, 0.0);
    for (int i = 0; i < half; ++i) {
        if ((i & 63) == 0)  // periodically re-synchronize the phase recurrence
            ph = unit_phase(static_cast<double>(2 * i + parity) * p);
        acc += pilots(2 * i + parity, column) * ph;
        ph *= ratio;
    }
    return acc;
}

}  // namespace

PilotGrid generate_pilots(const Numerology& num, std::uint64_t seed) {
    Rng rng(seed);
    PilotGrid grid;
    grid.values.resize(num.N, num.M);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int m = 0; m < num.M; ++m) {
        for (int n = 0; n < num.N; ++n) {
            const std::uint64_t bits = rng.next_u64() & 3u;
            const double re = (bits & 1u) ? -inv_sqrt2 : inv_sqrt2;
            const double im = (bits & 2u) ? -inv_sqrt2 : inv_sqrt2;
            grid.values(n, m) = cplx(re, im);
        }
    }
    return grid;
}

PrecoderSchedule generate_precoders(const Numerology& num, const ArrayLayout& layout, int P,
                                    std::uint64_t codebook_seed, const AodSector& sector) {
    if (P < 1 || P > num.M)
        throw std::invalid_argument("beam repetition count must be in [1, M]");
    const int L = layout.size();
    PrecoderSchedule sched;
    sched.repeat_prefix = P;
    sched.weights.resize(num.M, L);

    const double inv_sqrt_l = 1.0 / std::sqrt(static_cast<double>(L));
    auto beam_for = [&](const Aod& aod) -> Eigen::RowVectorXcd {
        return steering_vector(aod, layout).conjugate().transpose() * inv_sqrt_l;
    };

    // Fixed beam: sector boresight.
    const Aod boresight{0.5 * (sector.el_min + sector.el_max),
                        0.5 * (sector.az_min + sector.az_max)};
    const Eigen::RowVectorXcd fixed = beam_for(boresight);
    for (int m = 0; m < P; ++m) sched.weights.row(m) = fixed;

    // Sweep: deterministic lattice of directions covering the sector, visited
    // in a seed-shuffled order so the sweep does not alias with slow-time
    // phase ramps.
    const int sweep = num.M - P;
    if (sweep > 0) {
        const int n_el = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(sweep)))));
        const int n_az = (sweep + n_el - 1) / n_el;
        std::vector<Aod> dirs;
        dirs.reserve(sweep);
        for (int ie = 0; ie < n_el && static_cast<int>(dirs.size()) < sweep; ++ie) {
            for (int ia = 0; ia < n_az && static_cast<int>(dirs.size()) < sweep; ++ia) {
                Aod aod;
                aod.elevation =
                    sector.el_min + (ie + 0.5) * (sector.el_max - sector.el_min) / n_el;
                aod.azimuth = sector.az_min + (ia + 0.5) * (sector.az_max - sector.az_min) / n_az;
                dirs.push_back(aod);
            }
        }
        Rng rng(codebook_seed);
        for (int i = sweep - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(dirs[i], dirs[j]);
        }
        for (int m = 0; m < sweep; ++m) sched.weights.row(P + m) = beam_for(dirs[m]);
    }
    return sched;
}

std::string_view model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Comm: return "Comm";
        case ModelKind::SlowD: return "SlowD";
        case ModelKind::CCFODnoICI: return "CCFODnoICI";
        case ModelKind::CCFOD: return "CCFOD";
        case ModelKind::Generative: return "Generative";
    }
    throw std::invalid_argument("unknown model kind");
}

ModelKind model_from_name(std::string_view name) {
    if (name == "Comm") return ModelKind::Comm;
    if (name == "SlowD") return ModelKind::SlowD;
    if (name == "CCFODnoICI") return ModelKind::CCFODnoICI;
    if (name == "CCFOD") return ModelKind::CCFOD;
    if (name == "Generative") return ModelKind::Generative;
    throw std::invalid_argument("unknown model name: " + std::string(name));
}

ModelContext make_context(const Scenario& sc, const GroundTruth& truth) {
    ModelContext ctx;
    ctx.num = Numerology::from_scenario(sc);
    ctx.pilots = generate_pilots(ctx.num, sc.pilot_seed);
    ctx.layout = ArrayLayout::upa(sc.antennas, sc.wavelength());
    const double d2r = kPi / 180.0;
    ctx.sector = AodSector{sc.search_el_min_deg * d2r, sc.search_el_max_deg * d2r,
                           sc.search_az_min_deg * d2r, sc.search_az_max_deg * d2r};
    ctx.precoders =
        generate_precoders(ctx.num, ctx.layout, sc.beam_repeat, sc.codebook_seed, ctx.sector);
    ctx.precomp = truth.precomp;
    ctx.tau0 = truth.tau0;
    ctx.power_bs = sc.bs_power_w();
    ctx.power_sat = sc.sat_power_w();
    return ctx;
}

ModelFeatures ModelFeatures::of(ModelKind kind) {
    ModelFeatures f;
    switch (kind) {
        case ModelKind::CCFOD:
            f.ici = true;
            [[fallthrough]];
        case ModelKind::CCFODnoICI:
            f.intersubcarrier = true;
            [[fallthrough]];
        case ModelKind::SlowD:
            f.slow_time = true;
            break;
        case ModelKind::Comm:
            break;
        case ModelKind::Generative:
            throw std::invalid_argument("the generative model has no simplified synthesis");
    }
    return f;
}

double carrier_doppler(PathId path, double gamma, const ModelContext& ctx) {
    if (path == PathId::Bs) return ctx.num.fc * gamma;
    return ctx.num.fc * sat_carrier_shift(gamma, ctx.precomp.psi_bs_bar);
}

Eigen::MatrixXcd fourier_matrix(PathId path, const Numerology& num, double gamma) {
    const int half = num.N / 2;
    const int parity = (path == PathId::Bs) ? 0 : 1;
    const double g = num.g();
    Eigen::MatrixXcd f(num.N, half);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(num.N));
    for (int c = 0; c < half; ++c) {
        const int n = 2 * c + parity;
        for (int k = 0; k < num.N; ++k) {
            const double cycles =
                static_cast<double>(n) *
                std::remainder((1.0 - gamma) * static_cast<double>(k) / num.N + g, 1.0);
            f(k, c) = inv_sqrt_n * unit_phase(cycles);
        }
    }
    return f;
}

Eigen::VectorXcd delay_steering(PathId path, double tau_res, const Numerology& num) {
    const int half = num.N / 2;
    const int parity = (path == PathId::Bs) ? 0 : 1;
    Eigen::VectorXcd b(half);
    for (int c = 0; c < half; ++c) {
        const int n = 2 * c + parity;
        b(c) = unit_phase(-num.delta_f * tau_res * n);
    }
    return b;
}

Eigen::VectorXcd slow_time_phases(PathId path, double gamma, const ModelContext& ctx,
                                  int count) {
    const int m_count = (count < 0) ? ctx.num.M : count;
    const double fd = carrier_doppler(path, gamma, ctx);
    Eigen::VectorXcd c(m_count);
    for (int m = 0; m < m_count; ++m) c(m) = unit_phase(-fd * m * ctx.num.Ts);
    return c;
}

Eigen::MatrixXcd intersubcarrier_matrix(PathId path, double gamma, const Numerology& num) {
    const int half = num.N / 2;
    const int parity = (path == PathId::Bs) ? 0 : 1;
    const double g = num.g();
    Eigen::MatrixXcd out(half, num.M);
    for (int m = 0; m < num.M; ++m) {
        const double coef = gamma * (m * (1.0 + g) + g);
        for (int c = 0; c < half; ++c) {
            const int n = 2 * c + parity;
            out(c, m) = unit_phase(-coef * n);
        }
    }
    return out;
}

Eigen::VectorXcd ici_diagonal(PathId path, double gamma, const ModelContext& ctx) {
    const double fd = carrier_doppler(path, gamma, ctx);
    Eigen::VectorXcd d(ctx.num.N);
    for (int k = 0; k < ctx.num.N; ++k)
        d(k) = unit_phase(-fd * ctx.num.T0 * k / ctx.num.N);
    return d;
}

cplx path_constant(PathId path, double gamma, const ModelContext& ctx) {
    const double fd = carrier_doppler(path, gamma, ctx);
    return unit_phase(-fd * (ctx.tau0 + ctx.num.Tcp));
}

Eigen::VectorXcd beam_projection(const Aod& aod, const ModelContext& ctx) {
    return ctx.precoders.weights * steering_vector(aod, ctx.layout);
}

ObservationGrid build_observation_simplified(ModelKind kind, const ChannelParams& chi,
                                             const ModelContext& ctx) {
    return build_observation_simplified(ModelFeatures::of(kind), chi, ctx);
}

ObservationGrid build_observation_simplified(const ModelFeatures& f, const ChannelParams& chi,
                                             const ModelContext& ctx) {
    const Numerology& num = ctx.num;
    const int half = num.N / 2;
    const double g = num.g();

    ObservationGrid out;
    out.samples = Eigen::MatrixXcd::Zero(num.N, num.M);

    const Eigen::VectorXcd z = beam_projection(chi.aod, ctx);

    for (PathId path : {PathId::Bs, PathId::Sat}) {
        const bool is_bs = (path == PathId::Bs);
        const int parity = is_bs ? 0 : 1;
        const double gamma = f.slow_time ? (is_bs ? chi.gamma_b : chi.gamma_s) : 0.0;
        const double tau_abs = is_bs ? chi.tau_b : chi.tau_s_res;
        const double tau_res = tau_abs - (1.0 - gamma) * ctx.tau0;
        const cplx alpha = is_bs ? chi.alpha_b : chi.alpha_s;
        const double amp = std::sqrt(is_bs ? ctx.power_bs : ctx.power_sat);
        const cplx cconst = f.slow_time ? path_constant(path, gamma, ctx) : cplx(1.0, 0.0);
        const Eigen::VectorXcd cvec = f.slow_time
                                          ? slow_time_phases(path, gamma, ctx)
                                          : Eigen::VectorXcd::Ones(num.M).eval();
        // Only the satellite Fourier factor keeps its Doppler contraction.
        const double gamma_f = (!is_bs && f.ici) ? gamma : 0.0;

        // Tilde-domain template: pilots times all subcarrier-linear phases.
        Eigen::MatrixXcd t(half, num.M);
        for (int m = 0; m < num.M; ++m) {
            const double phi_m = -num.delta_f * tau_res -
                                 (f.intersubcarrier ? gamma * (m * (1.0 + g) + g) : 0.0);
            const double p = std::remainder(phi_m, 1.0);
            const cplx ratio = unit_phase(2.0 * p);
            const cplx col = amp * alpha * cconst * cvec(m) * (is_bs ? z(m) : cplx(1.0, 0.0));
            cplx ph = unit_phase(static_cast<double>(parity) * p);
            for (int c = 0; c < half; ++c) {
                if ((c & 63) == 0)
                    ph = unit_phase(static_cast<double>(2 * c + parity) * p);
                t(c, m) = col * ctx.pilots.values(2 * c + parity, m) * ph;
                ph *= ratio;
            }
        }

        Eigen::MatrixXcd contrib = fourier_matrix(path, num, gamma_f) * t;
        if (f.ici) {
            const Eigen::VectorXcd dvec = ici_diagonal(path, gamma, ctx);
            contrib = dvec.asDiagonal() * contrib;
        }
        out.samples += contrib;
    }
    return out;
}

namespace {

struct PathTruth {
    bool is_bs = false;
    double gamma = 0.0;
    double eps = 0.0;
    double tau_abs = 0.0;  // total for BS, post-timing-advance residual for satellite
};

}  // namespace

ObservationGrid build_observation_generative(const Scenario& sc, const GroundTruth& truth,
                                             const ModelContext& ctx, const GenOverrides& ov) {
    const Numerology& num = ctx.num;
    const int half = num.N / 2;
    const double g = num.g();
    const double psibar = ctx.precomp.psi_bs_bar;
    const double tau0 = ctx.tau0;

    DelayExpansion exp_b = truth.exp_b;
    DelayExpansion exp_s = truth.exp_s;
    if (ov.zero_doppler_rate) {
        exp_b.mu = 0.0;
        exp_s.mu = 0.0;
    }
    const EffectiveParams eb = effective_params(exp_b, truth.clock);
    const EffectiveParams es = effective_params(exp_s, truth.clock);

    // Per-symbol samples of the time-varying gains and beam projection, taken
    // at the first sample instant of each receiver symbol.
    Eigen::VectorXd gain_bs(num.M), gain_sat(num.M);
    Eigen::VectorXcd zcol(num.M);
    for (int m = 0; m < num.M; ++m) {
        const double tp = m * num.Ts + num.Tcp + tau0;
        const double t = ov.sample_gain_drift ? network_time(tp, truth.clock) : 0.0;
        const Vec3 ue = ue_position(sc.ue_position, truth.ue_velocity, t);
        const Vec3 sat_p = truth.sat.position + truth.sat.velocity * t;
        gain_bs(m) = channel_gain_bs(ue, sc.bs_position, sc.wavelength(), sc.fspl_exponent);
        gain_sat(m) = channel_gain_sat(ue, sat_p, sc.wavelength());
        const Aod aod_m = aod_from_positions(ue, sc.bs_position);
        zcol(m) = ctx.precoders.weights.row(m) * steering_vector(aod_m, ctx.layout);
    }

    ObservationGrid out;
    out.samples = Eigen::MatrixXcd::Zero(num.N, num.M);

    const PathTruth paths[2] = {{true, eb.gamma, eb.epsilon, eb.tau},
                                {false, es.gamma, es.epsilon, es.tau - ctx.precomp.tau_bs}};

    for (const PathTruth& p : paths) {
        const double den = p.is_bs ? 1.0 : (1.0 - psibar);
        auto flin = [&](double x) {
            return p.is_bs ? num.fc * x : num.fc * (x - psibar) / den;
        };
        const double fq = num.fc * p.eps / den;
        const double g2 = p.gamma + 2.0 * p.eps * tau0;
        const double tau_res = p.tau_abs - (1.0 - p.gamma) * tau0 + p.eps * tau0 * tau0;
        // Clock skew can pull the earliest path a few picoseconds ahead of
        // the sampling origin (|gamma - eta| * tau); only reject genuinely
        // acausal delays.
        if (tau_res < -1.0e-9 || tau_res >= num.Tcp)
            throw OutOfCoverageError("effective path delay falls outside the cyclic prefix");

        const double phconst = flin(p.gamma) * tau0 + fq * tau0 * tau0 + flin(g2) * num.Tcp +
                               fq * num.Tcp * num.Tcp;
        const int parity = p.is_bs ? 0 : 1;
        const double sqrt_p = std::sqrt(p.is_bs ? ctx.power_bs : ctx.power_sat);
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(num.N));
        const double kcoef = (p.is_bs && ov.bs_fourier_gamma_zero) ? 1.0 : (1.0 - g2);

        for (int m = 0; m < num.M; ++m) {
            const double carrier_m =
                flin(g2) * m * num.Ts +
                fq * (static_cast<double>(m) * m * num.Ts * num.Ts +
                      2.0 * m * num.Ts * num.Tcp);
            const double theta_m = -g2 * (m * (1.0 + g) + g) -
                                   p.eps * (static_cast<double>(m) * m * (1.0 + g) * num.Ts +
                                            2.0 * m * g * num.Ts) -
                                   num.delta_f * tau_res + g - p.eps * g * g * num.T0;
            const cplx scale = sqrt_p * inv_sqrt_n * unit_phase(-phconst) *
                               (p.is_bs ? cplx(gain_bs(m), 0.0) * zcol(m)
                                        : cplx(gain_sat(m), 0.0));
            for (int k = 0; k < num.N; ++k) {
                const double kn = static_cast<double>(k) / num.N;
                const double carrier =
                    carrier_m + flin(g2) * k * num.T0 / num.N +
                    fq * (kn * kn * num.T0 * num.T0 + 2.0 * num.Tcp * kn * num.T0 +
                          2.0 * m * num.Ts * kn * num.T0);
                const double theta =
                    theta_m + kn * kcoef -
                    p.eps * (kn * kn * num.T0 + 2.0 * g * kn * num.T0 + 2.0 * m * num.Ts * kn);
                const cplx acc = pilot_phase_sum(ctx.pilots.values, m, parity, theta, half);
                out.samples(k, m) += scale * unit_phase(-carrier) * acc;
            }
        }
    }
    return out;
}

ObservationGrid time_domain_oracle(const Scenario& sc, const GroundTruth& truth,
                                   const ModelContext& ctx, const GenOverrides& ov) {
    const Numerology& num = ctx.num;
    const int half = num.N / 2;
    const double tau0 = ctx.tau0;
    const double fbar = ctx.precomp.fc_bar;

    DelayExpansion exp_b = truth.exp_b;
    DelayExpansion exp_s = truth.exp_s;
    if (ov.zero_doppler_rate) {
        exp_b.mu = 0.0;
        exp_s.mu = 0.0;
    }
    const EffectiveParams eb = effective_params(exp_b, truth.clock);
    const EffectiveParams es = effective_params(exp_s, truth.clock);
    const double tau_s_res = es.tau - ctx.precomp.tau_bs;

    Eigen::VectorXd gain_bs(num.M), gain_sat(num.M);
    Eigen::VectorXcd zcol(num.M);
    for (int m = 0; m < num.M; ++m) {
        const double tp = m * num.Ts + num.Tcp + tau0;
        const double t = ov.sample_gain_drift ? network_time(tp, truth.clock) : 0.0;
        const Vec3 ue = ue_position(sc.ue_position, truth.ue_velocity, t);
        const Vec3 sat_p = truth.sat.position + truth.sat.velocity * t;
        gain_bs(m) = channel_gain_bs(ue, sc.bs_position, sc.wavelength(), sc.fspl_exponent);
        gain_sat(m) = channel_gain_sat(ue, sat_p, sc.wavelength());
        const Aod aod_m = aod_from_positions(ue, sc.bs_position);
        zcol(m) = ctx.precoders.weights.row(m) * steering_vector(aod_m, ctx.layout);
    }

    ObservationGrid out;
    out.samples = Eigen::MatrixXcd::Zero(num.N, num.M);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(num.N));
    const double sqrt_pb = std::sqrt(ctx.power_bs);
    const double sqrt_ps = std::sqrt(ctx.power_sat);

    for (int m = 0; m < num.M; ++m) {
        for (int k = 0; k < num.N; ++k) {
            const double tp = m * num.Ts + num.Tcp + k * num.T0 / num.N + tau0;
            cplx y(0.0, 0.0);

            // BS path
            {
                const double t_b = (1.0 - eb.gamma) * tp - eb.tau - eb.epsilon * tp * tp;
                const int mp = static_cast<int>(std::floor(t_b / num.Ts));
                if (mp >= 0 && mp < num.M) {
                    const double u = t_b - mp * num.Ts;
                    if (u >= 0.0 && u < num.Ts) {
                        const cplx acc = pilot_phase_sum(ctx.pilots.values, mp, 0,
                                                         num.delta_f * u, half);
                        const double cph = num.fc * (eb.gamma * tp + eb.epsilon * tp * tp);
                        y += sqrt_pb * gain_bs(m) * zcol(m) * inv_sqrt_n * acc *
                             unit_phase(-cph);
                    }
                }
            }
            // Satellite path
            {
                const double t_s = (1.0 - es.gamma) * tp - tau_s_res - es.epsilon * tp * tp;
                const int mp = static_cast<int>(std::floor(t_s / num.Ts));
                if (mp >= 0 && mp < num.M) {
                    const double u = t_s - mp * num.Ts;
                    if (u >= 0.0 && u < num.Ts) {
                        const cplx acc = pilot_phase_sum(ctx.pilots.values, mp, 1,
                                                         num.delta_f * u, half);
                        const double cph = fbar * (es.gamma * tp + es.epsilon * tp * tp) -
                                           (fbar - num.fc) * tp;
                        y += sqrt_ps * gain_sat(m) * inv_sqrt_n * acc * unit_phase(-cph);
                    }
                }
            }
            out.samples(k, m) = y;
        }
    }
    return out;
}

ObservationGrid add_noise(const ObservationGrid& y, double sigma2, std::uint64_t seed) {
    if (sigma2 < 0.0) throw std::invalid_argument("noise variance must be non-negative");
    ObservationGrid out = y;
    out.noise_variance = sigma2;
    if (sigma2 == 0.0) return out;
    Rng rng(seed);
    const double scale = std::sqrt(sigma2);
    for (int m = 0; m < out.samples.cols(); ++m)
        for (int n = 0; n < out.samples.rows(); ++n)
            out.samples(n, m) += scale * rng.complex_gaussian();
    return out;
}

}  // namespace ntnpos
