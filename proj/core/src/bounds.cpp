// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/bounds.hpp"

#include <cmath>
#include <limits>

#include "ntnpos/solver.hpp"

namespace ntnpos {

int channel_param_count(ModelKind kind) {
    return (kind == ModelKind::Comm) ? 8 : 10;
}

Eigen::VectorXd channel_to_vector(ModelKind kind, const ChannelParams& chi) {
    Eigen::VectorXd v(channel_param_count(kind));
    v(0) = chi.alpha_b.real();
    v(1) = chi.alpha_b.imag();
    v(2) = chi.alpha_s.real();
    v(3) = chi.alpha_s.imag();
    v(4) = chi.tau_b;
    v(5) = chi.tau_s_res;
    v(6) = chi.aod.elevation;
    v(7) = chi.aod.azimuth;
    if (kind != ModelKind::Comm) {
        v(8) = chi.gamma_b;
        v(9) = chi.gamma_s;
    }
    return v;
}

ChannelParams vector_to_channel(ModelKind kind, const Eigen::VectorXd& v) {
    ChannelParams chi;
    chi.alpha_b = cplx(v(0), v(1));
    chi.alpha_s = cplx(v(2), v(3));
    chi.tau_b = v(4);
    chi.tau_s_res = v(5);
    chi.aod = Aod{v(6), v(7)};
    if (kind != ModelKind::Comm) {
        chi.gamma_b = v(8);
        chi.gamma_s = v(9);
    }
    return chi;
}

Eigen::VectorXd positional_to_vector(const PositionalParams& p) {
    Eigen::VectorXd v(10);
    v << p.alpha_b.real(), p.alpha_b.imag(), p.alpha_s.real(), p.alpha_s.imag(), p.p0.x,
        p.p0.y, p.p0.z, p.delta_t0, p.speed, p.eta;
    return v;
}

PositionalParams vector_to_positional(const Eigen::VectorXd& v) {
    PositionalParams p;
    p.alpha_b = cplx(v(0), v(1));
    p.alpha_s = cplx(v(2), v(3));
    p.p0 = Vec3{v(4), v(5), v(6)};
    p.delta_t0 = v(7);
    p.speed = v(8);
    p.eta = v(9);
    return p;
}

ChannelParams positional_to_channel(const PositionalParams& pos, const Scenario& base) {
    Scenario sc = base;
    sc.ue_position = pos.p0;
    sc.clock_offset_s = pos.delta_t0;
    sc.ue_speed_mps = std::isfinite(pos.speed) ? pos.speed : 0.0;
    sc.cfo = std::isfinite(pos.eta) ? pos.eta : 0.0;
    ChannelParams chi = compute_truth(sc).chi;
    chi.alpha_b = pos.alpha_b;
    chi.alpha_s = pos.alpha_s;
    return chi;
}

namespace {

Eigen::VectorXd channel_steps(ModelKind kind, const ChannelParams& chi,
                              const ModelContext& ctx) {
    const double tau_scale = 1.0 / (ctx.num.N * ctx.num.delta_f);
    const double gamma_scale =
        gamma_unambiguous_range(ctx.num.fc, ctx.num.Ts, ctx.precomp.psi_bs_bar) / ctx.num.M;
    Eigen::VectorXd h(channel_param_count(kind));
    h(0) = h(1) = 1.0e-4 * std::max(std::abs(chi.alpha_b), 1.0e-12);
    h(2) = h(3) = 1.0e-4 * std::max(std::abs(chi.alpha_s), 1.0e-12);
    h(4) = h(5) = 1.0e-4 * tau_scale;
    h(6) = h(7) = 1.0e-4 * 1.0e-2;
    if (kind != ModelKind::Comm) h(8) = h(9) = 1.0e-4 * gamma_scale;
    return h;
}

}  // namespace

Eigen::MatrixXd fim_channel(ModelKind kind, const ChannelParams& chi, const Scenario& sc,
                            const ModelContext& ctx, double sigma2) {
    (void)sc;
    if (sigma2 <= 0.0) throw std::invalid_argument("FIM requires positive noise variance");
    const int np = channel_param_count(kind);
    const Eigen::VectorXd x0 = channel_to_vector(kind, chi);
    const Eigen::VectorXd h = channel_steps(kind, chi, ctx);

    std::vector<Eigen::MatrixXcd> deriv(np);
    for (int i = 0; i < np; ++i) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp(i) += h(i);
        xm(i) -= h(i);
        const Eigen::MatrixXcd rp =
            build_observation_simplified(kind, vector_to_channel(kind, xp), ctx).samples;
        const Eigen::MatrixXcd rm =
            build_observation_simplified(kind, vector_to_channel(kind, xm), ctx).samples;
        deriv[i] = (rp - rm) / (2.0 * h(i));
    }

    Eigen::MatrixXd f(np, np);
    for (int i = 0; i < np; ++i)
        for (int j = i; j < np; ++j) {
            const double v =
                (2.0 / sigma2) *
                deriv[i].conjugate().cwiseProduct(deriv[j]).sum().real();
            f(i, j) = v;
            f(j, i) = v;
        }
    return f;
}

Eigen::MatrixXd positional_fim(const Eigen::MatrixXd& f_ch, ModelKind kind,
                               const PositionalParams& pos, const Scenario& sc) {
    const int nc = channel_param_count(kind);
    if (f_ch.rows() != nc || f_ch.cols() != nc)
        throw std::invalid_argument("channel FIM dimension does not match the model kind");

    // Natural step scales through the geometry/clocking chain.
    const double tau_scale = 1.0 / (sc.subcarriers * sc.subcarrier_spacing_hz);
    const double pos_scale = kSpeedOfLight * tau_scale;
    Eigen::VectorXd h(10);
    h(0) = h(1) = 1.0e-4 * std::max(std::abs(pos.alpha_b), 1.0e-12);
    h(2) = h(3) = 1.0e-4 * std::max(std::abs(pos.alpha_s), 1.0e-12);
    h(4) = h(5) = h(6) = 1.0e-4 * pos_scale;
    h(7) = 1.0e-4 * tau_scale;
    h(8) = 1.0e-3;   // speed [m/s]
    h(9) = 1.0e-12;  // fractional CFO

    const Eigen::VectorXd x0 = positional_to_vector(pos);
    Eigen::MatrixXd jac(nc, 10);
    for (int j = 0; j < 10; ++j) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp(j) += h(j);
        xm(j) -= h(j);
        const Eigen::VectorXd cp =
            channel_to_vector(kind, positional_to_channel(vector_to_positional(xp), sc));
        const Eigen::VectorXd cm =
            channel_to_vector(kind, positional_to_channel(vector_to_positional(xm), sc));
        jac.col(j) = (cp - cm) / (2.0 * h(j));
    }
    if (!jac.allFinite()) throw std::runtime_error("non-finite positional Jacobian");
    return jac.transpose() * f_ch * jac;
}

namespace {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& f) {
    // The raw FIM mixes units (gains, seconds, radians, fractional offsets)
    // and is catastrophically ill conditioned; equilibrate by the diagonal
    // before inverting so the cutoff acts on correlations, not on units.
    const int n = static_cast<int>(f.rows());
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = (f(i, i) > 0.0) ? 1.0 / std::sqrt(f(i, i)) : 0.0;
    const Eigen::MatrixXd s = d.asDiagonal() * f * d.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = 1.0e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1.0e-300);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        if (ev(i) > cutoff) inv(i) = 1.0 / ev(i);
    const Eigen::MatrixXd sinv =
        es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return d.asDiagonal() * sinv * d.asDiagonal();
}

}  // namespace

BoundReport crb_report(const Eigen::MatrixXd& f_pos, ModelKind kind) {
    if (f_pos.rows() != 10 || f_pos.cols() != 10)
        throw std::invalid_argument("positional FIM must be 10x10");
    const Eigen::MatrixXd sym = 0.5 * (f_pos + f_pos.transpose());
    BoundReport r;
    if (kind == ModelKind::Comm) {
        // Speed and CFO leave the Comm observation (nearly) unchanged; keep
        // only the identifiable block so their null directions cannot leak a
        // spuriously small position bound through the pseudo-inverse.
        const Eigen::MatrixXd inv = pseudo_inverse(sym.topLeftCorner(8, 8));
        r.peb = std::sqrt(std::max(0.0, inv(4, 4) + inv(5, 5) + inv(6, 6)));
        r.ceb = std::sqrt(std::max(0.0, inv(7, 7)));
        r.speed_eb = std::numeric_limits<double>::quiet_NaN();
        r.eta_eb = std::numeric_limits<double>::quiet_NaN();
    } else {
        const Eigen::MatrixXd inv = pseudo_inverse(sym);
        r.peb = std::sqrt(std::max(0.0, inv(4, 4) + inv(5, 5) + inv(6, 6)));
        r.ceb = std::sqrt(std::max(0.0, inv(7, 7)));
        r.speed_eb = std::sqrt(std::max(0.0, inv(8, 8)));
        r.eta_eb = std::sqrt(std::max(0.0, inv(9, 9)));
    }
    return r;
}

namespace {

/// Residual of the gain-concentrated least-squares fit of one simplified
/// model to an arbitrary observation.
class MismatchFit {
  public:
    MismatchFit(ModelKind kind, const Scenario& sc, const ModelContext& ctx,
                const Eigen::MatrixXcd& target)
        : kind_(kind), sc_(&sc), ctx_(&ctx), target_(&target),
          target_norm2_(target.squaredNorm()) {}

    int geometry_params() const { return (kind_ == ModelKind::Comm) ? 4 : 6; }

    PositionalParams to_positional(const Eigen::VectorXd& g,
                                   const PositionalParams& base) const {
        PositionalParams p = base;
        p.p0 = Vec3{g(0), g(1), g(2)};
        p.delta_t0 = g(3);
        if (kind_ != ModelKind::Comm) {
            p.speed = g(4);
            p.eta = g(5);
        }
        return p;
    }

    static Eigen::VectorXd to_vector(const PositionalParams& p, int n) {
        Eigen::VectorXd g(n);
        g(0) = p.p0.x;
        g(1) = p.p0.y;
        g(2) = p.p0.z;
        g(3) = p.delta_t0;
        if (n > 4) {
            g(4) = std::isfinite(p.speed) ? p.speed : 0.0;
            g(5) = std::isfinite(p.eta) ? p.eta : 0.0;
        }
        return g;
    }

    /// Residual norm^2 after solving the 2x2 complex gain system.
    double operator()(const Eigen::VectorXd& g, cplx* ab = nullptr,
                      cplx* as = nullptr) const {
        PositionalParams pos = to_positional(g, base_);
        pos.alpha_b = cplx(1.0, 0.0);
        pos.alpha_s = cplx(1.0, 0.0);
        ChannelParams chi = positional_to_channel(pos, *sc_);
        ChannelParams chi_b = chi, chi_s = chi;
        chi_b.alpha_s = cplx(0.0, 0.0);
        chi_s.alpha_b = cplx(0.0, 0.0);
        const Eigen::MatrixXcd ub = build_observation_simplified(kind_, chi_b, *ctx_).samples;
        const Eigen::MatrixXcd us = build_observation_simplified(kind_, chi_s, *ctx_).samples;

        Eigen::Matrix2cd gram;
        gram(0, 0) = ub.squaredNorm();
        gram(1, 1) = us.squaredNorm();
        gram(0, 1) = ub.conjugate().cwiseProduct(us).sum();
        gram(1, 0) = std::conj(gram(0, 1));
        Eigen::Vector2cd rhs;
        rhs(0) = ub.conjugate().cwiseProduct(*target_).sum();
        rhs(1) = us.conjugate().cwiseProduct(*target_).sum();
        const Eigen::Vector2cd gains = gram.ldlt().solve(rhs);
        if (!gains.allFinite()) return std::numeric_limits<double>::infinity();
        if (ab) *ab = gains(0);
        if (as) *as = gains(1);
        return target_norm2_ - (rhs.dot(gains)).real();
    }

    PositionalParams base_;

  private:
    ModelKind kind_;
    const Scenario* sc_;
    const ModelContext* ctx_;
    const Eigen::MatrixXcd* target_;
    double target_norm2_;
};

}  // namespace

BoundReport mcrb_bias(ModelKind kind, const Scenario& sc, const GroundTruth& truth,
                      const ModelContext& ctx) {
    const ObservationGrid y = build_observation_generative(sc, truth, ctx);

    MismatchFit fit(kind, sc, ctx, y.samples);
    fit.base_ = truth.chi_pos;
    const int n = fit.geometry_params();

    // Start points: ground truth and the model-k estimator output.
    std::vector<Eigen::VectorXd> starts;
    starts.push_back(MismatchFit::to_vector(truth.chi_pos, n));
    try {
        const EstimationReport rep = estimate(kind, y, ctx, SearchConfig::defaults(ctx));
        const PositionalParams est =
            solve_positional(kind, make_solver_inputs(rep.params, sc, truth));
        starts.push_back(MismatchFit::to_vector(est, n));
    } catch (const std::exception&) {
        // estimator failure: fall back to the truth-seeded start only
    }

    const double tau_scale = 1.0 / (ctx.num.N * ctx.num.delta_f);
    Eigen::VectorXd scales(n);
    scales(0) = scales(1) = scales(2) = 0.1;  // meters
    scales(3) = 0.1 / kSpeedOfLight;
    if (n > 4) {
        scales(4) = 0.01;  // m/s
        scales(5) = 1.0e-9;
    }
    (void)tau_scale;

    BoundReport r;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    bool flagged = false;
    for (const Eigen::VectorXd& s : starts) {
        const RefineResult rr =
            refine([&](const Eigen::VectorXd& g) { return fit(g); }, s, scales, 300, 1.0e-14);
        flagged = flagged || rr.flagged;
        if (rr.value < best) {
            best = rr.value;
            best_x = rr.x;
        }
    }
    if (!best_x.size()) {
        r.converged = false;
        return r;
    }
    const PositionalParams fitted = fit.to_positional(best_x, truth.chi_pos);
    r.bias_pos = (fitted.p0 - truth.chi_pos.p0).norm();
    r.bias_clock = std::abs(fitted.delta_t0 - truth.chi_pos.delta_t0);
    if (n > 4) {
        r.bias_speed = std::abs(fitted.speed - truth.chi_pos.speed);
        r.bias_eta = std::abs(fitted.eta - truth.chi_pos.eta);
    } else {
        r.bias_speed = std::numeric_limits<double>::quiet_NaN();
        r.bias_eta = std::numeric_limits<double>::quiet_NaN();
    }
    r.converged = !flagged;
    return r;
}

BoundReport compute_bounds(ModelKind kind, const Scenario& sc, const GroundTruth& truth,
                           const ModelContext& ctx, double sigma2, bool with_bias) {
    const Eigen::MatrixXd f_ch = fim_channel(kind, truth.chi, sc, ctx, sigma2);
    const Eigen::MatrixXd f_pos = positional_fim(f_ch, kind, truth.chi_pos, sc);
    BoundReport r = crb_report(f_pos, kind);
    if (with_bias) {
        const BoundReport b = mcrb_bias(kind, sc, truth, ctx);
        r.bias_pos = b.bias_pos;
        r.bias_clock = b.bias_clock;
        r.bias_speed = b.bias_speed;
        r.bias_eta = b.bias_eta;
        r.converged = b.converged;
    }
    return r;
}

}  // namespace ntnpos
