// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ntnpos {

namespace {

cplx unit_phase(double cycles) {
    const double r = std::remainder(cycles, 1.0);
    return {std::cos(2.0 * kPi * r), std::sin(2.0 * kPi * r)};
}

/// sum_c q(c, col) * exp(+j*2*pi*(2c+parity)*phi)
cplx phase_corr(const Eigen::MatrixXcd& q, int col, int parity, double phi) {
    const int half = static_cast<int>(q.rows());
    const double p = std::remainder(phi, 1.0);
    const cplx ratio = unit_phase(2.0 * p);
    cplx ph = unit_phase(static_cast<double>(parity) * p);
    cplx acc(0.0, 0.0);
    for (int c = 0; c < half; ++c) {
        if ((c & 63) == 0)
            ph = unit_phase(static_cast<double>(2 * c + parity) * p);
        acc += q(c, col) * ph;
        ph *= ratio;
    }
    return acc;
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

/// Template correlation <T, Yt> for one path in the pilot-folded tilde domain:
/// conj of delay ramp, optional intersubcarrier phases, optional slow-time
/// phases and optional beam projection, summed against Yt.
struct PathCorr {
    const ModelContext* ctx = nullptr;
    PathId path = PathId::Bs;
    bool with_c = false;  // slow-time factor present
    bool with_i = false;  // intersubcarrier factor present

    cplx corr(const Eigen::MatrixXcd& yt, double tau, double gamma,
              const Eigen::VectorXcd* z) const {
        const Numerology& num = ctx->num;
        const int parity = (path == PathId::Bs) ? 0 : 1;
        const double g = num.g();
        const double fd = with_c ? carrier_doppler(path, gamma, *ctx) : 0.0;
        cplx s(0.0, 0.0);
        for (int m = 0; m < yt.cols(); ++m) {
            const double phi =
                num.delta_f * tau + (with_i ? gamma * (m * (1.0 + g) + g) : 0.0);
            cplx w = phase_corr(yt, m, parity, phi);
            if (z) w *= std::conj((*z)(m));
            if (with_c) w *= unit_phase(fd * m * num.Ts);  // conj of c_m
            s += w;
        }
        return s;
    }

    double norm2(int m_cols, const Eigen::VectorXcd* z) const {
        const double weights = z ? z->squaredNorm() : static_cast<double>(m_cols);
        return 0.5 * ctx->num.N * weights;
    }

    cplx gain(const Eigen::MatrixXcd& yt, double tau, double gamma, const Eigen::VectorXcd* z,
              double power) const {
        const cplx s = corr(yt, tau, gamma, z);
        const cplx cc = with_c ? std::conj(path_constant(path, gamma, *ctx)) : cplx(1.0, 0.0);
        return cc * s / (std::sqrt(power) * norm2(static_cast<int>(yt.cols()), z));
    }
};

struct AodGrid {
    std::vector<Aod> dirs;
    std::vector<Eigen::VectorXcd> beams;  // z(theta) per direction
    std::vector<double> beam_norm2;
};

AodGrid make_aod_grid(const ModelContext& ctx, const SearchConfig& cfg) {
    AodGrid grid;
    const Eigen::VectorXd els =
        linspace(ctx.sector.el_min, ctx.sector.el_max, cfg.aod_points_el);
    const Eigen::VectorXd azs =
        linspace(ctx.sector.az_min, ctx.sector.az_max, cfg.aod_points_az);
    grid.dirs.reserve(els.size() * azs.size());
    for (int ie = 0; ie < els.size(); ++ie)
        for (int ia = 0; ia < azs.size(); ++ia) {
            const Aod aod{els(ie), azs(ia)};
            grid.dirs.push_back(aod);
            grid.beams.push_back(beam_projection(aod, ctx));
            grid.beam_norm2.push_back(grid.beams.back().squaredNorm());
        }
    return grid;
}

/// Small exact-key cache for gamma-dependent full-domain projections.
class GammaCache {
  public:
    explicit GammaCache(std::function<Eigen::MatrixXcd(double)> make)
        : make_(std::move(make)) {}

    const Eigen::MatrixXcd& get(double gamma) {
        for (auto& e : entries_)
            if (e.first == gamma) return e.second;
        if (entries_.size() >= 8) entries_.erase(entries_.begin());
        entries_.emplace_back(gamma, make_(gamma));
        return entries_.back().second;
    }

  private:
    std::function<Eigen::MatrixXcd(double)> make_;
    std::vector<std::pair<double, Eigen::MatrixXcd>> entries_;
};

Eigen::MatrixXcd fold_pilots(const Eigen::MatrixXcd& tilde, const ModelContext& ctx,
                             int parity) {
    const int half = ctx.num.N / 2;
    Eigen::MatrixXcd out(half, tilde.cols());
    for (int m = 0; m < tilde.cols(); ++m)
        for (int c = 0; c < half; ++c)
            out(c, m) = std::conj(ctx.pilots.values(2 * c + parity, m)) * tilde(c, m);
    return out;
}

struct CandidateFit {
    ChannelParams params;
    double objective = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool flagged = false;
};

}  // namespace

SearchConfig SearchConfig::defaults(const ModelContext& ctx) {
    SearchConfig cfg;
    cfg.delay_lo = 0.0;
    cfg.delay_hi = 2.0 * ctx.num.Tcp;
    cfg.delay_points = 4 * ctx.num.N;
    cfg.gamma_halfwidth =
        0.5 * gamma_unambiguous_range(ctx.num.fc, ctx.num.Ts, ctx.precomp.psi_bs_bar);
    cfg.gamma_points = 8 * ctx.num.M;
    return cfg;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> separate_paths(const ObservationGrid& y,
                                                             const ModelContext& ctx) {
    const Eigen::MatrixXcd fb = fourier_matrix(PathId::Bs, ctx.num);
    const Eigen::MatrixXcd fs = fourier_matrix(PathId::Sat, ctx.num);
    return {fb.adjoint() * y.samples, fs.adjoint() * y.samples};
}

std::pair<int, int> two_peak_candidates(const Eigen::VectorXd& correlation) {
    const int n = static_cast<int>(correlation.size());
    std::vector<int> peaks;
    for (int i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || correlation(i) >= correlation(i - 1);
        const bool right_ok = (i == n - 1) || correlation(i) > correlation(i + 1);
        if (left_ok && right_ok) peaks.push_back(i);
    }
    if (peaks.empty()) {
        int best = 0;
        correlation.maxCoeff(&best);
        peaks.push_back(best);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
        if (correlation(a) != correlation(b)) return correlation(a) > correlation(b);
        return a < b;
    });
    if (peaks.size() == 1) return {peaks[0], peaks[0]};
    return {peaks[0], peaks[1]};
}

RefineResult refine(const std::function<double(const Eigen::VectorXd&)>& objective,
                    const Eigen::VectorXd& init, const Eigen::VectorXd& scales, int max_iters,
                    double tol) {
    const int n = static_cast<int>(init.size());
    RefineResult res;
    res.x = init;
    res.value = objective(init);
    if (!std::isfinite(res.value)) {
        res.flagged = true;
        res.value = std::numeric_limits<double>::infinity();
        return res;
    }

    // Work on a normalized objective so gradient magnitudes (and hence the
    // first quasi-Newton step) are O(1) in scaled coordinates regardless of
    // the absolute objective scale.
    const double fscale = (res.value != 0.0) ? std::abs(res.value) : 1.0;
    auto fu = [&](const Eigen::VectorXd& u) {
        return objective(u.cwiseProduct(scales)) / fscale;
    };
    Eigen::VectorXd u = init.cwiseQuotient(scales);
    double f = res.value / fscale;
    const double h = 1.0e-3;

    auto gradient = [&](const Eigen::VectorXd& at, bool& ok) {
        Eigen::VectorXd grad(n);
        ok = true;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd up = at, dn = at;
            up(i) += h;
            dn(i) -= h;
            const double fp = fu(up), fm = fu(dn);
            if (!std::isfinite(fp) || !std::isfinite(fm)) {
                ok = false;
                return grad;
            }
            grad(i) = (fp - fm) / (2.0 * h);
        }
        return grad;
    };

    bool ok = true;
    Eigen::VectorXd g = gradient(u, ok);
    if (!ok) {
        res.flagged = true;
        return res;
    }
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    bool hinv_seeded = false;

    for (int iter = 0; iter < max_iters; ++iter) {
        Eigen::VectorXd p = -(hinv * g);
        if (p.dot(g) >= 0.0) {  // not a descent direction; reset curvature
            hinv.setIdentity();
            p = -g;
        }
        double t = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        Eigen::VectorXd u_new;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            u_new = u + t * p;
            f_new = fu(u_new);
            if (std::isfinite(f_new) && f_new <= f + 1.0e-4 * t * g.dot(p)) {
                accepted = true;
                break;
            }
            if (!std::isfinite(f_new)) res.flagged = true;
            t *= 0.5;
        }
        if (!accepted) break;

        bool g_ok = true;
        const Eigen::VectorXd g_new = gradient(u_new, g_ok);
        if (!g_ok) {
            res.flagged = true;
            if (f_new < f) {
                u = u_new;
                f = f_new;
            }
            break;
        }
        const Eigen::VectorXd s = u_new - u;
        const Eigen::VectorXd yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1.0e-12 * s.norm() * yv.norm()) {
            if (!hinv_seeded) {  // standard initial curvature scaling
                hinv *= sy / yv.squaredNorm();
                hinv_seeded = true;
            }
            const Eigen::VectorXd hy = hinv * yv;
            const double yhy = yv.dot(hy);
            hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                    (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        const double decrease = f - f_new;
        u = u_new;
        f = f_new;
        g = g_new;
        res.iterations = iter + 1;
        if (decrease < tol * std::abs(f)) break;
    }

    if (f * fscale <= res.value) {
        res.x = u.cwiseProduct(scales);
        res.value = f * fscale;
    }
    return res;
}

namespace {

/// Shared coarse-search helpers bound to one estimation run.
struct Searcher {
    const ModelContext* ctx;
    const SearchConfig* cfg;
    Eigen::VectorXd delay_grid;

    Eigen::VectorXd gamma_grid(PathId path) const {
        const double center = (path == PathId::Sat) ? ctx->precomp.psi_bs_bar : 0.0;
        return linspace(center - cfg->gamma_halfwidth, center + cfg->gamma_halfwidth,
                        cfg->gamma_points);
    }

    double delay_cell() const {
        return (cfg->delay_hi - cfg->delay_lo) / std::max(1, cfg->delay_points - 1);
    }
    double gamma_cell() const {
        return 2.0 * cfg->gamma_halfwidth / std::max(1, cfg->gamma_points - 1);
    }
    double el_cell() const {
        return (ctx->sector.el_max - ctx->sector.el_min) / std::max(1, cfg->aod_points_el - 1);
    }
    double az_cell() const {
        return (ctx->sector.az_max - ctx->sector.az_min) / std::max(1, cfg->aod_points_az - 1);
    }

    /// Two top delay-peak values of |corr| for a per-subcarrier vector.
    std::pair<double, double> delay_peaks(const Eigen::VectorXcd& q, int parity) const {
        Eigen::VectorXd mag(delay_grid.size());
        Eigen::MatrixXcd qm = q;
        for (int i = 0; i < delay_grid.size(); ++i)
            mag(i) = std::abs(phase_corr(qm, 0, parity, ctx->num.delta_f * delay_grid(i)));
        const auto [a, b] = two_peak_candidates(mag);
        return {delay_grid(a), delay_grid(b)};
    }

    /// Best gamma on the coarse grid for per-symbol correlations r_m
    /// (maximizes |sum_m r_m conj(c_m(gamma))|); returns the two top peaks.
    std::pair<double, double> gamma_peaks(const Eigen::VectorXcd& r, PathId path,
                                          int m_limit = -1) const {
        const Eigen::VectorXd grid = gamma_grid(path);
        const int mm = (m_limit < 0) ? static_cast<int>(r.size()) : m_limit;
        Eigen::VectorXd mag(grid.size());
        for (int i = 0; i < grid.size(); ++i) {
            const double fd = carrier_doppler(path, grid(i), *ctx);
            cplx s(0.0, 0.0);
            for (int m = 0; m < mm; ++m) s += r(m) * unit_phase(fd * m * ctx->num.Ts);
            mag(i) = std::abs(s);
        }
        const auto [a, b] = two_peak_candidates(mag);
        return {grid(a), grid(b)};
    }
};

}  // namespace

EstimationReport estimate(ModelKind kind, const ObservationGrid& y, const ModelContext& ctx,
                          const SearchConfig& cfg) {
    if (kind == ModelKind::Generative)
        throw std::invalid_argument("estimation under the generative model is unsupported");
    if (!y.samples.allFinite())
        throw std::invalid_argument("observation contains non-finite samples");
    if (cfg.delay_points < 2 || cfg.gamma_points < 2 || cfg.aod_points_el < 2 ||
        cfg.aod_points_az < 2)
        throw std::invalid_argument("search grids must have at least two points");

    const ModelFeatures feat = ModelFeatures::of(kind);
    const Numerology& num = ctx.num;
    const int m_cols = num.M;

    Searcher se{&ctx, &cfg, linspace(cfg.delay_lo, cfg.delay_hi, cfg.delay_points)};
    const AodGrid aod_grid = make_aod_grid(ctx, cfg);

    const Eigen::MatrixXcd fb0 = fourier_matrix(PathId::Bs, num);
    const Eigen::MatrixXcd yb = fold_pilots(fb0.adjoint() * y.samples, ctx, 0);

    PathCorr bs{&ctx, PathId::Bs, feat.slow_time, feat.intersubcarrier};
    PathCorr sat{&ctx, PathId::Sat, feat.slow_time, feat.intersubcarrier};

    EstimationReport report;
    std::vector<double> peak_log;

    // ---------------- BS stage (all models) ----------------
    // Coarse delay from the column-summed tilde projection; for each of the
    // top two peaks: slow-time Doppler from the fixed-beam prefix, then the
    // beam sweep correlation for the AoD, then joint refinement.
    CandidateFit best_bs;
    double bs_coarse_obj = 0.0;
    {
        const Eigen::VectorXcd qb = yb.rowwise().sum();
        const auto [tau_a, tau_b2] = se.delay_peaks(qb, 0);
        peak_log.push_back(tau_a);
        if (tau_b2 != tau_a) peak_log.push_back(tau_b2);

        GammaCache bs_full([&](double gamma) {
            const Eigen::VectorXcd d = ici_diagonal(PathId::Bs, gamma, ctx);
            return fold_pilots(fb0.adjoint() * (d.conjugate().asDiagonal() * y.samples), ctx,
                               0);
        });

        // Objective over x = [tau, gamma, el, az] (gamma fixed to 0 for Comm).
        auto bs_objective = [&](double tau, double gamma, const Aod& aod, double bn2,
                                const Eigen::VectorXcd& z) {
            const Eigen::MatrixXcd& dom = feat.ici ? bs_full.get(gamma) : yb;
            const cplx s = bs.corr(dom, tau, gamma, &z);
            return -std::norm(s) / (0.5 * num.N * bn2);
        };

        for (const double tau_c : {tau_a, tau_b2}) {
            double gamma_c = 0.0;
            if (feat.slow_time) {
                Eigen::VectorXcd r(ctx.precoders.repeat_prefix);
                for (int m = 0; m < r.size(); ++m)
                    r(m) = phase_corr(yb, m, 0, num.delta_f * tau_c);
                gamma_c = se.gamma_peaks(r, PathId::Bs).first;
            }
            // AoD grid with slow-time compensation
            int best_dir = 0;
            double best_val = -1.0;
            {
                Eigen::VectorXcd r(m_cols);
                const double fd =
                    feat.slow_time ? carrier_doppler(PathId::Bs, gamma_c, ctx) : 0.0;
                for (int m = 0; m < m_cols; ++m)
                    r(m) = phase_corr(yb, m, 0, num.delta_f * tau_c) *
                           unit_phase(fd * m * num.Ts);
                for (std::size_t i = 0; i < aod_grid.dirs.size(); ++i) {
                    cplx s(0.0, 0.0);
                    for (int m = 0; m < m_cols; ++m)
                        s += r(m) * std::conj(aod_grid.beams[i](m));
                    const double val = std::norm(s) / aod_grid.beam_norm2[i];
                    if (val > best_val) {
                        best_val = val;
                        best_dir = static_cast<int>(i);
                    }
                }
            }
            const Aod aod_c = aod_grid.dirs[best_dir];

            auto obj_vec = [&](const Eigen::VectorXd& x) {
                const Aod aod{x(2), x(3)};
                const Eigen::VectorXcd z = beam_projection(aod, ctx);
                const double bn2 = z.squaredNorm();
                if (bn2 <= 0.0) return std::numeric_limits<double>::infinity();
                return bs_objective(x(0), feat.slow_time ? x(1) : 0.0, aod, bn2, z);
            };
            Eigen::VectorXd x0(4), scales(4);
            x0 << tau_c, gamma_c, aod_c.elevation, aod_c.azimuth;
            scales << se.delay_cell(), se.gamma_cell(), se.el_cell(), se.az_cell();
            const RefineResult rr =
                refine(obj_vec, x0, scales, cfg.refine_max_iters, cfg.refine_tol);
            if (rr.value < best_bs.objective) {
                best_bs.objective = rr.value;
                best_bs.iterations = rr.iterations;
                best_bs.flagged = rr.flagged;
                best_bs.params.tau_b = rr.x(0);
                best_bs.params.gamma_b = feat.slow_time ? rr.x(1) : 0.0;
                best_bs.params.aod = Aod{rr.x(2), rr.x(3)};
                bs_coarse_obj = obj_vec(x0);
            }
        }
        const Eigen::VectorXcd z = beam_projection(best_bs.params.aod, ctx);
        const Eigen::MatrixXcd& dom =
            feat.ici ? bs_full.get(best_bs.params.gamma_b) : yb;
        best_bs.params.alpha_b = bs.gain(dom, best_bs.params.tau_b, best_bs.params.gamma_b,
                                         &z, ctx.power_bs);
    }

    // ---------------- satellite stage ----------------
    // For CCFOD the refined BS path is reconstructed and subtracted first.
    Eigen::MatrixXcd y_sat = y.samples;
    if (feat.ici) {
        ChannelParams bs_only = best_bs.params;
        bs_only.tau_b = absolute_delay(bs_only.tau_b, bs_only.gamma_b, ctx);
        bs_only.alpha_s = cplx(0.0, 0.0);
        const ObservationGrid rec = build_observation_simplified(kind, bs_only, ctx);
        y_sat -= rec.samples;
    }

    CandidateFit best_sat;
    double sat_coarse_obj = 0.0;
    {
        const double psibar = ctx.precomp.psi_bs_bar;
        const Eigen::MatrixXcd fs_coarse =
            fourier_matrix(PathId::Sat, num, feat.ici ? psibar : 0.0);
        const Eigen::MatrixXcd ys = fold_pilots(fs_coarse.adjoint() * y_sat, ctx, 1);

        GammaCache sat_full([&](double gamma) {
            const Eigen::VectorXcd d = ici_diagonal(PathId::Sat, gamma, ctx);
            return fold_pilots(fourier_matrix(PathId::Sat, num, gamma).adjoint() *
                                   (d.conjugate().asDiagonal() * y_sat),
                               ctx, 1);
        });

        auto sat_domain = [&](double gamma) -> const Eigen::MatrixXcd& {
            return feat.ici ? sat_full.get(gamma) : ys;
        };
        auto sat_objective = [&](double tau, double gamma) {
            const cplx s = sat.corr(sat_domain(gamma), tau, gamma, nullptr);
            return -std::norm(s) / (0.5 * num.N * m_cols);
        };

        std::vector<std::pair<double, double>> starts;  // (tau, gamma)
        if (feat.intersubcarrier) {
            // gamma first, using the known precompensation value in the
            // intersubcarrier correction; then the delay at each peak.
            const double g = num.g();
            Eigen::VectorXcd r(m_cols);
            for (int m = 0; m < m_cols; ++m)
                r(m) = phase_corr(ys, m, 1, psibar * (m * (1.0 + g) + g));
            const auto [ga, gb] = se.gamma_peaks(r, PathId::Sat);
            for (const double gamma_c : {ga, gb}) {
                Eigen::VectorXcd q = Eigen::VectorXcd::Zero(num.N / 2);
                const Eigen::MatrixXcd& dom = sat_domain(gamma_c);
                const double fd = carrier_doppler(PathId::Sat, gamma_c, ctx);
                for (int m = 0; m < m_cols; ++m) {
                    cplx w = unit_phase(fd * m * num.Ts);
                    for (int c = 0; c < num.N / 2; ++c) {
                        const double phi = gamma_c * (m * (1.0 + g) + g);
                        q(c) += dom(c, m) * w * unit_phase(phi * (2 * c + 1));
                    }
                }
                starts.emplace_back(se.delay_peaks(q, 1).first, gamma_c);
                if (gb == ga) break;
            }
        } else {
            // delay first from the plain column sum, then (optionally) gamma.
            const Eigen::VectorXcd qs = ys.rowwise().sum();
            const auto [ta, tb] = se.delay_peaks(qs, 1);
            for (const double tau_c : {ta, tb}) {
                double gamma_c = feat.slow_time ? psibar : 0.0;
                if (feat.slow_time) {
                    Eigen::VectorXcd r(m_cols);
                    for (int m = 0; m < m_cols; ++m)
                        r(m) = phase_corr(ys, m, 1, num.delta_f * tau_c);
                    gamma_c = se.gamma_peaks(r, PathId::Sat).first;
                }
                starts.emplace_back(tau_c, gamma_c);
                if (tb == ta) break;
            }
        }

        for (const auto& [tau_c, gamma_c] : starts) {
            peak_log.push_back(tau_c);
            if (!feat.slow_time) {
                auto obj_vec = [&](const Eigen::VectorXd& x) {
                    return sat_objective(x(0), 0.0);
                };
                Eigen::VectorXd x0(1), scales(1);
                x0 << tau_c;
                scales << se.delay_cell();
                const RefineResult rr =
                    refine(obj_vec, x0, scales, cfg.refine_max_iters, cfg.refine_tol);
                if (rr.value < best_sat.objective) {
                    best_sat.objective = rr.value;
                    best_sat.iterations = rr.iterations;
                    best_sat.flagged = rr.flagged;
                    best_sat.params.tau_s_res = rr.x(0);
                    best_sat.params.gamma_s = 0.0;
                    sat_coarse_obj = obj_vec(x0);
                }
            } else {
                auto obj_vec = [&](const Eigen::VectorXd& x) {
                    return sat_objective(x(0), x(1));
                };
                Eigen::VectorXd x0(2), scales(2);
                x0 << tau_c, gamma_c;
                scales << se.delay_cell(), se.gamma_cell();
                const RefineResult rr =
                    refine(obj_vec, x0, scales, cfg.refine_max_iters, cfg.refine_tol);
                if (rr.value < best_sat.objective) {
                    best_sat.objective = rr.value;
                    best_sat.iterations = rr.iterations;
                    best_sat.flagged = rr.flagged;
                    best_sat.params.tau_s_res = rr.x(0);
                    best_sat.params.gamma_s = rr.x(1);
                    sat_coarse_obj = obj_vec(x0);
                }
            }
        }
        best_sat.params.alpha_s =
            sat.gain(sat_domain(best_sat.params.gamma_s), best_sat.params.tau_s_res,
                     best_sat.params.gamma_s, nullptr, ctx.power_sat);
    }

    // ---------------- assemble report ----------------
    ChannelParams& p = report.params;
    p = best_bs.params;
    p.tau_b = absolute_delay(best_bs.params.tau_b, best_bs.params.gamma_b, ctx);
    p.tau_s_res = absolute_delay(best_sat.params.tau_s_res, best_sat.params.gamma_s, ctx);
    p.gamma_s = best_sat.params.gamma_s;
    p.alpha_s = best_sat.params.alpha_s;

    report.iterations = best_bs.iterations + best_sat.iterations;
    report.refine_flagged = best_bs.flagged || best_sat.flagged;
    report.peak_candidates = std::move(peak_log);
    report.objective = (y.samples - build_observation_simplified(kind, p, ctx).samples)
                           .squaredNorm();
    // Residual implied by the coarse concentrated objectives (refinement never
    // increases either term).
    report.coarse_objective = y.samples.squaredNorm() + bs_coarse_obj + sat_coarse_obj;
    return report;
}

}  // namespace ntnpos
