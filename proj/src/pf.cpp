#include "fusionrx/pf.hpp"

#include <cmath>
#include <stdexcept>

#include "fusionrx/rw.hpp"

namespace fusionrx {

namespace {

// Fisher's piecewise inverse of the mean resultant length (Statistical
// Analysis of Circular Data, sec. 4.5.5).
double kappa_from_resultant(double rbar, double cap) {
    double k;
    if (rbar < 0.53) {
        k = 2.0 * rbar + rbar * rbar * rbar + (5.0 / 6.0) * std::pow(rbar, 5);
    } else if (rbar < 0.85) {
        k = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
    } else {
        const double d = rbar * rbar * rbar - 4.0 * rbar * rbar + 3.0 * rbar;
        k = d > 0.0 ? 1.0 / d : cap;
    }
    if (!(k < cap)) k = cap;
    return std::max(k, 0.0);
}

struct BetaShape {
    double u, v;
};

BetaShape beta_from_moments(double mean, double var, bool* clamped) {
    const double m = std::clamp(mean, 1e-9, 1.0 - 1e-9);
    const double var_cap = m * (1.0 - m);
    double s2 = var;
    if (s2 >= var_cap) {
        s2 = 0.999 * var_cap;
        if (clamped) *clamped = true;
    }
    s2 = std::max(s2, 1e-16);  // frozen clouds would otherwise divide by zero
    const double t = var_cap / s2 - 1.0;
    return {m * t, (1.0 - m) * t};
}

inline double translate(double x, double half_width) {
    return (x + half_width) / (2.0 * half_width);
}
inline double back_translate(double u, double half_width) {
    return 2.0 * half_width * u - half_width;
}

}  // namespace

ParticleSet pf_init(int n_particles, const PriorSpec& prior, RngStream& rng) {
    if (n_particles < 2) throw std::invalid_argument("pf_init: need at least 2 particles");
    ParticleSet ps;
    ps.theta.resize(n_particles);
    ps.omega.resize(n_particles);
    ps.epsilon.resize(n_particles);
    ps.w.setConstant(n_particles, 1.0 / n_particles);
    for (int i = 0; i < n_particles; ++i) {
        ps.theta[i] = rng.uniform(-kPi, kPi);
        ps.omega[i] = rng.uniform_pm(prior.omega_max);
        ps.epsilon[i] = rng.uniform_pm(prior.epsilon_max);
    }
    return ps;
}

ProposalStats proposal_stats(const ParticleSet& ps, const PriorSpec& prior, const PfConfig& cfg) {
    ProposalStats st;
    const double c = (ps.w * ps.theta.cos()).sum();
    const double s = (ps.w * ps.theta.sin()).sum();
    const double rbar = std::min(std::hypot(c, s), 1.0);
    st.mu_theta = std::atan2(s, c);
    st.kappa_theta = kappa_from_resultant(rbar, cfg.kappa_max);

    const Eigen::ArrayXd om = (ps.omega + prior.omega_max) / (2.0 * prior.omega_max);
    st.omega_bar = (ps.w * om).sum();
    st.var_omega = (ps.w * (om - st.omega_bar).square()).sum();
    const BetaShape bo = beta_from_moments(st.omega_bar, st.var_omega, &st.variance_clamped);
    st.u_omega = bo.u;
    st.v_omega = bo.v;

    if (prior.epsilon_max > 0.0) {
        const Eigen::ArrayXd ep = (ps.epsilon + prior.epsilon_max) / (2.0 * prior.epsilon_max);
        st.eps_bar = (ps.w * ep).sum();
        st.var_eps = (ps.w * (ep - st.eps_bar).square()).sum();
        const BetaShape be = beta_from_moments(st.eps_bar, st.var_eps, &st.variance_clamped);
        st.u_eps = be.u;
        st.v_eps = be.v;
    } else {
        st.eps_bar = 0.5;
        st.var_eps = 0.0;
    }
    return st;
}

void draw_particles(ParticleSet& ps, const ProposalStats& stats, const PriorSpec& prior,
                    RngStream& rng) {
    const int n = ps.n();
    for (int i = 0; i < n; ++i)
        ps.theta[i] = rng.von_mises(stats.mu_theta, stats.kappa_theta);
    for (int i = 0; i < n; ++i)
        ps.omega[i] = back_translate(rng.beta(stats.u_omega, stats.v_omega), prior.omega_max);
    if (prior.epsilon_max > 0.0) {
        for (int i = 0; i < n; ++i)
            ps.epsilon[i] = back_translate(rng.beta(stats.u_eps, stats.v_eps), prior.epsilon_max);
    } else {
        ps.epsilon.setZero();
    }
}

bool update_weights(ParticleSet& ps, cplx y, int k, const SymbolPmf& incoming, double sigma2) {
    const double kk = static_cast<double>(k);
    const Eigen::ArrayXd phi = ps.theta + kk * ps.omega + (kk * kk) * ps.epsilon;
    const Eigen::ArrayXd c = (2.0 / sigma2) * (y.real() * phi.cos() + y.imag() * phi.sin());
    const double shift = c.abs().maxCoeff();
    ps.w *= incoming.p[0] * (c - shift).exp() + incoming.p[1] * ((-c) - shift).exp();
    const double sum = ps.w.sum();
    if (sum <= 0.0 || !std::isfinite(sum)) {
        ps.w.setConstant(1.0 / ps.n());
        return false;
    }
    ps.w /= sum;
    return true;
}

double effective_sample_size(const ParticleSet& ps) { return 1.0 / ps.w.square().sum(); }

void resample(ParticleSet& ps, RngStream& rng) {
    const int n = ps.n();
    const double u0 = rng.uniform(0.0, 1.0);
    Eigen::ArrayXd nt(n), no(n), ne(n);
    double cum = ps.w[0];
    int j = 0;
    for (int i = 0; i < n; ++i) {
        const double u = (i + u0) / n;
        while (u > cum && j + 1 < n) cum += ps.w[++j];
        nt[i] = ps.theta[j];
        no[i] = ps.omega[j];
        ne[i] = ps.epsilon[j];
    }
    ps.theta = nt;
    ps.omega = no;
    ps.epsilon = ne;
    ps.w.setConstant(1.0 / n);
}

PfEstimate pf_estimate(const ParticleSet& ps, int k, double prev_theta_hat) {
    PfEstimate est;
    const double c = (ps.w * ps.theta.cos()).sum();
    const double s = (ps.w * ps.theta.sin()).sum();
    if (std::hypot(c, s) < 1e-12) {
        est.theta_hat = prev_theta_hat;
        est.resultant_degenerate = true;
    } else {
        est.theta_hat = std::atan2(s, c);
    }
    est.omega_hat = (ps.w * ps.omega).sum();
    est.epsilon_hat = (ps.w * ps.epsilon).sum();
    const double kk = static_cast<double>(k);
    est.phi_hat = est.theta_hat + est.omega_hat * kk + est.epsilon_hat * kk * kk;
    return est;
}

void trigger_variances(const ParticleSet& ps, const PriorSpec& prior, double* var_theta,
                       double* var_omega_translated) {
    const double c = (ps.w * ps.theta.cos()).sum();
    const double s = (ps.w * ps.theta.sin()).sum();
    const double mu = std::atan2(s, c);
    double vt = 0.0;
    for (int i = 0; i < ps.n(); ++i) vt += ps.w[i] * sq(wrap_pi(ps.theta[i] - mu));
    *var_theta = vt;

    const Eigen::ArrayXd om = (ps.omega + prior.omega_max) / (2.0 * prior.omega_max);
    const double ob = (ps.w * om).sum();
    *var_omega_translated = (ps.w * (om - ob).square()).sum();
}

bool fine_tune(ParticleSet& ps, const Eigen::VectorXd& phase_history, cplx y, int k,
               const SymbolPmf& incoming, double sigma2, const PfConfig& cfg,
               const PriorSpec& prior, RngStream& rng) {
    if (phase_history.size() < 3) return false;

    // The history is smooth except for possible 2*pi hops of the wrapped
    // theta estimate near the boundary; unwrapping removes those before the fit.
    const FitResult fit = quadratic_fit(unwrap(phase_history), 0);
    const double gamma = cfg.gamma_scale * prior.epsilon_max;

    for (int i = 0; i < ps.n(); ++i) {
        ps.theta[i] = wrap_pi(fit.theta_hat + rng.uniform_pm(cfg.alpha));
        ps.omega[i] = std::clamp(fit.omega_hat + rng.uniform_pm(cfg.zeta), -prior.omega_max,
                                 prior.omega_max);
        ps.epsilon[i] = std::clamp(fit.epsilon_hat + rng.uniform_pm(gamma), -prior.epsilon_max,
                                   prior.epsilon_max);
    }
    // Weights are rebuilt from the current observation alone.
    ps.w.setConstant(1.0);
    update_weights(ps, y, k, incoming, sigma2);
    return true;
}

PfNodeResult run_pf_node(const NodeObservation& obs, const std::vector<SymbolPmf>& incoming,
                         int n_preamble, const PriorSpec& prior, const PfConfig& cfg,
                         RngStream& rng) {
    const int L = static_cast<int>(obs.samples.size());
    if (static_cast<int>(incoming.size()) != L)
        throw std::invalid_argument("run_pf_node: incoming PMF count mismatch");

    PfNodeResult res;
    res.theta_hat.resize(L);
    res.omega_hat.resize(L);
    res.epsilon_hat.resize(L);
    res.phi_hat.resize(L);

    ParticleSet ps = pf_init(cfg.n_particles, prior, rng);
    double prev_theta = 0.0;

    for (int k = 0; k < L; ++k) {
        const ProposalStats stats = proposal_stats(ps, prior, cfg);
        draw_particles(ps, stats, prior, rng);
        if (!update_weights(ps, obs.samples[k], k, incoming[k], obs.sigma2))
            ++res.n_degenerate_updates;
        if (effective_sample_size(ps) <= ps.n() / 2.0) {
            resample(ps, rng);
            ++res.n_resamples;
        }
        if (cfg.fine_tune && res.fine_tune_at < 0 && k > n_preamble) {
            double vt = 0.0, vo = 0.0;
            trigger_variances(ps, prior, &vt, &vo);
            if (vt < cfg.theta_th && vo < cfg.omega_th) {
                if (fine_tune(ps, res.phi_hat.head(k), obs.samples[k], k, incoming[k],
                              obs.sigma2, cfg, prior, rng))
                    res.fine_tune_at = k;
            }
        }
        const PfEstimate est = pf_estimate(ps, k, prev_theta);
        prev_theta = est.theta_hat;
        res.theta_hat[k] = est.theta_hat;
        res.omega_hat[k] = est.omega_hat;
        res.epsilon_hat[k] = est.epsilon_hat;
        res.phi_hat[k] = est.phi_hat;
    }

    FitResult final_poly;
    final_poly.theta_hat = res.theta_hat[L - 1];
    final_poly.omega_hat = res.omega_hat[L - 1];
    final_poly.epsilon_hat = res.epsilon_hat[L - 1];
    res.upward = rw_upward_messages(final_poly, obs.samples, obs.sigma2, n_preamble);
    return res;
}

}  // namespace fusionrx
