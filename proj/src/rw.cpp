#include "fusionrx/rw.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace fusionrx {

double sigma_w2_from_priors(const PriorSpec& prior, long frame_len, SigmaWMode mode) {
    if (frame_len < 2) throw std::invalid_argument("sigma_w2_from_priors: frame_len must be >= 2");
    const double delta = prior.omega_max + prior.epsilon_max * (2.0 * frame_len - 3.0);
    switch (mode) {
        case SigmaWMode::paper: return delta / 6.0;
        case SigmaWMode::uniform_var: return delta * delta / 3.0;
    }
    throw std::logic_error("sigma_w2_from_priors: bad mode");
}

PhaseGrid build_kernel(int n_q, double sigma_w2) {
    if (n_q < 4) throw std::invalid_argument("build_kernel: n_q must be >= 4");
    if (sigma_w2 <= 0.0) throw std::invalid_argument("build_kernel: sigma_w2 must be > 0");

    PhaseGrid g;
    g.n_q = n_q;
    g.sigma_w2 = sigma_w2;
    g.angles.resize(n_q);
    for (int l = 0; l < n_q; ++l) g.angles[l] = -kPi + kTwoPi * (l + 0.5) / n_q;

    // Row 0 of the circulant: wrapped Gaussian over the step d*2pi/n_q, with
    // enough 2pi translates that the truncated tail is below 1e-12.
    const double sigma_w = std::sqrt(sigma_w2);
    const int n_wraps = 1 + static_cast<int>(std::ceil((kPi + 8.0 * sigma_w) / kTwoPi));
    Eigen::VectorXd row0(n_q);
    for (int d = 0; d < n_q; ++d) {
        const double step = wrap_pi(kTwoPi * d / n_q);
        double acc = 0.0;
        for (int w = -n_wraps; w <= n_wraps; ++w) acc += std::exp(-sq(step + kTwoPi * w) / (2.0 * sigma_w2));
        row0[d] = acc;
    }
    row0 /= row0.sum();

    g.kernel.resize(n_q, n_q);
    for (int l = 0; l < n_q; ++l)
        for (int m = 0; m < n_q; ++m)
            g.kernel(l, m) = row0[(l - m + n_q) % n_q];
    return g;
}

namespace {

void normalize_row(Eigen::VectorXd& v, bool* degenerate) {
    const double s = v.sum();
    if (s <= 0.0 || !std::isfinite(s)) {
        v.setConstant(1.0 / static_cast<double>(v.size()));
        if (degenerate) *degenerate = true;
        return;
    }
    v /= s;
}

Eigen::VectorXd local_message(cplx y, double sigma2, const SymbolPmf& incoming,
                              const Eigen::VectorXd& cos_a, const Eigen::VectorXd& sin_a,
                              bool* degenerate) {
    // For BPSK: sum_x mu(x) exp(-|y - x e^{j phi}|^2 / sigma2) reduces to
    // mu(+1) e^{c} + mu(-1) e^{-c} with c = 2 Re(y e^{-j phi}) / sigma2,
    // up to a positive factor common to all grid cells.
    const int n = static_cast<int>(cos_a.size());
    Eigen::VectorXd c = (2.0 / sigma2) * (y.real() * cos_a + y.imag() * sin_a);
    const double m = c.cwiseAbs().maxCoeff();
    Eigen::VectorXd out(n);
    for (int l = 0; l < n; ++l)
        out[l] = incoming.p[0] * std::exp(c[l] - m) + incoming.p[1] * std::exp(-c[l] - m);
    normalize_row(out, degenerate);
    return out;
}

}  // namespace

GridMessages forward_backward(const Eigen::VectorXcd& samples, double sigma2,
                              const std::vector<SymbolPmf>& incoming, const PhaseGrid& grid) {
    const int L = static_cast<int>(samples.size());
    const int n = grid.n_q;
    if (static_cast<int>(incoming.size()) != L)
        throw std::invalid_argument("forward_backward: incoming PMF count mismatch");

    GridMessages msg;
    msg.forward.resize(L, n);
    msg.backward.resize(L, n);
    msg.local.resize(L, n);
    msg.posterior.resize(L, n);

    const Eigen::VectorXd cos_a = grid.angles.array().cos();
    const Eigen::VectorXd sin_a = grid.angles.array().sin();
    for (int k = 0; k < L; ++k)
        msg.local.row(k) = local_message(samples[k], sigma2, incoming[k], cos_a, sin_a,
                                         &msg.degenerate);

    // Forward sweep; boundary message is uniform.
    Eigen::VectorXd cur = Eigen::VectorXd::Constant(n, 1.0 / n);
    msg.forward.row(0) = cur;
    for (int k = 1; k < L; ++k) {
        Eigen::VectorXd prod = msg.forward.row(k - 1).transpose().cwiseProduct(
            msg.local.row(k - 1).transpose());
        cur.noalias() = grid.kernel * prod;
        normalize_row(cur, &msg.degenerate);
        msg.forward.row(k) = cur;
    }

    // Backward sweep (the kernel is symmetric).
    cur.setConstant(1.0 / n);
    msg.backward.row(L - 1) = cur;
    for (int k = L - 2; k >= 0; --k) {
        Eigen::VectorXd prod = msg.backward.row(k + 1).transpose().cwiseProduct(
            msg.local.row(k + 1).transpose());
        cur.noalias() = grid.kernel * prod;
        normalize_row(cur, &msg.degenerate);
        msg.backward.row(k) = cur;
    }

    for (int k = 0; k < L; ++k) {
        Eigen::VectorXd post = msg.local.row(k).transpose().cwiseProduct(
            msg.forward.row(k).transpose()).cwiseProduct(msg.backward.row(k).transpose());
        normalize_row(post, &msg.degenerate);
        msg.posterior.row(k) = post;
    }
    return msg;
}

double posterior_phase_mean(const Eigen::VectorXd& posterior, const PhaseGrid& grid,
                            PhaseMeanMode mode) {
    if (mode == PhaseMeanMode::linear) return posterior.dot(grid.angles);
    const double c = posterior.dot(Eigen::VectorXd(grid.angles.array().cos()));
    const double s = posterior.dot(Eigen::VectorXd(grid.angles.array().sin()));
    return std::atan2(s, c);
}

Eigen::VectorXd unwrap(const Eigen::VectorXd& phases) {
    if (phases.size() < 1) throw std::invalid_argument("unwrap: need at least one element");
    Eigen::VectorXd out(phases.size());
    out[0] = phases[0];
    for (Eigen::Index i = 1; i < phases.size(); ++i) {
        double d = phases[i] - phases[i - 1];
        d -= kTwoPi * std::round(d / kTwoPi);
        out[i] = out[i - 1] + d;
    }
    return out;
}

FitResult quadratic_fit(const Eigen::VectorXd& phases, int k_first) {
    const Eigen::Index n = phases.size();
    if (n < 3) throw std::invalid_argument("quadratic_fit: need at least 3 points");

    // Centered abscissa for conditioning; map back to the k-origin below.
    const double kbar = k_first + (static_cast<double>(n) - 1.0) / 2.0;
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = (k_first + static_cast<double>(i)) - kbar;
        const Eigen::Vector3d row(1.0, t, t * t);
        ata.noalias() += row * row.transpose();
        atb.noalias() += row * phases[i];
    }
    const Eigen::Vector3d coef = ata.ldlt().solve(atb);

    FitResult fit;
    fit.epsilon_hat = coef[2];
    fit.omega_hat = coef[1] - 2.0 * coef[2] * kbar;
    fit.theta_hat = coef[0] - coef[1] * kbar + coef[2] * kbar * kbar;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = (k_first + static_cast<double>(i)) - kbar;
        fit.residual_ss += sq(phases[i] - (coef[0] + coef[1] * t + coef[2] * t * t));
    }
    return fit;
}

std::vector<SymbolPmf> rw_upward_messages(const FitResult& fit, const Eigen::VectorXcd& samples,
                                          double sigma2, int n_preamble) {
    const int L = static_cast<int>(samples.size());
    std::vector<SymbolPmf> up;
    up.reserve(L - n_preamble);
    for (int k = n_preamble; k < L; ++k) {
        const double kk = static_cast<double>(k);
        const double phi = fit.theta_hat + fit.omega_hat * kk + fit.epsilon_hat * kk * kk;
        up.push_back(pmf_from_phase(samples[k], phi, sigma2, SymbolPmf::uniform()));
    }
    return up;
}

RwNodeResult run_rw_node(const NodeObservation& obs, const std::vector<SymbolPmf>& incoming,
                         int n_preamble, const PhaseGrid& grid, PhaseMeanMode mean_mode) {
    const int L = static_cast<int>(obs.samples.size());
    GridMessages msg = forward_backward(obs.samples, obs.sigma2, incoming, grid);

    const Eigen::VectorXd cos_a = grid.angles.array().cos();
    const Eigen::VectorXd sin_a = grid.angles.array().sin();
    Eigen::VectorXd means(L);
    for (int k = 0; k < L; ++k) {
        if (mean_mode == PhaseMeanMode::linear) {
            means[k] = msg.posterior.row(k) * grid.angles;
        } else {
            means[k] = std::atan2(msg.posterior.row(k) * sin_a, msg.posterior.row(k) * cos_a);
        }
    }

    RwNodeResult res;
    res.degenerate = msg.degenerate;
    res.tracked_phase = unwrap(means);
    res.fit = quadratic_fit(res.tracked_phase, 0);
    res.upward = rw_upward_messages(res.fit, obs.samples, obs.sigma2, n_preamble);
    return res;
}

}  // namespace fusionrx
