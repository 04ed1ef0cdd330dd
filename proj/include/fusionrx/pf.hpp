#pragma once

#include <Eigen/Core>
#include <vector>

#include "fusionrx/channel.hpp"
#include "fusionrx/pmf.hpp"
#include "fusionrx/rng.hpp"

namespace fusionrx {

struct PfConfig {
    int n_particles = 400;
    bool fine_tune = true;
    // Regeneration half-widths; gamma itself is gamma_scale * epsilon_max.
    double alpha = 0.1;
    double zeta = 0.01;
    double gamma_scale = 0.1;
    // Particle-variance trigger thresholds (theta in rad^2, omega in
    // translated [0,1] units). The trigger fires at most once per frame.
    double theta_th = 0.05;
    double omega_th = 1e-4;
    double kappa_max = 1e4;
};

struct ParticleSet {
    Eigen::ArrayXd theta;    // rad
    Eigen::ArrayXd omega;    // rad/symbol
    Eigen::ArrayXd epsilon;  // rad/symbol^2
    Eigen::ArrayXd w;        // normalized importance weights

    int n() const { return static_cast<int>(w.size()); }
};

struct ProposalStats {
    double mu_theta = 0.0;
    double kappa_theta = 0.0;
    double u_omega = 1.0, v_omega = 1.0;
    double u_eps = 1.0, v_eps = 1.0;
    // Translated-domain moments behind the beta fits.
    double omega_bar = 0.5, var_omega = 1.0 / 12.0;
    double eps_bar = 0.5, var_eps = 1.0 / 12.0;
    bool variance_clamped = false;
};

struct PfEstimate {
    double theta_hat = 0.0;
    double omega_hat = 0.0;
    double epsilon_hat = 0.0;
    double phi_hat = 0.0;  // theta + omega k + epsilon k^2, not wrapped
    bool resultant_degenerate = false;
};

ParticleSet pf_init(int n_particles, const PriorSpec& prior, RngStream& rng);

// Moment fits for the next proposal: von Mises (mu, kappa) for theta via the
// mean resultant and Fisher's inverse-A approximation, beta shape pairs for
// the translated omega and epsilon clouds.
ProposalStats proposal_stats(const ParticleSet& ps, const PriorSpec& prior,
                             const PfConfig& cfg);

// Draw fresh particle positions from the fitted proposal (weights unchanged).
void draw_particles(ParticleSet& ps, const ProposalStats& stats, const PriorSpec& prior,
                    RngStream& rng);

// Recursive weight update: w_k = w_{k-1} * sum_x mu(x) p(y_k | x, particle),
// evaluated with a max-shifted exponent so no intermediate under/overflows,
// then normalized. A fully degenerate update resets to uniform weights.
// Returns false on that degenerate reset.
bool update_weights(ParticleSet& ps, cplx y, int k, const SymbolPmf& incoming, double sigma2);

double effective_sample_size(const ParticleSet& ps);

// Systematic resampling; weights reset to 1/N.
void resample(ParticleSet& ps, RngStream& rng);

PfEstimate pf_estimate(const ParticleSet& ps, int k, double prev_theta_hat = 0.0);

// Weighted particle variances used by the fine-tuning trigger: theta about its
// circular mean, omega in translated units.
void trigger_variances(const ParticleSet& ps, const PriorSpec& prior, double* var_theta,
                       double* var_omega_translated);

// Algorithm: least-squares quadratic fit of the phase history, regeneration of
// the full cloud around the fit, weight rebuild from the current observation.
// Returns false (and leaves the set untouched) when the history is too short.
bool fine_tune(ParticleSet& ps, const Eigen::VectorXd& phase_history, cplx y, int k,
               const SymbolPmf& incoming, double sigma2, const PfConfig& cfg,
               const PriorSpec& prior, RngStream& rng);

struct PfNodeResult {
    std::vector<SymbolPmf> upward;  // data positions k = N_p..L-1
    Eigen::VectorXd theta_hat;      // per-symbol estimates
    Eigen::VectorXd omega_hat;
    Eigen::VectorXd epsilon_hat;
    Eigen::VectorXd phi_hat;
    int fine_tune_at = -1;          // symbol index, or -1 if never fired
    int n_resamples = 0;
    int n_degenerate_updates = 0;
};

// One SIS pass over a frame for a single node: per-symbol proposal refit,
// redraw, weight update, conditional resampling and one-shot fine-tuning,
// then upward PMFs from the end-of-frame estimates.
PfNodeResult run_pf_node(const NodeObservation& obs, const std::vector<SymbolPmf>& incoming,
                         int n_preamble, const PriorSpec& prior, const PfConfig& cfg,
                         RngStream& rng);

}  // namespace fusionrx
