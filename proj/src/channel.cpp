#include "fusionrx/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fusionrx {

ChannelParams sample_params(RngStream& rng, const PriorSpec& prior) {
    ChannelParams p;
    p.theta = wrap_pi(rng.uniform(-kPi, kPi));
    p.omega = rng.uniform_pm(prior.omega_max);
    p.epsilon = rng.uniform_pm(prior.epsilon_max);
    return p;
}

Eigen::VectorXd phase_trajectory(const ChannelParams& p, int length) {
    if (length < 1) throw std::invalid_argument("phase_trajectory: length must be >= 1");
    Eigen::VectorXd phi(length);
    for (int k = 0; k < length; ++k) {
        const double kk = static_cast<double>(k);
        phi[k] = wrap_pi(p.theta + p.omega * kk + p.epsilon * kk * kk);
    }
    return phi;
}

NodeObservation apply_channel(const Frame& frame, const ChannelParams& p, double sigma2,
                              RngStream& rng, int node_id) {
    if (sigma2 <= 0.0) throw std::invalid_argument("apply_channel: sigma2 must be > 0");
    const int L = frame.length();
    const Eigen::VectorXd phi = phase_trajectory(p, L);
    const double s = std::sqrt(sigma2 / 2.0);

    NodeObservation obs;
    obs.samples.resize(L);
    obs.sigma2 = sigma2;
    obs.node_id = node_id;
    for (int k = 0; k < L; ++k) {
        const cplx rot(std::cos(phi[k]), std::sin(phi[k]));
        obs.samples[k] = frame.symbols[k] * rot + cplx(rng.normal(0.0, s), rng.normal(0.0, s));
    }
    return obs;
}

double snr_db_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

}  // namespace fusionrx
