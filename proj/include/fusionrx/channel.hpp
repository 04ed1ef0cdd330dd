#pragma once

#include <Eigen/Core>

#include "fusionrx/framing.hpp"
#include "fusionrx/math.hpp"
#include "fusionrx/rng.hpp"

namespace fusionrx {

// Uniform priors: theta ~ U(-pi, pi), omega ~ U(-omega_max, omega_max),
// epsilon ~ U(-epsilon_max, epsilon_max).
struct PriorSpec {
    double omega_max = 0.01;    // rad/symbol
    double epsilon_max = 1e-5;  // rad/symbol^2
};

// The unknown triple for one receive node.
struct ChannelParams {
    double theta = 0.0;    // rad, in (-pi, pi]
    double omega = 0.0;    // rad/symbol
    double epsilon = 0.0;  // rad/symbol^2
};

struct NodeObservation {
    Eigen::VectorXcd samples;
    double sigma2 = 1.0;  // total complex-noise variance (sigma^2/2 per dimension)
    int node_id = 0;
};

ChannelParams sample_params(RngStream& rng, const PriorSpec& prior);

// phi_k = wrap(theta + omega*k + epsilon*k^2), k = 0..L-1.
Eigen::VectorXd phase_trajectory(const ChannelParams& p, int length);

NodeObservation apply_channel(const Frame& frame, const ChannelParams& p, double sigma2,
                              RngStream& rng, int node_id = 0);

// SNR is E_s/N0 with unit-energy symbols, so sigma^2 = 10^(-snr_db/10).
double snr_db_to_sigma2(double snr_db);

}  // namespace fusionrx
