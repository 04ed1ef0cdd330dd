#pragma once

#include <Eigen/Core>
#include <vector>

#include "fusionrx/channel.hpp"
#include "fusionrx/pmf.hpp"

namespace fusionrx {

enum class SigmaWMode { paper, uniform_var };
enum class PhaseMeanMode { circular, linear };

struct RwConfig {
    int n_q = 100;
    SigmaWMode sigma_w_mode = SigmaWMode::paper;
    PhaseMeanMode mean_mode = PhaseMeanMode::circular;
};

// Quantized phase grid with the wrapped-Gaussian step kernel. Cell centers at
// -pi + 2*pi*(l + 0.5)/N_q; the kernel is a symmetric, row-stochastic
// circulant, immutable and shareable once built.
struct PhaseGrid {
    int n_q = 0;
    double sigma_w2 = 0.0;
    Eigen::VectorXd angles;
    Eigen::MatrixXd kernel;
};

// Largest per-symbol phase increment delta_phi_m = omega_max + epsilon_max*(2L-3),
// turned into the walk variance per the selected convention. The `paper` mode
// uses delta_phi_m/6; `uniform_var` uses the variance of U(-delta, delta).
double sigma_w2_from_priors(const PriorSpec& prior, long frame_len, SigmaWMode mode);

PhaseGrid build_kernel(int n_q, double sigma_w2);

struct GridMessages {
    // Rows are symbol positions, columns grid cells; every row normalized.
    Eigen::MatrixXd forward;    // message into phi_k from p_k
    Eigen::MatrixXd backward;   // message into phi_k from p_{k+1}
    Eigen::MatrixXd local;      // likelihood message mu_{f_k -> phi_k}
    Eigen::MatrixXd posterior;
    bool degenerate = false;
};

GridMessages forward_backward(const Eigen::VectorXcd& samples, double sigma2,
                              const std::vector<SymbolPmf>& incoming, const PhaseGrid& grid);

double posterior_phase_mean(const Eigen::VectorXd& posterior, const PhaseGrid& grid,
                            PhaseMeanMode mode);

// Adjusts successive differences by multiples of 2*pi so |delta| <= pi; the
// first element is kept as-is.
Eigen::VectorXd unwrap(const Eigen::VectorXd& phases);

struct FitResult {
    double theta_hat = 0.0;
    double omega_hat = 0.0;
    double epsilon_hat = 0.0;
    double residual_ss = 0.0;
};

// Ordinary least squares on {1, k, k^2}. Solved in centered-k coordinates for
// conditioning, reported at the k = 0 origin.
FitResult quadratic_fit(const Eigen::VectorXd& phases, int k_first = 0);

std::vector<SymbolPmf> rw_upward_messages(const FitResult& fit, const Eigen::VectorXcd& samples,
                                          double sigma2, int n_preamble);

struct RwNodeResult {
    FitResult fit;
    std::vector<SymbolPmf> upward;        // data positions k = N_p..L-1
    Eigen::VectorXd tracked_phase;        // unwrapped per-symbol posterior means
    bool degenerate = false;
};

// One full tracker pass for a node: local messages from the incoming PMFs,
// forward/backward sweep, posterior means, unwrap, quadratic fit, upward PMFs.
RwNodeResult run_rw_node(const NodeObservation& obs, const std::vector<SymbolPmf>& incoming,
                         int n_preamble, const PhaseGrid& grid, PhaseMeanMode mean_mode);

}  // namespace fusionrx
