#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fusionrx/bounds.hpp"
#include "fusionrx/config.hpp"
#include "fusionrx/fg_loop.hpp"
#include "fusionrx/pf.hpp"
#include "fusionrx/rw.hpp"

namespace fusionrx {

enum class EstimatorKind { pf, rw, genie };

EstimatorKind estimator_from_string(const std::string& s);

// Immutable per-experiment context: code, encoder, frame layout, priors,
// estimator settings, and the shared phase grid.
struct SimSystem {
    Config cfg;
    ParityCheckMatrix h;
    std::unique_ptr<LdpcEncoder> encoder;
    FrameConfig frame_cfg;
    PriorSpec prior;
    std::vector<std::uint8_t> preamble_bits;
    PfConfig pf;
    RwConfig rw;
    PhaseGrid grid;
    bool code_substituted = false;  // alist fixture missing, PEG-synthesized in memory
    std::uint64_t seed = 1;
    int n_threads = 1;

    int frame_len() const { return frame_cfg.length(); }
};

SimSystem make_system(const Config& cfg);

struct ResultRow {
    std::string scenario;
    double snr_db = 0.0;
    std::string metric;
    double value = 0.0;
    long n_trials = 0;
    double std_error = 0.0;
    std::uint64_t fingerprint = 0;
    std::uint64_t seed = 0;
};

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
// Companion matplotlib script referencing the CSV; plain text, no plotting
// dependency in the library itself.
void emit_plotscript(const std::vector<ResultRow>& rows, const std::string& csv_path,
                     const std::string& script_path);

// ---------------------------------------------------------------------------
// Scenario runners

struct MseOutcome {
    double snr_db = 0.0;
    long n_bursts = 0;
    // Mean squared errors (theta wrapped) with standard errors of the mean.
    double mse_theta = 0.0, mse_omega = 0.0, mse_epsilon = 0.0;
    double se_theta = 0.0, se_omega = 0.0, se_epsilon = 0.0;
    long estimator_failures = 0;
    Eigen::Vector3d jcrb_diag;
    Eigen::Vector3d wbcrb_diag;
};

// Single node, no estimator<->decoder iterations: the semi-data-aided MSE
// study. Truth triples are drawn from the priors per burst.
MseOutcome run_mse_point(const SimSystem& sys, EstimatorKind kind, double snr_db, long n_bursts,
                         bool fine_tune_override, bool have_override = false);

std::vector<ResultRow> run_mse(const SimSystem& sys, const std::vector<double>& snr_db_list);

struct BerOutcome {
    double snr_db = 0.0;
    long frames = 0;
    long info_bits = 0;
    long bit_errors = 0;
    long genie_bit_errors = 0;
    double ber = 0.0, genie_ber = 0.0;
    double se = 0.0, genie_se = 0.0;  // std error of the per-frame BER mean
    // Accumulated info-bit errors after each global iteration (size G).
    std::vector<long> per_iter_errors;
    std::vector<double> per_iter_se;
    long dropped_nodes = 0;
};

BerOutcome run_ber_point(const SimSystem& sys, EstimatorKind kind, int n_nodes, double snr_db,
                         long n_frames, int n_global_iters, bool with_genie);

std::vector<ResultRow> run_ber(const SimSystem& sys, const std::vector<double>& snr_db_list);

struct ConvergenceTrace {
    // Row k: mean |estimate_k - truth| over bursts, for theta (wrapped), omega, epsilon.
    Eigen::MatrixXd ft_on;   // L x 3
    Eigen::MatrixXd ft_off;  // L x 3
    long n_bursts = 0;
    ChannelParams truth;
    double snr_db = 0.0;
};

ConvergenceTrace run_convergence(const SimSystem& sys, const ChannelParams& truth, double snr_db,
                                 long n_bursts);
void emit_convergence_csv(const ConvergenceTrace& trace, const SimSystem& sys,
                          const std::string& path);

struct CrossingResult {
    bool ok = false;
    double snr_at_target = 0.0;
    std::string note;
    std::vector<BerOutcome> evaluated;  // every lattice point measured, in eval order
};

// Walks a 0.5 dB (configurable) SNR lattice with pilot-sized runs to bracket
// the target BER, re-measures the bracketing points with heavy runs, and
// log-interpolates the crossing.
CrossingResult find_ber_crossing(const SimSystem& sys, EstimatorKind kind, int n_nodes,
                                 double target_ber, long pilot_frames, long heavy_frames,
                                 double snr_lo, double snr_hi, double step);

std::vector<ResultRow> run_bounds(const SimSystem& sys, const std::vector<double>& snr_db_list,
                                  long frame_len, double h);

// Sweeps (particle count, global iterations, node count) at a fixed SNR.
std::vector<ResultRow> run_sweep_particles(const SimSystem& sys, const std::vector<long>& counts,
                                           double snr_db);
std::vector<ResultRow> run_sweep_iters(const SimSystem& sys, const std::vector<long>& iters,
                                       double snr_db);
std::vector<ResultRow> run_nodes_comparison(const SimSystem& sys,
                                            const std::vector<double>& snr_db_list);

// Deterministic helpers shared by the runners and the acceptance suite.
double pairwise_sum(const std::vector<double>& xs);
double wrapped_sq_error(double est, double truth);

}  // namespace fusionrx
