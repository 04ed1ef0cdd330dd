#pragma once

#include <functional>
#include <vector>

#include "fusionrx/channel.hpp"
#include "fusionrx/framing.hpp"
#include "fusionrx/ldpc.hpp"
#include "fusionrx/pmf.hpp"

namespace fusionrx {

enum class FeedbackMode { extrinsic, posterior };

struct GlobalLoopConfig {
    int n_global_iters = 1;
    FeedbackMode feedback = FeedbackMode::extrinsic;
    int decoder_iters = kDefaultDecoderIters;
};

// Per-node estimator: consumes the observation and the current downward
// symbol messages (one per position, point masses on the preamble), returns
// upward PMFs for the data positions k = N_p..L-1. Throwing marks the node
// as dropped out for the iteration (it then contributes uniform PMFs).
using NodeEstimator =
    std::function<std::vector<SymbolPmf>(const NodeObservation&, const std::vector<SymbolPmf>&)>;

// Symbol messages flowing between the per-node estimators and the decoder.
struct MessageBoard {
    std::vector<std::vector<SymbolPmf>> upward;    // [node][position]
    std::vector<std::vector<SymbolPmf>> downward;  // [node][position]
    std::vector<SymbolPmf> combined;               // product over nodes, data positions meaningful
    std::vector<double> extrinsic_llrs;            // decoder extrinsic, coded-bit order
};

struct IterationDiag {
    int info_bit_errors = -1;  // -1 when true bits were not supplied
    bool syndrome_satisfied = false;
    int decoder_iterations = 0;
    int nodes_dropped = 0;
};

struct LoopResult {
    std::vector<std::uint8_t> info_bits;   // hard decisions of the final iteration
    std::vector<std::uint8_t> coded_bits;
    std::vector<IterationDiag> per_iter;
    bool preamble_mismatch = false;
};

// The estimation <-> decoding outer loop over one frame: per-node upward
// messages, product combination across nodes, demap, LDPC decode, and
// per-node downward feedback for the next pass. Preamble positions always
// carry the known-symbol point masses.
LoopResult run_global_loop(const std::vector<NodeObservation>& observations, const Frame& frame,
                           int n_preamble, const ParityCheckMatrix& h, const LdpcEncoder& encoder,
                           const NodeEstimator& estimator, const GlobalLoopConfig& cfg,
                           const std::vector<std::uint8_t>* true_info = nullptr);

// Downward point masses for the known preamble plus the given data messages.
std::vector<SymbolPmf> initial_downward(const Frame& frame, int n_preamble);

}  // namespace fusionrx
