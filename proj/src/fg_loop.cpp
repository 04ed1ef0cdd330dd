#include "fusionrx/fg_loop.hpp"

#include <stdexcept>

namespace fusionrx {

std::vector<SymbolPmf> initial_downward(const Frame& frame, int n_preamble) {
    const int L = frame.length();
    std::vector<SymbolPmf> down(L, SymbolPmf::uniform());
    for (int k = 0; k < n_preamble; ++k)
        down[k] = SymbolPmf::point_mass(frame.symbols[k].real() > 0.0 ? 0 : 1);
    return down;
}

LoopResult run_global_loop(const std::vector<NodeObservation>& observations, const Frame& frame,
                           int n_preamble, const ParityCheckMatrix& h, const LdpcEncoder& encoder,
                           const NodeEstimator& estimator, const GlobalLoopConfig& cfg,
                           const std::vector<std::uint8_t>* true_info) {
    const int n_nodes = static_cast<int>(observations.size());
    if (n_nodes < 1) throw std::invalid_argument("run_global_loop: need at least one node");
    if (cfg.n_global_iters < 1) throw std::invalid_argument("run_global_loop: G must be >= 1");
    const int L = frame.length();
    const int n_data = L - n_preamble;
    if (h.n_cols != n_data)
        throw std::invalid_argument("run_global_loop: code length disagrees with data positions");

    LoopResult result;
    MessageBoard board;
    board.upward.assign(n_nodes, std::vector<SymbolPmf>(n_data, SymbolPmf::uniform()));
    board.downward.assign(n_nodes, initial_downward(frame, n_preamble));
    board.combined.assign(n_data, SymbolPmf::uniform());

    std::vector<double> llrs(n_data);
    std::vector<SymbolPmf> stack(n_nodes);

    for (int iter = 0; iter < cfg.n_global_iters; ++iter) {
        IterationDiag diag;

        for (int n = 0; n < n_nodes; ++n) {
            try {
                board.upward[n] = estimator(observations[n], board.downward[n]);
                if (static_cast<int>(board.upward[n].size()) != n_data)
                    throw std::runtime_error("estimator returned wrong message count");
            } catch (const std::exception&) {
                board.upward[n].assign(n_data, SymbolPmf::uniform());
                ++diag.nodes_dropped;
            }
        }

        for (int j = 0; j < n_data; ++j) {
            for (int n = 0; n < n_nodes; ++n) stack[n] = board.upward[n][j];
            board.combined[j] = combine_nodes(stack);
            llrs[j] = pmf_to_llr(board.combined[j]);
        }

        const BitBeliefs beliefs = decode(llrs, h, cfg.decoder_iters);
        diag.syndrome_satisfied = beliefs.syndrome_satisfied;
        diag.decoder_iterations = beliefs.iterations;

        result.coded_bits = beliefs.hard_bits();
        result.info_bits = encoder.extract_info(result.coded_bits);
        if (true_info) {
            int errs = 0;
            for (std::size_t i = 0; i < true_info->size(); ++i)
                errs += (*true_info)[i] != result.info_bits[i];
            diag.info_bit_errors = errs;
        }
        result.per_iter.push_back(diag);

        board.extrinsic_llrs = beliefs.extrinsic;
        if (iter + 1 == cfg.n_global_iters) break;

        // Downward feedback for the next pass. Extrinsic mode excludes the
        // receiving node's own upward contribution; posterior mode sends the
        // decoder posterior to every node. Preamble point masses are fixed.
        for (int n = 0; n < n_nodes; ++n) {
            for (int j = 0; j < n_data; ++j) {
                SymbolPmf msg;
                if (cfg.feedback == FeedbackMode::posterior) {
                    msg = llr_to_pmf(beliefs.posterior[j]);
                } else {
                    std::vector<SymbolPmf> parts;
                    parts.reserve(n_nodes);
                    parts.push_back(llr_to_pmf(beliefs.extrinsic[j]));
                    for (int m = 0; m < n_nodes; ++m)
                        if (m != n) parts.push_back(board.upward[m][j]);
                    msg = combine_nodes(parts);
                }
                board.downward[n][n_preamble + j] = msg;
            }
        }
    }
    return result;
}

}  // namespace fusionrx
