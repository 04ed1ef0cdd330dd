#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fusionrx {

class CodecError : public std::runtime_error {
  public:
    explicit CodecError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sparse GF(2) parity-check matrix, 0-based adjacency lists both ways.
struct ParityCheckMatrix {
    int n_cols = 0;  // coded bits N_c
    int n_rows = 0;  // checks
    std::vector<std::vector<int>> rows;  // per check: column indices
    std::vector<std::vector<int>> cols;  // per column: check indices

    int n_edges() const;
    // Syndrome of a hard-bit vector; true when H*c^T = 0 over GF(2).
    bool syndrome_ok(const std::vector<std::uint8_t>& bits) const;
};

// MacKay alist layout: dims, max degrees, per-column then per-row 1-based
// index lists. Malformed input raises CodecError with the offending line.
ParityCheckMatrix load_alist(const std::string& path);
void save_alist(const ParityCheckMatrix& h, const std::string& path);

// Progressive-edge-growth construction of a regular code (col_degree per
// column, n_edges/n_rows per row). Deterministic for a fixed seed.
ParityCheckMatrix peg_construct(int n_rows, int n_cols, int col_degree,
                                std::uint64_t seed);

// Systematic encoder derived from H by one-time Gaussian elimination over
// GF(2) with a recorded column permutation. Throws CodecError (reporting the
// effective K) when H is rank deficient.
class LdpcEncoder {
  public:
    explicit LdpcEncoder(const ParityCheckMatrix& h);

    int n() const { return n_cols_; }
    int k() const { return k_; }

    std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& info) const;
    // Recover the K information bits from a codeword via the recorded permutation.
    std::vector<std::uint8_t> extract_info(const std::vector<std::uint8_t>& codeword) const;

  private:
    int n_cols_ = 0;
    int k_ = 0;
    std::vector<int> info_cols_;    // codeword positions of the K info bits
    std::vector<int> parity_cols_;  // codeword position of parity bit r
    // Row r of the reduced system restricted to info columns, packed in words.
    std::vector<std::uint64_t> parity_rows_;
    int words_per_row_ = 0;
};

struct BitBeliefs {
    std::vector<double> posterior;  // intrinsic + extrinsic LLRs, positive favors bit 0
    std::vector<double> extrinsic;  // posterior minus channel input
    int iterations = 0;
    bool syndrome_satisfied = false;

    std::vector<std::uint8_t> hard_bits() const;
};

inline constexpr double kLlrClip = 38.0;
inline constexpr int kDefaultDecoderIters = 50;

// Flooding-schedule sum-product decoding with the exact tanh/atanh check
// update. Early exit as soon as the running hard decision satisfies all
// checks; non-convergence is reported through the flag, never as an error.
BitBeliefs decode(const std::vector<double>& channel_llrs, const ParityCheckMatrix& h,
                  int max_iters = kDefaultDecoderIters);

}  // namespace fusionrx
