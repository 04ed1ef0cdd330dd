#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fusionrx/math.hpp"

namespace fusionrx {

struct FrameConfig {
    int n_preamble = 30;
    int n_data = 504;
    int alphabet_size = 2;  // BPSK; kept so larger alphabets remain a clean extension

    int length() const { return n_preamble + n_data; }
};

struct Frame {
    Eigen::VectorXcd symbols;            // unit-energy entries, length L
    std::vector<std::uint8_t> preamble_mask;  // true at known positions

    int length() const { return static_cast<int>(symbols.size()); }
};

// bit 0 -> +1, bit 1 -> -1 (documented convention throughout).
Eigen::VectorXcd modulate_bpsk(const std::vector<std::uint8_t>& bits);

// Deterministic pseudo-random preamble pattern for a given seed.
std::vector<std::uint8_t> generate_preamble(std::uint64_t seed, int n);

Frame build_frame(const std::vector<std::uint8_t>& preamble_bits,
                  const std::vector<std::uint8_t>& data_bits, const FrameConfig& cfg);

}  // namespace fusionrx
