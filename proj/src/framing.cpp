#include "fusionrx/framing.hpp"

#include <stdexcept>

#include "fusionrx/rng.hpp"

namespace fusionrx {

Eigen::VectorXcd modulate_bpsk(const std::vector<std::uint8_t>& bits) {
    Eigen::VectorXcd x(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = bits[i] ? cplx(-1.0, 0.0) : cplx(1.0, 0.0);
    return x;
}

std::vector<std::uint8_t> generate_preamble(std::uint64_t seed, int n) {
    RngStream rng(splitmix64(seed ^ 0x70726561ULL));
    std::vector<std::uint8_t> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>(rng.bits() & 1ULL);
    return bits;
}

Frame build_frame(const std::vector<std::uint8_t>& preamble_bits,
                  const std::vector<std::uint8_t>& data_bits, const FrameConfig& cfg) {
    if (static_cast<int>(preamble_bits.size()) != cfg.n_preamble ||
        static_cast<int>(data_bits.size()) != cfg.n_data)
        throw std::invalid_argument("build_frame: bit lengths disagree with frame config");

    Frame f;
    f.symbols.resize(cfg.length());
    f.preamble_mask.assign(cfg.length(), 0);
    f.symbols.head(cfg.n_preamble) = modulate_bpsk(preamble_bits);
    f.symbols.tail(cfg.n_data) = modulate_bpsk(data_bits);
    for (int k = 0; k < cfg.n_preamble; ++k) f.preamble_mask[k] = 1;
    return f;
}

}  // namespace fusionrx
