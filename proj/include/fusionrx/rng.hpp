#pragma once

#include <cstdint>
#include <random>

namespace fusionrx {

// Role tags for derived RNG substreams. Each (seed, burst, node, role) tuple
// yields its own generator, so Monte Carlo trials are reproducible regardless
// of scheduling order or worker-thread count.
enum class RngRole : std::uint64_t {
    channel_params = 1,
    noise = 2,
    data_bits = 3,
    estimator = 4,
    preamble = 5,
    misc = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    // Substream derivation: hash-mixes the key fields into one 64-bit seed.
    static RngStream substream(std::uint64_t master, std::uint64_t burst,
                               std::uint64_t node, RngRole role);

    std::mt19937_64& gen() { return gen_; }

    double uniform(double lo, double hi);
    // Uniform on (-half_width, half_width); returns exactly 0 when half_width == 0.
    double uniform_pm(double half_width);
    double normal(double mean, double stddev);
    double gamma(double shape);
    // Beta(a, b) via the two-gamma ratio.
    double beta(double a, double b);
    // Von Mises with mean mu and concentration kappa (Best-Fisher rejection
    // sampler; kappa == 0 degenerates to the circular uniform).
    double von_mises(double mu, double kappa);
    std::uint64_t bits() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace fusionrx
