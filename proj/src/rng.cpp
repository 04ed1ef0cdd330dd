#include "fusionrx/rng.hpp"

#include <cmath>

#include "fusionrx/math.hpp"

namespace fusionrx {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream RngStream::substream(std::uint64_t master, std::uint64_t burst,
                               std::uint64_t node, RngRole role) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ (burst * 0xd1342543de82ef95ULL));
    s = splitmix64(s ^ (node * 0xaf251af3b0f025b5ULL));
    s = splitmix64(s ^ static_cast<std::uint64_t>(role));
    return RngStream(s);
}

double RngStream::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
}

double RngStream::uniform_pm(double half_width) {
    if (half_width == 0.0) return 0.0;
    return uniform(-half_width, half_width);
}

double RngStream::normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(gen_);
}

double RngStream::gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(gen_);
}

double RngStream::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    const double s = x + y;
    if (s <= 0.0) return 0.5;  // both gammas underflowed; a,b pathologically small
    return x / s;
}

double RngStream::von_mises(double mu, double kappa) {
    if (kappa <= 1e-9) return wrap_pi(uniform(-kPi, kPi) + mu);

    // Best & Fisher (1979) wrapped-Cauchy envelope rejection.
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);

    double f = 0.0;
    for (;;) {
        const double u1 = uniform(0.0, 1.0);
        const double u2 = uniform(0.0, 1.0);
        const double z = std::cos(kPi * u1);
        f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        if (c * (2.0 - c) - u2 > 0.0) break;
        if (std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    const double u3 = uniform(0.0, 1.0);
    const double angle = (u3 > 0.5 ? 1.0 : -1.0) * std::acos(f);
    return wrap_pi(angle + mu);
}

}  // namespace fusionrx
