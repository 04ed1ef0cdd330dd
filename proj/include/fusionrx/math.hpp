#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace fusionrx {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap an angle to (-pi, pi]. Both +pi and -pi inputs map to +pi.
inline double wrap_pi(double x) {
    double y = std::remainder(x, kTwoPi);
    if (y <= -kPi) y += kTwoPi;
    return y;
}

// Smallest absolute difference between two angles, as a signed value in (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_pi(a - b); }

inline double sq(double x) { return x * x; }

// Power sums S_p = sum_{k=0}^{L-1} k^p via Faulhaber's formulas.
// Exact in double for L up to a few thousand (values stay below 2^53).
struct PowerSums {
    double s0, s1, s2, s3, s4;
};

inline PowerSums power_sums(long L) {
    const double n = static_cast<double>(L - 1);  // sums over 0..n
    PowerSums s;
    s.s0 = static_cast<double>(L);
    s.s1 = n * (n + 1.0) / 2.0;
    s.s2 = n * (n + 1.0) * (2.0 * n + 1.0) / 6.0;
    s.s3 = s.s1 * s.s1;
    s.s4 = n * (n + 1.0) * (2.0 * n + 1.0) * (3.0 * n * n + 3.0 * n - 1.0) / 30.0;
    return s;
}

}  // namespace fusionrx
