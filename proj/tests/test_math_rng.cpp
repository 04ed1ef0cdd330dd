#include <doctest.h>

#include "fusionrx/math.hpp"
#include "fusionrx/rng.hpp"

using namespace fusionrx;

TEST_CASE("wrap_pi maps into (-pi, pi] with the boundary at +pi") {
    CHECK(wrap_pi(0.0) == doctest::Approx(0.0));
    CHECK(wrap_pi(kPi) == doctest::Approx(kPi));
    CHECK(wrap_pi(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_pi(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_pi(2.0 * kPi) == doctest::Approx(0.0));
    CHECK(wrap_pi(3.01) == doctest::Approx(3.01));
    CHECK(wrap_pi(kPi + 0.1) == doctest::Approx(-kPi + 0.1));
    for (double x = -50.0; x < 50.0; x += 0.7) {
        const double w = wrap_pi(x);
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        CHECK(std::abs(std::remainder(w - x, kTwoPi)) < 1e-12);
    }
}

TEST_CASE("power sums match brute force") {
    for (long L : {1L, 2L, 3L, 10L, 534L}) {
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
        for (long k = 0; k < L; ++k) {
            const double kk = static_cast<double>(k);
            s1 += kk;
            s2 += kk * kk;
            s3 += kk * kk * kk;
            s4 += kk * kk * kk * kk;
        }
        const PowerSums s = power_sums(L);
        CHECK(s.s0 == doctest::Approx(L));
        CHECK(s.s1 == doctest::Approx(s1));
        CHECK(s.s2 == doctest::Approx(s2));
        CHECK(s.s3 == doctest::Approx(s3));
        CHECK(s.s4 == doctest::Approx(s4));
    }
}

TEST_CASE("substreams are reproducible and role-separated") {
    RngStream a = RngStream::substream(42, 7, 1, RngRole::noise);
    RngStream b = RngStream::substream(42, 7, 1, RngRole::noise);
    RngStream c = RngStream::substream(42, 7, 1, RngRole::estimator);
    CHECK(a.bits() == b.bits());
    RngStream a2 = RngStream::substream(42, 7, 1, RngRole::noise);
    CHECK(a2.bits() != c.bits());
}

TEST_CASE("uniform_pm of zero half-width is exactly zero") {
    RngStream r(1);
    CHECK(r.uniform_pm(0.0) == 0.0);
}

TEST_CASE("von Mises sampler: concentration and mean behave") {
    RngStream r(123);
    SUBCASE("kappa = 0 gives a near-zero resultant") {
        double c = 0, s = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double x = r.von_mises(1.0, 0.0);
            c += std::cos(x);
            s += std::sin(x);
        }
        CHECK(std::hypot(c, s) / n < 0.02);
    }
    SUBCASE("kappa = 2: sample resultant approaches I1(2)/I0(2)") {
        double c = 0, s = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double x = r.von_mises(0.7, 2.0);
            c += std::cos(x - 0.7);
            s += std::sin(x - 0.7);
        }
        // A(2) = I1(2)/I0(2) = 0.69777...
        CHECK(c / n == doctest::Approx(0.69777).epsilon(0.01));
        CHECK(std::abs(s / n) < 0.01);
    }
    SUBCASE("huge kappa concentrates at mu") {
        for (int i = 0; i < 1000; ++i)
            CHECK(std::abs(wrap_pi(r.von_mises(-2.0, 1e4) + 2.0)) < 0.1);
    }
}

TEST_CASE("beta sampler moments") {
    RngStream r(9);
    const double a = 2.0, b = 5.0;
    double m1 = 0, m2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.beta(a, b);
        m1 += x;
        m2 += x * x;
    }
    m1 /= n;
    m2 = m2 / n - m1 * m1;
    CHECK(m1 == doctest::Approx(a / (a + b)).epsilon(0.01));
    CHECK(m2 == doctest::Approx(a * b / ((a + b) * (a + b) * (a + b + 1))).epsilon(0.03));
}
