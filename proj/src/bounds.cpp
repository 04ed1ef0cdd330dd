#include "fusionrx/bounds.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "fusionrx/channel.hpp"
#include "fusionrx/math.hpp"

namespace fusionrx {

namespace {

double beta_fn(double x, double y) {
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

// Composite Simpson on u in (0,1) with the u = sin^2(t) substitution, which
// removes the endpoint singularities of the q-weighted integrands.
template <typename F>
double integrate01(F f, int panels = 4096) {
    const double h = (kPi / 2.0) / panels;
    auto g = [&](double t) {
        const double st = std::sin(t), ct = std::cos(t);
        const double u = st * st;
        return f(u) * 2.0 * st * ct;
    };
    double acc = g(0.0) + g(kPi / 2.0);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(i * h);
    return acc * h / 3.0;
}

// The scale-free moments of the weighting family, defined on u in (0,1) with
// q0(u) = u^h (1-u)^h: E[q], E[q^2], and E[(q')^2] under the uniform prior.
struct WeightMoments {
    double mean_q;    // B(h+1, h+1)
    double mean_q2;   // lambda_1
    double mean_dq2;  // h B(2h+1, 2h-1)
};

WeightMoments quadrature_moments(double h) {
    WeightMoments m;
    m.mean_q = integrate01([&](double u) { return std::pow(u, h) * std::pow(1.0 - u, h); });
    m.mean_q2 =
        integrate01([&](double u) { return std::pow(u, 2.0 * h) * std::pow(1.0 - u, 2.0 * h); });
    // dq0/du = h u^{h-1}(1-u)^h - h u^h (1-u)^{h-1}. Under psi = psi_m(2u-1)
    // the (1/(2 psi_m))^2 chain-rule factor is exactly the P3 entry, so the
    // u-domain moment compares directly against the closed-form Jp scale.
    m.mean_dq2 = integrate01([&](double u) {
        const double d = h * std::pow(u, h - 1.0) * std::pow(1.0 - u, h) -
                         h * std::pow(u, h) * std::pow(1.0 - u, h - 1.0);
        return d * d;
    });
    return m;
}

struct WbcrbConstants {
    double e_q;       // E[q(psi)] (same for each parameter)
    double lambda1;   // E[q^2]
    double lambda2;   // E[q]^2
    double jp_scale;  // h B(2h+1, 2h-1)
};

WbcrbConstants wbcrb_constants(double h) {
    WbcrbConstants c;
    c.e_q = std::pow(2.0, -1.0 - 2.0 * h) * beta_fn(0.5, 1.0 + h);
    c.lambda1 = h * std::pow(2.0, -4.0 * h) / (0.5 + 2.0 * h) * beta_fn(0.5, 2.0 * h);
    c.lambda2 = std::pow(4.0, -1.0 - 2.0 * h) * sq(beta_fn(0.5, 1.0 + h));
    c.jp_scale = h * beta_fn(2.0 * h + 1.0, 2.0 * h - 1.0);
    return c;
}

// One-time cross-check of the closed-form constants against numeric
// quadrature of the defining expectations (guards transcription drift).
void validate_constants(double h) {
    static std::mutex mu;
    static std::vector<double> checked;
    std::lock_guard<std::mutex> lock(mu);
    for (double v : checked)
        if (v == h) return;

    const WbcrbConstants c = wbcrb_constants(h);
    const WeightMoments m = quadrature_moments(h);
    const double tol = 1e-8;
    if (std::abs(m.mean_q - c.e_q) > tol * std::max(1.0, std::abs(c.e_q)) ||
        std::abs(m.mean_q2 - c.lambda1) > tol * std::max(1.0, std::abs(c.lambda1)) ||
        std::abs(m.mean_dq2 - c.jp_scale) > tol * std::max(1.0, std::abs(c.jp_scale)))
        throw std::runtime_error("wbcrb: closed-form constants disagree with quadrature");
    checked.push_back(h);
}

}  // namespace

Eigen::Matrix3d fim(const FimSpec& spec) {
    if (spec.frame_len < 3) throw std::invalid_argument("fim: frame_len must be >= 3");
    if (spec.sigma2 <= 0.0) throw std::invalid_argument("fim: sigma2 must be > 0");
    const PowerSums s = power_sums(spec.frame_len);
    const double f = 2.0 / spec.sigma2;
    Eigen::Matrix3d j;
    j << s.s0, s.s1, s.s2,
         s.s1, s.s2, s.s3,
         s.s2, s.s3, s.s4;
    return f * j;
}

Eigen::Matrix3d jcrb(const FimSpec& spec) {
    if (spec.frame_len < 3) throw std::invalid_argument("jcrb: frame_len must be >= 3");
    const double L = static_cast<double>(spec.frame_len);
    const double c = spec.sigma2 / 2.0;
    const double d3 = L * L * L + 3.0 * L * L + 2.0 * L;        // L(L+1)(L+2)
    const double d5 = std::pow(L, 5) - 5.0 * L * L * L + 4.0 * L;  // L(L^2-1)(L^2-4)
    Eigen::Matrix3d m;
    m(0, 0) = (9.0 * (L - 1.0) * L + 6.0) / d3;
    m(0, 1) = (18.0 - 36.0 * L) / d3;
    m(0, 2) = 30.0 / d3;
    m(1, 1) = 12.0 * (2.0 * L - 1.0) * (8.0 * L - 11.0) / d5;
    m(1, 2) = -180.0 / (L * (L * L * L + L * L - 4.0 * L - 4.0));
    m(2, 2) = 180.0 / d5;
    m(1, 0) = m(0, 1);
    m(2, 0) = m(0, 2);
    m(2, 1) = m(1, 2);
    return c * m;
}

Eigen::Matrix3d invert3(const Eigen::Matrix3d& a, bool* ill_conditioned) {
    Eigen::Matrix3d adj;
    adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double det = a(0, 0) * adj(0, 0) + a(0, 1) * adj(1, 0) + a(0, 2) * adj(2, 0);
    if (det == 0.0) throw std::runtime_error("invert3: singular matrix");
    Eigen::Matrix3d inv = adj / det;
    if (ill_conditioned) {
        const double cond = a.norm() * inv.norm();
        *ill_conditioned = !(cond < 1e12);
    }
    return inv;
}

Eigen::Matrix3d wbcrb(const WbcrbSpec& spec) {
    if (spec.h <= 0.5)
        throw std::invalid_argument("wbcrb: weighting index h must exceed 1/2 (B(2h+1, 2h-1) undefined)");
    if (spec.omega_max <= 0.0 || spec.epsilon_max <= 0.0)
        throw std::invalid_argument("wbcrb: prior half-widths must be positive");
    validate_constants(spec.h);
    const WbcrbConstants c = wbcrb_constants(spec.h);

    const PowerSums s = power_sums(spec.fim.frame_len);
    const double f = 2.0 / spec.fim.sigma2;
    Eigen::Matrix3d e_jd;
    e_jd << c.lambda1 * s.s0, c.lambda2 * s.s1, c.lambda2 * s.s2,
            c.lambda2 * s.s1, c.lambda1 * s.s2, c.lambda2 * s.s3,
            c.lambda2 * s.s2, c.lambda2 * s.s3, c.lambda1 * s.s4;
    e_jd *= f;

    Eigen::Vector3d p3(sq(1.0 / (2.0 * kPi)), sq(1.0 / (2.0 * spec.omega_max)),
                       sq(1.0 / (2.0 * spec.epsilon_max)));
    const Eigen::Matrix3d e_jp = c.jp_scale * p3.asDiagonal();

    const Eigen::Matrix3d inner = invert3(e_jd + e_jp);
    return (c.e_q * c.e_q) * inner;
}

std::vector<CrbReport> bounds_sweep(const std::vector<double>& snr_db_list, long frame_len,
                                    double omega_max, double epsilon_max, double h) {
    std::vector<CrbReport> out;
    out.reserve(snr_db_list.size());
    for (double snr : snr_db_list) {
        WbcrbSpec spec;
        spec.fim.frame_len = frame_len;
        spec.fim.sigma2 = snr_db_to_sigma2(snr);
        spec.omega_max = omega_max;
        spec.epsilon_max = epsilon_max;
        spec.h = h;
        CrbReport r;
        r.snr_db = snr;
        r.jcrb = jcrb(spec.fim);
        r.wbcrb = wbcrb(spec);
        out.push_back(r);
    }
    return out;
}

}  // namespace fusionrx
