#include "fusionrx/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fusionrx/ldpc.hpp"

namespace fusionrx {

double SymbolPmf::entropy() const {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double symbol_likelihood(cplx y, cplx x, double phi, double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("symbol_likelihood: sigma2 must be > 0");
    const cplx rot(std::cos(phi), std::sin(phi));
    return std::exp(-std::norm(y - x * rot) / sigma2);
}

SymbolPmf pmf_from_phase(cplx y, double phi, double sigma2, const SymbolPmf& incoming) {
    // For BPSK the exponents differ only through 2 Re(y e^{-j phi}) x / sigma2;
    // shifting by the max keeps both exponentials in range at any SNR.
    const double c = 2.0 * (y.real() * std::cos(phi) + y.imag() * std::sin(phi)) / sigma2;
    const double m = std::abs(c);
    SymbolPmf out;
    out.p[0] = incoming.p[0] * std::exp(c - m);
    out.p[1] = incoming.p[1] * std::exp(-c - m);
    const double s = out.p[0] + out.p[1];
    if (s <= 0.0) return SymbolPmf::uniform();
    out.p[0] /= s;
    out.p[1] /= s;
    return out;
}

SymbolPmf combine_nodes(const std::vector<SymbolPmf>& upward, bool* degenerate) {
    if (upward.empty()) throw std::invalid_argument("combine_nodes: need at least one node");
    double a = 1.0, b = 1.0;
    for (const auto& m : upward) {
        a *= m.p[0];
        b *= m.p[1];
    }
    if (degenerate) *degenerate = false;
    const double s = a + b;
    if (s <= 0.0 || !std::isfinite(s)) {
        if (degenerate) *degenerate = true;
        return SymbolPmf::uniform();
    }
    SymbolPmf out;
    out.p[0] = a / s;
    out.p[1] = b / s;
    return out;
}

double pmf_to_llr(const SymbolPmf& m) {
    if (m.p[0] <= 0.0) return -kLlrClip;
    if (m.p[1] <= 0.0) return kLlrClip;
    return std::clamp(std::log(m.p[0] / m.p[1]), -kLlrClip, kLlrClip);
}

SymbolPmf llr_to_pmf(double llr) {
    const double l = std::clamp(llr, -kLlrClip, kLlrClip);
    SymbolPmf m;
    m.p[0] = 1.0 / (1.0 + std::exp(-l));
    m.p[1] = 1.0 - m.p[0];
    return m;
}

}  // namespace fusionrx
