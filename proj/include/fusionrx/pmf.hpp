#pragma once

#include <vector>

#include "fusionrx/math.hpp"

namespace fusionrx {

// Probability mass over the BPSK alphabet; index 0 is +1 (bit 0), index 1 is
// -1 (bit 1). The currency of all symbol-level messages.
struct SymbolPmf {
    double p[2] = {0.5, 0.5};

    double& operator[](int i) { return p[i]; }
    double operator[](int i) const { return p[i]; }

    static SymbolPmf uniform() { return {}; }
    static SymbolPmf point_mass(int symbol_index) {
        SymbolPmf m;
        m.p[symbol_index] = 1.0;
        m.p[1 - symbol_index] = 0.0;
        return m;
    }
    bool normalized(double tol = 1e-12) const {
        return p[0] >= 0.0 && p[1] >= 0.0 && std::abs(p[0] + p[1] - 1.0) <= tol;
    }
    double entropy() const;
};

// Unnormalized likelihood p(y | x, phi) ~ exp(-|y - x e^{j phi}|^2 / sigma2).
double symbol_likelihood(cplx y, cplx x, double phi, double sigma2);

// Likelihood PMF over the alphabet for one observation given a phase value.
// The incoming prior weights each symbol (point mass on preamble positions).
SymbolPmf pmf_from_phase(cplx y, double phi, double sigma2, const SymbolPmf& incoming);

// Elementwise product of per-node messages, normalized. An all-zero product
// is replaced by the uniform PMF and reported through the flag.
SymbolPmf combine_nodes(const std::vector<SymbolPmf>& upward, bool* degenerate = nullptr);

// llr = ln p(bit0)/p(bit1), clipped to +/-38; inverse via the logistic map.
double pmf_to_llr(const SymbolPmf& m);
SymbolPmf llr_to_pmf(double llr);

}  // namespace fusionrx
