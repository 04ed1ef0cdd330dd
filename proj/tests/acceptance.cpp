// Acceptance gate: one check per release criterion, one PASS/FAIL line each.
// Run everything with no arguments or a single criterion via --criterion N.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fusionrx/fg_loop.hpp"
#include "fusionrx/harness.hpp"

using namespace fusionrx;

namespace {

int g_failures = 0;

void report(int crit, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", crit, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Config base_config() {
    Config cfg = Config::defaults();
    cfg.set("ldpc.alist_path", alist_path());
    return cfg;
}

// Resolve the fixture relative to common invocation directories.
std::string alist_path() {
    for (const char* p : {"data/peg_252x504.alist", "../data/peg_252x504.alist",
                          "../../data/peg_252x504.alist"})
        if (std::filesystem::exists(p)) return p;
    return "data/peg_252x504.alist";  // falls back to in-memory synthesis
}

// --------------------------------------------------------------------------

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (long L : {3L, 10L, 100L, 534L}) {
        const FimSpec spec{L, 0.631};
        const Eigen::Matrix3d closed = jcrb(spec);
        const Eigen::Matrix3d numeric = invert3(fim(spec));
        worst = std::max(worst, (closed - numeric).norm() / numeric.norm());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, worst < 1e-9 && secs < 1.0,
           fmt("closed-form JCRB vs numeric FIM inverse, worst rel err %.3e (limit 1e-9), "
               "%.3f s", worst, secs));
}

void criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    WbcrbSpec spec;
    spec.fim.frame_len = 534;
    spec.fim.sigma2 = snr_db_to_sigma2(-60.0);
    spec.omega_max = 0.01;
    spec.epsilon_max = 1e-5;
    spec.h = 1.0;
    const Eigen::Vector3d d = wbcrb(spec).diagonal();
    const Eigen::Vector3d want(3.2899, 3.333e-5, 3.333e-11);
    bool ok = true;
    for (int i = 0; i < 3; ++i) ok = ok && std::abs(d[i] - want[i]) / want[i] < 0.01;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(2, ok && secs < 1.0,
           fmt("WBCRB floors at -60 dB = (%.5g, %.4g, %.4g), target (3.2899, 3.333e-5, "
               "3.333e-11) within 1%%, %.3f s", d[0], d[1], d[2], secs));
}

void criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    WbcrbSpec spec;
    spec.fim.frame_len = 534;
    spec.fim.sigma2 = snr_db_to_sigma2(0.0);
    spec.omega_max = 0.01;
    spec.epsilon_max = 1e-5;
    spec.h = 1.0;
    const Eigen::Vector3d w = wbcrb(spec).diagonal();
    const Eigen::Vector3d j = jcrb(spec.fim).diagonal();
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) worst = std::max(worst, w[i] / j[i]);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(3, worst <= 1.10 && secs < 1.0,
           fmt("WBCRB/JCRB diagonal ratio at 0 dB, worst %.4f (limit 1.10), %.3f s", worst,
               secs));
}

void criterion4() {
    SimSystem sys = make_system(base_config());
    const MseOutcome m = run_mse_point(sys, EstimatorKind::rw, 4.0, 200, false, false);
    const bool ok = m.mse_theta <= 3.0 * m.jcrb_diag[0] &&
                    m.mse_omega <= 3.0 * m.jcrb_diag[1] &&
                    m.mse_epsilon <= 3.0 * m.jcrb_diag[2] && m.estimator_failures == 0;
    report(4, ok,
           fmt("RW MSE at 4 dB over %ld bursts: theta %.3e (3x JCRB %.3e), omega %.3e (%.3e), "
               "epsilon %.3e (%.3e)",
               m.n_bursts, m.mse_theta, 3.0 * m.jcrb_diag[0], m.mse_omega,
               3.0 * m.jcrb_diag[1], m.mse_epsilon, 3.0 * m.jcrb_diag[2]));
}

void criterion5() {
    SimSystem sys = make_system(base_config());
    const MseOutcome with_ft = run_mse_point(sys, EstimatorKind::pf, 6.0, 200, true, true);
    const MseOutcome no_ft = run_mse_point(sys, EstimatorKind::pf, 6.0, 200, false, true);
    const double ratio = with_ft.mse_epsilon / no_ft.mse_epsilon;
    report(5, ratio <= 0.1,
           fmt("PF fine-tuning at 6 dB: MSE(eps) %.3e with vs %.3e without, ratio %.3f "
               "(limit 0.1)", with_ft.mse_epsilon, no_ft.mse_epsilon, ratio));
}

void criterion6() {
    Config cfg = base_config();
    cfg.set("channel.omega_max", "0.02");  // convergence-study prior
    SimSystem sys = make_system(cfg);
    const ChannelParams truth{2.0, 0.011, -9e-6};
    const ConvergenceTrace tr = run_convergence(sys, truth, 8.0, 50);
    double worst_om = 0.0, worst_ep = 0.0;
    for (int k = 250; k < tr.ft_on.rows(); ++k) {
        worst_om = std::max(worst_om, tr.ft_on(k, 1));
        worst_ep = std::max(worst_ep, tr.ft_on(k, 2));
    }
    report(6, worst_om < 1e-3 && worst_ep < 1e-6,
           fmt("PF convergence (FT on, 50 bursts, 8 dB): max_k>=250 mean|omega err| %.3e "
               "(limit 1e-3), mean|eps err| %.3e (limit 1e-6)", worst_om, worst_ep));
}

void criterion7() {
    SimSystem sys = make_system(base_config());
    const double target = 2e-3;
    const long pilot = 250, heavy = 3200;
    const double lo = -2.0, hi = 8.0, step = 0.5;

    const CrossingResult rw1 = find_ber_crossing(sys, EstimatorKind::rw, 1, target, pilot,
                                                 heavy, lo, hi, step);
    const CrossingResult rw2 = find_ber_crossing(sys, EstimatorKind::rw, 2, target, pilot,
                                                 heavy, lo, hi, step);
    const CrossingResult pf1 = find_ber_crossing(sys, EstimatorKind::pf, 1, target, pilot,
                                                 heavy, lo, hi, step);
    const CrossingResult pf2 = find_ber_crossing(sys, EstimatorKind::pf, 2, target, pilot,
                                                 heavy, lo, hi, step);
    if (!(rw1.ok && rw2.ok && pf1.ok && pf2.ok)) {
        report(7, false,
               fmt("crossing search failed: rw1=%s rw2=%s pf1=%s pf2=%s", rw1.note.c_str(),
                   rw2.note.c_str(), pf1.note.c_str(), pf2.note.c_str()));
        return;
    }
    const double rw_gain = rw1.snr_at_target - rw2.snr_at_target;
    const double pf_gain = pf1.snr_at_target - pf2.snr_at_target;
    const bool ok = rw_gain >= 2.0 && rw_gain <= 3.5 && pf_gain >= 1.7 && pf_gain <= 3.3;
    report(7, ok,
           fmt("two-node SNR gain at BER 2e-3: RW %.2f dB (crossings %.2f -> %.2f, range "
               "[2.0, 3.5]), PF %.2f dB (crossings %.2f -> %.2f, range [1.7, 3.3])",
               rw_gain, rw1.snr_at_target, rw2.snr_at_target, pf_gain, pf1.snr_at_target,
               pf2.snr_at_target));
}

void criterion8() {
    SimSystem sys = make_system(base_config());
    const BerOutcome b = run_ber_point(sys, EstimatorKind::rw, 1, 2.0, 3000, 4, false);
    const double ber1 =
        static_cast<double>(b.per_iter_errors[0]) / static_cast<double>(b.info_bits);
    const double ber4 =
        static_cast<double>(b.per_iter_errors[3]) / static_cast<double>(b.info_bits);
    const double gap = ber1 - ber4;
    const double two_se = 2.0 * std::hypot(b.per_iter_se[0], b.per_iter_se[3]);
    report(8, ber4 <= ber1 && gap > two_se,
           fmt("global iterations at 2 dB over %ld frames: BER(G=1) %.4e vs BER(G=4) %.4e, "
               "gap %.3e > 2 combined SE %.3e", b.frames, ber1, ber4, gap, two_se));
}

// Criterion 9: the compact property suite (details mirrored in the unit tests).
void criterion9() {
    const auto t0 = std::chrono::steady_clock::now();
    std::string fail;

    // PMF normalization through likelihood, combination and the LLR bridge.
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-2, 2);
        for (int t = 0; t < 500 && fail.empty(); ++t) {
            const SymbolPmf a = pmf_from_phase(cplx(u(rng), u(rng)), u(rng), 0.3, SymbolPmf::uniform());
            const SymbolPmf b = llr_to_pmf(u(rng) * 15.0);
            const SymbolPmf c = combine_nodes({a, b});
            if (!a.normalized() || !b.normalized() || !c.normalized())
                fail = "PMF normalization violated";
        }
    }
    // Particle weight normalization and the N_eff identities.
    if (fail.empty()) {
        PriorSpec prior;
        RngStream rng(2);
        ParticleSet ps = pf_init(128, prior, rng);
        if (std::abs(effective_sample_size(ps) - 128.0) > 1e-9) fail = "N_eff(uniform) != N";
        for (int k = 0; k < 40 && fail.empty(); ++k) {
            update_weights(ps, cplx(0.9, 0.1), k, SymbolPmf::uniform(), 0.8);
            if (std::abs(ps.w.sum() - 1.0) > 1e-10) fail = "weight normalization violated";
            const double neff = effective_sample_size(ps);
            if (neff < 1.0 - 1e-9 || neff > 128.0 + 1e-9) fail = "N_eff out of range";
        }
    }
    // Resampling unbiasedness, 3-sigma gate.
    if (fail.empty()) {
        PriorSpec prior;
        RngStream rng(3);
        ParticleSet ps = pf_init(64, prior, rng);
        for (int k = 0; k < 10; ++k) update_weights(ps, cplx(1.0, 0.2), k, SymbolPmf::uniform(), 0.5);
        const double before = (ps.w * ps.omega).sum();
        double acc = 0, acc2 = 0;
        const int trials = 10000;
        for (int t = 0; t < trials; ++t) {
            ParticleSet copy = ps;
            RngStream r2(100 + t);
            resample(copy, r2);
            const double m = copy.omega.mean();
            acc += m;
            acc2 += m * m;
        }
        const double mean = acc / trials;
        const double sd = std::sqrt(std::max(acc2 / trials - mean * mean, 0.0));
        if (std::abs(mean - before) > 3.0 * sd / std::sqrt(static_cast<double>(trials)))
            fail = "resampling biased beyond 3 sigma";
    }
    // Circulant kernel stochasticity.
    if (fail.empty()) {
        for (double s2 : {1e-6, 3.44e-3, 1.0}) {
            const PhaseGrid g = build_kernel(64, s2);
            for (int l = 0; l < 64; ++l) {
                if (std::abs(g.kernel.row(l).sum() - 1.0) > 1e-12) fail = "kernel row sum off";
                for (int m = 0; m < 64; ++m)
                    if (g.kernel(l, m) != g.kernel(0, (64 + m - l) % 64))
                        fail = "kernel not circulant";
            }
        }
    }
    // RW forward/backward equals exhaustive path enumeration (L=4, N_q=8).
    if (fail.empty()) {
        const int nq = 8, L = 4;
        const PhaseGrid g = build_kernel(nq, 0.25);
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-1, 1);
        Eigen::VectorXcd y(L);
        for (int k = 0; k < L; ++k) y[k] = cplx(u(rng), u(rng));
        std::vector<SymbolPmf> incoming(L, SymbolPmf::uniform());
        incoming[0] = SymbolPmf::point_mass(0);
        const GridMessages m = forward_backward(y, 0.7, incoming, g);
        Eigen::MatrixXd marg = Eigen::MatrixXd::Zero(L, nq);
        std::vector<int> path(L, 0);
        std::vector<Eigen::VectorXd> local(L);
        for (int k = 0; k < L; ++k) {
            local[k].resize(nq);
            for (int l = 0; l < nq; ++l)
                local[k][l] =
                    incoming[k].p[0] * symbol_likelihood(y[k], cplx(1, 0), g.angles[l], 0.7) +
                    incoming[k].p[1] * symbol_likelihood(y[k], cplx(-1, 0), g.angles[l], 0.7);
        }
        for (int a = 0; a < nq; ++a)
            for (int b = 0; b < nq; ++b)
                for (int c = 0; c < nq; ++c)
                    for (int d = 0; d < nq; ++d) {
                        path = {a, b, c, d};
                        double w = 1.0;
                        for (int k = 0; k < L; ++k) {
                            w *= local[k][path[k]];
                            if (k > 0) w *= g.kernel(path[k], path[k - 1]);
                        }
                        for (int k = 0; k < L; ++k) marg(k, path[k]) += w;
                    }
        for (int k = 0; k < L; ++k) marg.row(k) /= marg.row(k).sum();
        if ((marg - m.posterior).cwiseAbs().maxCoeff() > 1e-10)
            fail = "forward/backward disagrees with path enumeration";
    }
    // Quadratic fit exactness.
    if (fail.empty()) {
        Eigen::VectorXd phi(300);
        for (int k = 0; k < 300; ++k) phi[k] = -0.4 + 3e-3 * k + 7e-6 * k * k;
        const FitResult f = quadratic_fit(phi, 0);
        if (std::abs(f.theta_hat + 0.4) > 1e-9 || std::abs(f.omega_hat - 3e-3) > 1e-9 ||
            std::abs(f.epsilon_hat - 7e-6) > 1e-9)
            fail = "quadratic fit not exact on noiseless data";
    }
    // LDPC: random codewords satisfy H c^T = 0.
    if (fail.empty()) {
        const ParityCheckMatrix h = peg_construct(252, 504, 3, 0x5eedc0de);
        const LdpcEncoder enc(h);
        std::mt19937_64 rng(5);
        for (int t = 0; t < 20 && fail.empty(); ++t) {
            std::vector<std::uint8_t> d(enc.k());
            for (auto& bit : d) bit = rng() & 1;
            if (!h.syndrome_ok(enc.encode(d))) fail = "encoder produced a non-codeword";
        }
    }
    // Wrapped-error and unwrap round-trip identities.
    if (fail.empty()) {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(-20, 20);
        Eigen::VectorXd raw(128);
        for (int i = 0; i < 128; ++i) raw[i] = u(rng);
        const Eigen::VectorXd uw = unwrap(raw);
        for (int i = 0; i < 128 && fail.empty(); ++i) {
            if (std::abs(wrap_pi(uw[i]) - wrap_pi(raw[i])) > 1e-9) fail = "unwrap round trip";
            const double x = u(rng), g = x + kTwoPi * (i % 5 - 2);
            if (std::abs(wrapped_sq_error(g, x)) > 1e-16) fail = "wrapped error identity";
        }
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(9, fail.empty(),
           fail.empty() ? fmt("property suite passed in %.2f s", secs)
                        : fmt("property suite FAILED: %s", fail.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[i + 1]);

    using Fn = void (*)();
    const Fn crits[9] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9};
    if (only >= 1 && only <= 9) {
        crits[only - 1]();
    } else {
        for (Fn f : crits) f();
    }
    return g_failures == 0 ? 0 : 1;
}
