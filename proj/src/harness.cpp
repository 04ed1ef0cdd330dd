#include "fusionrx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fusionrx {

namespace {

constexpr std::uint64_t kPegFixtureSeed = 0x5eedc0de;

std::uint64_t point_master(std::uint64_t seed, double snr_db) {
    const auto milli = static_cast<std::uint64_t>(std::llround(snr_db * 1000.0) + (1LL << 40));
    return splitmix64(splitmix64(seed) ^ milli);
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min<long>(threads, n);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct Burst {
    std::vector<std::uint8_t> info;
    Frame frame;
    std::vector<ChannelParams> params;
    std::vector<NodeObservation> obs;
};

Burst make_burst(const SimSystem& sys, std::uint64_t master, long burst, int n_nodes,
                 double sigma2) {
    Burst b;
    RngStream bits = RngStream::substream(master, burst, 0, RngRole::data_bits);
    b.info.resize(sys.encoder->k());
    for (auto& v : b.info) v = static_cast<std::uint8_t>(bits.bits() & 1ULL);
    b.frame = build_frame(sys.preamble_bits, sys.encoder->encode(b.info), sys.frame_cfg);

    b.params.resize(n_nodes);
    b.obs.resize(n_nodes);
    for (int n = 0; n < n_nodes; ++n) {
        RngStream pr = RngStream::substream(master, burst, n, RngRole::channel_params);
        RngStream nr = RngStream::substream(master, burst, n, RngRole::noise);
        b.params[n] = sample_params(pr, sys.prior);
        b.obs[n] = apply_channel(b.frame, b.params[n], sigma2, nr, n);
    }
    return b;
}

NodeEstimator make_estimator(const SimSystem& sys, EstimatorKind kind, std::uint64_t master,
                             long burst, const Burst* burst_data, const PfConfig& pf_cfg) {
    const int np = sys.frame_cfg.n_preamble;
    switch (kind) {
        case EstimatorKind::rw:
            return [&sys, np](const NodeObservation& obs, const std::vector<SymbolPmf>& down) {
                return run_rw_node(obs, down, np, sys.grid, sys.rw.mean_mode).upward;
            };
        case EstimatorKind::pf: {
            auto streams = std::make_shared<std::vector<RngStream>>();
            const int n_nodes = static_cast<int>(burst_data->obs.size());
            for (int n = 0; n < n_nodes; ++n)
                streams->push_back(RngStream::substream(master, burst, n, RngRole::estimator));
            const PriorSpec prior = sys.prior;
            return [streams, prior, pf_cfg, np](const NodeObservation& obs,
                                                const std::vector<SymbolPmf>& down) {
                return run_pf_node(obs, down, np, prior, pf_cfg, (*streams)[obs.node_id]).upward;
            };
        }
        case EstimatorKind::genie: {
            auto phases = std::make_shared<std::vector<Eigen::VectorXd>>();
            for (std::size_t n = 0; n < burst_data->params.size(); ++n)
                phases->push_back(
                    phase_trajectory(burst_data->params[n], burst_data->frame.length()));
            return [phases, np](const NodeObservation& obs, const std::vector<SymbolPmf>&) {
                const Eigen::VectorXd& phi = (*phases)[obs.node_id];
                std::vector<SymbolPmf> up;
                const int L = static_cast<int>(obs.samples.size());
                up.reserve(L - np);
                for (int k = np; k < L; ++k)
                    up.push_back(pmf_from_phase(obs.samples[k], phi[k], obs.sigma2,
                                                SymbolPmf::uniform()));
                return up;
            };
        }
    }
    throw std::logic_error("make_estimator: bad kind");
}

double sample_std_error(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += sq(x - mean);
    return std::sqrt(acc / (static_cast<double>(xs.size()) - 1.0)) /
           std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace

double pairwise_sum(const std::vector<double>& xs) {
    std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo,
                                                              std::size_t hi) -> double {
        if (hi - lo <= 8) {
            double s = 0.0;
            for (std::size_t i = lo; i < hi; ++i) s += xs[i];
            return s;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        return rec(lo, mid) + rec(mid, hi);
    };
    return xs.empty() ? 0.0 : rec(0, xs.size());
}

double wrapped_sq_error(double est, double truth) { return sq(wrap_pi(est - truth)); }

EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "pf") return EstimatorKind::pf;
    if (s == "rw") return EstimatorKind::rw;
    if (s == "genie") return EstimatorKind::genie;
    throw std::runtime_error("unknown estimator: " + s);
}

SimSystem make_system(const Config& cfg) {
    SimSystem sys;
    sys.cfg = cfg;
    sys.seed = static_cast<std::uint64_t>(cfg.get_long("sim.seed"));
    const long threads = cfg.get_long("sim.threads");
    sys.n_threads = threads > 0 ? static_cast<int>(threads)
                                : std::max(1u, std::thread::hardware_concurrency());

    const std::string alist = cfg.get_str("ldpc.alist_path");
    if (std::filesystem::exists(alist)) {
        sys.h = load_alist(alist);
    } else {
        sys.h = peg_construct(252, 504, 3, kPegFixtureSeed);
        sys.code_substituted = true;
    }
    sys.encoder = std::make_unique<LdpcEncoder>(sys.h);

    sys.frame_cfg.n_preamble = static_cast<int>(cfg.get_long("frame.n_preamble"));
    sys.frame_cfg.n_data = sys.h.n_cols;
    sys.preamble_bits = generate_preamble(
        static_cast<std::uint64_t>(cfg.get_long("frame.preamble_seed")), sys.frame_cfg.n_preamble);

    sys.prior.omega_max = cfg.get_double("channel.omega_max");
    sys.prior.epsilon_max = cfg.get_double("channel.epsilon_max");

    sys.pf.n_particles = static_cast<int>(cfg.get_long("pf.n_particles"));
    sys.pf.fine_tune = cfg.get_bool("pf.fine_tune");
    sys.pf.alpha = cfg.get_double("pf.alpha");
    sys.pf.zeta = cfg.get_double("pf.zeta");
    sys.pf.gamma_scale = cfg.get_double("pf.gamma_scale");
    sys.pf.theta_th = cfg.get_double("pf.theta_th");
    sys.pf.omega_th = cfg.get_double("pf.omega_th");

    sys.rw.n_q = static_cast<int>(cfg.get_long("rw.n_q"));
    const std::string wm = cfg.get_str("rw.sigma_w_mode");
    if (wm == "paper") sys.rw.sigma_w_mode = SigmaWMode::paper;
    else if (wm == "uniform_var") sys.rw.sigma_w_mode = SigmaWMode::uniform_var;
    else throw std::runtime_error("config: rw.sigma_w_mode must be paper|uniform_var");
    const std::string mm = cfg.get_str("rw.mean_mode");
    if (mm == "circular") sys.rw.mean_mode = PhaseMeanMode::circular;
    else if (mm == "linear") sys.rw.mean_mode = PhaseMeanMode::linear;
    else throw std::runtime_error("config: rw.mean_mode must be circular|linear");

    sys.grid = build_kernel(sys.rw.n_q,
                            sigma_w2_from_priors(sys.prior, sys.frame_len(), sys.rw.sigma_w_mode));
    return sys;
}

MseOutcome run_mse_point(const SimSystem& sys, EstimatorKind kind, double snr_db, long n_bursts,
                         bool fine_tune_override, bool have_override) {
    const double sigma2 = snr_db_to_sigma2(snr_db);
    const std::uint64_t master = point_master(sys.seed, snr_db);
    PfConfig pf_cfg = sys.pf;
    if (have_override) pf_cfg.fine_tune = fine_tune_override;

    std::vector<double> e_theta(n_bursts, std::nan(""));
    std::vector<double> e_omega(n_bursts), e_eps(n_bursts);
    std::vector<std::uint8_t> failed(n_bursts, 0);

    parallel_for(n_bursts, sys.n_threads, [&](long i) {
        const Burst b = make_burst(sys, master, i, 1, sigma2);
        const std::vector<SymbolPmf> down = initial_downward(b.frame, sys.frame_cfg.n_preamble);
        double th = 0.0, om = 0.0, ep = 0.0;
        try {
            if (kind == EstimatorKind::rw) {
                const RwNodeResult r =
                    run_rw_node(b.obs[0], down, sys.frame_cfg.n_preamble, sys.grid,
                                sys.rw.mean_mode);
                th = r.fit.theta_hat;
                om = r.fit.omega_hat;
                ep = r.fit.epsilon_hat;
            } else if (kind == EstimatorKind::pf) {
                RngStream es = RngStream::substream(master, i, 0, RngRole::estimator);
                const PfNodeResult r = run_pf_node(b.obs[0], down, sys.frame_cfg.n_preamble,
                                                   sys.prior, pf_cfg, es);
                const int last = b.frame.length() - 1;
                th = r.theta_hat[last];
                om = r.omega_hat[last];
                ep = r.epsilon_hat[last];
            } else {
                throw std::runtime_error("mse: genie estimator has no estimation error");
            }
        } catch (const std::exception&) {
            failed[i] = 1;
            return;
        }
        e_theta[i] = wrapped_sq_error(th, b.params[0].theta);
        e_omega[i] = sq(om - b.params[0].omega);
        e_eps[i] = sq(ep - b.params[0].epsilon);
    });

    MseOutcome out;
    out.snr_db = snr_db;
    std::vector<double> t, o, e;
    for (long i = 0; i < n_bursts; ++i) {
        if (failed[i]) {
            ++out.estimator_failures;
            continue;
        }
        t.push_back(e_theta[i]);
        o.push_back(e_omega[i]);
        e.push_back(e_eps[i]);
    }
    out.n_bursts = static_cast<long>(t.size());
    if (out.n_bursts > 0) {
        out.mse_theta = pairwise_sum(t) / out.n_bursts;
        out.mse_omega = pairwise_sum(o) / out.n_bursts;
        out.mse_epsilon = pairwise_sum(e) / out.n_bursts;
        out.se_theta = sample_std_error(t, out.mse_theta);
        out.se_omega = sample_std_error(o, out.mse_omega);
        out.se_epsilon = sample_std_error(e, out.mse_epsilon);
    }

    WbcrbSpec spec;
    spec.fim.frame_len = sys.frame_len();
    spec.fim.sigma2 = sigma2;
    spec.omega_max = sys.prior.omega_max;
    spec.epsilon_max = sys.prior.epsilon_max;
    spec.h = sys.cfg.get_double("bounds.h");
    out.jcrb_diag = jcrb(spec.fim).diagonal();
    out.wbcrb_diag = wbcrb(spec).diagonal();
    return out;
}

std::vector<ResultRow> run_mse(const SimSystem& sys, const std::vector<double>& snr_db_list) {
    const EstimatorKind kind = estimator_from_string(sys.cfg.get_str("fg.estimator"));
    const long n_bursts = sys.cfg.get_long("mse.n_bursts");
    const std::uint64_t fp = sys.cfg.fingerprint();

    std::vector<ResultRow> rows;
    for (double snr : snr_db_list) {
        const MseOutcome m = run_mse_point(sys, kind, snr, n_bursts, false, false);
        auto add = [&](const std::string& name, double value, double se) {
            rows.push_back({"mse", snr, name, value, m.n_bursts, se, fp, sys.seed});
        };
        add("mse_theta", m.mse_theta, m.se_theta);
        add("mse_omega", m.mse_omega, m.se_omega);
        add("mse_epsilon", m.mse_epsilon, m.se_epsilon);
        add("jcrb_theta", m.jcrb_diag[0], 0.0);
        add("jcrb_omega", m.jcrb_diag[1], 0.0);
        add("jcrb_epsilon", m.jcrb_diag[2], 0.0);
        add("wbcrb_theta", m.wbcrb_diag[0], 0.0);
        add("wbcrb_omega", m.wbcrb_diag[1], 0.0);
        add("wbcrb_epsilon", m.wbcrb_diag[2], 0.0);
        add("estimator_failures", static_cast<double>(m.estimator_failures), 0.0);
    }
    return rows;
}

BerOutcome run_ber_point(const SimSystem& sys, EstimatorKind kind, int n_nodes, double snr_db,
                         long n_frames, int n_global_iters, bool with_genie) {
    const double sigma2 = snr_db_to_sigma2(snr_db);
    const std::uint64_t master = point_master(sys.seed, snr_db);
    const int k_info = sys.encoder->k();

    GlobalLoopConfig loop;
    loop.n_global_iters = n_global_iters;
    loop.feedback = sys.cfg.get_str("fg.feedback") == "posterior" ? FeedbackMode::posterior
                                                                  : FeedbackMode::extrinsic;
    loop.decoder_iters = static_cast<int>(sys.cfg.get_long("ldpc.max_iters"));

    std::vector<std::vector<long>> iter_errors(n_frames);
    std::vector<long> genie_errors(n_frames, 0);
    std::vector<long> dropped(n_frames, 0);

    parallel_for(n_frames, sys.n_threads, [&](long i) {
        const Burst b = make_burst(sys, master, i, n_nodes, sigma2);
        const NodeEstimator est = make_estimator(sys, kind, master, i, &b, sys.pf);
        const LoopResult r = run_global_loop(b.obs, b.frame, sys.frame_cfg.n_preamble, sys.h,
                                             *sys.encoder, est, loop, &b.info);
        iter_errors[i].reserve(r.per_iter.size());
        for (const auto& d : r.per_iter) {
            iter_errors[i].push_back(d.info_bit_errors);
            dropped[i] += d.nodes_dropped;
        }
        if (with_genie) {
            const NodeEstimator gen = make_estimator(sys, EstimatorKind::genie, master, i, &b,
                                                     sys.pf);
            GlobalLoopConfig gl = loop;
            gl.n_global_iters = 1;
            const LoopResult g = run_global_loop(b.obs, b.frame, sys.frame_cfg.n_preamble, sys.h,
                                                 *sys.encoder, gen, gl, &b.info);
            genie_errors[i] = g.per_iter.back().info_bit_errors;
        }
    });

    BerOutcome out;
    out.snr_db = snr_db;
    out.frames = n_frames;
    out.info_bits = n_frames * static_cast<long>(k_info);
    out.per_iter_errors.assign(n_global_iters, 0);
    out.per_iter_se.assign(n_global_iters, 0.0);

    std::vector<double> frame_ber(n_frames), genie_frame_ber(n_frames);
    for (long i = 0; i < n_frames; ++i) {
        for (int g = 0; g < n_global_iters; ++g) out.per_iter_errors[g] += iter_errors[i][g];
        out.bit_errors += iter_errors[i].back();
        out.genie_bit_errors += genie_errors[i];
        frame_ber[i] = static_cast<double>(iter_errors[i].back()) / k_info;
        genie_frame_ber[i] = static_cast<double>(genie_errors[i]) / k_info;
        out.dropped_nodes += dropped[i];
    }
    out.ber = static_cast<double>(out.bit_errors) / static_cast<double>(out.info_bits);
    out.genie_ber = static_cast<double>(out.genie_bit_errors) / static_cast<double>(out.info_bits);
    out.se = sample_std_error(frame_ber, out.ber);
    out.genie_se = sample_std_error(genie_frame_ber, out.genie_ber);
    for (int g = 0; g < n_global_iters; ++g) {
        std::vector<double> fb(n_frames);
        for (long i = 0; i < n_frames; ++i)
            fb[i] = static_cast<double>(iter_errors[i][g]) / k_info;
        out.per_iter_se[g] = sample_std_error(
            fb, static_cast<double>(out.per_iter_errors[g]) / static_cast<double>(out.info_bits));
    }
    return out;
}

std::vector<ResultRow> run_ber(const SimSystem& sys, const std::vector<double>& snr_db_list) {
    const EstimatorKind kind = estimator_from_string(sys.cfg.get_str("fg.estimator"));
    const long frames = sys.cfg.get_long("ber.n_frames");
    const int n_nodes = static_cast<int>(sys.cfg.get_long("channel.n_nodes"));
    const int giters = static_cast<int>(sys.cfg.get_long("fg.global_iters"));
    const bool genie = sys.cfg.get_bool("ber.genie");
    const std::uint64_t fp = sys.cfg.fingerprint();

    std::vector<ResultRow> rows;
    for (double snr : snr_db_list) {
        const BerOutcome b = run_ber_point(sys, kind, n_nodes, snr, frames, giters, genie);
        rows.push_back({"ber", snr, "ber", b.ber, b.frames, b.se, fp, sys.seed});
        if (genie)
            rows.push_back({"ber", snr, "ber_genie", b.genie_ber, b.frames, b.genie_se, fp,
                            sys.seed});
        for (std::size_t g = 0; g < b.per_iter_errors.size(); ++g)
            rows.push_back({"ber", snr, "ber_iter" + std::to_string(g + 1),
                            static_cast<double>(b.per_iter_errors[g]) /
                                static_cast<double>(b.info_bits),
                            b.frames, b.per_iter_se[g], fp, sys.seed});
    }
    return rows;
}

ConvergenceTrace run_convergence(const SimSystem& sys, const ChannelParams& truth, double snr_db,
                                 long n_bursts) {
    const double sigma2 = snr_db_to_sigma2(snr_db);
    const std::uint64_t master = point_master(sys.seed, snr_db);
    const int L = sys.frame_len();

    ConvergenceTrace trace;
    trace.truth = truth;
    trace.snr_db = snr_db;
    trace.n_bursts = n_bursts;
    trace.ft_on = Eigen::MatrixXd::Zero(L, 3);
    trace.ft_off = Eigen::MatrixXd::Zero(L, 3);

    std::vector<Eigen::MatrixXd> on(n_bursts), off(n_bursts);
    parallel_for(n_bursts, sys.n_threads, [&](long i) {
        RngStream bits = RngStream::substream(master, i, 0, RngRole::data_bits);
        std::vector<std::uint8_t> info(sys.encoder->k());
        for (auto& v : info) v = static_cast<std::uint8_t>(bits.bits() & 1ULL);
        const Frame frame = build_frame(sys.preamble_bits, sys.encoder->encode(info),
                                        sys.frame_cfg);
        RngStream nr = RngStream::substream(master, i, 0, RngRole::noise);
        const NodeObservation obs = apply_channel(frame, truth, sigma2, nr, 0);
        const std::vector<SymbolPmf> down = initial_downward(frame, sys.frame_cfg.n_preamble);

        const RngStream es = RngStream::substream(master, i, 0, RngRole::estimator);
        PfConfig cfg_on = sys.pf;
        cfg_on.fine_tune = true;
        PfConfig cfg_off = sys.pf;
        cfg_off.fine_tune = false;
        RngStream es_on = es, es_off = es;
        const PfNodeResult r_on =
            run_pf_node(obs, down, sys.frame_cfg.n_preamble, sys.prior, cfg_on, es_on);
        const PfNodeResult r_off =
            run_pf_node(obs, down, sys.frame_cfg.n_preamble, sys.prior, cfg_off, es_off);

        auto fill = [&](const PfNodeResult& r) {
            Eigen::MatrixXd m(L, 3);
            for (int k = 0; k < L; ++k) {
                m(k, 0) = std::abs(wrap_pi(r.theta_hat[k] - truth.theta));
                m(k, 1) = std::abs(r.omega_hat[k] - truth.omega);
                m(k, 2) = std::abs(r.epsilon_hat[k] - truth.epsilon);
            }
            return m;
        };
        on[i] = fill(r_on);
        off[i] = fill(r_off);
    });

    for (long i = 0; i < n_bursts; ++i) {
        trace.ft_on += on[i];
        trace.ft_off += off[i];
    }
    trace.ft_on /= static_cast<double>(n_bursts);
    trace.ft_off /= static_cast<double>(n_bursts);
    return trace;
}

CrossingResult find_ber_crossing(const SimSystem& sys, EstimatorKind kind, int n_nodes,
                                 double target_ber, long pilot_frames, long heavy_frames,
                                 double snr_lo, double snr_hi, double step) {
    const int n_pts = static_cast<int>(std::lround((snr_hi - snr_lo) / step)) + 1;
    CrossingResult res;
    std::map<int, BerOutcome> pilot, heavy;

    auto measure = [&](int idx, long frames) {
        const double snr = snr_lo + idx * step;
        BerOutcome b = run_ber_point(sys, kind, n_nodes, snr, frames, 1, false);
        res.evaluated.push_back(b);
        return b;
    };
    auto floored = [&](const BerOutcome& b) {
        return std::max(b.ber, 0.25 / static_cast<double>(b.info_bits));
    };

    // Bracket on the lattice with pilot runs (BER is monotone decreasing).
    int lo = 0, hi = n_pts - 1;
    pilot[lo] = measure(lo, pilot_frames);
    if (pilot[lo].ber < target_ber) {
        res.note = "target above the low end of the scan range";
        return res;
    }
    pilot[hi] = measure(hi, pilot_frames);
    if (pilot[hi].ber > target_ber) {
        res.note = "target below the high end of the scan range";
        return res;
    }
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        pilot[mid] = measure(mid, pilot_frames);
        (pilot[mid].ber > target_ber ? lo : hi) = mid;
    }

    // Confirm the bracket at full precision, shifting if the pilot lied.
    heavy[lo] = measure(lo, heavy_frames);
    for (int guard = 0; guard < 3 && heavy[lo].ber < target_ber && lo > 0; ++guard) {
        --lo;
        heavy[lo] = measure(lo, heavy_frames);
    }
    hi = lo + 1;
    heavy[hi] = measure(hi, heavy_frames);
    for (int guard = 0; guard < 3 && heavy[hi].ber > target_ber && hi < n_pts - 1; ++guard) {
        ++hi;
        heavy[hi] = measure(hi, heavy_frames);
    }
    if (heavy[lo].ber < target_ber || heavy[hi].ber > target_ber) {
        res.note = "could not confirm a bracket around the target";
        return res;
    }
    if (hi - lo > 1) lo = hi - 1;  // use the adjacent pair after shifting

    const double b_lo = floored(heavy[lo]);
    const double b_hi = floored(heavy[hi]);
    const double frac = (std::log(target_ber) - std::log(b_lo)) / (std::log(b_hi) - std::log(b_lo));
    res.snr_at_target = snr_lo + step * (lo + frac);
    res.ok = true;
    return res;
}

std::vector<ResultRow> run_bounds(const SimSystem& sys, const std::vector<double>& snr_db_list,
                                  long frame_len, double h) {
    const std::uint64_t fp = sys.cfg.fingerprint();
    std::vector<ResultRow> rows;
    const auto reports = bounds_sweep(snr_db_list, frame_len, sys.prior.omega_max,
                                      sys.prior.epsilon_max, h);
    const char* names[3] = {"theta", "omega", "epsilon"};
    for (const auto& r : reports) {
        for (int i = 0; i < 3; ++i) {
            rows.push_back({"bounds", r.snr_db, std::string("jcrb_") + names[i],
                            r.jcrb_diag()[i], 1, 0.0, fp, sys.seed});
            rows.push_back({"bounds", r.snr_db, std::string("wbcrb_") + names[i],
                            r.wbcrb_diag()[i], 1, 0.0, fp, sys.seed});
        }
    }
    return rows;
}

std::vector<ResultRow> run_sweep_particles(const SimSystem& sys, const std::vector<long>& counts,
                                           double snr_db) {
    const long frames = sys.cfg.get_long("ber.n_frames");
    const std::uint64_t fp = sys.cfg.fingerprint();
    std::vector<ResultRow> rows;
    for (long n : counts) {
        SimSystem local = make_system(sys.cfg);
        local.pf.n_particles = static_cast<int>(n);
        const BerOutcome b = run_ber_point(local, EstimatorKind::pf, 1, snr_db, frames, 1, false);
        rows.push_back({"sweep-particles", snr_db, "ber_particles_" + std::to_string(n), b.ber,
                        b.frames, b.se, fp, sys.seed});
    }
    return rows;
}

std::vector<ResultRow> run_sweep_iters(const SimSystem& sys, const std::vector<long>& iters,
                                       double snr_db) {
    const long frames = sys.cfg.get_long("ber.n_frames");
    const std::uint64_t fp = sys.cfg.fingerprint();
    long gmax = 1;
    for (long g : iters) gmax = std::max(gmax, g);
    const EstimatorKind kind = estimator_from_string(sys.cfg.get_str("fg.estimator"));
    const BerOutcome b =
        run_ber_point(sys, kind, 1, snr_db, frames, static_cast<int>(gmax), false);
    std::vector<ResultRow> rows;
    for (long g : iters)
        rows.push_back({"sweep-iters", snr_db, "ber_g" + std::to_string(g),
                        static_cast<double>(b.per_iter_errors[g - 1]) /
                            static_cast<double>(b.info_bits),
                        b.frames, b.per_iter_se[g - 1], fp, sys.seed});
    return rows;
}

std::vector<ResultRow> run_nodes_comparison(const SimSystem& sys,
                                            const std::vector<double>& snr_db_list) {
    const long frames = sys.cfg.get_long("ber.n_frames");
    const std::uint64_t fp = sys.cfg.fingerprint();
    std::vector<ResultRow> rows;
    for (EstimatorKind kind : {EstimatorKind::rw, EstimatorKind::pf}) {
        const std::string kname = kind == EstimatorKind::rw ? "rw" : "pf";
        for (int nodes : {1, 2}) {
            for (double snr : snr_db_list) {
                const BerOutcome b = run_ber_point(sys, kind, nodes, snr, frames, 1, false);
                rows.push_back({"nodes", snr,
                                "ber_" + kname + "_n" + std::to_string(nodes), b.ber, b.frames,
                                b.se, fp, sys.seed});
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV / plot-script emission

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
    out << "# fusionrx-csv v1 (snr is Es/N0 in dB; sigma^2 = 10^(-snr/10))\n";
    out << "scenario,snr_db,metric,value,n_trials,std_error,fingerprint,seed\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << fmt_double(r.snr_db) << ',' << r.metric << ','
            << fmt_double(r.value) << ',' << r.n_trials << ',' << fmt_double(r.std_error) << ','
            << std::hex << r.fingerprint << std::dec << ',' << r.seed << '\n';
    }
}

void emit_convergence_csv(const ConvergenceTrace& trace, const SimSystem& sys,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_convergence_csv: cannot write " + path);
    out << "# fusionrx-trace v1 truth_theta=" << fmt_double(trace.truth.theta)
        << " truth_omega=" << fmt_double(trace.truth.omega)
        << " truth_epsilon=" << fmt_double(trace.truth.epsilon)
        << " snr_db=" << fmt_double(trace.snr_db) << " bursts=" << trace.n_bursts
        << " fingerprint=" << std::hex << sys.cfg.fingerprint() << std::dec << "\n";
    out << "k,abs_theta_ft,abs_omega_ft,abs_epsilon_ft,abs_theta_noft,abs_omega_noft,"
           "abs_epsilon_noft\n";
    for (int k = 0; k < trace.ft_on.rows(); ++k) {
        out << k;
        for (int c = 0; c < 3; ++c) out << ',' << fmt_double(trace.ft_on(k, c));
        for (int c = 0; c < 3; ++c) out << ',' << fmt_double(trace.ft_off(k, c));
        out << '\n';
    }
}

void emit_plotscript(const std::vector<ResultRow>& rows, const std::string& csv_path,
                     const std::string& script_path) {
    std::ofstream out(script_path);
    if (!out) throw std::runtime_error("emit_plotscript: cannot write " + script_path);
    std::vector<std::string> metrics;
    for (const auto& r : rows)
        if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end())
            metrics.push_back(r.metric);

    out << "#!/usr/bin/env python3\n"
        << "# Plots " << csv_path << " (generated alongside it).\n"
        << "import csv\n"
        << "from collections import defaultdict\n"
        << "import matplotlib.pyplot as plt\n\n"
        << "series = defaultdict(list)\n"
        << "with open(" << '"' << csv_path << '"' << ") as f:\n"
        << "    for row in csv.DictReader(r for r in f if not r.startswith('#')):\n"
        << "        series[row['metric']].append((float(row['snr_db']), float(row['value'])))\n\n"
        << "fig, ax = plt.subplots()\n"
        << "for name in [";
    for (std::size_t i = 0; i < metrics.size(); ++i)
        out << (i ? ", " : "") << '"' << metrics[i] << '"';
    out << "]:\n"
        << "    pts = sorted(series[name])\n"
        << "    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker='o', label=name)\n"
        << "ax.set_xlabel('SNR (dB)')\n"
        << "ax.set_yscale('log')\n"
        << "ax.grid(True, which='both', alpha=0.3)\n"
        << "ax.legend()\n"
        << "plt.savefig(" << '"' << csv_path << ".png" << '"' << ", dpi=150)\n";
}

}  // namespace fusionrx
