#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fusionrx/harness.hpp"

using namespace fusionrx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config test_config() {
    Config cfg = Config::defaults();
    // The unit build runs from arbitrary directories; always synthesize.
    cfg.set("ldpc.alist_path", "/nonexistent/peg.alist");
    return cfg;
}

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config: defaults, file parsing, errors") {
    const Config cfg = Config::defaults();
    CHECK(cfg.get_long("pf.n_particles") == 400);
    CHECK(cfg.get_double("channel.omega_max") == 0.01);
    CHECK(cfg.get_bool("pf.fine_tune"));
    CHECK(cfg.get_str("rw.sigma_w_mode") == "paper");

    const std::string path = tmp("sim.cfg");
    {
        std::ofstream out(path);
        out << "# comment line\n\nchannel.omega_max = 0.02  # inline comment\n"
            << "fg.estimator=pf\n";
    }
    const Config file_cfg = Config::from_file(path);
    CHECK(file_cfg.get_double("channel.omega_max") == 0.02);
    CHECK(file_cfg.get_str("fg.estimator") == "pf");
    CHECK(file_cfg.get_long("pf.n_particles") == 400);  // defaults survive

    CHECK_THROWS(cfg.get_str("no.such.key"));
    const std::string bad = tmp("bad.cfg");
    {
        std::ofstream out(bad);
        out << "not a key value line\n";
    }
    CHECK_THROWS(Config::from_file(bad));
}

TEST_CASE("fingerprint is stable and key-sensitive") {
    const Config a = Config::defaults();
    Config b = Config::defaults();
    CHECK(a.fingerprint() == b.fingerprint());
    b.set("sim.seed", "2");
    CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("pairwise sum agrees with sequential summation") {
    std::vector<double> xs;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    double plain = 0;
    for (int i = 0; i < 1000; ++i) {
        xs.push_back(u(rng));
        plain += xs.back();
    }
    CHECK(pairwise_sum(xs) == doctest::Approx(plain).epsilon(1e-12));
    CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("CSV emission: byte determinism, empty table, schema header") {
    std::vector<ResultRow> rows;
    rows.push_back({"mse", 4.0, "mse_omega", 1.25e-7, 200, 3e-9, 0xabcdefULL, 1});
    rows.push_back({"mse", 4.0, "jcrb_omega", 9.8e-8, 200, 0.0, 0xabcdefULL, 1});
    const std::string p1 = tmp("rows1.csv"), p2 = tmp("rows2.csv");
    emit_csv(rows, p1);
    emit_csv(rows, p2);
    const std::string c1 = slurp(p1);
    CHECK(c1 == slurp(p2));
    CHECK(c1.find("# fusionrx-csv v1") == 0);
    CHECK(c1.find("scenario,snr_db,metric,value,n_trials,std_error,fingerprint,seed") !=
          std::string::npos);

    const std::string pe = tmp("empty.csv");
    emit_csv({}, pe);
    int lines = 0;
    std::istringstream ss(slurp(pe));
    std::string line;
    while (std::getline(ss, line)) ++lines;
    CHECK(lines == 2);  // comment + header only

    const std::string script = tmp("plot.py");
    emit_plotscript(rows, p1, script);
    const std::string body = slurp(script);
    CHECK(body.find("matplotlib") != std::string::npos);
    CHECK(body.find("rows1.csv") != std::string::npos);
}

TEST_CASE("system assembly: code substitution flag and frame dimensions") {
    const SimSystem sys = make_system(test_config());
    CHECK(sys.code_substituted);
    CHECK(sys.h.n_cols == 504);
    CHECK(sys.encoder->k() == 252);
    CHECK(sys.frame_len() == 534);
    CHECK(sys.grid.n_q == 100);
    CHECK(sys.grid.sigma_w2 == doctest::Approx(0.02065 / 6.0));
}

TEST_CASE("MSE runner: identical results for any worker-thread count") {
    SimSystem sys = make_system(test_config());
    sys.n_threads = 1;
    const MseOutcome a = run_mse_point(sys, EstimatorKind::rw, 6.0, 16, false, false);
    sys.n_threads = 4;
    const MseOutcome b = run_mse_point(sys, EstimatorKind::rw, 6.0, 16, false, false);
    CHECK(a.mse_theta == b.mse_theta);
    CHECK(a.mse_omega == b.mse_omega);
    CHECK(a.mse_epsilon == b.mse_epsilon);
    CHECK(a.estimator_failures == 0);
    // sane scale: below the prior variances at a workable SNR
    CHECK(a.mse_omega < sq(2 * sys.prior.omega_max) / 12.0);
    CHECK(a.mse_epsilon < sq(2 * sys.prior.epsilon_max) / 12.0);
}

TEST_CASE("MSE standard errors shrink roughly as 1/sqrt(n) on a doubling sweep") {
    SimSystem sys = make_system(test_config());
    const MseOutcome small = run_mse_point(sys, EstimatorKind::rw, 6.0, 40, false, false);
    const MseOutcome big = run_mse_point(sys, EstimatorKind::rw, 6.0, 160, false, false);
    CHECK(small.se_omega > 0.0);
    CHECK(big.se_omega > 0.0);
    const double ratio = small.se_omega / big.se_omega;  // expect ~2
    CHECK(ratio > 1.1);
    CHECK(ratio < 4.5);
}

TEST_CASE("BER runner: genie baseline dominates the estimated run on matched seeds") {
    const SimSystem sys = make_system(test_config());
    const BerOutcome b = run_ber_point(sys, EstimatorKind::rw, 1, 3.0, 40, 1, true);
    CHECK(b.frames == 40);
    CHECK(b.info_bits == 40 * 252);
    CHECK(b.genie_bit_errors <= b.bit_errors);
    CHECK(b.per_iter_errors.size() == 1);
    CHECK(b.per_iter_errors[0] == b.bit_errors);
}

TEST_CASE("convergence trace shape and emission") {
    Config cfg = test_config();
    cfg.set("channel.omega_max", "0.02");
    cfg.set("pf.n_particles", "100");
    const SimSystem sys = make_system(cfg);
    const ChannelParams truth{2.0, 0.011, -9e-6};
    const ConvergenceTrace tr = run_convergence(sys, truth, 8.0, 4);
    CHECK(tr.ft_on.rows() == sys.frame_len());
    CHECK(tr.ft_on.cols() == 3);
    CHECK((tr.ft_on.array() >= 0).all());
    const std::string path = tmp("trace.csv");
    emit_convergence_csv(tr, sys, path);
    const std::string body = slurp(path);
    CHECK(body.find("# fusionrx-trace v1") == 0);
    CHECK(body.find("k,abs_theta_ft") != std::string::npos);
}

TEST_CASE("wrapped squared error folds multiples of 2 pi") {
    CHECK(wrapped_sq_error(kPi - 0.1, -kPi + 0.1) == doctest::Approx(sq(0.2)).epsilon(1e-9));
    CHECK(wrapped_sq_error(0.05, -0.05) == doctest::Approx(sq(0.1)).epsilon(1e-9));
    CHECK(wrapped_sq_error(3.0 + kTwoPi, 3.0) == doctest::Approx(0.0).epsilon(1e-20));
}
