#include "fusionrx/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fusionrx {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::defaults() {
    Config c;
    c.set("sim.seed", "1");
    c.set("sim.threads", "0");  // 0 = hardware concurrency
    c.set("ldpc.alist_path", "data/peg_252x504.alist");
    c.set("ldpc.max_iters", "50");
    c.set("frame.n_preamble", "30");
    c.set("frame.preamble_seed", "7");
    c.set("channel.omega_max", "0.01");
    c.set("channel.epsilon_max", "1e-05");
    c.set("channel.n_nodes", "1");
    c.set("fg.global_iters", "1");
    c.set("fg.feedback", "extrinsic");
    c.set("fg.estimator", "rw");
    c.set("pf.n_particles", "400");
    c.set("pf.fine_tune", "true");
    c.set("pf.alpha", "0.1");
    c.set("pf.zeta", "0.01");
    c.set("pf.gamma_scale", "0.1");
    c.set("pf.theta_th", "0.05");
    c.set("pf.omega_th", "0.0001");
    c.set("rw.n_q", "100");
    c.set("rw.sigma_w_mode", "paper");
    c.set("rw.mean_mode", "circular");
    c.set("bounds.h", "1");
    c.set("mse.n_bursts", "200");
    c.set("ber.n_frames", "2000");
    c.set("ber.genie", "true");
    return c;
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    Config c = defaults();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config: empty key at line " + std::to_string(line_no));
        c.set(key, val);
    }
    return c;
}

std::string Config::get_str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw std::runtime_error("config: missing key " + key);
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_str(key);
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::runtime_error("config: bad numeric value for " + key);
    return d;
}

long Config::get_long(const std::string& key) const {
    const std::string v = get_str(key);
    std::size_t pos = 0;
    const long l = std::stol(v, &pos);
    if (pos != v.size()) throw std::runtime_error("config: bad integer value for " + key);
    return l;
}

bool Config::get_bool(const std::string& key) const {
    const std::string v = get_str(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config: bad boolean value for " + key);
}

std::uint64_t Config::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : kv_) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    return h;
}

std::string Config::dump() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << "=" << v << "\n";
    return out.str();
}

}  // namespace fusionrx
