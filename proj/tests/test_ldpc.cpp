#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fusionrx/ldpc.hpp"

using namespace fusionrx;

namespace {

// Test-side oracle: dense GF(2) H * c^T, independent of the sparse paths.
std::vector<int> dense_syndrome(const ParityCheckMatrix& h, const std::vector<std::uint8_t>& c) {
    std::vector<std::vector<int>> dense(h.n_rows, std::vector<int>(h.n_cols, 0));
    for (int r = 0; r < h.n_rows; ++r)
        for (int col : h.rows[r]) dense[r][col] = 1;
    std::vector<int> s(h.n_rows, 0);
    for (int r = 0; r < h.n_rows; ++r) {
        int acc = 0;
        for (int col = 0; col < h.n_cols; ++col) acc ^= dense[r][col] & c[col];
        s[r] = acc;
    }
    return s;
}

bool all_zero(const std::vector<int>& v) {
    for (int x : v)
        if (x) return false;
    return true;
}

// H = [1101; 0111], the 2x4 toy code used across the decoder tests.
ParityCheckMatrix toy_code() {
    ParityCheckMatrix h;
    h.n_cols = 4;
    h.n_rows = 2;
    h.rows = {{0, 1, 3}, {1, 2, 3}};
    h.cols = {{0}, {0, 1}, {1}, {0, 1}};
    return h;
}

// Its four codewords, enumerated by hand.
const std::vector<std::vector<std::uint8_t>> kToyCodewords = {
    {0, 0, 0, 0}, {1, 0, 1, 1}, {0, 1, 0, 1}, {1, 1, 1, 0}};

std::string write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

}  // namespace

TEST_CASE("alist round trip on the toy code") {
    const ParityCheckMatrix h = toy_code();
    const std::string path = write_temp("toy.alist", "");
    save_alist(h, path);
    const ParityCheckMatrix g = load_alist(path);
    CHECK(g.n_cols == 4);
    CHECK(g.n_rows == 2);
    CHECK(g.rows == h.rows);
    CHECK(g.cols == h.cols);
}

TEST_CASE("alist parse errors carry the line position") {
    SUBCASE("malformed header") {
        const std::string p = write_temp("bad1.alist", "4\n");
        CHECK_THROWS_WITH_AS(load_alist(p), doctest::Contains(":1:"), CodecError);
    }
    SUBCASE("1-based violation: a 0 index is rejected with its position") {
        const std::string p =
            write_temp("bad2.alist", "4 2\n2 3\n1 2 1 2\n3 3\n0\n1 2\n2\n1 2\n1 2 4\n2 3 4\n");
        CHECK_THROWS_WITH_AS(load_alist(p), doctest::Contains(":5:"), CodecError);
        CHECK_THROWS_WITH_AS(load_alist(p), doctest::Contains("out of range"), CodecError);
    }
    SUBCASE("out-of-range index") {
        const std::string p =
            write_temp("bad3.alist", "4 2\n2 3\n1 2 1 2\n3 3\n3\n1 2\n2\n1 2\n1 2 4\n2 3 4\n");
        CHECK_THROWS_WITH_AS(load_alist(p), doctest::Contains("out of range"), CodecError);
    }
    SUBCASE("truncated file") {
        const std::string p = write_temp("bad4.alist", "4 2\n2 3\n1 2 1 2\n3 3\n1\n1 2\n");
        CHECK_THROWS_WITH_AS(load_alist(p), doctest::Contains("truncated"), CodecError);
    }
}

TEST_CASE("encoder: all-zero info maps to the all-zero codeword") {
    const ParityCheckMatrix h = toy_code();
    const LdpcEncoder enc(h);
    CHECK(enc.k() == 2);
    const auto cw = enc.encode({0, 0});
    CHECK(cw == std::vector<std::uint8_t>{0, 0, 0, 0});
}

TEST_CASE("encoder: H c^T = 0 against the dense oracle and linearity holds") {
    const ParityCheckMatrix h = toy_code();
    const LdpcEncoder enc(h);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint8_t> d1(enc.k()), d2(enc.k()), dx(enc.k());
        for (int i = 0; i < enc.k(); ++i) {
            d1[i] = rng() & 1;
            d2[i] = rng() & 1;
            dx[i] = d1[i] ^ d2[i];
        }
        const auto c1 = enc.encode(d1);
        const auto c2 = enc.encode(d2);
        const auto cx = enc.encode(dx);
        CHECK(all_zero(dense_syndrome(h, c1)));
        CHECK(enc.extract_info(c1) == d1);
        for (int j = 0; j < enc.n(); ++j) CHECK(cx[j] == (c1[j] ^ c2[j]));
    }
}

TEST_CASE("PEG construction: regular (3,6), full rank, verified codewords") {
    const ParityCheckMatrix h = peg_construct(252, 504, 3, 0x5eedc0de);
    CHECK(h.n_cols == 504);
    CHECK(h.n_rows == 252);
    for (const auto& col : h.cols) CHECK(col.size() == 3);
    for (const auto& row : h.rows) CHECK(row.size() == 6);

    const LdpcEncoder enc(h);  // throws if rank-deficient
    CHECK(enc.k() == 252);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::uint8_t> d(252);
        for (auto& b : d) b = rng() & 1;
        CHECK(all_zero(dense_syndrome(h, enc.encode(d))));
    }
}

TEST_CASE("decode: noiseless codeword converges at iteration 1") {
    const ParityCheckMatrix h = toy_code();
    for (const auto& cw : kToyCodewords) {
        std::vector<double> llr(4);
        for (int i = 0; i < 4; ++i) llr[i] = cw[i] ? -20.0 : 20.0;
        const BitBeliefs b = decode(llr, h);
        CHECK(b.syndrome_satisfied);
        CHECK(b.iterations == 1);
        CHECK(b.hard_bits() == cw);
    }
}

TEST_CASE("decode: all-zero LLRs stay at the symmetric fixed point") {
    const ParityCheckMatrix h = toy_code();
    const BitBeliefs b = decode(std::vector<double>(4, 0.0), h, 10);
    for (double v : b.posterior) CHECK(v == 0.0);
    for (double v : b.extrinsic) CHECK(v == 0.0);
}

TEST_CASE("decode: single flipped sign corrected, agrees with exhaustive ML") {
    const ParityCheckMatrix h = toy_code();
    for (const auto& cw : kToyCodewords) {
        for (int flip = 0; flip < 4; ++flip) {
            std::vector<double> llr(4);
            for (int i = 0; i < 4; ++i) llr[i] = cw[i] ? -8.0 : 8.0;
            llr[flip] = -0.25 * llr[flip];

            // Exhaustive ML over the 4 codewords: maximize sum (1-2c) llr.
            double best = -1e300;
            std::vector<std::uint8_t> ml;
            for (const auto& cand : kToyCodewords) {
                double score = 0;
                for (int i = 0; i < 4; ++i) score += (cand[i] ? -1.0 : 1.0) * llr[i];
                if (score > best) {
                    best = score;
                    ml = cand;
                }
            }
            const BitBeliefs b = decode(llr, h, 50);
            CHECK(ml == cw);  // the flip is mild enough that ML recovers
            CHECK(b.hard_bits() == ml);
            CHECK(b.syndrome_satisfied);
        }
    }
}

TEST_CASE("decode: determinism and early-exit flag implies zero syndrome") {
    const ParityCheckMatrix h = peg_construct(252, 504, 3, 0x5eedc0de);
    std::mt19937_64 rng(21);
    std::vector<double> llr(504);
    for (auto& v : llr) v = std::uniform_real_distribution<double>(-3, 3)(rng);
    const BitBeliefs a = decode(llr, h, 30);
    const BitBeliefs b = decode(llr, h, 30);
    CHECK(a.posterior == b.posterior);
    CHECK(a.iterations == b.iterations);
    if (a.syndrome_satisfied) CHECK(h.syndrome_ok(a.hard_bits()));
}
