#include "fusionrx/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "fusionrx/rng.hpp"

namespace fusionrx {

int ParityCheckMatrix::n_edges() const {
    int e = 0;
    for (const auto& r : rows) e += static_cast<int>(r.size());
    return e;
}

bool ParityCheckMatrix::syndrome_ok(const std::vector<std::uint8_t>& bits) const {
    for (const auto& row : rows) {
        int s = 0;
        for (int c : row) s ^= bits[c];
        if (s) return false;
    }
    return true;
}

namespace {

struct LineReader {
    std::ifstream in;
    int line_no = 0;

    explicit LineReader(const std::string& path) : in(path) {}

    // Reads the next non-empty line and tokenizes it as integers.
    bool next(std::vector<long>& out) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream ss(line);
            out.clear();
            long v;
            while (ss >> v) out.push_back(v);
            if (!ss.eof() && ss.fail()) return false;  // non-numeric token
            if (!out.empty()) return true;
        }
        return false;
    }
};

[[noreturn]] void alist_fail(const std::string& path, int line, const std::string& what) {
    throw CodecError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ParityCheckMatrix load_alist(const std::string& path) {
    LineReader rd(path);
    if (!rd.in) throw CodecError(path + ": cannot open");

    std::vector<long> tok;
    if (!rd.next(tok) || tok.size() < 2) alist_fail(path, rd.line_no, "malformed header (need N M)");
    const long n = tok[0], m = tok[1];
    if (n <= 0 || m <= 0) alist_fail(path, rd.line_no, "non-positive dimensions");

    if (!rd.next(tok) || tok.size() < 2) alist_fail(path, rd.line_no, "malformed max-degree line");
    const long max_col_deg = tok[0], max_row_deg = tok[1];

    if (!rd.next(tok) || static_cast<long>(tok.size()) != n)
        alist_fail(path, rd.line_no, "column degree list: expected " + std::to_string(n) + " entries");
    std::vector<long> col_deg = tok;
    if (!rd.next(tok) || static_cast<long>(tok.size()) != m)
        alist_fail(path, rd.line_no, "row degree list: expected " + std::to_string(m) + " entries");
    std::vector<long> row_deg = tok;

    for (long d : col_deg)
        if (d < 0 || d > max_col_deg) alist_fail(path, rd.line_no, "column degree out of range");
    for (long d : row_deg)
        if (d < 0 || d > max_row_deg) alist_fail(path, rd.line_no, "row degree out of range");

    ParityCheckMatrix h;
    h.n_cols = static_cast<int>(n);
    h.n_rows = static_cast<int>(m);
    h.cols.assign(n, {});
    h.rows.assign(m, {});

    // Per-column lists; indices are 1-based, so 0 is a format violation.
    for (long c = 0; c < n; ++c) {
        if (!rd.next(tok)) alist_fail(path, rd.line_no + 1, "truncated: missing column list");
        for (long v : tok) {
            if (v < 1 || v > m)
                alist_fail(path, rd.line_no,
                           "row index " + std::to_string(v) + " out of range (1-based)");
            h.cols[c].push_back(static_cast<int>(v - 1));
        }
        if (static_cast<long>(h.cols[c].size()) != col_deg[c])
            alist_fail(path, rd.line_no, "column list length disagrees with degree");
    }
    // Per-row lists.
    for (long r = 0; r < m; ++r) {
        if (!rd.next(tok)) alist_fail(path, rd.line_no + 1, "truncated: missing row list");
        for (long v : tok) {
            if (v < 1 || v > n)
                alist_fail(path, rd.line_no,
                           "column index " + std::to_string(v) + " out of range (1-based)");
            h.rows[r].push_back(static_cast<int>(v - 1));
        }
        if (static_cast<long>(h.rows[r].size()) != row_deg[r])
            alist_fail(path, rd.line_no, "row list length disagrees with degree");
    }

    // Cross-validate the two adjacency views and reject duplicate edges.
    for (long r = 0; r < m; ++r) {
        auto row = h.rows[r];
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end())
            throw CodecError(path + ": duplicate edge in row " + std::to_string(r + 1));
    }
    long edges_cols = 0, edges_rows = 0;
    for (const auto& c : h.cols) edges_cols += static_cast<long>(c.size());
    for (const auto& r : h.rows) edges_rows += static_cast<long>(r.size());
    if (edges_cols != edges_rows)
        throw CodecError(path + ": column/row adjacency lists disagree");
    return h;
}

void save_alist(const ParityCheckMatrix& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CodecError(path + ": cannot open for writing");
    std::size_t maxc = 0, maxr = 0;
    for (const auto& c : h.cols) maxc = std::max(maxc, c.size());
    for (const auto& r : h.rows) maxr = std::max(maxr, r.size());
    out << h.n_cols << " " << h.n_rows << "\n" << maxc << " " << maxr << "\n";
    for (int c = 0; c < h.n_cols; ++c) out << h.cols[c].size() << (c + 1 < h.n_cols ? " " : "\n");
    for (int r = 0; r < h.n_rows; ++r) out << h.rows[r].size() << (r + 1 < h.n_rows ? " " : "\n");
    for (const auto& col : h.cols) {
        for (std::size_t i = 0; i < col.size(); ++i) out << col[i] + 1 << (i + 1 < col.size() ? " " : "");
        out << "\n";
    }
    for (const auto& row : h.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << row[i] + 1 << (i + 1 < row.size() ? " " : "");
        out << "\n";
    }
}

ParityCheckMatrix peg_construct(int n_rows, int n_cols, int col_degree, std::uint64_t seed) {
    const long total_edges = static_cast<long>(n_cols) * col_degree;
    if (total_edges % n_rows != 0)
        throw CodecError("peg_construct: edge count not divisible by row count");
    const int row_cap = static_cast<int>(total_edges / n_rows);

    ParityCheckMatrix h;
    h.n_cols = n_cols;
    h.n_rows = n_rows;
    h.cols.assign(n_cols, {});
    h.rows.assign(n_rows, {});
    std::vector<int> row_deg(n_rows, 0);
    std::mt19937_64 tie_rng(splitmix64(seed));

    std::vector<int> chk_depth(n_rows);
    std::vector<char> var_seen(n_cols);
    std::vector<int> frontier, next_frontier;

    auto pick = [&](const std::vector<int>& cand) {
        int best_deg = std::numeric_limits<int>::max();
        std::vector<int> ties;
        for (int c : cand) {
            if (row_deg[c] < best_deg) {
                best_deg = row_deg[c];
                ties.assign(1, c);
            } else if (row_deg[c] == best_deg) {
                ties.push_back(c);
            }
        }
        std::uniform_int_distribution<std::size_t> d(0, ties.size() - 1);
        return ties[d(tie_rng)];
    };

    for (int v = 0; v < n_cols; ++v) {
        for (int e = 0; e < col_degree; ++e) {
            std::vector<int> cand;
            if (h.cols[v].empty()) {
                for (int c = 0; c < n_rows; ++c)
                    if (row_deg[c] < row_cap) cand.push_back(c);
            } else {
                // BFS over the bipartite graph from v; expand until the check
                // set saturates, then connect to an unreached check (maximizes
                // the local girth) or, failing that, to one on the last level.
                std::fill(chk_depth.begin(), chk_depth.end(), -1);
                std::fill(var_seen.begin(), var_seen.end(), 0);
                var_seen[v] = 1;
                frontier.clear();
                for (int c : h.cols[v]) {
                    chk_depth[c] = 0;
                    frontier.push_back(c);
                }
                int depth = 0;
                int reached = static_cast<int>(frontier.size());
                while (!frontier.empty() && reached < n_rows) {
                    next_frontier.clear();
                    for (int c : frontier) {
                        for (int u : h.rows[c]) {
                            if (var_seen[u]) continue;
                            var_seen[u] = 1;
                            for (int c2 : h.cols[u]) {
                                if (chk_depth[c2] < 0) {
                                    chk_depth[c2] = depth + 1;
                                    next_frontier.push_back(c2);
                                    ++reached;
                                }
                            }
                        }
                    }
                    if (next_frontier.empty()) break;
                    frontier.swap(next_frontier);
                    ++depth;
                }
                for (int c = 0; c < n_rows; ++c)
                    if (chk_depth[c] < 0 && row_deg[c] < row_cap) cand.push_back(c);
                if (cand.empty()) {
                    // All checks reachable: take the deepest non-saturated ones
                    // that are not already neighbors of v.
                    for (int d = depth; d >= 1 && cand.empty(); --d)
                        for (int c = 0; c < n_rows; ++c)
                            if (chk_depth[c] == d && row_deg[c] < row_cap) cand.push_back(c);
                }
            }
            if (cand.empty()) throw CodecError("peg_construct: no admissible check (capacity exhausted)");
            const int c = pick(cand);
            h.cols[v].push_back(c);
            h.rows[c].push_back(v);
            ++row_deg[c];
        }
    }
    for (auto& col : h.cols) std::sort(col.begin(), col.end());
    for (auto& row : h.rows) std::sort(row.begin(), row.end());
    return h;
}

// ---------------------------------------------------------------------------
// Encoder

namespace {

struct BitRows {
    int n_cols;
    int words;
    std::vector<std::uint64_t> data;  // row-major

    BitRows(int rows, int cols)
        : n_cols(cols), words((cols + 63) / 64), data(static_cast<std::size_t>(rows) * words, 0) {}

    std::uint64_t* row(int r) { return data.data() + static_cast<std::size_t>(r) * words; }
    void set(int r, int c) { row(r)[c >> 6] ^= (1ULL << (c & 63)); }
    bool get(int r, int c) { return (row(r)[c >> 6] >> (c & 63)) & 1ULL; }
    void xor_rows(int dst, int src) {
        auto* d = row(dst);
        auto* s = row(src);
        for (int w = 0; w < words; ++w) d[w] ^= s[w];
    }
};

}  // namespace

LdpcEncoder::LdpcEncoder(const ParityCheckMatrix& h) : n_cols_(h.n_cols) {
    const int m = h.n_rows;
    const int n = h.n_cols;
    BitRows a(m, n);
    for (int r = 0; r < m; ++r)
        for (int c : h.rows[r]) a.set(r, c);

    // Gauss-Jordan to reduced row echelon form, tracking pivot columns.
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < n && rank < m; ++c) {
        int p = -1;
        for (int r = rank; r < m; ++r)
            if (a.get(r, c)) { p = r; break; }
        if (p < 0) continue;
        if (p != rank)
            for (int w = 0; w < a.words; ++w) std::swap(a.row(p)[w], a.row(rank)[w]);
        for (int r = 0; r < m; ++r)
            if (r != rank && a.get(r, c)) a.xor_rows(r, rank);
        pivot_col.push_back(c);
        ++rank;
    }
    if (rank < m)
        throw CodecError("rank-deficient H: rank " + std::to_string(rank) + " < " +
                         std::to_string(m) + ", effective K = " + std::to_string(n - rank));

    std::vector<char> is_pivot(n, 0);
    for (int c : pivot_col) is_pivot[c] = 1;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) info_cols_.push_back(c);
    parity_cols_ = pivot_col;
    k_ = static_cast<int>(info_cols_.size());

    // Row r restricted to the info columns: parity bit r = A_r . d.
    words_per_row_ = (k_ + 63) / 64;
    parity_rows_.assign(static_cast<std::size_t>(m) * words_per_row_, 0);
    for (int r = 0; r < m; ++r)
        for (int i = 0; i < k_; ++i)
            if (a.get(r, info_cols_[i]))
                parity_rows_[static_cast<std::size_t>(r) * words_per_row_ + (i >> 6)] ^= (1ULL << (i & 63));
}

std::vector<std::uint8_t> LdpcEncoder::encode(const std::vector<std::uint8_t>& info) const {
    if (static_cast<int>(info.size()) != k_)
        throw CodecError("encode: expected " + std::to_string(k_) + " info bits, got " +
                         std::to_string(info.size()));
    std::vector<std::uint64_t> d(words_per_row_, 0);
    for (int i = 0; i < k_; ++i)
        if (info[i]) d[i >> 6] |= (1ULL << (i & 63));

    std::vector<std::uint8_t> cw(n_cols_, 0);
    for (int i = 0; i < k_; ++i) cw[info_cols_[i]] = info[i];
    const int m = static_cast<int>(parity_cols_.size());
    for (int r = 0; r < m; ++r) {
        std::uint64_t acc = 0;
        const auto* row = parity_rows_.data() + static_cast<std::size_t>(r) * words_per_row_;
        for (int w = 0; w < words_per_row_; ++w) acc ^= row[w] & d[w];
        cw[parity_cols_[r]] = static_cast<std::uint8_t>(__builtin_popcountll(acc) & 1);
    }
    return cw;
}

std::vector<std::uint8_t> LdpcEncoder::extract_info(const std::vector<std::uint8_t>& codeword) const {
    std::vector<std::uint8_t> info(k_);
    for (int i = 0; i < k_; ++i) info[i] = codeword[info_cols_[i]];
    return info;
}

// ---------------------------------------------------------------------------
// Decoder

std::vector<std::uint8_t> BitBeliefs::hard_bits() const {
    std::vector<std::uint8_t> b(posterior.size());
    for (std::size_t i = 0; i < posterior.size(); ++i) b[i] = posterior[i] < 0.0 ? 1 : 0;
    return b;
}

BitBeliefs decode(const std::vector<double>& channel_llrs, const ParityCheckMatrix& h,
                  int max_iters) {
    const int n = h.n_cols;
    const int m = h.n_rows;
    if (static_cast<int>(channel_llrs.size()) != n)
        throw CodecError("decode: LLR length mismatch");
    if (max_iters < 1) throw CodecError("decode: max_iters must be >= 1");

    std::vector<double> ch(n);
    for (int v = 0; v < n; ++v) {
        const double x = channel_llrs[v];
        if (!std::isfinite(x)) throw CodecError("decode: non-finite channel LLR");
        ch[v] = std::clamp(x, -kLlrClip, kLlrClip);
    }

    // Flat edge layout grouped by check row.
    const int ne = h.n_edges();
    std::vector<int> row_ptr(m + 1, 0);
    std::vector<int> var_of(ne);
    {
        int e = 0;
        for (int r = 0; r < m; ++r) {
            row_ptr[r] = e;
            for (int v : h.rows[r]) var_of[e++] = v;
        }
        row_ptr[m] = e;
    }

    std::vector<double> cv(ne, 0.0);   // check -> var
    std::vector<double> vc(ne, 0.0);   // var -> check
    std::vector<double> sum_cv(n, 0.0);
    std::vector<double> post = ch;
    std::vector<std::uint8_t> hard(n);
    std::vector<double> t(32);  // per-row tanh scratch (row degrees are small)
    std::vector<double> suffix(33);

    BitBeliefs out;
    out.posterior = ch;

    // Keeps |tanh| strictly below 1 so atanh stays finite; with the +/-38 LLR
    // clip this caps check messages near 35.
    const double tanh_lim = 1.0 - 1e-15;

    for (int iter = 1; iter <= max_iters; ++iter) {
        // Variable update and check-node tanh products in one sweep.
        for (int e = 0; e < ne; ++e)
            vc[e] = std::clamp(post[var_of[e]] - cv[e], -kLlrClip, kLlrClip);

        for (int r = 0; r < m; ++r) {
            const int b = row_ptr[r], d = row_ptr[r + 1] - b;
            if (static_cast<int>(t.size()) < d) { t.resize(d); suffix.resize(d + 1); }
            for (int i = 0; i < d; ++i)
                t[i] = std::clamp(std::tanh(0.5 * vc[b + i]), -tanh_lim, tanh_lim);
            suffix[d] = 1.0;
            for (int i = d - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * t[i];
            double prefix = 1.0;
            for (int i = 0; i < d; ++i) {
                const double excl = prefix * suffix[i + 1];
                cv[b + i] = 2.0 * std::atanh(std::clamp(excl, -tanh_lim, tanh_lim));
                prefix *= t[i];
            }
        }

        std::fill(sum_cv.begin(), sum_cv.end(), 0.0);
        for (int e = 0; e < ne; ++e) sum_cv[var_of[e]] += cv[e];
        for (int v = 0; v < n; ++v) {
            post[v] = std::clamp(ch[v] + sum_cv[v], -kLlrClip, kLlrClip);
            hard[v] = post[v] < 0.0 ? 1 : 0;
        }

        out.iterations = iter;
        if (h.syndrome_ok(hard)) {
            out.syndrome_satisfied = true;
            break;
        }
    }

    out.posterior = post;
    out.extrinsic.resize(n);
    for (int v = 0; v < n; ++v)
        out.extrinsic[v] = std::clamp(post[v] - ch[v], -kLlrClip, kLlrClip);
    return out;
}

}  // namespace fusionrx
