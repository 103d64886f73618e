#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ois/errors.hpp"
#include "ois/rng.hpp"

namespace ois {

/// Sparse binary parity-check matrix held as sorted row and column supports.
class ParityCheckMatrix {
public:
    ParityCheckMatrix(std::size_t n, std::size_t m_rows,
                      std::vector<std::vector<std::uint32_t>> row_supports)
        : n_(n), m_rows_(m_rows), row_supports_(std::move(row_supports)) {
        if (n_ == 0 || m_rows_ == 0) {
            throw std::invalid_argument("ParityCheckMatrix: empty dimensions");
        }
        if (row_supports_.size() != m_rows_) {
            throw std::invalid_argument("ParityCheckMatrix: row count mismatch");
        }
        col_supports_.assign(n_, {});
        for (std::size_t r = 0; r < m_rows_; ++r) {
            auto& row = row_supports_[r];
            if (row.empty()) {
                throw std::invalid_argument("ParityCheckMatrix: empty row " +
                                            std::to_string(r));
            }
            std::sort(row.begin(), row.end());
            if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
                throw std::invalid_argument(
                    "ParityCheckMatrix: duplicate entry in row " + std::to_string(r));
            }
            if (row.back() >= n_) {
                throw std::invalid_argument(
                    "ParityCheckMatrix: column index out of range in row " +
                    std::to_string(r));
            }
            for (std::uint32_t c : row) {
                col_supports_[c].push_back(static_cast<std::uint32_t>(r));
            }
        }
        for (std::size_t c = 0; c < n_; ++c) {
            if (col_supports_[c].empty()) {
                throw std::invalid_argument("ParityCheckMatrix: empty column " +
                                            std::to_string(c));
            }
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t m_rows() const noexcept { return m_rows_; }
    double design_rate() const noexcept {
        return 1.0 - static_cast<double>(m_rows_) / static_cast<double>(n_);
    }
    const std::vector<std::vector<std::uint32_t>>& row_supports() const noexcept {
        return row_supports_;
    }
    const std::vector<std::vector<std::uint32_t>>& col_supports() const noexcept {
        return col_supports_;
    }
    std::size_t edge_count() const noexcept {
        std::size_t total = 0;
        for (const auto& row : row_supports_) total += row.size();
        return total;
    }

private:
    std::size_t n_;
    std::size_t m_rows_;
    std::vector<std::vector<std::uint32_t>> row_supports_;
    std::vector<std::vector<std::uint32_t>> col_supports_;
};

/// True iff every check's parity over `bits` is even.
inline bool syndrome(const ParityCheckMatrix& h, std::span<const std::uint8_t> bits) {
    if (bits.size() != h.n()) {
        throw std::invalid_argument("syndrome: bit vector length mismatch");
    }
    for (const auto& row : h.row_supports()) {
        unsigned parity = 0;
        for (std::uint32_t c : row) parity ^= (bits[c] & 1u);
        if (parity != 0) return false;
    }
    return true;
}

namespace detail {

struct AlistCursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 0;

    /// Next non-blank physical line; empty optional-equivalent via ok=false.
    bool next_line(std::string_view& out) {
        while (pos < text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string_view::npos) eol = text.size();
            std::string_view candidate = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line;
            if (!candidate.empty() && candidate.back() == '\r') {
                candidate.remove_suffix(1);
            }
            if (candidate.find_first_not_of(" \t") != std::string_view::npos) {
                out = candidate;
                return true;
            }
        }
        return false;
    }
};

inline std::vector<long> parse_int_line(std::string_view line, int line_no) {
    std::vector<long> values;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        long value = 0;
        const char* begin = line.data() + i;
        const char* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || (ptr != end && *ptr != ' ' && *ptr != '\t')) {
            throw parse_error("expected an integer token", line_no);
        }
        values.push_back(value);
        i = static_cast<std::size_t>(ptr - line.data());
    }
    return values;
}

}  // namespace detail

/// Parses the MacKay alist interchange format. Zero entries in the index
/// listings are padding and ignored. Errors carry the 1-based physical line
/// number of the offending content.
inline ParityCheckMatrix parse_alist(std::string_view text) {
    detail::AlistCursor cur{text};
    std::string_view line;

    auto require_line = [&](const char* what) -> std::string_view {
        if (!cur.next_line(line)) {
            throw parse_error(std::string("unexpected end of input, expected ") + what,
                              cur.line + 1);
        }
        return line;
    };

    require_line("'n m' header");
    const auto header = detail::parse_int_line(line, cur.line);
    if (header.size() != 2 || header[0] <= 0 || header[1] <= 0) {
        throw parse_error("header must be two positive integers 'n m'", cur.line);
    }
    const auto n = static_cast<std::size_t>(header[0]);
    const auto m = static_cast<std::size_t>(header[1]);

    require_line("max degrees");
    const auto maxima = detail::parse_int_line(line, cur.line);
    if (maxima.size() != 2 || maxima[0] <= 0 || maxima[1] <= 0) {
        throw parse_error("expected two positive maximum degrees", cur.line);
    }
    const long max_col_deg = maxima[0];
    const long max_row_deg = maxima[1];

    auto read_degrees = [&](std::size_t count, long max_deg,
                            const char* what) -> std::vector<std::size_t> {
        require_line(what);
        const auto values = detail::parse_int_line(line, cur.line);
        if (values.size() != count) {
            throw parse_error(std::string(what) + ": expected " +
                                  std::to_string(count) + " entries, found " +
                                  std::to_string(values.size()),
                              cur.line);
        }
        std::vector<std::size_t> degrees(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (values[i] <= 0) {
                throw parse_error(std::string(what) + ": degree of entry " +
                                      std::to_string(i + 1) +
                                      " must be positive (no empty rows or columns)",
                                  cur.line);
            }
            if (values[i] > max_deg) {
                throw parse_error(std::string(what) + ": degree " +
                                      std::to_string(values[i]) +
                                      " exceeds declared maximum " +
                                      std::to_string(max_deg),
                                  cur.line);
            }
            degrees[i] = static_cast<std::size_t>(values[i]);
        }
        return degrees;
    };

    const auto col_degrees = read_degrees(n, max_col_deg, "column degree list");
    const auto row_degrees = read_degrees(m, max_row_deg, "row degree list");

    auto read_supports = [&](std::size_t count, const std::vector<std::size_t>& degrees,
                             std::size_t bound, const char* what)
        -> std::vector<std::vector<std::uint32_t>> {
        std::vector<std::vector<std::uint32_t>> supports(count);
        for (std::size_t i = 0; i < count; ++i) {
            require_line(what);
            const auto values = detail::parse_int_line(line, cur.line);
            auto& support = supports[i];
            for (long v : values) {
                if (v == 0) continue;  // zero padding
                if (v < 0 || static_cast<std::size_t>(v) > bound) {
                    throw parse_error(std::string(what) + " " + std::to_string(i + 1) +
                                          ": index " + std::to_string(v) +
                                          " out of range [1, " + std::to_string(bound) +
                                          "]",
                                      cur.line);
                }
                support.push_back(static_cast<std::uint32_t>(v - 1));
            }
            if (support.size() != degrees[i]) {
                throw parse_error(std::string(what) + " " + std::to_string(i + 1) +
                                      ": lists " + std::to_string(support.size()) +
                                      " entries but its degree is " +
                                      std::to_string(degrees[i]),
                                  cur.line);
            }
            std::sort(support.begin(), support.end());
            if (std::adjacent_find(support.begin(), support.end()) != support.end()) {
                throw parse_error(std::string(what) + " " + std::to_string(i + 1) +
                                      ": duplicate index",
                                  cur.line);
            }
        }
        return supports;
    };

    const auto col_lists = read_supports(n, col_degrees, m, "column listing");
    auto row_lists = read_supports(m, row_degrees, n, "row listing");
    const int row_block_end = cur.line;

    if (cur.next_line(line)) {
        throw parse_error("unexpected trailing content", cur.line);
    }

    // Cross-consistency: the column listings must describe the same matrix.
    std::vector<std::vector<std::uint32_t>> cols_from_rows(n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::uint32_t c : row_lists[r]) {
            cols_from_rows[c].push_back(static_cast<std::uint32_t>(r));
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (cols_from_rows[c] != col_lists[c]) {
            throw parse_error("row and column listings disagree about column " +
                                  std::to_string(c + 1),
                              row_block_end);
        }
    }

    return ParityCheckMatrix(n, m, std::move(row_lists));
}

/// Canonical alist emission: space-separated, one listing per line, no zero
/// padding, 1-based sorted indices.
inline std::string write_alist(const ParityCheckMatrix& h) {
    std::string out;
    auto append_values = [&out](auto first, auto last, auto proj) {
        bool space = false;
        for (auto it = first; it != last; ++it) {
            if (space) out += ' ';
            out += std::to_string(proj(*it));
            space = true;
        }
        out += '\n';
    };

    std::size_t max_col = 0, max_row = 0;
    for (const auto& col : h.col_supports()) max_col = std::max(max_col, col.size());
    for (const auto& row : h.row_supports()) max_row = std::max(max_row, row.size());

    out += std::to_string(h.n()) + ' ' + std::to_string(h.m_rows()) + '\n';
    out += std::to_string(max_col) + ' ' + std::to_string(max_row) + '\n';
    append_values(h.col_supports().begin(), h.col_supports().end(),
                  [](const auto& col) { return col.size(); });
    append_values(h.row_supports().begin(), h.row_supports().end(),
                  [](const auto& row) { return row.size(); });
    for (const auto& col : h.col_supports()) {
        append_values(col.begin(), col.end(),
                      [](std::uint32_t r) { return r + 1; });
    }
    for (const auto& row : h.row_supports()) {
        append_values(row.begin(), row.end(),
                      [](std::uint32_t c) { return c + 1; });
    }
    return out;
}

/// Random (dv, dc)-regular code via a shuffled socket pairing, followed by
/// bounded local edge swaps that remove duplicate edges and then best-effort
/// reduce 4-cycles. Deterministic for a given seed.
inline ParityCheckMatrix random_regular_code(std::size_t n, int dv, int dc,
                                             std::uint64_t seed) {
    if (n == 0 || dv < 1 || dc < 1) {
        throw std::invalid_argument("random_regular_code: degrees and n must be positive");
    }
    const std::size_t edge_total = n * static_cast<std::size_t>(dv);
    if (edge_total % static_cast<std::size_t>(dc) != 0) {
        throw std::invalid_argument(
            "random_regular_code: n*dv must be divisible by dc");
    }
    const std::size_t m = edge_total / static_cast<std::size_t>(dc);
    if (static_cast<std::size_t>(dv) > m || static_cast<std::size_t>(dc) > n) {
        throw std::invalid_argument(
            "random_regular_code: degree exceeds the opposite dimension");
    }

    SplitMix64 rng(seed);

    // Socket pairing: edge e joins check e/dc with var_of[e].
    std::vector<std::uint32_t> var_of(edge_total);
    for (std::size_t e = 0; e < edge_total; ++e) {
        var_of[e] = static_cast<std::uint32_t>(e / static_cast<std::size_t>(dv));
    }
    for (std::size_t i = edge_total; i > 1; --i) {  // Fisher–Yates
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(var_of[i - 1], var_of[j]);
    }

    const auto check_of = [dc](std::size_t e) {
        return e / static_cast<std::size_t>(dc);
    };
    const auto check_has_var = [&](std::size_t c, std::uint32_t v,
                                   std::size_t skip_edge) {
        const std::size_t begin = c * static_cast<std::size_t>(dc);
        for (std::size_t e = begin; e < begin + static_cast<std::size_t>(dc); ++e) {
            if (e != skip_edge && var_of[e] == v) return true;
        }
        return false;
    };

    // Remove duplicate edges: swap one copy with a random partner edge,
    // accepting only swaps that create no new duplicate in either check.
    const std::size_t max_attempts = 200 * edge_total;
    std::size_t attempts = 0;
    bool clean = false;
    while (!clean && attempts < max_attempts) {
        clean = true;
        for (std::size_t e = 0; e < edge_total && attempts < max_attempts; ++e) {
            const std::size_t c = check_of(e);
            if (!check_has_var(c, var_of[e], e)) continue;
            clean = false;
            while (attempts < max_attempts) {
                ++attempts;
                const std::size_t other =
                    static_cast<std::size_t>(rng.next_below(edge_total));
                const std::size_t c2 = check_of(other);
                if (c2 == c) continue;
                const std::uint32_t va = var_of[e];
                const std::uint32_t vb = var_of[other];
                if (va == vb) continue;
                if (check_has_var(c, vb, e) || check_has_var(c2, va, other)) continue;
                std::swap(var_of[e], var_of[other]);
                break;
            }
        }
    }
    if (!clean) {
        throw std::runtime_error(
            "random_regular_code: could not remove duplicate edges within bounds");
    }

    // Best-effort 4-cycle reduction: a 4-cycle is a variable pair shared by
    // two checks. Bounded passes; swaps keep the graph duplicate-free.
    const int cycle_passes = 8;
    for (int pass = 0; pass < cycle_passes; ++pass) {
        std::vector<std::pair<std::uint64_t, std::uint32_t>> pair_index;
        pair_index.reserve(m * static_cast<std::size_t>(dc * (dc - 1)) / 2);
        for (std::size_t c = 0; c < m; ++c) {
            const std::size_t begin = c * static_cast<std::size_t>(dc);
            for (int i = 0; i < dc; ++i) {
                for (int j = i + 1; j < dc; ++j) {
                    std::uint32_t a = var_of[begin + static_cast<std::size_t>(i)];
                    std::uint32_t b = var_of[begin + static_cast<std::size_t>(j)];
                    if (a > b) std::swap(a, b);
                    pair_index.emplace_back(
                        (static_cast<std::uint64_t>(a) << 32) | b,
                        static_cast<std::uint32_t>(c));
                }
            }
        }
        std::sort(pair_index.begin(), pair_index.end());

        bool any_cycle = false;
        for (std::size_t i = 0; i + 1 < pair_index.size(); ++i) {
            if (pair_index[i].first != pair_index[i + 1].first) continue;
            // Earlier swaps in this pass may have dissolved the recorded
            // cycle; re-verify membership before acting on it.
            const std::size_t c_first = pair_index[i].second;
            const std::size_t c = pair_index[i + 1].second;
            const std::uint32_t victim =
                static_cast<std::uint32_t>(pair_index[i + 1].first >> 32);
            const std::uint32_t partner =
                static_cast<std::uint32_t>(pair_index[i + 1].first & 0xffffffffu);
            const std::size_t no_skip = edge_total;
            if (!check_has_var(c_first, victim, no_skip) ||
                !check_has_var(c_first, partner, no_skip) ||
                !check_has_var(c, victim, no_skip) ||
                !check_has_var(c, partner, no_skip)) {
                continue;
            }
            any_cycle = true;
            // Break the cycle at the second check: move one of the shared
            // variables away by swapping with a random edge.
            std::size_t e = c * static_cast<std::size_t>(dc);
            const std::size_t e_end = e + static_cast<std::size_t>(dc);
            while (e < e_end && var_of[e] != victim) ++e;
            if (e == e_end) continue;
            for (int attempt = 0; attempt < 64; ++attempt) {
                const std::size_t other =
                    static_cast<std::size_t>(rng.next_below(edge_total));
                const std::size_t c2 = check_of(other);
                if (c2 == c) continue;
                const std::uint32_t va = var_of[e];
                const std::uint32_t vb = var_of[other];
                if (va == vb) continue;
                if (check_has_var(c, vb, e) || check_has_var(c2, va, other)) continue;
                std::swap(var_of[e], var_of[other]);
                break;
            }
        }
        if (!any_cycle) break;
    }

    std::vector<std::vector<std::uint32_t>> rows(m);
    for (std::size_t c = 0; c < m; ++c) {
        const std::size_t begin = c * static_cast<std::size_t>(dc);
        rows[c].assign(var_of.begin() + static_cast<std::ptrdiff_t>(begin),
                       var_of.begin() + static_cast<std::ptrdiff_t>(
                                            begin + static_cast<std::size_t>(dc)));
    }
    return ParityCheckMatrix(n, m, std::move(rows));
}

/// Systematic encoder from Gaussian elimination over GF(2) with column
/// pivoting. Information bits occupy the non-pivot columns (reported by
/// info_positions, ascending original column indices); codewords come out in
/// the original column order. Rank deficiency increases nothing and loses
/// nothing: k = n - rank(H), and redundant_rows() reports m_rows - rank.
class Encoder {
public:
    explicit Encoder(ParityCheckMatrix h) : h_(std::move(h)) {
        const std::size_t n = h_.n();
        const std::size_t m = h_.m_rows();
        const std::size_t words = (n + 63) / 64;

        std::vector<std::uint64_t> rows(m * words, 0);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::uint32_t c : h_.row_supports()[r]) {
                rows[r * words + c / 64] |= std::uint64_t{1} << (c % 64);
            }
        }

        const auto get = [&](std::size_t r, std::size_t c) -> bool {
            return (rows[r * words + c / 64] >> (c % 64)) & 1u;
        };
        const auto row_xor = [&](std::size_t dst, std::size_t src) {
            for (std::size_t w = 0; w < words; ++w) {
                rows[dst * words + w] ^= rows[src * words + w];
            }
        };

        std::vector<char> is_pivot(n, 0);
        std::size_t rank = 0;
        for (std::size_t c = 0; c < n && rank < m; ++c) {
            std::size_t pivot_row = m;
            for (std::size_t r = rank; r < m; ++r) {
                if (get(r, c)) {
                    pivot_row = r;
                    break;
                }
            }
            if (pivot_row == m) continue;
            if (pivot_row != rank) {
                for (std::size_t w = 0; w < words; ++w) {
                    std::swap(rows[pivot_row * words + w], rows[rank * words + w]);
                }
            }
            for (std::size_t r = 0; r < m; ++r) {
                if (r != rank && get(r, c)) row_xor(r, rank);
            }
            pivot_cols_.push_back(static_cast<std::uint32_t>(c));
            is_pivot[c] = 1;
            ++rank;
        }
        rank_ = rank;

        free_cols_.reserve(n - rank);
        for (std::size_t c = 0; c < n; ++c) {
            if (!is_pivot[c]) free_cols_.push_back(static_cast<std::uint32_t>(c));
        }
        k_ = free_cols_.size();

        // Reduced rows restricted to the information (free) columns, packed
        // in k-bit space: pivot bit i = parity of (enc_row_i AND info bits).
        info_words_ = (k_ + 63) / 64;
        enc_rows_.assign(rank_ * std::max<std::size_t>(info_words_, 1), 0);
        for (std::size_t i = 0; i < rank_; ++i) {
            for (std::size_t j = 0; j < k_; ++j) {
                if (get(i, free_cols_[j])) {
                    enc_rows_[i * info_words_ + j / 64] |= std::uint64_t{1}
                                                           << (j % 64);
                }
            }
        }
    }

    const ParityCheckMatrix& parity_check() const noexcept { return h_; }
    std::size_t n() const noexcept { return h_.n(); }
    std::size_t k() const noexcept { return k_; }
    std::size_t rank() const noexcept { return rank_; }
    std::size_t redundant_rows() const noexcept { return h_.m_rows() - rank_; }
    const std::vector<std::uint32_t>& info_positions() const noexcept {
        return free_cols_;
    }

    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const {
        if (info.size() != k_) {
            throw std::invalid_argument("encode: expected " + std::to_string(k_) +
                                        " information bits, got " +
                                        std::to_string(info.size()));
        }
        std::vector<std::uint64_t> packed(std::max<std::size_t>(info_words_, 1), 0);
        std::vector<std::uint8_t> out(h_.n(), 0);
        for (std::size_t j = 0; j < k_; ++j) {
            const std::uint8_t bit = info[j] & 1u;
            out[free_cols_[j]] = bit;
            if (bit) packed[j / 64] |= std::uint64_t{1} << (j % 64);
        }
        for (std::size_t i = 0; i < rank_; ++i) {
            std::uint64_t acc = 0;
            for (std::size_t w = 0; w < info_words_; ++w) {
                acc ^= enc_rows_[i * info_words_ + w] & packed[w];
            }
            out[pivot_cols_[i]] =
                static_cast<std::uint8_t>(std::popcount(acc) & 1);
        }
        return out;
    }

private:
    ParityCheckMatrix h_;
    std::size_t rank_ = 0;
    std::size_t k_ = 0;
    std::size_t info_words_ = 0;
    std::vector<std::uint32_t> pivot_cols_;
    std::vector<std::uint32_t> free_cols_;
    std::vector<std::uint64_t> enc_rows_;
};

inline Encoder build_encoder(const ParityCheckMatrix& h) { return Encoder(h); }

struct DecodeResult {
    std::vector<std::uint8_t> bits;
    int iterations_used = 0;
    bool syndrome_ok = false;
};

/// Flooding-schedule sum-product decoder. Check updates use the tanh rule
/// with message magnitudes clipped at 30 (natural-log LLR units); decoding
/// exits early once the running hard decision satisfies every check. Positive
/// LLRs favour bit 0; exact zeros decide 0. Instances own their message
/// buffers: one decode call per instance at a time, distinct instances may
/// run concurrently.
class Decoder {
public:
    explicit Decoder(const ParityCheckMatrix& h) : h_(&h) {
        const auto& rows = h.row_supports();
        check_offset_.reserve(rows.size() + 1);
        check_offset_.push_back(0);
        for (const auto& row : rows) {
            for (std::uint32_t v : row) var_of_edge_.push_back(v);
            check_offset_.push_back(static_cast<std::uint32_t>(var_of_edge_.size()));
        }
        var_edges_offset_.assign(h.n() + 1, 0);
        for (std::uint32_t v : var_of_edge_) ++var_edges_offset_[v + 1];
        for (std::size_t v = 0; v < h.n(); ++v) {
            var_edges_offset_[v + 1] += var_edges_offset_[v];
        }
        var_edges_.resize(var_of_edge_.size());
        std::vector<std::uint32_t> fill(var_edges_offset_.begin(),
                                        var_edges_offset_.end() - 1);
        for (std::uint32_t e = 0; e < var_of_edge_.size(); ++e) {
            var_edges_[fill[var_of_edge_[e]]++] = e;
        }
        check_to_var_.resize(var_of_edge_.size());
        var_to_check_.resize(var_of_edge_.size());
        scratch_.resize(64);
        posterior_.resize(h.n());
    }

    DecodeResult decode(std::span<const double> channel_llrs, int max_iter = 50,
                        bool early_exit = true) {
        const ParityCheckMatrix& h = *h_;
        if (channel_llrs.size() != h.n()) {
            throw std::invalid_argument("decode: LLR vector length mismatch");
        }
        for (double llr : channel_llrs) {
            if (!std::isfinite(llr)) {
                throw std::domain_error("decode: channel LLRs must be finite");
            }
        }
        if (max_iter < 1) throw std::invalid_argument("decode: max_iter must be >= 1");

        DecodeResult result;
        result.bits.resize(h.n());

        const auto harden = [&](const std::vector<double>& llrs) {
            for (std::size_t v = 0; v < h.n(); ++v) {
                result.bits[v] = llrs[v] < 0.0 ? 1 : 0;  // tie (0.0) -> bit 0
            }
        };

        posterior_.assign(channel_llrs.begin(), channel_llrs.end());
        harden(posterior_);
        if (early_exit && syndrome(h, result.bits)) {
            result.iterations_used = 0;
            result.syndrome_ok = true;
            return result;
        }

        std::fill(check_to_var_.begin(), check_to_var_.end(), 0.0);
        const std::size_t n_checks = h.m_rows();

        int iter = 0;
        for (iter = 1; iter <= max_iter; ++iter) {
            // Variable-to-check: total belief minus the incoming edge.
            for (std::size_t v = 0; v < h.n(); ++v) {
                double total = channel_llrs[v];
                for (std::uint32_t i = var_edges_offset_[v];
                     i < var_edges_offset_[v + 1]; ++i) {
                    total += check_to_var_[var_edges_[i]];
                }
                posterior_[v] = total;
                for (std::uint32_t i = var_edges_offset_[v];
                     i < var_edges_offset_[v + 1]; ++i) {
                    const std::uint32_t e = var_edges_[i];
                    var_to_check_[e] = total - check_to_var_[e];
                }
            }

            // Check-to-variable: tanh rule via prefix/suffix products.
            for (std::size_t c = 0; c < n_checks; ++c) {
                const std::uint32_t begin = check_offset_[c];
                const std::uint32_t end = check_offset_[c + 1];
                const std::uint32_t deg = end - begin;
                if (scratch_.size() < 2 * static_cast<std::size_t>(deg)) {
                    scratch_.resize(2 * static_cast<std::size_t>(deg));
                }
                double* tanhs = scratch_.data();
                double* suffix = scratch_.data() + deg;
                for (std::uint32_t i = 0; i < deg; ++i) {
                    tanhs[i] = std::tanh(0.5 * var_to_check_[begin + i]);
                }
                double acc = 1.0;
                for (std::uint32_t i = deg; i-- > 0;) {
                    suffix[i] = acc;
                    acc *= tanhs[i];
                }
                double prefix = 1.0;
                for (std::uint32_t i = 0; i < deg; ++i) {
                    const double product = prefix * suffix[i];
                    check_to_var_[begin + i] =
                        std::clamp(2.0 * std::atanh(product), -30.0, 30.0);
                    prefix *= tanhs[i];
                }
            }

            // Posterior and stopping test.
            for (std::size_t v = 0; v < h.n(); ++v) {
                double total = channel_llrs[v];
                for (std::uint32_t i = var_edges_offset_[v];
                     i < var_edges_offset_[v + 1]; ++i) {
                    total += check_to_var_[var_edges_[i]];
                }
                posterior_[v] = total;
            }
            harden(posterior_);
            if (early_exit && syndrome(h, result.bits)) {
                result.iterations_used = iter;
                result.syndrome_ok = true;
                return result;
            }
        }

        result.iterations_used = max_iter;
        result.syndrome_ok = syndrome(h, result.bits);
        return result;
    }

    /// Posterior LLRs left by the most recent decode call.
    const std::vector<double>& posterior_llrs() const noexcept { return posterior_; }

private:
    const ParityCheckMatrix* h_;
    std::vector<std::uint32_t> check_offset_;
    std::vector<std::uint32_t> var_of_edge_;
    std::vector<std::uint32_t> var_edges_offset_;
    std::vector<std::uint32_t> var_edges_;
    std::vector<double> check_to_var_;
    std::vector<double> var_to_check_;
    std::vector<double> scratch_;
    std::vector<double> posterior_;
};

inline DecodeResult decode_bp(const ParityCheckMatrix& h,
                              std::span<const double> channel_llrs,
                              int max_iter = 50) {
    Decoder decoder(h);
    return decoder.decode(channel_llrs, max_iter);
}

}  // namespace ois
