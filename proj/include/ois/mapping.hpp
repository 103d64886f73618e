#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ois/constellation.hpp"
#include "ois/numeric.hpp"

namespace ois {

/// Bijection between level indices and bit patterns. Bit patterns are held
/// as integers read MSB-first: bit position k of a b-bit pattern is
/// (code >> (b-1-k)) & 1.
class Labeling {
public:
    Labeling(int bits, std::vector<std::uint32_t> index_to_code)
        : bits_(bits), index_to_code_(std::move(index_to_code)) {
        if (bits_ < 1 || bits_ > 8) {
            throw std::domain_error("Labeling: bits must be in [1, 8]");
        }
        const std::size_t m_size = std::size_t{1} << bits_;
        if (index_to_code_.size() != m_size) {
            throw std::invalid_argument("Labeling: table size is not 2^bits");
        }
        code_to_index_.assign(m_size, m_size);  // sentinel: unset
        for (std::size_t i = 0; i < m_size; ++i) {
            const std::uint32_t code = index_to_code_[i];
            if (code >= m_size || code_to_index_[code] != m_size) {
                throw std::invalid_argument("Labeling: table is not a bijection");
            }
            code_to_index_[code] = static_cast<std::uint32_t>(i);
        }
    }

    int bits() const noexcept { return bits_; }
    std::size_t size() const noexcept { return index_to_code_.size(); }

    std::uint32_t code_of(std::size_t index) const { return index_to_code_.at(index); }
    std::uint32_t index_of(std::uint32_t code) const { return code_to_index_.at(code); }

    /// k-th bit (MSB-first, k in [0, bits)) of the pattern labeling `index`.
    int bit_of(std::size_t index, int k) const {
        return static_cast<int>((code_of(index) >> (bits_ - 1 - k)) & 1u);
    }

private:
    int bits_;
    std::vector<std::uint32_t> index_to_code_;
    std::vector<std::uint32_t> code_to_index_;
};

/// Binary reflected Gray labeling: index i carries pattern i XOR (i >> 1),
/// so adjacent levels differ in exactly one bit.
inline Labeling gray_labeling(int bits) {
    if (bits < 1 || bits > 8) {
        throw std::domain_error("gray_labeling: bits must be in [1, 8]");
    }
    const std::size_t m_size = std::size_t{1} << bits;
    std::vector<std::uint32_t> table(m_size);
    for (std::size_t i = 0; i < m_size; ++i) {
        table[i] = static_cast<std::uint32_t>(i ^ (i >> 1));
    }
    return Labeling(bits, std::move(table));
}

/// Maps a block of 0/1 bits, b at a time (MSB first), to intensity levels.
inline std::vector<double> modulate(std::span<const std::uint8_t> bit_block,
                                    const Labeling& labeling,
                                    const Constellation& c) {
    const int b = labeling.bits();
    if (c.size() != labeling.size()) {
        throw std::invalid_argument("modulate: constellation size does not match labeling");
    }
    if (bit_block.size() % static_cast<std::size_t>(b) != 0) {
        throw std::invalid_argument("modulate: bit count not divisible by bits per symbol");
    }
    const std::size_t n_symbols = bit_block.size() / static_cast<std::size_t>(b);
    std::vector<double> symbols;
    symbols.reserve(n_symbols);
    for (std::size_t s = 0; s < n_symbols; ++s) {
        std::uint32_t code = 0;
        for (int k = 0; k < b; ++k) {
            const std::uint8_t bit = bit_block[s * static_cast<std::size_t>(b) +
                                               static_cast<std::size_t>(k)];
            if (bit > 1) {
                throw std::invalid_argument("modulate: bit values must be 0 or 1");
            }
            code = (code << 1) | bit;
        }
        symbols.push_back(c.level(labeling.index_of(code)));
    }
    return symbols;
}

/// Exact per-bit log-likelihood ratios of one received intensity:
///   LLR_k = ln sum_{i: bit_k(i)=0} exp(ll_i) - ln sum_{i: bit_k(i)=1} exp(ll_i),
/// ll_i the Gaussian log likelihood of level i. Positive means bit 0 is more
/// likely. With `max_log` set, each sum collapses to its largest term.
inline std::vector<double> bit_llrs(double y, const Constellation& c,
                                    const Labeling& labeling, double sigma,
                                    bool max_log = false) {
    if (!(sigma > 0.0)) throw std::domain_error("bit_llrs: sigma must be > 0");
    if (c.size() != labeling.size()) {
        throw std::invalid_argument("bit_llrs: constellation size does not match labeling");
    }
    const int b = labeling.bits();
    const std::size_t m_size = c.size();

    std::vector<double> log_like(m_size);
    for (std::size_t i = 0; i < m_size; ++i) {
        log_like[i] = log_gauss(y, c.levels()[i], sigma);
    }

    std::vector<double> llrs(static_cast<std::size_t>(b));
    std::vector<double> zero_terms, one_terms;
    zero_terms.reserve(m_size / 2);
    one_terms.reserve(m_size / 2);
    for (int k = 0; k < b; ++k) {
        zero_terms.clear();
        one_terms.clear();
        for (std::size_t i = 0; i < m_size; ++i) {
            (labeling.bit_of(i, k) == 0 ? zero_terms : one_terms)
                .push_back(log_like[i]);
        }
        double lse0, lse1;
        if (max_log) {
            lse0 = *std::max_element(zero_terms.begin(), zero_terms.end());
            lse1 = *std::max_element(one_terms.begin(), one_terms.end());
        } else {
            lse0 = log_sum_exp(zero_terms);
            lse1 = log_sum_exp(one_terms);
        }
        llrs[static_cast<std::size_t>(k)] = lse0 - lse1;
    }
    return llrs;
}

/// Nearest-level decision; ties go to the lower index.
inline std::size_t hard_demap(double y, const Constellation& c) {
    const auto& a = c.levels();
    const auto it = std::lower_bound(a.begin(), a.end(), y);
    if (it == a.begin()) return 0;
    if (it == a.end()) return a.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - a.begin());
    const std::size_t lo = hi - 1;
    return (y - a[lo] <= a[hi] - y) ? lo : hi;
}

}  // namespace ois
