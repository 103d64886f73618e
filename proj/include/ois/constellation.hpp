#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ois/errors.hpp"

namespace ois {

/// Average-intensity budget and noise level of the Gaussian intensity
/// channel. The optical SNR is the ratio of mean intensity to noise
/// standard deviation (not a squared-amplitude ratio).
struct ChannelParams {
    double energy;
    double sigma;
    double snr;
    double snr_db;

    ChannelParams(double energy_, double sigma_)
        : energy(energy_), sigma(sigma_) {
        if (!(energy > 0.0)) throw std::domain_error("ChannelParams: energy must be > 0");
        if (!(sigma > 0.0)) throw std::domain_error("ChannelParams: sigma must be > 0");
        snr = energy / sigma;
        snr_db = 10.0 * std::log10(snr);
    }

    static ChannelParams from_snr_db(double energy, double snr_db) {
        if (!(energy > 0.0)) throw std::domain_error("ChannelParams: energy must be > 0");
        return ChannelParams(energy, energy / std::pow(10.0, snr_db / 10.0));
    }
};

/// An ordered set of M nonnegative intensity levels used with equal
/// probability 1/M. Duplicate or descending levels are a construction error.
class Constellation {
public:
    explicit Constellation(std::vector<double> levels) : levels_(std::move(levels)) {
        if (levels_.empty()) {
            throw std::invalid_argument("Constellation: no levels");
        }
        if (!(levels_.front() >= 0.0)) {
            throw std::invalid_argument("Constellation: levels must be nonnegative");
        }
        for (std::size_t i = 1; i < levels_.size(); ++i) {
            if (!(levels_[i] > levels_[i - 1])) {
                throw std::invalid_argument(
                    "Constellation: levels must be strictly ascending (index " +
                    std::to_string(i) + ")");
            }
        }
        double sum = 0.0;
        for (double v : levels_) sum += v;
        mean_ = sum / static_cast<double>(levels_.size());
    }

    const std::vector<double>& levels() const noexcept { return levels_; }
    double level(std::size_t i) const { return levels_.at(i); }
    std::size_t size() const noexcept { return levels_.size(); }
    double mean() const noexcept { return mean_; }
    double min_level() const noexcept { return levels_.front(); }
    double max_level() const noexcept { return levels_.back(); }

private:
    std::vector<double> levels_;
    double mean_;
};

namespace detail {

inline void check_m_size(int m_size, const char* where) {
    if (m_size < 2) {
        throw std::domain_error(std::string(where) + ": constellation size must be >= 2");
    }
}

inline void check_energy(double energy, const char* where) {
    if (!(energy > 0.0)) {
        throw std::domain_error(std::string(where) + ": energy must be > 0");
    }
}

/// (M-1)*ln(M/(M-1)) — the divisor that turns centroids into stretched
/// levels; its reciprocal is the stretch factor g(M).
inline double stretch_divisor(int m_size) {
    const double m = static_cast<double>(m_size);
    return (m - 1.0) * std::log(m / (m - 1.0));
}

}  // namespace detail

/// m-th M-quantile of the exponential intensity density with mean `energy`:
/// E*ln(M/(M-m)). q_0 = 0 and q_M is the +infinity sentinel.
inline double quantile(int m_size, int m, double energy) {
    detail::check_m_size(m_size, "quantile");
    detail::check_energy(energy, "quantile");
    if (m < 0 || m > m_size) {
        throw std::domain_error("quantile: m out of range [0, M]");
    }
    if (m == 0) return 0.0;
    if (m == m_size) return std::numeric_limits<double>::infinity();
    return energy * std::log(static_cast<double>(m_size) /
                             static_cast<double>(m_size - m));
}

/// Conditional mean of the exponential density on [q_m, q_{m+1}), in closed
/// form. The interior intervals evaluate to q_m + eps_m with
/// eps_m = E*(1 - k*ln(1 + 1/k)), k = M-m-1; the unbounded last interval is
/// E*(ln M + 1).
inline double centroid(int m_size, int m, double energy) {
    detail::check_m_size(m_size, "centroid");
    detail::check_energy(energy, "centroid");
    if (m < 0 || m > m_size - 1) {
        throw std::domain_error("centroid: m out of range [0, M-1]");
    }
    if (m == m_size - 1) {
        return energy * (std::log(static_cast<double>(m_size)) + 1.0);
    }
    const double k = static_cast<double>(m_size - m - 1);
    const double eps = energy * (1.0 - k * std::log1p(1.0 / k));
    return quantile(m_size, m, energy) + eps;
}

/// Constellation of all M interval centroids. Its mean equals `energy` and
/// its peak-to-average ratio is 1 + ln M.
inline Constellation centroid_constellation(int m_size, double energy) {
    detail::check_m_size(m_size, "centroid_constellation");
    detail::check_energy(energy, "centroid_constellation");
    std::vector<double> levels(static_cast<std::size_t>(m_size));
    for (int m = 0; m < m_size; ++m) {
        levels[static_cast<std::size_t>(m)] = centroid(m_size, m, energy);
    }
    return Constellation(std::move(levels));
}

/// Mean-preserving stretch of a centroid constellation: drops the smallest
/// level to zero and rescales so the average stays at `energy`.
/// l_m = (c_m - c_0) / ((M-1)*ln(M/(M-1))).
inline Constellation shift_scale(const Constellation& x_c, double energy) {
    detail::check_energy(energy, "shift_scale");
    const int m_size = static_cast<int>(x_c.size());
    detail::check_m_size(m_size, "shift_scale");
    if (std::abs(x_c.mean() - energy) > 1e-9 * energy) {
        throw std::domain_error("shift_scale: input is not a centroid constellation for this energy");
    }
    const double divisor = detail::stretch_divisor(m_size);
    const double c0 = x_c.min_level();
    std::vector<double> levels(x_c.size());
    for (std::size_t i = 0; i < x_c.size(); ++i) {
        levels[i] = (x_c.levels()[i] - c0) / divisor;
    }
    return Constellation(std::move(levels));
}

/// Optical SNR gain of the stretch step, in dB: 10*log10(g(M)) with
/// g(M) = 1 / ((M-1)*ln(M/(M-1))).
inline double scaling_gain_db(int m_size) {
    detail::check_m_size(m_size, "scaling_gain_db");
    return -10.0 * std::log10(detail::stretch_divisor(m_size));
}

/// First-order approximation of the stretch gain: 5/((M-1)*ln 10), roughly
/// 2.17/(M-1) dB.
inline double approx_gain_db(int m_size) {
    detail::check_m_size(m_size, "approx_gain_db");
    return 5.0 / ((static_cast<double>(m_size) - 1.0) * std::log(10.0));
}

struct QuantizedLevels {
    std::vector<std::uint32_t> levels;  // grid indices, ascending, first = 0
    double grid_step;                   // raw step d before fine tuning
};

/// Rounds each stretched level to the nearest point of the uniform grid with
/// 2^(b+n) points spanning [0, l_max]; half-way cases round up. The top
/// level lands exactly on index 2^(b+n)-1. Two levels mapping to the same
/// grid point raise collision_error naming the offending indices.
inline QuantizedLevels quantize_levels(const Constellation& x_l, int bits, int extra_bits) {
    if (bits < 1) throw std::domain_error("quantize_levels: bits must be >= 1");
    if (extra_bits < 0) throw std::domain_error("quantize_levels: extra bits must be >= 0");
    if (bits + extra_bits > 30) {
        throw std::domain_error("quantize_levels: grid wider than 30 bits");
    }
    const std::size_t m_size = std::size_t{1} << bits;
    if (x_l.size() != m_size) {
        throw std::domain_error("quantize_levels: constellation size is not 2^bits");
    }
    const std::uint32_t top = (std::uint32_t{1} << (bits + extra_bits)) - 1;
    const double d = x_l.max_level() / static_cast<double>(top);

    QuantizedLevels out;
    out.grid_step = d;
    out.levels.resize(m_size);
    for (std::size_t m = 0; m < m_size; ++m) {
        const double idx = std::floor(x_l.levels()[m] / d + 0.5);
        out.levels[m] = static_cast<std::uint32_t>(idx);
        if (m > 0 && out.levels[m] <= out.levels[m - 1]) {
            throw collision_error(static_cast<int>(m - 1), static_cast<int>(m),
                                  out.levels[m]);
        }
    }
    return out;
}

/// Basic level: the unit intensity step that restores the exact mean after
/// quantization, delta = E / ((1/M) * sum(l_m)).
inline double basic_level(std::span<const std::uint32_t> integer_levels, double energy) {
    detail::check_energy(energy, "basic_level");
    if (integer_levels.empty()) {
        throw std::domain_error("basic_level: no levels");
    }
    std::uint64_t sum = 0;
    for (std::uint32_t v : integer_levels) sum += v;
    if (sum == 0) {
        throw std::domain_error("basic_level: level sum is zero");
    }
    return energy * static_cast<double>(integer_levels.size()) / static_cast<double>(sum);
}

/// Full record of the three-stage design: centroids, stretched levels,
/// integer grid levels and the basic level that ties them to intensities.
struct ShapedDesign {
    int m_size;
    int bits;
    int extra_bits;
    double energy;
    std::vector<double> centroids;
    std::vector<double> stretched;
    std::vector<std::uint32_t> integer_levels;
    double grid_step_raw;
    double basic_level;
    Constellation constellation;  // levels l_m * delta
};

/// Runs the whole pipeline: centroids -> stretch -> quantize -> fine-tune.
/// All intermediate stages are kept for inspection and export.
inline ShapedDesign build_shaped(int bits, int extra_bits, double energy) {
    if (bits < 1) throw std::domain_error("build_shaped: bits must be >= 1");
    if (extra_bits < 0) throw std::domain_error("build_shaped: extra bits must be >= 0");
    if (bits + extra_bits > 30) {
        throw std::domain_error("build_shaped: grid wider than 30 bits");
    }
    detail::check_energy(energy, "build_shaped");

    const int m_size = 1 << bits;
    Constellation x_c = centroid_constellation(m_size, energy);
    Constellation x_l = shift_scale(x_c, energy);
    QuantizedLevels q = quantize_levels(x_l, bits, extra_bits);
    const double delta = basic_level(q.levels, energy);

    std::vector<double> final_levels(q.levels.size());
    for (std::size_t i = 0; i < q.levels.size(); ++i) {
        final_levels[i] = static_cast<double>(q.levels[i]) * delta;
    }
    return ShapedDesign{
        .m_size = m_size,
        .bits = bits,
        .extra_bits = extra_bits,
        .energy = energy,
        .centroids = x_c.levels(),
        .stretched = x_l.levels(),
        .integer_levels = std::move(q.levels),
        .grid_step_raw = q.grid_step,
        .basic_level = delta,
        .constellation = Constellation(std::move(final_levels)),
    };
}

/// Standard uniformly spaced PAM with mean `energy`: levels i * 2E/(M-1).
inline Constellation pam(int m_size, double energy) {
    detail::check_m_size(m_size, "pam");
    detail::check_energy(energy, "pam");
    const double step = 2.0 * energy / (static_cast<double>(m_size) - 1.0);
    std::vector<double> levels(static_cast<std::size_t>(m_size));
    for (int i = 0; i < m_size; ++i) {
        levels[static_cast<std::size_t>(i)] = static_cast<double>(i) * step;
    }
    return Constellation(std::move(levels));
}

/// Peak-to-average power ratio: max level over mean level.
inline double papr(const Constellation& c) {
    if (!(c.mean() > 0.0)) {
        throw std::domain_error("papr: constellation mean must be > 0");
    }
    return c.max_level() / c.mean();
}

}  // namespace ois
