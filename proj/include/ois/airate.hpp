#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ois/constellation.hpp"
#include "ois/errors.hpp"
#include "ois/numeric.hpp"
#include "ois/quadrature.hpp"
#include "ois/rng.hpp"

namespace ois {

enum class RateMethod { quadrature, monte_carlo, closed_form };

/// One point of an information-rate curve.
struct RatePoint {
    double snr_db;
    double rate_bits;
    RateMethod method;
    std::optional<double> mc_std_error;  // set for monte_carlo points only
};

/// Knobs of the deterministic rate integrals.
struct QuadratureConfig {
    int node_count = 129;       // initial Simpson nodes; must be odd, >= 3
    double tail_sigmas = 10.0;  // integration reach beyond the outer levels
    double rel_tolerance = 1e-8;
};

namespace detail {

inline void check_quadrature_config(const QuadratureConfig& cfg) {
    if (cfg.node_count < 3 || cfg.node_count % 2 == 0) {
        throw std::domain_error("QuadratureConfig: node_count must be odd and >= 3");
    }
    if (!(cfg.tail_sigmas > 0.0)) {
        throw std::domain_error("QuadratureConfig: tail_sigmas must be > 0");
    }
    if (!(cfg.rel_tolerance > 0.0)) {
        throw std::domain_error("QuadratureConfig: rel_tolerance must be > 0");
    }
}

inline RefineOptions refine_options(const QuadratureConfig& cfg, double sigma) {
    RefineOptions opt;
    opt.initial_intervals = cfg.node_count - 1;
    opt.rel_tolerance = cfg.rel_tolerance;
    // Resolve the noise width from the start; otherwise an initial grid much
    // coarser than sigma can straddle every likelihood bump and "converge"
    // to the wrong value.
    opt.min_step = 0.5 * sigma;
    return opt;
}

}  // namespace detail

/// Mutual information in bits of a uniformly used discrete intensity
/// constellation over additive Gaussian noise,
///   I(X;Y) = (1/M) sum_i INT N(y; a_i, s^2) log2[ N(y; a_i, s^2) / p(y) ] dy,
/// p(y) = (1/M) sum_j N(y; a_j, s^2). Each summand is integrated on its own
/// noise-resolved interval [a_i - tail*s, a_i + tail*s]; outside it the
/// Gaussian factor is below 1e-22, so the sum equals the single-interval
/// integral to far beyond the requested tolerance while the node count stays
/// bounded at any SNR.
inline double mi_discrete(const Constellation& c, double sigma,
                          const QuadratureConfig& cfg = {}) {
    if (!(sigma > 0.0)) throw std::domain_error("mi_discrete: sigma must be > 0");
    detail::check_quadrature_config(cfg);

    const auto& a = c.levels();
    const std::size_t m_size = a.size();
    const double log_m = std::log(static_cast<double>(m_size));
    std::vector<double> log_like(m_size);

    const RefineOptions opt = detail::refine_options(cfg, sigma);
    double nats = 0.0;
    for (std::size_t i = 0; i < m_size; ++i) {
        auto integrand = [&](double y) {
            for (std::size_t j = 0; j < m_size; ++j) {
                log_like[j] = log_gauss(y, a[j], sigma);
            }
            const double log_py = log_sum_exp(log_like) - log_m;
            const double li = log_like[i];
            return std::exp(li) * (li - log_py);
        };
        nats += integrate_refining(integrand, a[i] - cfg.tail_sigmas * sigma,
                                   a[i] + cfg.tail_sigmas * sigma, opt,
                                   "discrete-input rate term");
    }
    const double bits = nats / (static_cast<double>(m_size) * kLn2);
    // Absorb quadrature jitter at the information-theoretic range edges.
    return std::clamp(bits, 0.0, std::log2(static_cast<double>(m_size)));
}

struct McRate {
    double rate_bits;
    double std_error;
};

/// Monte-Carlo estimate of the same mutual information:
///   (1/N) sum_n log2( p(y_n | x_n) / p(y_n) ),
/// x_n uniform over the levels, y_n = x_n + sigma * z_n. Deterministic for a
/// given seed. Serves as the independent cross-check of mi_discrete.
inline McRate mi_discrete_mc(const Constellation& c, double sigma,
                             std::uint64_t sample_count, std::uint64_t seed) {
    if (!(sigma > 0.0)) throw std::domain_error("mi_discrete_mc: sigma must be > 0");
    if (sample_count < 10000) {
        throw std::domain_error("mi_discrete_mc: need at least 1e4 samples");
    }
    const auto& a = c.levels();
    const std::size_t m_size = a.size();
    const double log_m = std::log(static_cast<double>(m_size));
    std::vector<double> log_like(m_size);

    NormalSampler noise(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t n = 0; n < sample_count; ++n) {
        const std::size_t i =
            static_cast<std::size_t>(noise.stream().next_below(m_size));
        const double y = a[i] + sigma * noise.next();
        for (std::size_t j = 0; j < m_size; ++j) {
            log_like[j] = log_gauss(y, a[j], sigma);
        }
        const double log_py = log_sum_exp(log_like) - log_m;
        const double v = (log_like[i] - log_py) / kLn2;
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(sample_count);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return McRate{mean, std::sqrt(var / n)};
}

/// Log density of the channel output when the input is exponential with mean
/// `energy`: p(y) = (1/E) exp(s^2/(2 E^2) - y/E) Phi(y/s - s/E). Evaluated
/// in the log domain; the Gaussian-tail factor keeps the exponential
/// prefactor finite for y far below zero.
inline double log_output_pdf_exponential(double y, double energy, double sigma) {
    if (!(energy > 0.0)) throw std::domain_error("output pdf: energy must be > 0");
    if (!(sigma > 0.0)) throw std::domain_error("output pdf: sigma must be > 0");
    const double ratio = sigma / energy;
    return -std::log(energy) + 0.5 * ratio * ratio - y / energy +
           log_norm_cdf(y / sigma - ratio);
}

inline double output_pdf_exponential(double y, double energy, double sigma) {
    return std::exp(log_output_pdf_exponential(y, energy, sigma));
}

/// Achievable rate of the exponential input: h(Y) - h(Z) with
/// h(Z) = (1/2) log2(2 pi e s^2) and h(Y) integrated numerically. The upper
/// limit grows geometrically until the output density drops below 1e-15.
inline double air_exponential(double energy, double sigma,
                              const QuadratureConfig& cfg = {}) {
    if (!(energy > 0.0)) throw std::domain_error("air_exponential: energy must be > 0");
    if (!(sigma > 0.0)) throw std::domain_error("air_exponential: sigma must be > 0");
    detail::check_quadrature_config(cfg);

    const double log_floor = std::log(1e-15);
    double hi = std::max(energy, cfg.tail_sigmas * sigma);
    int doublings = 0;
    while (log_output_pdf_exponential(hi, energy, sigma) >= log_floor) {
        hi *= 2.0;
        if (++doublings > 120) {
            throw numerical_error("air_exponential: output density tail does not decay");
        }
    }
    const double lo = -cfg.tail_sigmas * sigma;

    auto integrand = [&](double y) {
        const double lp = log_output_pdf_exponential(y, energy, sigma);
        if (lp < -700.0) return 0.0;  // exp would underflow; p log p -> 0
        return -std::exp(lp) * lp;
    };
    const RefineOptions opt = detail::refine_options(cfg, sigma);
    const double h_y =
        integrate_refining(integrand, lo, hi, opt, "output entropy integral") / kLn2;
    const double h_z = 0.5 * std::log2(kTwoPi * std::exp(1.0) * sigma * sigma);
    return std::max(0.0, h_y - h_z);
}

/// Capacity upper bound of the intensity channel at linear optical SNR:
/// (1/2) log2( (e / 2 pi) (snr + 2)^2 ).
inline double capacity_upper(double snr) {
    if (!(snr >= 0.0)) throw std::domain_error("capacity_upper: snr must be >= 0");
    return 0.5 * std::log2(std::exp(1.0) / kTwoPi * (snr + 2.0) * (snr + 2.0));
}

/// High-SNR asymptote shared by the exponential-input rate and the upper
/// bound: (1/2) log2( (e / 2 pi) snr^2 ).
inline double capacity_asymptote(double snr) {
    if (!(snr > 0.0)) throw std::domain_error("capacity_asymptote: snr must be > 0");
    return 0.5 * std::log2(std::exp(1.0) / kTwoPi * snr * snr);
}

/// Inverse reading of a rate curve: the SNR (dB) at which the piecewise-
/// linear curve through `points` reaches `target_rate`. Points must be
/// strictly increasing in snr_db with nondecreasing rates; a target outside
/// the covered rate range is a range error.
inline double snr_at_rate(std::span<const RatePoint> points, double target_rate) {
    if (points.size() < 2) {
        throw std::domain_error("snr_at_rate: need at least two points");
    }
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (!(points[k].snr_db > points[k - 1].snr_db)) {
            throw std::domain_error("snr_at_rate: snr_db must be strictly increasing");
        }
        if (points[k].rate_bits < points[k - 1].rate_bits) {
            throw std::domain_error("snr_at_rate: rates must be nondecreasing");
        }
    }
    if (target_rate < points.front().rate_bits ||
        target_rate > points.back().rate_bits) {
        throw std::out_of_range("snr_at_rate: target rate outside curve range");
    }
    if (target_rate == points.front().rate_bits) return points.front().snr_db;
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (points[k].rate_bits >= target_rate) {
            const auto& lo = points[k - 1];
            const auto& hi = points[k];
            const double f = (target_rate - lo.rate_bits) /
                             (hi.rate_bits - lo.rate_bits);
            return lo.snr_db + f * (hi.snr_db - lo.snr_db);
        }
    }
    throw std::out_of_range("snr_at_rate: target rate outside curve range");
}

/// Horizontal gap between two rate curves at a common rate: how many dB less
/// SNR curve B needs than curve A. Positive when B is the better curve.
inline double snr_gain_db(std::span<const RatePoint> curve_a,
                          std::span<const RatePoint> curve_b, double rate) {
    return snr_at_rate(curve_a, rate) - snr_at_rate(curve_b, rate);
}

/// One exported row of a rate sweep (see the CSV schema in io.hpp).
struct RateSweepRow {
    double snr_db;
    double r_pam;
    double r_shaped;
    double i_exp;
    double c_upper;
    double c_asymptote;
};

/// Rate curves of the shaped design and its uniform competitor of the same
/// order, plus the exponential-input rate and the capacity bounds, on an SNR
/// grid in dB. Deterministic; rows depend only on their own grid point.
inline std::vector<RateSweepRow> rate_sweep(int bits, int extra_bits, double energy,
                                            std::span<const double> snr_db_grid,
                                            const QuadratureConfig& cfg = {}) {
    const ShapedDesign design = build_shaped(bits, extra_bits, energy);
    const Constellation uniform = pam(design.m_size, energy);
    std::vector<RateSweepRow> rows(snr_db_grid.size());
    for (std::size_t k = 0; k < snr_db_grid.size(); ++k) {
        const double snr_db = snr_db_grid[k];
        const double snr = std::pow(10.0, snr_db / 10.0);
        const double sigma = energy / snr;
        rows[k] = RateSweepRow{
            .snr_db = snr_db,
            .r_pam = mi_discrete(uniform, sigma, cfg),
            .r_shaped = mi_discrete(design.constellation, sigma, cfg),
            .i_exp = air_exponential(energy, sigma, cfg),
            .c_upper = capacity_upper(snr),
            .c_asymptote = capacity_asymptote(snr),
        };
    }
    return rows;
}

}  // namespace ois
