#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

namespace ois {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// log of the Gaussian density N(y; mean, sigma^2).
inline double log_gauss(double y, double mean, double sigma) {
    const double t = (y - mean) / sigma;
    return -0.5 * t * t - std::log(sigma) - 0.5 * std::log(kTwoPi);
}

/// log(sum_i exp(x_i)), stable against overflow/underflow.
/// Returns -inf for an empty span or when all entries are -inf.
inline double log_sum_exp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (!std::isfinite(a)) return a;
    return a + std::log1p(std::exp(b - a));
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_func(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/// Standard normal CDF.
inline double norm_cdf(double t) {
    return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

/// log of the standard normal CDF, usable far into the lower tail where
/// erfc underflows (switches to the asymptotic expansion below t = -30).
inline double log_norm_cdf(double t) {
    if (t >= -30.0) {
        return std::log(0.5 * std::erfc(-t / std::numbers::sqrt2));
    }
    const double t2 = t * t;
    // Phi(t) = phi(t)/|t| * (1 - 1/t^2 + 3/t^4 - 15/t^6 + O(t^-8))
    const double series = 1.0 - 1.0 / t2 + 3.0 / (t2 * t2) - 15.0 / (t2 * t2 * t2);
    return -0.5 * t2 - std::log(-t) - 0.5 * std::log(kTwoPi) + std::log(series);
}

/// Wilson score interval for a binomial proportion at confidence z
/// (default 95%). Returns {low, high}; exact zero successes give low = 0.
inline std::pair<double, double> wilson_interval(long successes, long trials,
                                                 double z = 1.959963984540054) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace ois
