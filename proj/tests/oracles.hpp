#pragma once

// Test-side numerical oracles, deliberately independent of the library's
// refinement-based integrator so the two cannot share a bug.

#include <cmath>
#include <functional>

namespace test_oracles {

inline double simpson_slice(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m));
    const double frm = f(0.5 * (m + b));
    const double left = simpson_slice(a, m, fa, flm, fm);
    const double right = simpson_slice(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Recursive adaptive Simpson quadrature of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return adaptive_simpson_rec(f, a, b, fa, fm, fb,
                                simpson_slice(a, b, fa, fm, fb), tol, 60);
}

/// Conditional mean of the exponential density with mean `energy` over
/// [lo, hi] by direct integration (hi may be a finite truncation of +inf).
inline double conditional_mean(double lo, double hi, double energy) {
    auto pdf = [energy](double x) { return std::exp(-x / energy) / energy; };
    auto xpdf = [pdf](double x) { return x * pdf(x); };
    const double num = adaptive_simpson(xpdf, lo, hi, 1e-14);
    const double den = adaptive_simpson(pdf, lo, hi, 1e-14);
    return num / den;
}

/// Distribution function of (exponential mean-energy input) + N(0, sigma^2)
/// noise, in closed form; used as the Kolmogorov-Smirnov reference.
inline double exp_plus_gauss_cdf(double y, double energy, double sigma) {
    auto phi = [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); };
    const double ratio = sigma / energy;
    return phi(y / sigma) -
           std::exp(0.5 * ratio * ratio - y / energy) * phi(y / sigma - ratio);
}

}  // namespace test_oracles
