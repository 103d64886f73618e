#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "ois/errors.hpp"

namespace ois {

/// Controls for the refining Simpson integrator below.
struct RefineOptions {
    long initial_intervals = 128;  // even, >= 2
    double min_step = 0.0;         // 0 = no resolution guard
    double rel_tolerance = 1e-8;   // relative to max(|estimate|, 1)
    long max_nodes = (1L << 27) + 1;
};

/// Integrates f over [lo, hi] with composite Simpson estimates on uniform
/// grids of doubling density (trapezoid refinement + Richardson step, which
/// reuses every evaluation). Stops when two successive Simpson estimates
/// agree to rel_tolerance; throws numerical_error if max_nodes is exceeded
/// first. min_step caps the initial spacing so that integrands with narrow
/// features (width ~ min_step) are resolved before convergence is judged.
template <class F>
double integrate_refining(F&& f, double lo, double hi, const RefineOptions& opt,
                          const char* what) {
    if (!(hi > lo)) return 0.0;
    const double range = hi - lo;

    long n = std::max<long>(2, opt.initial_intervals);
    if (opt.min_step > 0.0) {
        const double wanted = std::ceil(range / opt.min_step);
        if (wanted > static_cast<double>(n)) {
            n = static_cast<long>(std::min(wanted, 1e15));
        }
    }
    if (n % 2 != 0) ++n;
    if (n + 1 > opt.max_nodes) {
        throw numerical_error(std::string(what) +
                              ": initial grid already exceeds node budget (" +
                              std::to_string(n + 1) + " nodes)");
    }

    double h = range / static_cast<double>(n);
    double sum = 0.5 * (f(lo) + f(hi));
    for (long i = 1; i < n; ++i) sum += f(lo + h * static_cast<double>(i));
    double trap_prev = sum * h;
    long nodes = n + 1;

    double simpson_prev = 0.0;
    bool have_simpson = false;
    while (true) {
        // add midpoints of the current grid
        double mid_sum = 0.0;
        const double h2 = 0.5 * h;
        for (long i = 0; i < n; ++i) {
            mid_sum += f(lo + h * static_cast<double>(i) + h2);
        }
        const double trap = 0.5 * trap_prev + h2 * mid_sum;
        const double simpson = (4.0 * trap - trap_prev) / 3.0;
        nodes += n;

        if (have_simpson) {
            const double scale = std::max(std::abs(simpson), 1.0);
            if (std::abs(simpson - simpson_prev) <= opt.rel_tolerance * scale) {
                return simpson;
            }
        }
        if (nodes + 2 * n > opt.max_nodes) {
            throw numerical_error(
                std::string(what) + ": no convergence within " +
                std::to_string(nodes) + " nodes (last delta " +
                std::to_string(have_simpson ? std::abs(simpson - simpson_prev)
                                            : std::abs(simpson)) +
                ", tolerance " + std::to_string(opt.rel_tolerance) + ")");
        }
        simpson_prev = simpson;
        have_simpson = true;
        trap_prev = trap;
        n *= 2;
        h = h2;
    }
}

}  // namespace ois
