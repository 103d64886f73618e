#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ois/constellation.hpp"
#include "ois/errors.hpp"
#include "oracles.hpp"

using test_oracles::conditional_mean;

TEST_CASE("quantiles split the exponential distribution evenly", "[constellation]") {
    for (int m_size : {2, 4, 8, 16, 64, 256}) {
        for (double energy : {0.1, 1.0, 10.0}) {
            CHECK(ois::quantile(m_size, 0, energy) == 0.0);
            CHECK(std::isinf(ois::quantile(m_size, m_size, energy)));
            for (int m = 1; m < m_size; ++m) {
                const double q = ois::quantile(m_size, m, energy);
                // Non-circular check: the distribution function evaluated at
                // the m-th quantile must give mass m/M.
                const double mass = 1.0 - std::exp(-q / energy);
                CHECK_THAT(mass, Catch::Matchers::WithinAbs(
                                     static_cast<double>(m) / m_size, 1e-14));
                CHECK(q > ois::quantile(m_size, m - 1, energy));
            }
        }
    }
    CHECK_THAT(ois::quantile(4, 1, 1.0),
               Catch::Matchers::WithinAbs(std::log(4.0 / 3.0), 1e-15));
}

TEST_CASE("quantile rejects bad arguments", "[constellation]") {
    CHECK_THROWS_AS(ois::quantile(1, 0, 1.0), std::domain_error);
    CHECK_THROWS_AS(ois::quantile(4, -1, 1.0), std::domain_error);
    CHECK_THROWS_AS(ois::quantile(4, 5, 1.0), std::domain_error);
    CHECK_THROWS_AS(ois::quantile(4, 1, 0.0), std::domain_error);
    CHECK_THROWS_AS(ois::quantile(4, 1, -2.0), std::domain_error);
}

TEST_CASE("centroids match the integration oracle", "[constellation]") {
    for (int m_size : {4, 16, 64}) {
        for (double energy : {0.7, 1.0, 3.2}) {
            for (int m = 0; m < m_size; ++m) {
                const double lo = ois::quantile(m_size, m, energy);
                // Truncate the unbounded top interval far into the tail;
                // exp(-60) leaves no mass at double precision.
                const double hi = (m == m_size - 1)
                                      ? lo + 60.0 * energy
                                      : ois::quantile(m_size, m + 1, energy);
                const double oracle = conditional_mean(lo, hi, energy);
                CHECK_THAT(ois::centroid(m_size, m, energy),
                           Catch::Matchers::WithinAbs(oracle, 1e-9));
            }
        }
    }
}

TEST_CASE("centroids sit strictly inside their intervals", "[constellation]") {
    for (int m_size : {2, 8, 32, 256}) {
        for (int m = 0; m + 1 < m_size; ++m) {
            const double c = ois::centroid(m_size, m, 1.0);
            CHECK(c > ois::quantile(m_size, m, 1.0));
            CHECK(c < ois::quantile(m_size, m + 1, 1.0));
        }
        CHECK(ois::centroid(m_size, m_size - 1, 1.0) >
              ois::quantile(m_size, m_size - 1, 1.0));
    }
}

TEST_CASE("centroid spot values", "[constellation]") {
    // Frozen from the integration oracle above (M=4, unit energy).
    CHECK_THAT(ois::centroid(4, 0, 1.0),
               Catch::Matchers::WithinAbs(0.136953782645, 1e-11));
    CHECK_THAT(ois::centroid(4, 1, 1.0),
               Catch::Matchers::WithinAbs(0.476751856235, 1e-11));
    CHECK_THAT(ois::centroid(4, 2, 1.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(ois::centroid(4, 3, 1.0),
               Catch::Matchers::WithinAbs(std::log(4.0) + 1.0, 1e-12));
    // Scale equivariance: centroids are proportional to the energy.
    CHECK_THAT(ois::centroid(16, 5, 2.5),
               Catch::Matchers::WithinAbs(2.5 * ois::centroid(16, 5, 1.0), 1e-12));
}

TEST_CASE("smallest centroid decays like half the first interval", "[constellation]") {
    // c_0 * (M-1) / E -> 1/2 as M grows.
    const double scaled = ois::centroid(256, 0, 1.0) * 255.0;
    CHECK_THAT(scaled, Catch::Matchers::WithinAbs(0.5, 0.005));
}

TEST_CASE("centroid constellation preserves mean and peak ratio", "[constellation]") {
    for (int m_size : {4, 8, 16, 32, 64, 128, 256}) {
        for (double energy : {0.1, 1.0, 10.0}) {
            const auto x_c = ois::centroid_constellation(m_size, energy);
            REQUIRE(x_c.size() == static_cast<std::size_t>(m_size));
            CHECK_THAT(x_c.mean(),
                       Catch::Matchers::WithinAbs(energy, 1e-12 * energy));
            CHECK_THAT(ois::papr(x_c),
                       Catch::Matchers::WithinAbs(1.0 + std::log(m_size), 1e-12));
        }
    }
}

TEST_CASE("shift and scale keeps the mean and zeroes the floor", "[constellation]") {
    for (int m_size : {4, 8, 16, 32, 64, 128, 256}) {
        for (double energy : {0.1, 1.0, 10.0}) {
            const auto x_c = ois::centroid_constellation(m_size, energy);
            const auto x_l = ois::shift_scale(x_c, energy);
            CHECK(x_l.min_level() == 0.0);
            CHECK_THAT(x_l.mean(),
                       Catch::Matchers::WithinAbs(energy, 1e-12 * energy));
            // Peak ratio after the stretch: 1 + g(M) ln M.
            const double g = std::pow(10.0, ois::scaling_gain_db(m_size) / 10.0);
            CHECK_THAT(ois::papr(x_l),
                       Catch::Matchers::WithinAbs(1.0 + g * std::log(m_size), 1e-12));
        }
    }
}

TEST_CASE("shift and scale spot values", "[constellation]") {
    const auto x_l = ois::shift_scale(ois::centroid_constellation(4, 1.0), 1.0);
    // Frozen from the closed forms; the third level is exactly 1 because the
    // M=4 centroid at index 2 equals the mean.
    CHECK(x_l.levels()[0] == 0.0);
    CHECK_THAT(x_l.levels()[1], Catch::Matchers::WithinAbs(0.393719440231, 1e-11));
    CHECK_THAT(x_l.levels()[2], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(x_l.levels()[3], Catch::Matchers::WithinAbs(2.606280559769, 1e-11));
}

TEST_CASE("shift and scale rejects a mean mismatch", "[constellation]") {
    const auto x_c = ois::centroid_constellation(4, 1.0);
    CHECK_THROWS_AS(ois::shift_scale(x_c, 2.0), std::domain_error);
}

TEST_CASE("stretch gain values and their first-order approximation", "[constellation]") {
    // Frozen closed-form values, quoted elsewhere rounded to 0.29/0.14/0.07.
    CHECK_THAT(ois::scaling_gain_db(8),
               Catch::Matchers::WithinAbs(0.293185816194, 1e-11));
    CHECK_THAT(ois::scaling_gain_db(16),
               Catch::Matchers::WithinAbs(0.140897313662, 1e-11));
    CHECK_THAT(ois::scaling_gain_db(32),
               Catch::Matchers::WithinAbs(0.069123820931, 1e-11));
    CHECK_THAT(ois::scaling_gain_db(8), Catch::Matchers::WithinAbs(0.29, 0.005));
    CHECK_THAT(ois::scaling_gain_db(16), Catch::Matchers::WithinAbs(0.14, 0.005));
    CHECK_THAT(ois::scaling_gain_db(32), Catch::Matchers::WithinAbs(0.07, 0.005));
    for (int m_size = 8; m_size <= 128; m_size *= 2) {
        const double exact = ois::scaling_gain_db(m_size);
        const double approx = ois::approx_gain_db(m_size);
        CHECK(std::abs(exact - approx) / exact < 0.10);
    }
    // The gain shrinks monotonically with the constellation order.
    CHECK(ois::scaling_gain_db(8) > ois::scaling_gain_db(16));
    CHECK(ois::scaling_gain_db(16) > ois::scaling_gain_db(32));
}

TEST_CASE("quantization reproduces the reference designs", "[constellation]") {
    const std::vector<std::vector<std::uint32_t>> expected = {
        {0, 2, 6, 15},
        {0, 1, 3, 5, 8, 11, 17, 31},
        {0, 1, 2, 4, 5, 7, 8, 10, 12, 15, 17, 21, 25, 31, 40, 63},
        {0,  1,  2,  3,  4,  5,  6,  7,  8,  10, 11,  12, 14, 15, 17, 18,
         20, 22, 24, 26, 29, 31, 34, 37, 41, 45, 50, 56, 63, 73, 87, 127},
    };
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const int bits = static_cast<int>(i) + 2;
        const auto design = ois::build_shaped(bits, 2, 1.0);
        CHECK(design.integer_levels == expected[i]);
        // Top level always hits the last grid point.
        CHECK(design.integer_levels.back() ==
              (std::uint32_t{1} << (bits + 2)) - 1);
    }
}

TEST_CASE("quantized design restores the exact mean", "[constellation]") {
    for (double energy : {0.1, 1.0, 10.0}) {
        for (int bits = 2; bits <= 8; ++bits) {
            // Designs wider than 5 bits need a finer grid; with two padding
            // bits their dense low ends collide.
            const int extra = (bits <= 5) ? 2 : 3;
            const auto design = ois::build_shaped(bits, extra, energy);
            CHECK_THAT(design.constellation.mean(),
                       Catch::Matchers::WithinAbs(energy, 1e-12 * energy));
            CHECK(design.constellation.min_level() == 0.0);
        }
    }
}

TEST_CASE("basic level ties integer levels back to the energy budget", "[constellation]") {
    // Sum of the 4-level reference design is 23, so delta = 4 E / 23.
    const std::vector<std::uint32_t> levels = {0, 2, 6, 15};
    CHECK_THAT(ois::basic_level(levels, 1.0),
               Catch::Matchers::WithinAbs(4.0 / 23.0, 1e-15));
    CHECK_THAT(ois::basic_level(levels, 2.5),
               Catch::Matchers::WithinAbs(10.0 / 23.0, 1e-15));
    const std::vector<std::uint32_t> zeros = {0, 0, 0};
    CHECK_THROWS_AS(ois::basic_level(zeros, 1.0), std::domain_error);
}

TEST_CASE("quantization collisions are reported with their indices", "[constellation]") {
    // Two nearly equal low levels forced onto a 4-point grid must land on
    // the same point.
    const ois::Constellation doomed({0.0, 0.04, 2.0, 3.0});
    try {
        ois::quantize_levels(doomed, 2, 0);
        FAIL("expected collision_error");
    } catch (const ois::collision_error& e) {
        CHECK(e.index_a() == 0);
        CHECK(e.index_b() == 1);
    }
    // Dense designs (6 bits and up) genuinely collide on two-bit padded grids.
    CHECK_THROWS_AS(ois::build_shaped(6, 2, 1.0), ois::collision_error);
    CHECK_THROWS_AS(ois::build_shaped(7, 2, 1.0), ois::collision_error);
    CHECK_THROWS_AS(ois::build_shaped(8, 2, 1.0), ois::collision_error);
}

TEST_CASE("quantize rejects mismatched sizes and bad widths", "[constellation]") {
    const auto x_l = ois::shift_scale(ois::centroid_constellation(8, 1.0), 1.0);
    CHECK_THROWS_AS(ois::quantize_levels(x_l, 2, 2), std::domain_error);
    CHECK_THROWS_AS(ois::quantize_levels(x_l, 0, 2), std::domain_error);
    CHECK_THROWS_AS(ois::quantize_levels(x_l, 3, -1), std::domain_error);
    CHECK_THROWS_AS(ois::quantize_levels(x_l, 3, 28), std::domain_error);
}

TEST_CASE("full design pipeline spot check", "[constellation]") {
    const auto design = ois::build_shaped(2, 2, 1.0);
    CHECK(design.m_size == 4);
    CHECK(design.bits == 2);
    CHECK(design.extra_bits == 2);
    CHECK_THAT(design.basic_level, Catch::Matchers::WithinAbs(4.0 / 23.0, 1e-15));
    CHECK_THAT(design.grid_step_raw,
               Catch::Matchers::WithinAbs(2.606280559769 / 15.0, 1e-11));
    const auto& lv = design.constellation.levels();
    REQUIRE(lv.size() == 4);
    CHECK_THAT(lv[1], Catch::Matchers::WithinAbs(8.0 / 23.0, 1e-14));
    CHECK_THAT(lv[2], Catch::Matchers::WithinAbs(24.0 / 23.0, 1e-14));
    CHECK_THAT(lv[3], Catch::Matchers::WithinAbs(60.0 / 23.0, 1e-14));
    // Rebuilding yields bit-identical output: the pipeline is pure.
    const auto again = ois::build_shaped(2, 2, 1.0);
    CHECK(again.constellation.levels() == design.constellation.levels());
    CHECK(again.integer_levels == design.integer_levels);
}

TEST_CASE("uniform intensity grid has mean energy and peak ratio two", "[constellation]") {
    for (int m_size : {2, 4, 8, 16, 64}) {
        for (double energy : {0.5, 1.0, 4.0}) {
            const auto x = ois::pam(m_size, energy);
            REQUIRE(x.size() == static_cast<std::size_t>(m_size));
            CHECK(x.min_level() == 0.0);
            CHECK_THAT(x.mean(), Catch::Matchers::WithinAbs(energy, 1e-12 * energy));
            CHECK_THAT(ois::papr(x), Catch::Matchers::WithinAbs(2.0, 1e-12));
            const double step = 2.0 * energy / (m_size - 1);
            for (int i = 0; i + 1 < m_size; ++i) {
                CHECK_THAT(x.levels()[i + 1] - x.levels()[i],
                           Catch::Matchers::WithinAbs(step, 1e-12 * energy));
            }
        }
    }
}

TEST_CASE("constellation constructor validates its levels", "[constellation]") {
    CHECK_THROWS_AS(ois::Constellation({}), std::invalid_argument);
    CHECK_THROWS_AS(ois::Constellation({-0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ois::Constellation({0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ois::Constellation({0.0, 2.0, 1.0}), std::invalid_argument);
    const ois::Constellation ok({0.0, 1.0, 3.0});
    CHECK(ok.size() == 3);
    CHECK_THAT(ok.mean(), Catch::Matchers::WithinAbs(4.0 / 3.0, 1e-15));
}

TEST_CASE("channel parameters express the intensity ratio", "[constellation]") {
    const ois::ChannelParams p(2.0, 0.5);
    CHECK_THAT(p.snr, Catch::Matchers::WithinAbs(4.0, 1e-15));
    CHECK_THAT(p.snr_db, Catch::Matchers::WithinAbs(10.0 * std::log10(4.0), 1e-12));
    const auto q = ois::ChannelParams::from_snr_db(1.0, 20.0);
    CHECK_THAT(q.sigma, Catch::Matchers::WithinAbs(0.01, 1e-15));
    CHECK_THAT(q.snr_db, Catch::Matchers::WithinAbs(20.0, 1e-12));
    CHECK_THROWS_AS(ois::ChannelParams(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(ois::ChannelParams(1.0, -1.0), std::domain_error);
}
