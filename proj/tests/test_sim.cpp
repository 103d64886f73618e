#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ois/constellation.hpp"
#include "ois/errors.hpp"
#include "ois/numeric.hpp"
#include "ois/rng.hpp"
#include "ois/sim.hpp"

using namespace ois;

namespace {

// Union of per-boundary Q-function terms for nearest-level detection of
// equiprobable levels: the exact SER for one interior boundary per side.
double ser_analytic(const Constellation& c, double sigma) {
    const auto& a = c.levels();
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i > 0) total += q_func((a[i] - a[i - 1]) / (2.0 * sigma));
        if (i + 1 < a.size()) total += q_func((a[i + 1] - a[i]) / (2.0 * sigma));
    }
    return total / static_cast<double>(a.size());
}

SimConfig small_config() {
    SimConfig cfg;
    cfg.constellation = {ConstellationKind::shaped, 2, 2, 1.0};
    cfg.code = {"", 120, 3, 6, 7};
    cfg.snr_grid_db = {6.0};
    cfg.stopping = {100, 128};
    cfg.master_seed = 99;
    cfg.max_iter = 50;
    return cfg;
}

bool stats_equal(const ErrorStats& a, const ErrorStats& b) {
    return a.snr_db == b.snr_db && a.blocks_run == b.blocks_run &&
           a.bit_errors == b.bit_errors && a.block_errors == b.block_errors &&
           a.ber == b.ber && a.bler == b.bler &&
           a.wilson_ci_low == b.wilson_ci_low &&
           a.wilson_ci_high == b.wilson_ci_high;
}

struct TempAlist {
    std::filesystem::path path;
    explicit TempAlist(const std::string& text) {
        path = std::filesystem::temp_directory_path() /
               ("ois_sim_test_" + std::to_string(::getpid()) + ".alist");
        std::ofstream out(path);
        out << text;
    }
    ~TempAlist() { std::filesystem::remove(path); }
};

const char* kToyAlist =
    "6 3\n"
    "2 3\n"
    "2 2 2 1 1 1\n"
    "3 3 3\n"
    "1 3\n"
    "1 2\n"
    "2 3\n"
    "1\n"
    "2\n"
    "3\n"
    "1 2 4\n"
    "2 3 5\n"
    "1 3 6\n";

}  // namespace

TEST_CASE("uncoded binary detection matches the single-threshold formula",
          "[sim]") {
    const Constellation c({0.0, 2.0});  // mean 1, so sigma = 1/snr
    const double snr_db = 6.0;
    const double sigma = 1.0 / std::pow(10.0, snr_db / 10.0);

    const double exact = q_func(1.0 / sigma);
    const std::size_t n = 200000;
    const double mc = uncoded_ser(c, snr_db, n, 2026);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
    CHECK(std::abs(mc - exact) < 3.0 * se);
    CHECK(exact == Catch::Approx(ser_analytic(c, sigma)).epsilon(1e-12));
}

TEST_CASE("uncoded PAM-4 matches the nearest-boundary oracle", "[sim]") {
    const Constellation c = pam(4, 1.0);
    const double snr_db = 9.0;
    const double sigma = 1.0 / std::pow(10.0, snr_db / 10.0);

    const double exact = ser_analytic(c, sigma);
    const std::size_t n = 400000;
    const double mc = uncoded_ser(c, snr_db, n, 31);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
    CHECK(std::abs(mc - exact) < 3.0 * se);

    // The uniform-spacing closed form agrees with the generic oracle.
    const double spacing = 2.0 / 3.0;
    const double closed =
        2.0 * 3.0 / 4.0 * q_func(spacing / (2.0 * sigma));
    CHECK(exact == Catch::Approx(closed).epsilon(1e-12));
}

TEST_CASE("uncoded shaped-8 detection matches the oracle", "[sim]") {
    const ShapedDesign design = build_shaped(3, 2, 1.0);
    const Constellation& c = design.constellation;
    const double snr_db = 12.0;
    const double sigma = 1.0 / std::pow(10.0, snr_db / 10.0);

    const double exact = ser_analytic(c, sigma);
    const std::size_t n = 400000;
    const double mc = uncoded_ser(c, snr_db, n, 47);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
    CHECK(std::abs(mc - exact) < 3.0 * se);
    CHECK(exact > 1e-3);  // the point actually exercises errors
}

TEST_CASE("uncoded detection is error-free at extreme snr", "[sim]") {
    const ShapedDesign design = build_shaped(2, 2, 1.0);
    CHECK(uncoded_ser(design.constellation, 60.0, 50000, 3) == 0.0);
}

TEST_CASE("generated noise has the right first two moments", "[sim]") {
    const double sigma = 0.7;
    NormalSampler noise(561);
    const std::size_t n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sigma * noise.next();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum_sq / static_cast<double>(n) - mean * mean;
    CHECK(std::abs(mean) < 0.01 * sigma);
    CHECK(std::abs(var - sigma * sigma) < 0.01 * sigma * sigma);
}

TEST_CASE("a noiseless point reports zero errors over max_blocks", "[sim]") {
    SimConfig cfg = small_config();
    cfg.stopping = {100, 64};
    const ErrorStats stats = run_point(cfg, 60.0);

    CHECK(stats.snr_db == 60.0);
    CHECK(stats.blocks_run == 64);  // never reaches min_block_errors
    CHECK(stats.bit_errors == 0);
    CHECK(stats.block_errors == 0);
    CHECK(stats.ber == 0.0);
    CHECK(stats.bler == 0.0);
    CHECK(stats.wilson_ci_low == 0.0);
    CHECK(stats.wilson_ci_high > 0.0);  // one-sided interval at zero errors
    CHECK(stats.wilson_ci_high < 0.1);
}

TEST_CASE("far below capacity every block errs", "[sim]") {
    SimConfig cfg = small_config();
    cfg.max_iter = 10;  // keep the hopeless decoding cheap
    const ErrorStats stats = run_point(cfg, -20.0);

    CHECK(stats.bler == 1.0);
    // min_block_errors = 100 is crossed at the fourth round boundary.
    CHECK(stats.blocks_run == 128);
    CHECK(stats.block_errors == 128);
    CHECK(stats.bit_errors >= stats.block_errors);
    CHECK(stats.wilson_ci_low > 0.9);
}

TEST_CASE("statistics are a pure function of config and seed", "[sim]") {
    SimConfig cfg = small_config();
    cfg.snr_grid_db = {4.0};
    cfg.stopping = {20, 96};

    const ErrorStats a = run_point(cfg, 4.0);
    const ErrorStats b = run_point(cfg, 4.0);
    CHECK(stats_equal(a, b));

    // Different master seed changes the sample path (counts differ with
    // overwhelming probability at an SNR with plenty of errors).
    SimConfig other = cfg;
    other.master_seed = 100;
    const ErrorStats c = run_point(other, 4.0);
    CHECK((a.bit_errors != c.bit_errors || a.blocks_run != c.blocks_run));
}

TEST_CASE("thread count does not change any statistic", "[sim]") {
    SimConfig cfg = small_config();
    cfg.stopping = {30, 96};
    const SimContext ctx = make_context(cfg);

    const ErrorStats serial = run_point(ctx, cfg, 4.0, 0, 1);
    const ErrorStats two = run_point(ctx, cfg, 4.0, 0, 2);
    const ErrorStats four = run_point(ctx, cfg, 4.0, 0, 4);
    CHECK(stats_equal(serial, two));
    CHECK(stats_equal(serial, four));
}

TEST_CASE("sweep points can be reproduced individually", "[sim]") {
    SimConfig cfg = small_config();
    cfg.snr_grid_db = {3.0, 5.0, 7.0};
    cfg.stopping = {20, 64};

    const std::vector<ErrorStats> all = sweep(cfg);
    REQUIRE(all.size() == 3);

    const SimContext ctx = make_context(cfg);
    // Middle point alone, out of order, with a different thread count.
    const ErrorStats middle = run_point(ctx, cfg, 5.0, 1, 3);
    CHECK(stats_equal(all[1], middle));

    // A single-point grid behaves exactly like run_point.
    SimConfig single = cfg;
    single.snr_grid_db = {3.0};
    const std::vector<ErrorStats> one = sweep(single);
    REQUIRE(one.size() == 1);
    CHECK(stats_equal(one[0], run_point(single, 3.0)));
}

TEST_CASE("block accounting is conserved", "[sim]") {
    SimConfig cfg = small_config();
    cfg.stopping = {25, 96};
    const SimContext ctx = make_context(cfg);
    const ErrorStats stats = run_point(ctx, cfg, 4.5, 0, 1);

    const std::uint64_t info_bits =
        static_cast<std::uint64_t>(ctx.encoder.k()) * stats.blocks_run;
    CHECK(stats.block_errors <= stats.blocks_run);
    CHECK(stats.bit_errors <= info_bits);
    CHECK(stats.bit_errors >= stats.block_errors);
    CHECK(stats.ber ==
          static_cast<double>(stats.bit_errors) / static_cast<double>(info_bits));
    CHECK(stats.bler == static_cast<double>(stats.block_errors) /
                            static_cast<double>(stats.blocks_run));
    // Rounds are 32 blocks; the total is a multiple unless capped.
    CHECK((stats.blocks_run % kBlocksPerRound == 0 ||
           stats.blocks_run == cfg.stopping.max_blocks));
}

TEST_CASE("coded error rates fall with snr", "[sim]") {
    SimConfig cfg;
    cfg.constellation = {ConstellationKind::shaped, 2, 2, 1.0};
    cfg.code = {"", 256, 3, 6, 13};
    cfg.snr_grid_db = {-1.0, 3.0, 7.0};
    cfg.stopping = {40, 256};
    cfg.master_seed = 5;

    const std::vector<ErrorStats> stats = sweep(cfg);
    REQUIRE(stats.size() == 3);

    // Waterfall: saturated failure at the bottom, near-clean at the top.
    CHECK(stats[0].bler > 0.9);
    CHECK(stats[2].bler < 0.2);
    // Monotone within confidence-interval overlap (never significantly up).
    for (std::size_t i = 0; i + 1 < stats.size(); ++i) {
        CHECK(stats[i + 1].wilson_ci_low <= stats[i].wilson_ci_high);
    }
    // BER never exceeds BLER (an errored block has at least one bad bit but
    // never more bad bits than the block holds).
    for (const auto& s : stats) {
        CHECK(s.ber <= s.bler + 1e-12);
    }
}

TEST_CASE("simulation accepts a code from an alist file", "[sim]") {
    const TempAlist file(kToyAlist);
    SimConfig cfg;
    cfg.constellation = {ConstellationKind::pam, 2, 2, 1.0};
    cfg.code.alist_path = file.path.string();
    cfg.snr_grid_db = {20.0};
    cfg.stopping = {10, 32};
    cfg.master_seed = 17;

    const SimContext ctx = make_context(cfg);
    CHECK(ctx.encoder.n() == 6);
    CHECK(ctx.encoder.k() == 3);
    CHECK(ctx.symbols_per_block == 3);

    const ErrorStats stats = run_point(ctx, cfg, 20.0, 0, 1);
    CHECK(stats.blocks_run == 32);
    CHECK(stats.bler == 0.0);
}

TEST_CASE("configuration problems are rejected before any block runs",
          "[sim]") {
    const auto field_of = [](const SimConfig& cfg) -> std::string {
        try {
            (void)make_context(cfg);
        } catch (const config_error& e) {
            return e.field();
        }
        return "";
    };

    SimConfig cfg = small_config();
    cfg.constellation.bits = 0;
    CHECK(field_of(cfg) == "constellation.bits");

    cfg = small_config();
    cfg.constellation.energy = -1.0;
    CHECK(field_of(cfg) == "constellation.energy");

    cfg = small_config();
    cfg.snr_grid_db = {};
    CHECK(field_of(cfg) == "snr_grid_db");

    cfg = small_config();
    cfg.snr_grid_db = {5.0, 5.0};
    CHECK(field_of(cfg) == "snr_grid_db");

    cfg = small_config();
    cfg.snr_grid_db = {5.0, 4.0};
    CHECK(field_of(cfg) == "snr_grid_db");

    cfg = small_config();
    cfg.stopping.min_block_errors = 0;
    CHECK(field_of(cfg) == "stopping.min_block_errors");

    cfg = small_config();
    cfg.stopping.max_blocks = 0;
    CHECK(field_of(cfg) == "stopping.max_blocks");

    cfg = small_config();
    cfg.max_iter = 0;
    CHECK(field_of(cfg) == "max_iter");

    cfg = small_config();
    cfg.code.alist_path = "/nonexistent/path/to/code.alist";
    CHECK(field_of(cfg) == "code.alist");

    // Code length 6 does not divide into 4-bit symbols.
    const TempAlist file(kToyAlist);
    cfg = small_config();
    cfg.code.alist_path = file.path.string();
    cfg.constellation.bits = 4;
    CHECK(field_of(cfg) == "code.n");
}
