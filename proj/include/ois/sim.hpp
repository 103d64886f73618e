#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ois/constellation.hpp"
#include "ois/errors.hpp"
#include "ois/ldpc.hpp"
#include "ois/mapping.hpp"
#include "ois/numeric.hpp"
#include "ois/parallel.hpp"
#include "ois/rng.hpp"

namespace ois {

/// Which constellation family a simulation transmits.
enum class ConstellationKind { shaped, pam };

struct ConstellationSpec {
    ConstellationKind kind = ConstellationKind::shaped;
    int bits = 4;        // levels M = 2^bits
    int extra_bits = 2;  // DAC headroom bits (shaped only)
    double energy = 1.0;
};

/// Code source: an alist file on disk, or a seeded random regular ensemble.
struct CodeSpec {
    std::string alist_path;  // non-empty selects file ingestion
    std::size_t n = 4000;
    int dv = 3;
    int dc = 6;
    std::uint64_t seed = 1;
};

struct StoppingRule {
    std::uint64_t min_block_errors = 100;
    std::uint64_t max_blocks = 100000;
};

struct SimConfig {
    ConstellationSpec constellation;
    CodeSpec code;
    std::vector<double> snr_grid_db;
    StoppingRule stopping;
    std::uint64_t master_seed = 1;
    int max_iter = 50;
};

struct ErrorStats {
    double snr_db = 0.0;
    std::uint64_t blocks_run = 0;
    std::uint64_t bit_errors = 0;    // information-bit errors
    std::uint64_t block_errors = 0;  // blocks with any information-bit error
    double ber = 0.0;
    double bler = 0.0;
    double wilson_ci_low = 0.0;  // 95% score interval on the block error rate
    double wilson_ci_high = 1.0;
};

/// Blocks are simulated in fixed-size rounds; the stopping rule is evaluated
/// only on round boundaries, so the set of simulated blocks — and therefore
/// every statistic — is independent of how many threads execute a round.
inline constexpr std::size_t kBlocksPerRound = 32;

inline void validate(const SimConfig& cfg) {
    const auto& c = cfg.constellation;
    if (c.bits < 1 || c.bits > 8) {
        throw config_error("bits per symbol must be in [1, 8]", "constellation.bits");
    }
    if (c.extra_bits < 0 || c.extra_bits > 24) {
        throw config_error("extra bits must be in [0, 24]",
                           "constellation.extra_bits");
    }
    if (!(c.energy > 0.0) || !std::isfinite(c.energy)) {
        throw config_error("energy must be positive and finite",
                           "constellation.energy");
    }
    if (cfg.code.alist_path.empty()) {
        if (cfg.code.n == 0 || cfg.code.dv < 1 || cfg.code.dc < 1) {
            throw config_error("regular code needs positive n, dv, dc", "code");
        }
    }
    if (cfg.snr_grid_db.empty()) {
        throw config_error("at least one SNR point is required", "snr_grid_db");
    }
    for (std::size_t i = 0; i + 1 < cfg.snr_grid_db.size(); ++i) {
        if (!(cfg.snr_grid_db[i] < cfg.snr_grid_db[i + 1])) {
            throw config_error("grid must be strictly increasing", "snr_grid_db");
        }
    }
    for (double v : cfg.snr_grid_db) {
        if (!std::isfinite(v)) {
            throw config_error("grid values must be finite", "snr_grid_db");
        }
    }
    if (cfg.stopping.min_block_errors < 1) {
        throw config_error("min_block_errors must be >= 1",
                           "stopping.min_block_errors");
    }
    if (cfg.stopping.max_blocks < 1) {
        throw config_error("max_blocks must be >= 1", "stopping.max_blocks");
    }
    if (cfg.max_iter < 1) {
        throw config_error("max_iter must be >= 1", "max_iter");
    }
}

/// Everything derived from a SimConfig that is shared across SNR points:
/// constellation, labeling, code, and encoder. Immutable once built.
struct SimContext {
    Constellation constellation;
    Labeling labeling;
    Encoder encoder;
    int bits;
    std::size_t symbols_per_block;
    double energy;

    const ParityCheckMatrix& parity_check() const noexcept {
        return encoder.parity_check();
    }
};

inline SimContext make_context(const SimConfig& cfg) {
    validate(cfg);
    const auto& cs = cfg.constellation;

    Constellation constellation =
        cs.kind == ConstellationKind::shaped
            ? build_shaped(cs.bits, cs.extra_bits, cs.energy).constellation
            : pam(std::size_t{1} << cs.bits, cs.energy);
    Labeling labeling = gray_labeling(cs.bits);

    std::optional<ParityCheckMatrix> h;
    if (!cfg.code.alist_path.empty()) {
        std::ifstream file(cfg.code.alist_path);
        if (!file) {
            throw config_error("cannot open alist file '" + cfg.code.alist_path + "'",
                               "code.alist");
        }
        std::ostringstream text;
        text << file.rdbuf();
        h.emplace(parse_alist(text.str()));
    } else {
        h.emplace(random_regular_code(cfg.code.n, cfg.code.dv, cfg.code.dc,
                                      cfg.code.seed));
    }

    const std::size_t b = static_cast<std::size_t>(cs.bits);
    if (h->n() % b != 0) {
        throw config_error("code length " + std::to_string(h->n()) +
                               " is not divisible by " + std::to_string(b) +
                               " bits per symbol",
                           "code.n");
    }
    const std::size_t symbols = h->n() / b;

    return SimContext{std::move(constellation), std::move(labeling),
                      Encoder(std::move(*h)), cs.bits, symbols, cs.energy};
}

namespace detail {

struct BlockOutcome {
    std::uint32_t bit_errors = 0;
    std::uint8_t block_error = 0;
};

/// One complete coded block: info bits -> encode -> modulate -> noise ->
/// exact LLRs -> BP decode -> info-bit error count. Pure function of
/// (context, sigma, block_seed).
inline BlockOutcome run_block(const SimContext& ctx, Decoder& decoder,
                              double sigma, int max_iter,
                              std::uint64_t block_seed,
                              std::vector<std::uint8_t>& info,
                              std::vector<double>& llrs) {
    SplitMix64 bits_rng(mix64(block_seed, 0));
    NormalSampler noise(mix64(block_seed, 1));

    const Encoder& enc = ctx.encoder;
    info.resize(enc.k());
    for (auto& bit : info) bit = static_cast<std::uint8_t>(bits_rng.next_below(2));
    const std::vector<std::uint8_t> codeword = enc.encode(info);

    const int b = ctx.bits;
    llrs.clear();
    llrs.reserve(codeword.size());
    std::uint32_t code = 0;
    for (std::size_t s = 0; s < ctx.symbols_per_block; ++s) {
        code = 0;
        for (int k = 0; k < b; ++k) {
            code = (code << 1) | codeword[s * static_cast<std::size_t>(b) +
                                          static_cast<std::size_t>(k)];
        }
        const double x = ctx.constellation.level(ctx.labeling.index_of(code));
        const double y = x + sigma * noise.next();
        const auto symbol_llrs = bit_llrs(y, ctx.constellation, ctx.labeling, sigma);
        llrs.insert(llrs.end(), symbol_llrs.begin(), symbol_llrs.end());
    }

    const DecodeResult decoded = decoder.decode(llrs, max_iter);

    BlockOutcome outcome;
    const auto& positions = enc.info_positions();
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (decoded.bits[positions[j]] != info[j]) ++outcome.bit_errors;
    }
    outcome.block_error = outcome.bit_errors > 0 ? 1 : 0;
    return outcome;
}

inline ErrorStats run_point_impl(const SimContext& ctx, const StoppingRule& stopping,
                                 int max_iter, double snr_db,
                                 std::uint64_t point_seed, unsigned threads) {
    const ChannelParams channel = ChannelParams::from_snr_db(ctx.energy, snr_db);
    const unsigned t_count = std::max(1u, threads);

    std::vector<Decoder> decoders;
    decoders.reserve(t_count);
    for (unsigned t = 0; t < t_count; ++t) decoders.emplace_back(ctx.parity_check());
    std::vector<std::vector<std::uint8_t>> info_buf(t_count);
    std::vector<std::vector<double>> llr_buf(t_count);

    ErrorStats stats;
    stats.snr_db = snr_db;

    std::vector<BlockOutcome> outcomes(kBlocksPerRound);
    while (stats.blocks_run < stopping.max_blocks &&
           stats.block_errors < stopping.min_block_errors) {
        const std::size_t round = static_cast<std::size_t>(
            std::min<std::uint64_t>(kBlocksPerRound,
                                    stopping.max_blocks - stats.blocks_run));
        const std::uint64_t base = stats.blocks_run;
        parallel_for(round, t_count, [&](std::size_t i, unsigned tid) {
            outcomes[i] = run_block(ctx, decoders[tid], channel.sigma, max_iter,
                                    mix64(point_seed, base + i), info_buf[tid],
                                    llr_buf[tid]);
        });
        for (std::size_t i = 0; i < round; ++i) {
            stats.bit_errors += outcomes[i].bit_errors;
            stats.block_errors += outcomes[i].block_error;
        }
        stats.blocks_run += round;
    }

    const double blocks = static_cast<double>(stats.blocks_run);
    const double info_bits = static_cast<double>(ctx.encoder.k()) * blocks;
    stats.ber = static_cast<double>(stats.bit_errors) / info_bits;
    stats.bler = static_cast<double>(stats.block_errors) / blocks;
    const auto ci = wilson_interval(static_cast<long>(stats.block_errors),
                                    static_cast<long>(stats.blocks_run));
    stats.wilson_ci_low = ci.first;
    stats.wilson_ci_high = ci.second;
    return stats;
}

}  // namespace detail

/// Simulates one SNR point of an already-built context. `point_index` selects
/// the deterministic per-point seed stream mix64(master_seed, point_index).
inline ErrorStats run_point(const SimContext& ctx, const SimConfig& cfg,
                            double snr_db, std::uint64_t point_index = 0,
                            unsigned threads = 1) {
    return detail::run_point_impl(ctx, cfg.stopping, cfg.max_iter, snr_db,
                                  mix64(cfg.master_seed, point_index), threads);
}

/// Convenience single-point entry: builds the context and runs point 0.
inline ErrorStats run_point(const SimConfig& cfg, double snr_db,
                            unsigned threads = 1) {
    const SimContext ctx = make_context(cfg);
    return run_point(ctx, cfg, snr_db, 0, threads);
}

/// Runs every grid point. Point i uses seed mix64(master_seed, i), so results
/// do not depend on evaluation order and any point can be reproduced alone.
inline std::vector<ErrorStats> sweep(const SimConfig& cfg, unsigned threads = 1) {
    const SimContext ctx = make_context(cfg);
    std::vector<ErrorStats> results;
    results.reserve(cfg.snr_grid_db.size());
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        results.push_back(run_point(ctx, cfg, cfg.snr_grid_db[i], i, threads));
    }
    return results;
}

/// Monte-Carlo symbol error rate of uncoded nearest-level detection with
/// uniform symbols. Fast sanity baseline against the Q-function union bound.
inline double uncoded_ser(const Constellation& c, double snr_db,
                          std::size_t n_symbols, std::uint64_t seed) {
    if (n_symbols == 0) {
        throw std::invalid_argument("uncoded_ser: n_symbols must be positive");
    }
    const ChannelParams channel = ChannelParams::from_snr_db(c.mean(), snr_db);
    SplitMix64 index_rng(mix64(seed, 0));
    NormalSampler noise(mix64(seed, 1));

    std::size_t errors = 0;
    for (std::size_t s = 0; s < n_symbols; ++s) {
        const std::size_t i = static_cast<std::size_t>(index_rng.next_below(c.size()));
        const double y = c.levels()[i] + channel.sigma * noise.next();
        if (hard_demap(y, c) != i) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(n_symbols);
}

}  // namespace ois
