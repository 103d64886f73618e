#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <system_error>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "ois/airate.hpp"
#include "ois/constellation.hpp"
#include "ois/errors.hpp"
#include "ois/ldpc.hpp"
#include "ois/mapping.hpp"
#include "ois/rng.hpp"
#include "ois/sim.hpp"
#include "ois/version.hpp"

namespace ois {

/// Shortest round-trip decimal representation, locale-independent.
inline std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc{}) {
        throw numerical_error("failed to format a floating-point value");
    }
    return std::string(buf, res.ptr);
}

/// Stage-by-stage design table: quantile, centroid, stretched level, integer
/// level, and final intensity for every symbol index.
inline std::string design_csv(const ShapedDesign& design) {
    std::string out = "m,q_m,c_m,l_m,ell_m,level\n";
    const std::size_t m_size = design.m_size;
    for (std::size_t m = 0; m < m_size; ++m) {
        out += std::to_string(m);
        out += ',';
        out += format_double(quantile(m_size, m, design.energy));
        out += ',';
        out += format_double(design.centroids[m]);
        out += ',';
        out += format_double(design.stretched[m]);
        out += ',';
        out += std::to_string(design.integer_levels[m]);
        out += ',';
        out += format_double(design.constellation.levels()[m]);
        out += '\n';
    }
    return out;
}

/// Rate-curve table. Cells hold "nan" for points whose computation failed
/// or was not requested.
struct RateCsvRow {
    double snr_db = 0.0;
    double r_pam = std::numeric_limits<double>::quiet_NaN();
    double r_shaped = std::numeric_limits<double>::quiet_NaN();
    double i_exp = std::numeric_limits<double>::quiet_NaN();
    double c_upper = std::numeric_limits<double>::quiet_NaN();
    double c_asymptote = std::numeric_limits<double>::quiet_NaN();
};

inline std::string rate_csv(std::span<const RateCsvRow> rows) {
    std::string out = "snr_db,r_pam,r_shaped,i_exp,c_upper,c_asymptote\n";
    for (const auto& row : rows) {
        out += format_double(row.snr_db);
        out += ',';
        out += format_double(row.r_pam);
        out += ',';
        out += format_double(row.r_shaped);
        out += ',';
        out += format_double(row.i_exp);
        out += ',';
        out += format_double(row.c_upper);
        out += ',';
        out += format_double(row.c_asymptote);
        out += '\n';
    }
    return out;
}

inline std::string gain_csv(std::span<const std::size_t> m_values) {
    std::string out = "m,gain_db,approx_gain_db\n";
    for (std::size_t m : m_values) {
        out += std::to_string(m);
        out += ',';
        out += format_double(scaling_gain_db(m));
        out += ',';
        out += format_double(approx_gain_db(m));
        out += '\n';
    }
    return out;
}

inline std::string sim_csv(std::span<const ErrorStats> stats) {
    std::string out = "snr_db,blocks,bit_errors,block_errors,ber,bler,ci_low,ci_high\n";
    for (const auto& s : stats) {
        out += format_double(s.snr_db);
        out += ',';
        out += std::to_string(s.blocks_run);
        out += ',';
        out += std::to_string(s.bit_errors);
        out += ',';
        out += std::to_string(s.block_errors);
        out += ',';
        out += format_double(s.ber);
        out += ',';
        out += format_double(s.bler);
        out += ',';
        out += format_double(s.wilson_ci_low);
        out += ',';
        out += format_double(s.wilson_ci_high);
        out += '\n';
    }
    return out;
}

/// Labeling as bit strings by ascending level index.
inline nlohmann::json labeling_json(const Labeling& labeling) {
    nlohmann::json codes = nlohmann::json::array();
    for (std::size_t i = 0; i < labeling.size(); ++i) {
        std::string code(static_cast<std::size_t>(labeling.bits()), '0');
        for (int k = 0; k < labeling.bits(); ++k) {
            code[static_cast<std::size_t>(k)] =
                labeling.bit_of(i, k) ? '1' : '0';
        }
        codes.push_back(code);
    }
    return nlohmann::json{{"bits", labeling.bits()}, {"codes", codes}};
}

/// Machine-readable design payload, including the Gray labeling dump.
inline nlohmann::json design_json(const ShapedDesign& design) {
    return nlohmann::json{
        {"m", static_cast<std::size_t>(design.m_size)},
        {"m_bits", design.bits},
        {"extra_bits", design.extra_bits},
        {"energy", design.energy},
        {"grid_step", design.grid_step_raw},
        {"basic_level", design.basic_level},
        {"integer_levels", design.integer_levels},
        {"levels", design.constellation.levels()},
        {"labeling", labeling_json(gray_labeling(design.bits))},
    };
}

/// Order-sensitive 64-bit digest of a parity-check matrix's supports.
inline std::string code_hash(const ParityCheckMatrix& h) {
    std::uint64_t acc = mix64(h.n(), h.m_rows());
    for (const auto& row : h.row_supports()) {
        for (std::uint32_t c : row) acc = mix64(acc, c);
        acc = mix64(acc, 0xffffffffffffffffull);
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) {
        buf[15 - i] = digits[(acc >> (4 * i)) & 0xf];
    }
    buf[16] = '\0';
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// SimConfig <-> JSON
// ---------------------------------------------------------------------------

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const std::string& key,
                                           const std::string& path) {
    if (!j.contains(key)) {
        throw config_error("missing required field", path);
    }
    return j.at(key);
}

inline double get_double(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) {
        throw config_error("expected a number", path);
    }
    return j.get<double>();
}

template <typename T>
T get_integer(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        throw config_error("expected an integer", path);
    }
    if constexpr (std::is_unsigned_v<T>) {
        if (!j.is_number_unsigned() && j.get<long long>() < 0) {
            throw config_error("must be non-negative", path);
        }
    }
    return j.get<T>();
}

}  // namespace detail

/// Parses the canonical simulate configuration. All errors are config_errors
/// whose field() is the dotted path of the offending entry.
inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("configuration must be a JSON object");
    SimConfig cfg;

    const auto& cs = detail::require_field(j, "constellation", "constellation");
    if (!cs.is_object()) throw config_error("expected an object", "constellation");
    {
        const auto& kind =
            detail::require_field(cs, "kind", "constellation.kind");
        if (!kind.is_string() ||
            (kind.get<std::string>() != "shaped" && kind.get<std::string>() != "pam")) {
            throw config_error("must be \"shaped\" or \"pam\"", "constellation.kind");
        }
        cfg.constellation.kind = kind.get<std::string>() == "shaped"
                                     ? ConstellationKind::shaped
                                     : ConstellationKind::pam;

        const auto& m = detail::require_field(cs, "m", "constellation.m");
        const auto m_value = detail::get_integer<long>(m, "constellation.m");
        if (m_value < 2 || (m_value & (m_value - 1)) != 0 || m_value > 256) {
            throw config_error("must be a power of two in [2, 256]",
                               "constellation.m");
        }
        int bits = 0;
        while ((1L << bits) < m_value) ++bits;
        cfg.constellation.bits = bits;

        if (cs.contains("extra_bits")) {
            cfg.constellation.extra_bits = detail::get_integer<int>(
                cs.at("extra_bits"), "constellation.extra_bits");
        }
        if (cs.contains("energy")) {
            cfg.constellation.energy = detail::get_double(
                cs.at("energy"), "constellation.energy");
        }
    }

    const auto& code = detail::require_field(j, "code", "code");
    if (!code.is_object()) throw config_error("expected an object", "code");
    if (code.contains("alist") == code.contains("regular")) {
        throw config_error("exactly one of \"alist\" or \"regular\" is required",
                           "code");
    }
    if (code.contains("alist")) {
        const auto& alist = code.at("alist");
        if (!alist.is_string() || alist.get<std::string>().empty()) {
            throw config_error("expected a non-empty path string", "code.alist");
        }
        cfg.code.alist_path = alist.get<std::string>();
    } else {
        const auto& reg = code.at("regular");
        if (!reg.is_object()) throw config_error("expected an object", "code.regular");
        cfg.code.alist_path.clear();
        cfg.code.n = detail::get_integer<std::size_t>(
            detail::require_field(reg, "n", "code.regular.n"), "code.regular.n");
        cfg.code.dv = detail::get_integer<int>(
            detail::require_field(reg, "dv", "code.regular.dv"), "code.regular.dv");
        cfg.code.dc = detail::get_integer<int>(
            detail::require_field(reg, "dc", "code.regular.dc"), "code.regular.dc");
        if (reg.contains("seed")) {
            cfg.code.seed = detail::get_integer<std::uint64_t>(reg.at("seed"),
                                                               "code.regular.seed");
        }
    }

    const auto& grid = detail::require_field(j, "snr_grid_db", "snr_grid_db");
    if (!grid.is_array() || grid.empty()) {
        throw config_error("expected a non-empty array", "snr_grid_db");
    }
    cfg.snr_grid_db.clear();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cfg.snr_grid_db.push_back(detail::get_double(
            grid.at(i), "snr_grid_db[" + std::to_string(i) + "]"));
    }

    if (j.contains("stopping")) {
        const auto& stop = j.at("stopping");
        if (!stop.is_object()) throw config_error("expected an object", "stopping");
        if (stop.contains("min_block_errors")) {
            cfg.stopping.min_block_errors = detail::get_integer<std::uint64_t>(
                stop.at("min_block_errors"), "stopping.min_block_errors");
        }
        if (stop.contains("max_blocks")) {
            cfg.stopping.max_blocks = detail::get_integer<std::uint64_t>(
                stop.at("max_blocks"), "stopping.max_blocks");
        }
    }
    if (j.contains("master_seed")) {
        cfg.master_seed =
            detail::get_integer<std::uint64_t>(j.at("master_seed"), "master_seed");
    }
    if (j.contains("max_iter")) {
        cfg.max_iter = detail::get_integer<int>(j.at("max_iter"), "max_iter");
    }

    validate(cfg);  // range/monotonicity checks with their own field paths
    return cfg;
}

/// Canonical JSON form of a configuration; parsing it back is the identity.
inline nlohmann::json sim_config_to_json(const SimConfig& cfg) {
    nlohmann::json code;
    if (!cfg.code.alist_path.empty()) {
        code = nlohmann::json{{"alist", cfg.code.alist_path}};
    } else {
        code = nlohmann::json{{"regular",
                               {{"n", cfg.code.n},
                                {"dv", cfg.code.dv},
                                {"dc", cfg.code.dc},
                                {"seed", cfg.code.seed}}}};
    }
    return nlohmann::json{
        {"constellation",
         {{"kind",
           cfg.constellation.kind == ConstellationKind::shaped ? "shaped" : "pam"},
          {"m", std::size_t{1} << cfg.constellation.bits},
          {"extra_bits", cfg.constellation.extra_bits},
          {"energy", cfg.constellation.energy}}},
        {"code", code},
        {"snr_grid_db", cfg.snr_grid_db},
        {"stopping",
         {{"min_block_errors", cfg.stopping.min_block_errors},
          {"max_blocks", cfg.stopping.max_blocks}}},
        {"master_seed", cfg.master_seed},
        {"max_iter", cfg.max_iter},
    };
}

/// Reproducibility record written next to every file-producing run. Contains
/// no timestamps and no thread counts: a manifest re-run must be
/// byte-identical for deterministic subcommands.
struct RunManifest {
    std::string subcommand;
    nlohmann::json parameters;
    std::vector<std::string> outputs;
    std::string version = kVersion;
};

inline nlohmann::json manifest_json(const RunManifest& manifest) {
    return nlohmann::json{
        {"subcommand", manifest.subcommand},
        {"parameters", manifest.parameters},
        {"outputs", manifest.outputs},
        {"version", manifest.version},
    };
}

}  // namespace ois
