// Command-line frontend: constellation design, shaping-gain sweeps,
// information-rate curves, and coded Monte-Carlo simulation.
//
// Exit codes: 0 success, 2 configuration problem, 3 numerical failure,
// 4 quantization collision.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ois/airate.hpp"
#include "ois/constellation.hpp"
#include "ois/errors.hpp"
#include "ois/io.hpp"
#include "ois/ldpc.hpp"
#include "ois/mapping.hpp"
#include "ois/parallel.hpp"
#include "ois/rng.hpp"
#include "ois/sim.hpp"
#include "ois/version.hpp"

namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("OIS_SHAPE_THREADS")) {
        unsigned value = 0;
        const std::string text(env);
        const auto res =
            std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec == std::errc{} && res.ptr == text.data() + text.size() &&
            value > 0) {
            return value;
        }
        std::cerr << "warning: ignoring invalid OIS_SHAPE_THREADS='" << text
                  << "'\n";
    }
    return ois::hardware_threads();
}

double parse_double_token(const std::string& token, const char* flag) {
    double value = 0.0;
    const auto res =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw ois::config_error("'" + token + "' is not a number", flag);
    }
    return value;
}

/// Inclusive sweep grid: "a:step:b" or a single value "x".
std::vector<double> parse_grid(const std::string& spec, const char* flag) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = spec.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, colon - start));
        start = colon + 1;
    }
    if (parts.size() == 1) {
        return {parse_double_token(parts[0], flag)};
    }
    if (parts.size() != 3) {
        throw ois::config_error("expected 'a:step:b' or a single value", flag);
    }
    const double a = parse_double_token(parts[0], flag);
    const double step = parse_double_token(parts[1], flag);
    const double b = parse_double_token(parts[2], flag);
    if (!(step > 0.0)) throw ois::config_error("step must be positive", flag);
    if (b < a) throw ois::config_error("end must not be below start", flag);
    const long count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count) + 1);
    for (long i = 0; i <= count; ++i) {
        grid.push_back(a + static_cast<double>(i) * step);
    }
    return grid;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ois::config_error("cannot open '" + path + "' for writing", "out");
    }
    out << content;
    if (!out) {
        throw ois::config_error("failed while writing '" + path + "'", "out");
    }
}

void write_manifest(const std::string& prefix, ois::RunManifest manifest) {
    const std::string path = prefix + ".manifest.json";
    manifest.outputs.push_back(path);
    write_file(path, ois::manifest_json(manifest).dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct GenArgs {
    int m_bits = 0;
    int extra_bits = 2;
    double energy = 1.0;
    std::string out;
};

int run_gen(const GenArgs& args) {
    const ois::ShapedDesign design =
        ois::build_shaped(args.m_bits, args.extra_bits, args.energy);

    std::cout << "M=" << design.m_size << " extra_bits=" << design.extra_bits
              << " energy=" << ois::format_double(design.energy) << '\n';
    std::cout << "ell";
    for (std::uint32_t level : design.integer_levels) std::cout << ' ' << level;
    std::cout << '\n';
    std::cout << "delta " << ois::format_double(design.basic_level) << '\n';

    if (!args.out.empty()) {
        const std::string csv_path = args.out + ".csv";
        const std::string json_path = args.out + ".json";
        write_file(csv_path, ois::design_csv(design));
        write_file(json_path, ois::design_json(design).dump(2) + "\n");

        ois::RunManifest manifest;
        manifest.subcommand = "gen";
        manifest.parameters = {{"m_bits", args.m_bits},
                               {"extra_bits", args.extra_bits},
                               {"energy", args.energy}};
        manifest.outputs = {csv_path, json_path};
        write_manifest(args.out, std::move(manifest));
    }
    return 0;
}

struct GainArgs {
    std::size_t m_min = 4;
    std::size_t m_max = 128;
    std::size_t step = 2;
    std::string out;
};

int run_gain(const GainArgs& args) {
    if (args.m_min < 2) throw ois::config_error("m-min must be >= 2", "m-min");
    if (args.step < 1) throw ois::config_error("step must be >= 1", "step");
    if (args.m_max < args.m_min) {
        throw ois::config_error("m-max must be >= m-min", "m-max");
    }
    std::vector<std::size_t> m_values;
    for (std::size_t m = args.m_min; m <= args.m_max; m += args.step) {
        m_values.push_back(m);
    }
    const std::string csv = ois::gain_csv(m_values);

    if (args.out.empty()) {
        std::cout << csv;
    } else {
        const std::string csv_path = args.out + ".csv";
        write_file(csv_path, csv);
        ois::RunManifest manifest;
        manifest.subcommand = "gain";
        manifest.parameters = {{"m_min", args.m_min},
                               {"m_max", args.m_max},
                               {"step", args.step}};
        manifest.outputs = {csv_path};
        write_manifest(args.out, std::move(manifest));
    }
    return 0;
}

struct AirArgs {
    int m_bits = 0;
    int extra_bits = 2;
    double energy = 1.0;
    std::string snr_spec;
    std::string which = "all";
    std::size_t mc_samples = 0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_air(const AirArgs& args) {
    const std::vector<double> grid = parse_grid(args.snr_spec, "snr-db");
    const bool want_pam = args.which == "pam" || args.which == "all";
    const bool want_shaped = args.which == "shaped" || args.which == "all";
    const bool want_exp = args.which == "exp" || args.which == "all";
    const bool want_bounds = args.which == "bounds" || args.which == "all";
    if (!want_pam && !want_shaped && !want_exp && !want_bounds) {
        throw ois::config_error(
            "must be one of pam|shaped|exp|bounds|all", "which");
    }

    const std::size_t m_size = std::size_t{1} << args.m_bits;
    std::optional<ois::Constellation> pam_levels;
    std::optional<ois::Constellation> shaped_levels;
    if (want_pam) pam_levels.emplace(ois::pam(m_size, args.energy));
    if (want_shaped) {
        shaped_levels.emplace(
            ois::build_shaped(args.m_bits, args.extra_bits, args.energy)
                .constellation);
    }

    std::vector<ois::RateCsvRow> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto& row = rows[i];
        row.snr_db = grid[i];
        const ois::ChannelParams channel =
            ois::ChannelParams::from_snr_db(args.energy, grid[i]);

        const auto guarded = [&](const char* column, auto&& compute) {
            try {
                compute();
            } catch (const ois::numerical_error& e) {
                std::cerr << "air: " << column << " at "
                          << ois::format_double(grid[i])
                          << " dB failed: " << e.what() << "; continuing\n";
            }
        };
        if (want_pam) {
            guarded("r_pam", [&] {
                row.r_pam =
                    args.mc_samples > 0
                        ? ois::mi_discrete_mc(*pam_levels, channel.sigma,
                                              args.mc_samples,
                                              ois::mix64(args.seed, 2 * i))
                              .rate_bits
                        : ois::mi_discrete(*pam_levels, channel.sigma);
            });
        }
        if (want_shaped) {
            guarded("r_shaped", [&] {
                row.r_shaped =
                    args.mc_samples > 0
                        ? ois::mi_discrete_mc(*shaped_levels, channel.sigma,
                                              args.mc_samples,
                                              ois::mix64(args.seed, 2 * i + 1))
                              .rate_bits
                        : ois::mi_discrete(*shaped_levels, channel.sigma);
            });
        }
        if (want_exp) {
            guarded("i_exp", [&] {
                row.i_exp = ois::air_exponential(args.energy, channel.sigma);
            });
        }
        if (want_bounds) {
            guarded("c_upper", [&] {
                row.c_upper = ois::capacity_upper(channel.snr);
            });
            guarded("c_asymptote", [&] {
                if (channel.snr > 0.0) {
                    row.c_asymptote = ois::capacity_asymptote(channel.snr);
                }
            });
        }
    }
    const std::string csv = ois::rate_csv(rows);

    if (args.out.empty()) {
        std::cout << csv;
    } else {
        const std::string csv_path = args.out + ".csv";
        write_file(csv_path, csv);
        ois::RunManifest manifest;
        manifest.subcommand = "air";
        manifest.parameters = {{"m_bits", args.m_bits},
                               {"extra_bits", args.extra_bits},
                               {"energy", args.energy},
                               {"snr_db", args.snr_spec},
                               {"which", args.which},
                               {"mc", args.mc_samples},
                               {"seed", args.seed}};
        manifest.outputs = {csv_path};
        write_manifest(args.out, std::move(manifest));
    }
    return 0;
}

struct SimArgs {
    std::string config_path;
    std::string out = "sim";
    bool dry_run = false;
    unsigned threads = 1;
};

int run_simulate(const SimArgs& args) {
    std::ifstream file(args.config_path);
    if (!file) {
        throw ois::config_error("cannot open '" + args.config_path + "'",
                                "config");
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(file);
    } catch (const nlohmann::json::parse_error& e) {
        throw ois::config_error(std::string("invalid JSON: ") + e.what(),
                                "config");
    }
    const ois::SimConfig cfg = ois::sim_config_from_json(parsed);
    const ois::SimContext ctx = ois::make_context(cfg);

    if (ctx.encoder.redundant_rows() > 0) {
        std::cerr << "warning: parity-check matrix has "
                  << ctx.encoder.redundant_rows()
                  << " redundant row(s); k = " << ctx.encoder.k() << '\n';
    }

    if (args.dry_run) {
        std::cout << "config ok\n"
                  << "levels " << ctx.constellation.size() << '\n'
                  << "code n " << ctx.encoder.n() << '\n'
                  << "code k " << ctx.encoder.k() << '\n'
                  << "symbols_per_block " << ctx.symbols_per_block << '\n'
                  << "snr_points " << cfg.snr_grid_db.size() << '\n'
                  << "code_hash " << ois::code_hash(ctx.parity_check()) << '\n';
        return 0;
    }

    std::vector<ois::ErrorStats> stats;
    stats.reserve(cfg.snr_grid_db.size());
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        stats.push_back(
            ois::run_point(ctx, cfg, cfg.snr_grid_db[i], i, args.threads));
        const auto& s = stats.back();
        std::cerr << "snr " << ois::format_double(s.snr_db) << " dB: blocks "
                  << s.blocks_run << ", bler " << ois::format_double(s.bler)
                  << '\n';
    }

    const std::string csv_path = args.out + ".csv";
    write_file(csv_path, ois::sim_csv(stats));

    ois::RunManifest manifest;
    manifest.subcommand = "simulate";
    manifest.parameters = {{"config", ois::sim_config_to_json(cfg)},
                           {"code_hash", ois::code_hash(ctx.parity_check())}};
    manifest.outputs = {csv_path};
    write_manifest(args.out, std::move(manifest));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shaped-constellation toolkit for intensity-modulated links"};
    app.set_version_flag("--version", std::string(ois::kVersion));
    app.require_subcommand(1);
    app.fallthrough();  // allow global options (e.g. --threads) after a subcommand

    unsigned threads = default_threads();
    app.add_option("--threads", threads,
                   "Worker threads (default: OIS_SHAPE_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    GenArgs gen;
    CLI::App* cmd_gen =
        app.add_subcommand("gen", "Design one shaped constellation");
    cmd_gen->add_option("--m-bits", gen.m_bits, "Bits per symbol (M = 2^b)")
        ->required()
        ->check(CLI::Range(1, 8));
    cmd_gen->add_option("--extra-bits", gen.extra_bits,
                        "DAC headroom bits beyond m-bits")
        ->capture_default_str()
        ->check(CLI::Range(0, 24));
    cmd_gen->add_option("--energy", gen.energy, "Mean intensity budget")
        ->capture_default_str();
    cmd_gen->add_option("--out", gen.out, "Output path prefix");

    GainArgs gain;
    CLI::App* cmd_gain =
        app.add_subcommand("gain", "Sweep the scaling gain over M");
    cmd_gain->add_option("--m-min", gain.m_min, "Smallest M")
        ->capture_default_str();
    cmd_gain->add_option("--m-max", gain.m_max, "Largest M")
        ->capture_default_str();
    cmd_gain->add_option("--step", gain.step, "M increment")
        ->capture_default_str();
    cmd_gain->add_option("--out", gain.out, "Output path prefix");

    AirArgs air;
    CLI::App* cmd_air =
        app.add_subcommand("air", "Information-rate curves over an SNR grid");
    cmd_air->add_option("--m-bits", air.m_bits, "Bits per symbol (M = 2^b)")
        ->required()
        ->check(CLI::Range(1, 8));
    cmd_air->add_option("--extra-bits", air.extra_bits,
                        "DAC headroom bits (shaped curve)")
        ->capture_default_str()
        ->check(CLI::Range(0, 24));
    cmd_air->add_option("--energy", air.energy, "Mean intensity budget")
        ->capture_default_str();
    cmd_air->add_option("--snr-db", air.snr_spec,
                        "Grid 'a:step:b' (inclusive) or one value")
        ->required();
    cmd_air->add_option("--which", air.which,
                        "Curves: pam|shaped|exp|bounds|all")
        ->capture_default_str();
    cmd_air->add_option("--mc", air.mc_samples,
                        "Monte-Carlo samples per point (0 = quadrature)")
        ->capture_default_str();
    cmd_air->add_option("--seed", air.seed, "Monte-Carlo seed")
        ->capture_default_str();
    cmd_air->add_option("--out", air.out, "Output path prefix");

    SimArgs sim;
    CLI::App* cmd_sim =
        app.add_subcommand("simulate", "Coded Monte-Carlo BER/BLER sweep");
    cmd_sim->add_option("--config", sim.config_path, "SimConfig JSON path")
        ->required();
    cmd_sim->add_option("--out", sim.out, "Output path prefix")
        ->capture_default_str();
    cmd_sim->add_flag("--dry-run", sim.dry_run,
                      "Validate the configuration and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_gain->parsed()) return run_gain(gain);
        if (cmd_air->parsed()) return run_air(air);
        if (cmd_sim->parsed()) {
            sim.threads = threads;
            return run_simulate(sim);
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ois::collision_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const ois::numerical_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
