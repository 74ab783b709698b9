// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "mmbeam/codebook.hpp"
#include "mmbeam/errors.hpp"

namespace mmbeam {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string iso_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json config_json(const CliConfig &cli) {
    const SimConfig &c = cli.base;
    return {
        {"subcommand", cli.subcommand},
        {"n_a", c.n_a},
        {"m_a", c.m_a},
        {"n_r", c.n_r},
        {"m_r", c.m_r},
        {"l", c.l},
        {"m", c.m},
        {"n_s_values", cli.n_s_values},
        {"k_values", cli.k_values},
        {"i_ly_values", cli.i_ly_values},
        {"snr_db_grid", c.snr_db_grid},
        {"trials", c.trials},
        {"master_seed", c.master_seed},
        {"noiseless_estimation", c.noiseless_estimation},
        {"training_snr_db", c.training_snr_db},
        {"threads", cli.threads},
        {"antenna_grid", cli.antenna_grid},
        {"codebook_n", cli.codebook_n},
        {"pattern_points", cli.pattern_points},
    };
}

void write_file(const std::filesystem::path &path, const std::string &contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out.good())
        throw std::runtime_error("failed writing " + path.string());
}

void write_manifest(const CliConfig &cli, const std::string &name,
                    const std::vector<std::filesystem::path> &outputs,
                    const std::string &started_at, double duration_s) {
    nlohmann::json manifest = {
        {"config", config_json(cli)},
        {"version", kVersion},
        {"started_at", started_at},
        {"duration_seconds", duration_s},
        {"output_paths", nlohmann::json::array()},
    };
    for (const auto &p : outputs)
        manifest["output_paths"].push_back(p.string());
    write_file(std::filesystem::path(cli.out_dir) / (name + "_manifest.json"),
               manifest.dump(2) + "\n");
}

int run_codebook(const CliConfig &cli) {
    const Codebook cb = build_codebook(cli.codebook_n, cli.base.m, cli.k_values.front());
    const int oversample_csv_layer = static_cast<int>(cb.depth) + 1;

    std::ostringstream words;
    words << "layer,position,antenna_index,re,im\n";
    const auto dump_word = [&](const Codeword &w) {
        const int layer = w.layer == kOversampleLayer ? oversample_csv_layer : w.layer;
        for (std::size_t i = 0; i < w.weights.size(); ++i)
            words << layer << ',' << w.position << ',' << i << ','
                  << format_double(w.weights[i].real()) << ','
                  << format_double(w.weights[i].imag()) << '\n';
    };
    for (const auto &layer : cb.layers)
        for (const auto &w : layer)
            dump_word(w);
    for (const auto &w : cb.oversample_layer)
        dump_word(w);

    std::ostringstream patterns;
    patterns << "layer,position,omega,gain\n";
    const auto dump_pattern = [&](const Codeword &w) {
        const int layer = w.layer == kOversampleLayer ? oversample_csv_layer : w.layer;
        for (std::size_t i = 0; i < cli.pattern_points; ++i) {
            const double omega = -1.0 + 2.0 * static_cast<double>(i) /
                                            static_cast<double>(cli.pattern_points - 1);
            patterns << layer << ',' << w.position << ',' << format_double(omega) << ','
                     << format_double(beam_gain(w, omega)) << '\n';
        }
    };
    for (const auto &layer : cb.layers)
        for (const auto &w : layer)
            dump_pattern(w);
    for (const auto &w : cb.oversample_layer)
        dump_pattern(w);

    const auto dir = std::filesystem::path(cli.out_dir);
    write_file(dir / "codebook_codewords.csv", words.str());
    write_file(dir / "codebook_patterns.csv", patterns.str());
    return 0;
}

int run_demo(const CliConfig &cli) {
    SimConfig cfg = cli.base;
    cfg.n_s = cli.n_s_values.front();
    cfg.k = cli.k_values.front();
    cfg.i_ly = cli.i_ly_values.front();
    const auto problems = validate(cfg);
    if (!problems.empty())
        throw ValidationError("demo configuration invalid: " + problems.front());

    const Codebook cb_bs = build_codebook(cfg.n_a, cfg.m, cfg.k);
    const Codebook cb_ms = build_codebook(cfg.m_a, cfg.m, cfg.k);
    Rng rng = Rng::from_stream(cfg.master_seed, 0, 0);
    const ChannelRealization h = generate_channel(cfg.n_a, cfg.m_a, cfg.l, rng);
    const double power = std::pow(10.0, cfg.snr_db_grid.front() / 10.0);

    std::cout << "demo: N_A=" << cfg.n_a << " M_A=" << cfg.m_a << " L=" << cfg.l
              << " N_S=" << cfg.n_s << " K=" << cfg.k << " i_LY=" << cfg.i_ly
              << " SNR=" << format_double(cfg.snr_db_grid.front()) << " dB seed="
              << cfg.master_seed << "\n";
    std::cout << "true paths (aod_cos, aoa_cos, |gain|):\n";
    for (const auto &p : h.paths)
        std::cout << "  " << format_double(p.aod_cos) << ", " << format_double(p.aoa_cos)
                  << ", " << format_double(std::abs(p.gain)) << "\n";

    SearchTrace trace;
    const BeamSearchResult result =
        hierarchical_search(h, cb_bs, cb_ms, cfg.n_s, cfg.i_ly, power, rng, false, &trace);

    int last_path = 0;
    for (const auto &step : trace) {
        if (step.path_index != last_path) {
            last_path = step.path_index;
            std::cout << "--- searching path " << step.path_index << " ---\n";
        }
        std::cout << step.stage << " (layer "
                  << (step.layer == kOversampleLayer ? std::string("oversample")
                                                     : std::to_string(step.layer))
                  << "):";
        for (std::size_t i = 0; i < step.magnitudes.size(); ++i)
            std::cout << " (" << step.ms_positions[i] << "," << step.bs_positions[i]
                      << ")=" << format_double(step.magnitudes[i]);
        std::cout << " -> winner (" << step.winner_ms << "," << step.winner_bs << ")\n";
    }

    std::cout << "result pairs:";
    for (std::size_t i = 0; i < result.pairs.size(); ++i)
        std::cout << " (" << result.pairs[i].first << "," << result.pairs[i].second
                  << ") beta=" << format_double(std::abs(result.gains[i]));
    std::cout << "\nmeasurements used: " << result.measurements_used << "\n";
    std::cout << "search success: "
              << (success_decision(result, h, cfg.k, cfg.n_s) ? "yes" : "no") << "\n";
    return 0;
}

int run_search_success(const CliConfig &cli, std::vector<std::filesystem::path> &outputs) {
    std::vector<SuccessRow> rows;
    for (const SimConfig &cfg : expand_configs(cli)) {
        std::cerr << "search-success: n_s=" << cfg.n_s << " k=" << cfg.k
                  << " i_ly=" << cfg.i_ly << " trials=" << cfg.trials << "\n";
        const auto part = run_success_sweep(cfg, cli.threads);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto path = std::filesystem::path(cli.out_dir) / "search_success.csv";
    write_file(path, success_csv(rows));
    outputs.push_back(path);
    return 0;
}

int run_rate(const CliConfig &cli, std::vector<std::filesystem::path> &outputs) {
    std::vector<RateRow> rows;
    for (const SimConfig &cfg : expand_configs(cli)) {
        std::cerr << "rate: n_s=" << cfg.n_s << " k=" << cfg.k << " i_ly=" << cfg.i_ly
                  << " trials=" << cfg.trials << "\n";
        const auto part = run_rate_sweep(cfg, cli.threads);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto path = std::filesystem::path(cli.out_dir) / "rate.csv";
    write_file(path, rate_csv(rows));
    outputs.push_back(path);
    return 0;
}

int run_timeslots(const CliConfig &cli, std::vector<std::filesystem::path> &outputs) {
    std::ostringstream out;
    out << "n_antennas,t_hs,t_ss,t_sp\n";
    for (std::size_t n : cli.antenna_grid) {
        SimConfig cfg = cli.base;
        cfg.n_a = n;
        cfg.m_a = n;
        cfg.n_s = cli.n_s_values.front();
        cfg.k = cli.k_values.front();
        cfg.i_ly = cli.i_ly_values.front();
        out << n << ',' << time_cost_hierarchical(cfg) << ',' << time_cost_sequential(cfg) << ','
            << format_double(time_cost_sparse(cfg)) << '\n';
    }
    const auto path = std::filesystem::path(cli.out_dir) / "timeslots.csv";
    write_file(path, out.str());
    outputs.push_back(path);
    return 0;
}

} // namespace

CliConfig parse_config(const std::vector<std::string> &args) {
    CliConfig cli;
    SimConfig &cfg = cli.base;
    bool noisy_estimation = false;

    CLI::App app{"mmWave hybrid beamforming simulator"};
    app.set_config("--config", "", "key=value config file mirroring the flag names");
    app.fallthrough();

    app.add_option("--n-a", cfg.n_a, "BS antenna count (power of 2)")->capture_default_str();
    app.add_option("--m-a", cfg.m_a, "MS antenna count (power of 2)")->capture_default_str();
    app.add_option("--n-r", cfg.n_r, "BS RF chain count")->capture_default_str();
    app.add_option("--m-r", cfg.m_r, "MS RF chain count")->capture_default_str();
    app.add_option("--l", cfg.l, "multipath component count")->capture_default_str();
    app.add_option("--m", cfg.m, "hierarchical factor")->capture_default_str();
    app.add_option("--n-s", cli.n_s_values, "stream counts to sweep (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--k", cli.k_values, "over-sampling factors to sweep (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--i-ly", cli.i_ly_values, "initial layers to sweep (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--snr-grid", cfg.snr_db_grid, "SNR grid in dB (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--trials", cfg.trials, "Monte Carlo trials per sweep point")
        ->capture_default_str();
    app.add_option("--seed", cfg.master_seed, "master seed; all randomness derives from it")
        ->capture_default_str();
    app.add_flag("--noisy-estimation", noisy_estimation,
                 "use noisy channel estimation in the rate pipeline");
    app.add_option("--training-snr-db", cfg.training_snr_db,
                   "training SNR for noisy estimation")
        ->capture_default_str();
    app.add_option("--threads", cli.threads, "worker threads (0 = machine parallelism)")
        ->capture_default_str();
    app.add_option("--out-dir", cli.out_dir, "output directory")->capture_default_str();
    app.add_option("--antenna-grid", cli.antenna_grid,
                   "antenna counts for the timeslots table (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--n", cli.codebook_n, "antenna count for the codebook dump")
        ->capture_default_str();
    app.add_option("--pattern-points", cli.pattern_points,
                   "omega samples per beam pattern in the codebook dump")
        ->capture_default_str();

    app.require_subcommand(0, 1);
    for (const char *name : {"codebook", "demo", "search-success", "rate", "timeslots"})
        app.add_subcommand(name);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed)); // CLI::ParseError propagates to run_cli
    } catch (const CLI::CallForHelp &) {
        std::cout << app.help();
        throw;
    }

    for (CLI::App *sub : app.get_subcommands())
        cli.subcommand = sub->get_name();
    cfg.noiseless_estimation = !noisy_estimation;

    // validate every expanded config and report all problems at once
    std::vector<std::string> problems;
    if (cli.n_s_values.empty())
        problems.push_back("n_s list must not be empty");
    if (cli.k_values.empty())
        problems.push_back("k list must not be empty");
    if (cli.i_ly_values.empty())
        problems.push_back("i_ly list must not be empty");
    std::set<std::string> seen;
    if (problems.empty()) {
        for (const SimConfig &expanded : expand_configs(cli))
            for (const std::string &p : validate(expanded))
                if (seen.insert(p).second)
                    problems.push_back(p);
    }
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto &p : problems)
            msg += "\n  - " + p;
        throw ValidationError(msg);
    }
    return cli;
}

std::vector<SimConfig> expand_configs(const CliConfig &cli) {
    std::vector<SimConfig> out;
    for (std::size_t n_s : cli.n_s_values)
        for (std::size_t k : cli.k_values)
            for (int i_ly : cli.i_ly_values) {
                SimConfig cfg = cli.base;
                cfg.n_s = n_s;
                cfg.k = k;
                cfg.i_ly = i_ly;
                out.push_back(cfg);
            }
    return out;
}

int dispatch(const CliConfig &cli) {
    const std::string started_at = iso_timestamp_utc();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::filesystem::path> outputs;

    if (!cli.subcommand.empty() && cli.subcommand != "demo")
        std::filesystem::create_directories(cli.out_dir);

    int status = 0;
    if (cli.subcommand == "codebook") {
        status = run_codebook(cli);
        outputs.push_back(std::filesystem::path(cli.out_dir) / "codebook_codewords.csv");
        outputs.push_back(std::filesystem::path(cli.out_dir) / "codebook_patterns.csv");
    } else if (cli.subcommand == "demo") {
        return run_demo(cli);
    } else if (cli.subcommand == "search-success") {
        status = run_search_success(cli, outputs);
    } else if (cli.subcommand == "rate") {
        status = run_rate(cli, outputs);
    } else if (cli.subcommand == "timeslots") {
        status = run_timeslots(cli, outputs);
    } else {
        std::cerr << "usage: mmbeam {codebook|demo|search-success|rate|timeslots} [options]\n";
        return 2;
    }

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string name = cli.subcommand;
    std::replace(name.begin(), name.end(), '-', '_');
    write_manifest(cli, name, outputs, started_at, duration);
    return status;
}

int run_cli(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const CliConfig cli = parse_config(args);
        return dispatch(cli);
    } catch (const CLI::CallForHelp &) {
        return 0; // help text already printed
    } catch (const CLI::ParseError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError &e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace mmbeam
