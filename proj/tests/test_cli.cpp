// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmbeam/cli.hpp"
#include "mmbeam/errors.hpp"

using namespace mmbeam;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path fresh_dir(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("mmbeam_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("defaults follow the standard evaluation settings") {
    const CliConfig cli = parse_config({"search-success"});
    CHECK(cli.base.n_a == 32);
    CHECK(cli.base.m_a == 32);
    CHECK(cli.base.m == 2);
    CHECK(cli.base.l == 4);
    CHECK(cli.base.n_r == 3);
    CHECK(cli.base.m_r == 3);
    CHECK(cli.base.trials == 1000);
    CHECK(cli.k_values == std::vector<std::size_t>{2});
    CHECK(cli.i_ly_values == std::vector<int>{2});
    CHECK(cli.base.snr_db_grid.front() == 0.0);
    CHECK(cli.base.snr_db_grid.back() == 30.0);
    CHECK(cli.base.noiseless_estimation);
}

TEST_CASE("stream count above the RF chain budget is rejected with details") {
    CHECK_THROWS_WITH_AS(parse_config({"search-success", "--n-s", "5", "--n-r", "3"}),
                         doctest::Contains("min(n_r, m_r)"), ValidationError);
    // multiple violations are all reported
    try {
        parse_config({"search-success", "--n-s", "5", "--n-r", "3", "--l", "1", "--n-a", "33"});
        CHECK(false);
    } catch (const ValidationError &e) {
        const std::string msg = e.what();
        CHECK(msg.find("min(n_r, m_r)") != std::string::npos);
        CHECK(msg.find("power of m") != std::string::npos);
        CHECK(msg.find(">= n_s") != std::string::npos);
    }
}

TEST_CASE("unknown flags and subcommands raise usage errors") {
    CHECK_THROWS(parse_config({"search-success", "--does-not-exist", "1"}));
    CHECK_THROWS(parse_config({"frobnicate"}));
}

TEST_CASE("config file values are overridden by flags") {
    const fs::path dir = fresh_dir("config");
    const fs::path cfg_file = dir / "run.cfg";
    {
        std::ofstream out(cfg_file);
        out << "n-a=16\n";
        out << "trials=7\n";
        out << "seed=123\n";
    }
    const CliConfig cli = parse_config(
        {"timeslots", "--config", cfg_file.string(), "--trials", "9"});
    CHECK(cli.base.n_a == 16);
    CHECK(cli.base.trials == 9); // flag wins
    CHECK(cli.base.master_seed == 123);
}

TEST_CASE("expand_configs covers the sweep lists") {
    CliConfig cli = parse_config({"search-success", "--n-s", "1,2", "--k", "1,2"});
    const auto configs = expand_configs(cli);
    CHECK(configs.size() == 4);
    CHECK(configs.front().n_s == 1);
    CHECK(configs.back().n_s == 2);
    CHECK(configs.back().k == 2);
}

TEST_CASE("timeslots subcommand writes the comparison table and manifest") {
    const fs::path dir = fresh_dir("timeslots");
    const CliConfig cli = parse_config({"timeslots", "--n-s", "3", "--n-r", "4", "--m-r", "4",
                                        "--out-dir", dir.string()});
    CHECK(dispatch(cli) == 0);
    const std::string csv = slurp(dir / "timeslots.csv");
    CHECK(csv.find("n_antennas,t_hs,t_ss,t_sp\n") == 0);
    CHECK(csv.find("32,24,256,158.94135") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(dir / "timeslots_manifest.json"));
    CHECK(manifest["config"]["n_r"] == 4);
    CHECK(manifest["output_paths"].size() == 1);
    CHECK(fs::exists(fs::path(manifest["output_paths"][0].get<std::string>())));
}

TEST_CASE("codebook subcommand dumps every layer plus the over-sampling layer") {
    const fs::path dir = fresh_dir("codebook");
    const CliConfig cli =
        parse_config({"codebook", "--n", "4", "--m", "2", "--out-dir", dir.string(),
                      "--pattern-points", "16"});
    CHECK(dispatch(cli) == 0);
    const std::string words = slurp(dir / "codebook_codewords.csv");
    CHECK(words.find("layer,position,antenna_index,re,im\n") == 0);
    // 1 + 2 + 4 tree codewords plus K*4 over-sampling codewords, 4 antennas each
    std::size_t rows = 0;
    for (char c : words)
        rows += c == '\n';
    CHECK(rows == 1 + (1 + 2 + 4 + 2 * 4) * 4);
    const std::string patterns = slurp(dir / "codebook_patterns.csv");
    CHECK(patterns.find("layer,position,omega,gain\n") == 0);
}

TEST_CASE("identical seeds give identical outputs modulo timestamps") {
    const fs::path dir1 = fresh_dir("seed_a");
    const fs::path dir2 = fresh_dir("seed_b");
    const std::vector<std::string> base = {"search-success", "--seed", "7",      "--trials",
                                           "12",             "--n-s", "1",      "--snr-grid",
                                           "10,20",          "--l",   "2"};
    auto with_dir = [&](const fs::path &d) {
        auto args = base;
        args.push_back("--out-dir");
        args.push_back(d.string());
        return args;
    };
    CHECK(dispatch(parse_config(with_dir(dir1))) == 0);
    CHECK(dispatch(parse_config(with_dir(dir2))) == 0);
    CHECK(slurp(dir1 / "search_success.csv") == slurp(dir2 / "search_success.csv"));
    auto m1 = nlohmann::json::parse(slurp(dir1 / "search_success_manifest.json"));
    auto m2 = nlohmann::json::parse(slurp(dir2 / "search_success_manifest.json"));
    m1.erase("started_at");
    m1.erase("duration_seconds");
    m2.erase("started_at");
    m2.erase("duration_seconds");
    m1.erase("output_paths");
    m2.erase("output_paths");
    CHECK(m1 == m2);
}

TEST_CASE("cli entry point maps errors to exit codes") {
    const auto run = [](std::vector<std::string> args) {
        std::vector<char *> argv;
        static std::string prog = "mmbeam";
        argv.push_back(prog.data());
        for (auto &a : args)
            argv.push_back(a.data());
        return run_cli(static_cast<int>(argv.size()), argv.data());
    };
    CHECK(run({"--bogus-flag"}) == 2);
    CHECK(run({"search-success", "--n-s", "9"}) == 1);
    const fs::path dir = fresh_dir("exit0");
    CHECK(run({"timeslots", "--out-dir", dir.string()}) == 0);
}
