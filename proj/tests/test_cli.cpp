#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hardyqkd/cli.hpp"

using namespace hardyqkd;
using hardyqkd::cli::json;
using hardyqkd::cli::RunConfig;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("hardyqkd_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(HARDYQKD_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

int count(const std::string& text, const std::string& needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

int run_cfg(const RunConfig& c) {
    std::ostringstream out, err;
    return cli::run(c, out, err);
}

}  // namespace

TEST(Cli, ConfigRoundTrip) {
    RunConfig c;
    c.command = "keyrate";
    c.alpha_a = 0.123456789012345678;
    c.alpha_b = std::nextafter(0.7, 1.0);
    c.eta = 0.1 + 0.2;
    c.eta_grid = 17;
    c.dist = "0.3,0.6";
    c.epsilon = 1.0 / 3.0;
    c.eps_grid = 4;
    c.eps_max = 0.15;
    c.level = 3;
    c.grid_res = 33;
    c.box_res = 5;
    c.seed = 0xFFFFFFFFFFFFFFFFull;
    c.rounds = 123456789012;
    c.reveal = 0.25;
    c.out = "some/dir";
    const json j = c;
    EXPECT_EQ(json::parse(j.dump()).get<RunConfig>(), c);
    EXPECT_EQ(json::parse("{}").get<RunConfig>(), RunConfig{});
    EXPECT_THROW(json::parse(R"({"etaa": 1})").get<RunConfig>(), Error);
    EXPECT_THROW(json::parse(R"({"eta": "high"})").get<RunConfig>(), Error);
}

TEST(Cli, Validation) {
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    auto expect_bad = [](RunConfig c) {
        try {
            c.validate();
            ADD_FAILURE() << json(c).dump();
        } catch (const Error& e) {
            EXPECT_TRUE(e.is_config_error());
        }
    };
    RunConfig b = c;
    b.eta = 1.5;
    expect_bad(b);
    b = c;
    b.level = 4;
    expect_bad(b);
    b = c;
    b.dist = "0.5";
    expect_bad(b);
    b = c;
    b.dist = "0.5,1.2";
    expect_bad(b);
    b = c;
    b.alpha_a = 1.0;
    expect_bad(b);
    b = c;
    b.command = "launch";
    expect_bad(b);
    b = c;
    b.reveal = -0.1;
    expect_bad(b);
    EXPECT_NEAR(RunConfig{.dist = "0.3,0.6"}.distribution().pB, 0.6, 1e-15);
}

TEST(Cli, HardyStateReport) {
    const auto dir = scratch("hardy_state");
    RunConfig c;
    c.out = dir.string();
    std::ostringstream log;
    const auto r = cli::cmd_hardy_state(c, log);
    EXPECT_NEAR(r["q"].get<double>(), 0.0901699437, 1e-9);
    EXPECT_NEAR(r["q_tilde"].get<double>(), hardy::q_tilde, 1e-9);
    EXPECT_EQ(r["uniqueness_dimension"].get<int>(), 1);
    EXPECT_EQ(r["behavior"].size(), 16u);
    EXPECT_EQ(json::parse(slurp(dir / "hardy_state.json")), r);
    EXPECT_NE(log.str().find("uniqueness dimension = 1"), std::string::npos);

    c.alpha_a = c.alpha_b = 1 / std::sqrt(2.0);
    EXPECT_NEAR(cli::cmd_hardy_state(c, log)["q"].get<double>(), 1.0 / 12.0, 1e-9);
    // Four decimal places of 1/sqrt(2) move q by about 1e-6.
    c.alpha_a = c.alpha_b = 0.7071;
    EXPECT_NEAR(cli::cmd_hardy_state(c, log)["q"].get<double>(), 1.0 / 12.0, 2e-6);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("exit");
    EXPECT_EQ(run_binary("hardy-state --out " + dir.string()), 0);
    EXPECT_EQ(run_binary("hardy-state --alpha 1.0 --out " + dir.string()), 2);
    EXPECT_EQ(run_binary("hardy-state --level 7 --out " + dir.string()), 2);
    EXPECT_EQ(run_binary("frobnicate"), 2);
    EXPECT_EQ(run_binary("simulate --eta abc"), 2);
    EXPECT_EQ(run_binary("hardy-state --config " + (dir / "missing.json").string()), 2);
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_EQ(run_binary("hardy-state --config " + (dir / "bad.json").string()), 2);
    // Settings fixed to (0,0): no revealed rounds for the other pairs.
    EXPECT_EQ(run_binary("simulate --dist 1,1 --rounds 1000 --out " + dir.string()), 3);
}

TEST(Cli, FlagsOverrideConfig) {
    const auto dir = scratch("override");
    RunConfig c;
    c.command = "simulate";
    c.eta = 0.5;
    c.rounds = 2000;
    c.seed = 4;
    c.out = dir.string();
    std::ofstream(dir / "cfg.json") << json(c).dump();
    ASSERT_EQ(run_binary("simulate --config " + (dir / "cfg.json").string() + " --eta 0.9"), 0);
    const auto report = json::parse(slurp(dir / "simulate.json"));
    EXPECT_EQ(report["config"]["eta"].get<double>(), 0.9);
    EXPECT_EQ(report["config"]["rounds"].get<int>(), 2000);
    EXPECT_EQ(report["config"]["seed"].get<int>(), 4);
}

TEST(Cli, SimulateNoiselessAndDeterministic) {
    const auto dir = scratch("simulate");
    RunConfig c;
    c.command = "simulate";
    c.rounds = 100000;
    c.seed = 99;
    c.out = dir.string();
    ASSERT_EQ(run_cfg(c), 0);
    const auto report = json::parse(slurp(dir / "simulate.json"));
    EXPECT_EQ(report["key_disagreement"].get<double>(), 0.0);
    EXPECT_GT(report["sifted"].get<int>(), 0);
    const auto first = slurp(dir / "transcript.csv");
    ASSERT_EQ(run_cfg(c), 0);
    EXPECT_EQ(slurp(dir / "transcript.csv"), first);
    EXPECT_EQ(count(first, "\n"), 100001);
}

TEST(Cli, SimulateMatchesSetupPrediction) {
    const auto dir = scratch("simulate09");
    RunConfig c;
    c.command = "simulate";
    c.eta = 0.9;
    c.rounds = 1000000;
    c.out = dir.string();
    std::ostringstream log;
    const auto r = cli::cmd_simulate(c, log);
    const auto want = HVector::setup(0.9);
    for (int k = 0; k < 4; ++k) {
        const auto& h = r["h"][k];
        const double sigma = std::sqrt(want[k] * (1 - want[k]) / h["trials"].get<double>());
        EXPECT_LE(std::abs(h["estimate"].get<double>() - want[k]), 3 * sigma);
    }
}

TEST(Cli, KeyrateOutputs) {
    const auto dir = scratch("keyrate");
    RunConfig c;
    c.command = "keyrate";
    c.eta_grid = 6;
    c.grid_res = 21;
    c.out = dir.string();
    ASSERT_EQ(run_cfg(c), 0);
    const auto csv = slurp(dir / "keyrates.csv");
    EXPECT_TRUE(csv.starts_with("eta,dist,strategy,p00,guess,hab,keyrate\n"));
    EXPECT_EQ(count(csv, "\n"), 6 * 4 + 1);
    EXPECT_EQ(count(slurp(dir / "keyrates.svg"), "<polyline"), 4);
    const auto report = json::parse(slurp(dir / "keyrate.json"));
    double uniform_dropping = -1, nonuniform_basic = -1;
    for (const auto& e : report["eta_1"]) {
        if (e["dist"] == "uniform" && e["strategy"] == "dropping") uniform_dropping = e["keyrate"].get<double>();
        if (e["dist"] == "nonuniform" && e["strategy"] == "basic") nonuniform_basic = e["keyrate"].get<double>();
    }
    EXPECT_NEAR(uniform_dropping, 0.045084, 5e-3);
    EXPECT_NEAR(nonuniform_basic, 0.06888, 5e-3);
    ASSERT_EQ(run_cfg(c), 0);
    EXPECT_EQ(slurp(dir / "keyrates.csv"), csv);
}

TEST(Cli, BiasCompareOutputs) {
    const auto dir = scratch("bias");
    RunConfig c;
    c.command = "bias-compare";
    c.eps_grid = 5;
    c.eps_max = 0.1;
    c.out = dir.string();
    ASSERT_EQ(run_cfg(c), 0);
    const auto csv = slurp(dir / "bias_compare.csv");
    EXPECT_TRUE(csv.starts_with("epsilon,hardy_guess,chsh_guess\n"));
    EXPECT_EQ(count(csv, "\n"), 6);
    EXPECT_EQ(count(slurp(dir / "bias_compare.svg"), "<polyline"), 2);
}

TEST(Cli, GammaOutputs) {
    const auto dir = scratch("gamma");
    RunConfig c;
    c.command = "gamma";
    c.grid_res = 11;
    c.dist = "nonuniform";
    c.out = dir.string();
    ASSERT_EQ(run_cfg(c), 0);
    const auto csv = slurp(dir / "gamma_grid.csv");
    EXPECT_TRUE(csv.starts_with("eta,h1,h2,h3,h4,gamma0,gamma1\n"));
    EXPECT_EQ(count(csv, "\n"), 12);
}
