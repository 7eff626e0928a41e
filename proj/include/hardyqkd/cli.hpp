#pragma once

// Run configuration and the command implementations behind the hardyqkd tool.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hardyqkd/analysis.hpp"
#include "hardyqkd/error.hpp"
#include "hardyqkd/io.hpp"
#include "hardyqkd/protocol.hpp"
#include "hardyqkd/quantum_core.hpp"

namespace hardyqkd::cli {

using json = nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

struct RunConfig {
    std::string command = "hardy-state";
    double alpha_a = hardy::optimal_alpha;
    double alpha_b = hardy::optimal_alpha;
    double eta = 1.0;
    int eta_grid = 201;
    std::string dist = "uniform";
    double epsilon = 0.0;
    int eps_grid = 0;  // 0: single epsilon
    double eps_max = 0.2;
    int level = analysis::default_level;
    int grid_res = 201;
    int box_res = 0;
    std::uint64_t seed = 1;
    std::int64_t rounds = 100000;
    double reveal = 0.5;
    std::string out = ".";

    bool operator==(const RunConfig&) const = default;

    static const std::vector<std::string>& commands() {
        static const std::vector<std::string> c{"hardy-state", "simulate", "keyrate", "bias-compare", "gamma"};
        return c;
    }

    SettingsDistribution distribution() const {
        if (dist == "uniform") return SettingsDistribution::uniform();
        if (dist == "nonuniform") return SettingsDistribution::nonuniform();
        const auto comma = dist.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorCode::invalid_argument, "distribution must be uniform, nonuniform or pA,pB");
        SettingsDistribution d;
        try {
            d.pA = std::stod(dist.substr(0, comma));
            d.pB = std::stod(dist.substr(comma + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_argument, "cannot parse distribution '" + dist + "'");
        }
        d.validate();
        return d;
    }

    void validate() const {
        auto fail = [](const std::string& m) { throw Error(ErrorCode::parameter_out_of_range, m); };
        if (std::find(commands().begin(), commands().end(), command) == commands().end())
            throw Error(ErrorCode::invalid_argument, "unknown command '" + command + "'");
        if (!(eta >= 0.0 && eta <= 1.0)) fail("eta must lie in [0, 1]");
        if (eta_grid < 1) fail("eta grid needs at least one point");
        if (!(epsilon >= 0.0)) fail("epsilon must be nonnegative");
        if (eps_grid < 0) fail("epsilon grid size must be nonnegative");
        if (!(eps_max >= 0.0)) fail("eps-max must be nonnegative");
        if (level < 1 || level > 3) throw Error(ErrorCode::unsupported_level, "level must be 1, 2 or 3");
        if (grid_res < 1) fail("grid resolution must be positive");
        if (box_res < 0 || box_res == 1) fail("box resolution must be 0 or at least 2");
        if (rounds <= 0) fail("rounds must be positive");
        if (!(reveal >= 0.0 && reveal <= 1.0)) fail("reveal fraction must lie in [0, 1]");
        (void)distribution();
        (void)local_bases(alpha_a, alpha_b);
    }
};

inline void to_json(json& j, const RunConfig& c) {
    j = json{{"command", c.command}, {"alpha_a", c.alpha_a},   {"alpha_b", c.alpha_b}, {"eta", c.eta},
             {"eta_grid", c.eta_grid}, {"dist", c.dist},       {"epsilon", c.epsilon}, {"eps_grid", c.eps_grid},
             {"eps_max", c.eps_max}, {"level", c.level},       {"grid_res", c.grid_res}, {"box_res", c.box_res},
             {"seed", c.seed},       {"rounds", c.rounds},     {"reveal", c.reveal},   {"out", c.out}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline void from_json(const json& j, RunConfig& c) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
    const json known = RunConfig{};
    for (const auto& [k, v] : j.items())
        if (!known.contains(k)) throw Error(ErrorCode::invalid_argument, "unknown config key '" + k + "'");
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("command", c.command);
        get("alpha_a", c.alpha_a);
        get("alpha_b", c.alpha_b);
        get("eta", c.eta);
        get("eta_grid", c.eta_grid);
        get("dist", c.dist);
        get("epsilon", c.epsilon);
        get("eps_grid", c.eps_grid);
        get("eps_max", c.eps_max);
        get("level", c.level);
        get("grid_res", c.grid_res);
        get("box_res", c.box_res);
        get("seed", c.seed);
        get("rounds", c.rounds);
        get("reveal", c.reveal);
        get("out", c.out);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("bad config value: ") + e.what());
    }
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open config file " + path);
    try {
        return json::parse(in).get<RunConfig>();
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::invalid_argument, std::string("config is not valid JSON: ") + e.what());
    }
}

namespace detail {

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create output directory " + c.out);
    return std::filesystem::path(c.out) / name;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + p.string());
    f << text;
}

inline json behavior_json(const Behavior& p) {
    json cells = json::array();
    for (double v : p.cells) cells.push_back(v);
    return cells;
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? b : a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace detail

inline json cmd_hardy_state(const RunConfig& c, std::ostream& log) {
    const auto bases = local_bases(c.alpha_a, c.alpha_b);
    const auto psi = hardy_state(c.alpha_a, c.alpha_b);
    const auto p = born_behavior(noisy_state(1.0, psi), bases);
    const double q = q_value(c.alpha_a, c.alpha_b);
    const int dim = uniqueness_check(bases);
    json amps = json::array();
    for (int i = 0; i < 4; ++i) amps.push_back({psi.amplitudes()(i).real(), psi.amplitudes()(i).imag()});
    json report{{"command", "hardy-state"},
                {"config", c},
                {"alpha_a", c.alpha_a},
                {"alpha_b", c.alpha_b},
                {"psi", amps},
                {"q", q},
                {"q_born", p.p(0, 0, 0, 0)},
                {"q_tilde", p.p(0, 0, 1, 1)},
                {"uniqueness_dimension", dim},
                {"zero_conditions", {{"p00_10", p.p(0, 0, 1, 0)}, {"p00_01", p.p(0, 0, 0, 1)}, {"p11_11", p.p(1, 1, 1, 1)}}},
                {"behavior", detail::behavior_json(p)}};
    log << "psi_H = (" << io::num(amps[0][0]) << ", " << io::num(amps[1][0]) << ", " << io::num(amps[2][0]) << ", "
        << io::num(amps[3][0]) << ")\n";
    log << "q = " << io::num(q) << "\nq_tilde = P(00|11) = " << io::num(p.p(0, 0, 1, 1)) << "\nuniqueness dimension = " << dim
        << '\n';
    detail::write_file(detail::out_path(c, "hardy_state.json"), report.dump(2) + "\n");
    return report;
}

inline json cmd_simulate(const RunConfig& c, std::ostream& log) {
    const auto d = c.distribution();
    const auto p = born_behavior(noisy_state(c.eta, hardy_state(c.alpha_a, c.alpha_b)), local_bases(c.alpha_a, c.alpha_b));
    std::variant<SettingsDistribution, BiasModel> dist = d;
    if (c.epsilon > 0.0) dist = biased_branches(d, c.epsilon);
    const auto t = simulate(c.rounds, p, dist, c.reveal, c.seed);
    const auto sifted = sift(t);
    const auto est = estimate_h(t);
    const auto expected = HVector::of(p);
    std::ostringstream csv;
    write_transcript_csv(csv, t);
    detail::write_file(detail::out_path(c, "transcript.csv"), csv.str());
    json h = json::array();
    for (int k = 0; k < 4; ++k)
        h.push_back({{"estimate", est.h[k]}, {"stderr", est.stderr_[k]}, {"expected", std::max(0.0, expected[k])}, {"trials", est.trials[k]}});
    json report{{"command", "simulate"},
                {"config", c},
                {"rounds", c.rounds},
                {"sifted", sifted.size()},
                {"key_disagreement", key_disagreement(sifted)},
                {"h", h}};
    log << "rounds = " << c.rounds << "\nsifted key length = " << sifted.size()
        << "\nkey disagreement rate = " << io::num(key_disagreement(sifted)) << '\n';
    for (int k = 0; k < 4; ++k)
        log << "h" << k + 1 << " = " << io::num(est.h[k]) << " +- " << io::num(est.stderr_[k]) << " (expected "
            << io::num(expected[k]) << ")\n";
    detail::write_file(detail::out_path(c, "simulate.json"), report.dump(2) + "\n");
    return report;
}

/// Four curves: {uniform, nonuniform} x {basic, dropping}.
inline std::vector<analysis::KeyRateReport> keyrate_sweep(const RunConfig& c) {
    const auto u = SettingsDistribution::uniform();
    const auto n = SettingsDistribution::nonuniform();
    const auto grid_u = analysis::build_gamma_grid(c.grid_res, u, c.level, c.box_res);
    const auto grid_n = analysis::regrid(grid_u, n);
    std::vector<analysis::KeyRateReport> rows;
    for (double eta : detail::linspace(0.0, 1.0, c.eta_grid)) {
        rows.push_back(analysis::key_rate_basic(eta, u, grid_u));
        rows.push_back(analysis::key_rate_dropping(eta, u, grid_u));
        rows.push_back(analysis::key_rate_basic(eta, n, grid_n));
        rows.push_back(analysis::key_rate_dropping(eta, n, grid_n));
    }
    return rows;
}

inline json cmd_keyrate(const RunConfig& c, std::ostream& log) {
    const auto rows = keyrate_sweep(c);
    std::ostringstream csv;
    io::write_keyrate_csv(csv, rows);
    detail::write_file(detail::out_path(c, "keyrates.csv"), csv.str());
    std::vector<io::Series> series{{"uniform basic", "#1f77b4", {}},
                                   {"uniform dropping", "#ff7f0e", {}},
                                   {"nonuniform basic", "#2ca02c", {}},
                                   {"nonuniform dropping", "#d62728", {}}};
    for (std::size_t i = 0; i < rows.size(); ++i) series[i % 4].points.emplace_back(rows[i].eta, rows[i].key_rate);
    detail::write_file(detail::out_path(c, "keyrates.svg"), io::svg_plot("Key rates", "eta", "key rate", series));
    json end = json::array();
    for (std::size_t i = rows.size() - 4; i < rows.size(); ++i)
        end.push_back({{"dist", rows[i].dist_label}, {"strategy", analysis::to_string(rows[i].strategy)},
                       {"guess", rows[i].guess}, {"keyrate", rows[i].key_rate}});
    json report{{"command", "keyrate"}, {"config", c}, {"rows", rows.size()}, {"eta_1", end}};
    for (const auto& e : end)
        log << "eta=1 " << e["dist"].get<std::string>() << ' ' << e["strategy"].get<std::string>()
            << ": key rate = " << io::num(e["keyrate"].get<double>()) << '\n';
    detail::write_file(detail::out_path(c, "keyrate.json"), report.dump(2) + "\n");
    return report;
}

inline std::vector<double> epsilon_values(const RunConfig& c) {
    if (c.eps_grid == 0) return {c.epsilon};
    return detail::linspace(0.0, c.eps_max, c.eps_grid);
}

inline json cmd_bias_compare(const RunConfig& c, std::ostream& log) {
    const auto rows = analysis::bias_compare(epsilon_values(c), c.level);
    std::ostringstream csv;
    io::write_bias_csv(csv, rows);
    detail::write_file(detail::out_path(c, "bias_compare.csv"), csv.str());
    std::vector<io::Series> series{{"Hardy", "#1f77b4", {}}, {"CHSH", "#d62728", {}}};
    for (const auto& r : rows) {
        series[0].points.emplace_back(r.epsilon, r.hardy_guess);
        series[1].points.emplace_back(r.epsilon, r.chsh_guess);
        log << "epsilon=" << io::num(r.epsilon) << " hardy=" << io::num(r.hardy_guess) << " chsh=" << io::num(r.chsh_guess)
            << '\n';
    }
    detail::write_file(detail::out_path(c, "bias_compare.svg"),
                       io::svg_plot("Guessing probability under biased settings", "epsilon", "guessing probability", series));
    json table = json::array();
    for (const auto& r : rows) table.push_back({{"epsilon", r.epsilon}, {"hardy_guess", r.hardy_guess}, {"chsh_guess", r.chsh_guess}});
    json report{{"command", "bias-compare"}, {"config", c}, {"rows", table}};
    detail::write_file(detail::out_path(c, "bias_compare.json"), report.dump(2) + "\n");
    return report;
}

inline json cmd_gamma(const RunConfig& c, std::ostream& log) {
    const auto g = analysis::build_gamma_grid(c.grid_res, c.distribution(), c.level, c.box_res);
    std::ostringstream csv;
    io::write_gamma_csv(csv, g);
    detail::write_file(detail::out_path(c, "gamma_grid.csv"), csv.str());
    std::vector<io::Series> series{{"Gamma0", "#1f77b4", {}}, {"Gamma1", "#d62728", {}}};
    for (const auto& p : g.points) {
        if (std::isnan(p.eta)) continue;
        series[0].points.emplace_back(p.eta, p.bounds.gamma0);
        series[1].points.emplace_back(p.eta, p.bounds.gamma1);
    }
    detail::write_file(detail::out_path(c, "gamma_grid.svg"), io::svg_plot("Pointwise bounds", "eta", "bound", series));
    json report{{"command", "gamma"},
                {"config", c},
                {"points", g.points.size()},
                {"segment_points", g.segment_points},
                {"box_rejected", g.box_rejected}};
    log << "grid points = " << g.points.size() << " (box rejected " << g.box_rejected << ")\n";
    detail::write_file(detail::out_path(c, "gamma.json"), report.dump(2) + "\n");
    return report;
}

/// Validates, dispatches and maps failures to exit codes.
inline int run(const RunConfig& c, std::ostream& log, std::ostream& err) {
    try {
        c.validate();
        if (c.command == "hardy-state") cmd_hardy_state(c, log);
        else if (c.command == "simulate") cmd_simulate(c, log);
        else if (c.command == "keyrate") cmd_keyrate(c, log);
        else if (c.command == "bias-compare") cmd_bias_compare(c, log);
        else cmd_gamma(c, log);
        return exit_ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_config_error() ? exit_config : exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace hardyqkd::cli
