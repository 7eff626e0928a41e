#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hardyqkd/cli.hpp"

using hardyqkd::cli::RunConfig;

int main(int argc, char** argv) {
    CLI::App app{"Hardy-paradox QKD: state construction, simulation, key rates and bias comparison"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> alpha, alpha_b, eta, epsilon, eps_max, reveal;
    std::optional<int> eta_grid, eps_grid, level, grid_res, box_res;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> rounds;
    std::optional<std::string> dist, out;

    app.add_option("--config", config_path, "JSON config file; flags override its values");
    app.add_option("--alpha", alpha, "Alice basis parameter (also Bob's unless --alpha-b is given)");
    app.add_option("--alpha-b", alpha_b, "Bob basis parameter");
    app.add_option("--eta", eta, "visibility in [0,1]");
    app.add_option("--eta-grid", eta_grid, "number of eta points for keyrate");
    app.add_option("--dist", dist, "settings distribution: uniform, nonuniform or pA,pB");
    app.add_option("--epsilon", epsilon, "setting bias");
    app.add_option("--eps-grid", eps_grid, "number of epsilon points in [0, eps-max] for bias-compare");
    app.add_option("--eps-max", eps_max, "largest epsilon of the grid");
    app.add_option("--level", level, "NPA hierarchy level (1-3)");
    app.add_option("--grid-res", grid_res, "points on the setup segment of the bound grid");
    app.add_option("--box-res", box_res, "per-axis resolution of the optional box grid (0 disables)");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--rounds", rounds, "simulated rounds");
    app.add_option("--reveal", reveal, "fraction of rounds revealed for parameter estimation");
    app.add_option("--out", out, "output directory");

    const std::map<std::string, std::string> about{
        {"hardy-state", "optimal Hardy state, its behavior and zero conditions"},
        {"simulate", "Monte-Carlo run of the protocol with parameter estimation"},
        {"keyrate", "key rates versus eta for both distributions and strategies"},
        {"bias-compare", "Eve's guessing bound versus setting bias, Hardy and CHSH"},
        {"gamma", "pointwise posterior bounds over the decomposition grid"}};
    for (const auto& name : RunConfig::commands()) app.add_subcommand(name, about.at(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hardyqkd::cli::exit_config;
    }

    RunConfig c;
    try {
        if (!config_path.empty()) c = hardyqkd::cli::load_config(config_path);
    } catch (const hardyqkd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return hardyqkd::cli::exit_config;
    }
    c.command = app.get_subcommands().front()->get_name();
    if (alpha) c.alpha_a = c.alpha_b = *alpha;
    if (alpha_b) c.alpha_b = *alpha_b;
    if (eta) c.eta = *eta;
    if (eta_grid) c.eta_grid = *eta_grid;
    if (dist) c.dist = *dist;
    if (epsilon) c.epsilon = *epsilon;
    if (eps_grid) c.eps_grid = *eps_grid;
    if (eps_max) c.eps_max = *eps_max;
    if (level) c.level = *level;
    if (grid_res) c.grid_res = *grid_res;
    if (box_res) c.box_res = *box_res;
    if (seed) c.seed = *seed;
    if (rounds) c.rounds = *rounds;
    if (reveal) c.reveal = *reveal;
    if (out) c.out = *out;

    return hardyqkd::cli::run(c, std::cout, std::cerr);
}
