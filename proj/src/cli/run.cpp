#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "purify/error.hpp"
#include "purify/experiments.hpp"

namespace purify {

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Simulate number filtering and vacancy-filling merges in optical lattices", "purify_run"};
    std::string experiment;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string names;
    for (const auto& n : experiment_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("experiment", experiment, "one of: " + names)->required();
    app.add_option("--config", config_path, "configuration file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "overrides [run] seed");
    app.add_option("--out", out_dir, "output directory (default: $PURIFY_OUT_DIR or .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (!is_experiment(experiment)) {
        std::cerr << "purify_run: unknown experiment '" << experiment << "' (expected one of: " << names << ")\n";
        return 1;
    }
    if (out_dir.empty()) {
        const char* env = std::getenv("PURIFY_OUT_DIR");
        out_dir = env && *env ? env : ".";
    }

    RunConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "purify_run: " << e.what() << '\n';
        return 1;
    }
    if (*seed_opt) config.seed = seed;

    try {
        for (const auto& path : run_experiment(experiment, config, out_dir)) std::cout << path.string() << '\n';
    } catch (const ContractError& e) {
        std::cerr << "purify_run: invalid configuration for " << experiment << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "purify_run: " << experiment << " failed: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace purify
