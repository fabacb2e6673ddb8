// ffg-explorer: run / validate / show-ffg

#include <iostream>

#include <CLI11.hpp>

#include "ffg/app_spec_io.hpp"
#include "ffg/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Functional-flow-graph guided GUI testing on simulated apps"};
    app.require_subcommand(1);

    ffg::RunConfig cfg;
    std::vector<std::string> disabled;
    auto* run = app.add_subcommand("run", "explore an app spec and report bugs");
    run->add_option("--app", cfg.app, "app spec (.app, JSON)")->required();
    run->add_option("--seed", cfg.seed, "RNG seed");
    run->add_option("--max-actions", cfg.max_actions, "total simulated actions")->check(CLI::PositiveNumber);
    run->add_option("--max-iterations", cfg.max_iterations, "iterations after bootstrap");
    run->add_option("--disable", disabled, "phase to switch off (repeatable)")
        ->check(CLI::IsMember({"ltv-func", "ltv-flow", "stv-single", "stv-cross"}));
    run->add_option("--sim-threshold", cfg.sim_threshold, "goal similarity threshold");
    run->add_option("--sep-threshold", cfg.sep_threshold, "cluster separation threshold");
    run->add_option("--oracle", cfg.oracle, "semantic oracle")->check(CLI::IsMember({"spec", "remote"}));
    run->add_option("--jobs", cfg.jobs, "parallel scenario workers")->check(CLI::PositiveNumber);
    run->add_option("--out-dir", cfg.out_dir, "artifact directory")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check an app spec");
    validate->add_option("--app", validate_path, "app spec")->required();

    std::string ffg_path;
    auto* show = app.add_subcommand("show-ffg", "print a graph file as text");
    show->add_option("path", ffg_path, "ffg file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*run) {
        cfg.disabled.insert(disabled.begin(), disabled.end());
        return ffg::run(cfg);
    }
    if (*validate) {
        try {
            auto spec = ffg::load_spec_file(validate_path);
            std::cout << spec.name << ": ok (" << spec.pages.size() << " pages, " << spec.rules.size() << " rules, "
                      << spec.var_decls.size() << " variables)\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
    }
    try {
        std::cout << ffg::render_text(ffg::deserialize(ffg::read_file(ffg_path)));
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
