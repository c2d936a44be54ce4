#include "inflection/commands.hpp"
#include "inflection/config.hpp"
#include "inflection/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace inflection;

int main(int argc, char** argv) {
    CLI::App app{"Wave evolution near a boundary inflection point: modes in, searchlight out."};
    app.footer(cli::config_reference());
    app.require_subcommand(1);

    std::string config_path, output;
    int threads = 1;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (key = value)");
        sub->add_option("--output", output, "output directory, overrides output_dir");
    };
    auto* run = app.add_subcommand("run", "evolve one mode and write field, searchlight, g0, flux and diagnostics");
    auto* scatter = app.add_subcommand("scatter", "amplitudes and Gram matrix for the modes in j_list");
    auto* conv = app.add_subcommand("convergence", "grid-halving study of a single run");
    auto* self = app.add_subcommand("selftest", "Airy and mode oracles");
    add_common(run);
    add_common(scatter);
    add_common(conv);
    scatter->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : cli::kExitUser;
    }

    if (self->parsed()) return cli::cmd_selftest(std::cout);

    cli::RunConfig cfg;
    try {
        if (config_path.empty()) {
            cli::finalize(cfg);
        } else {
            cfg = cli::parse_config(config_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
    if (!output.empty()) cfg.output_dir = output;

    if (run->parsed()) return cli::cmd_run(cfg, std::cout);
    if (scatter->parsed()) return cli::cmd_scatter(cfg, threads, std::cout);
    if (conv->parsed()) return cli::cmd_convergence(cfg, std::cout);
    return cli::kExitUser;
}
