// Command-line front end: nsk <command> [--config run.json] [--out DIR]
// [--jobs N] [--seed U64].

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nsk/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Linear and nonlinear decay experiments for the isothermal Korteweg fluid"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Run file (JSON); defaults describe the canonical state");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--jobs", jobs, "Maximum concurrent experiments")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", seed, "Seed for all randomness (overrides the run file)");

    // Subcommands inherit this, so global options may follow the command.
    app.fallthrough();

    bool zero_dissipation = false;
    for (const auto& name : nsk::command_names()) {
        auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        if (name == "check") {
            sub->add_flag("--zero-dissipation", zero_dissipation, "Debug: drop the dissipative symbol B");
        }
    }
    app.add_subcommand("all", "Run every experiment");

    CLI11_PARSE(app, argc, argv);

    try {
        nsk::CommandOptions opts;
        if (!config_path.empty()) opts.config = nsk::load_run_config(config_path);
        if (seed) {
            opts.config.seed = *seed;
            opts.config.simulation.init.seed = *seed;
        }
        if (zero_dissipation) opts.config.zero_dissipation = true;
        opts.out_dir = out_dir;
        opts.jobs = jobs;

        const std::string command = app.get_subcommands().front()->get_name();
        const nsk::CommandResult res = nsk::run_command(command, opts);
        for (const auto& f : res.files) std::cout << f.string() << '\n';
        if (res.exit_code != 0) std::cerr << command << ": " << res.reason << '\n';
        return res.exit_code;
    } catch (const nsk::Error& e) {
        std::cerr << nsk::to_string(e.kind()) << ": " << e.what() << '\n';
        return nsk::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
