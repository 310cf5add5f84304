#pragma once

// Command implementations behind the CLI. Each command writes its CSV and
// JSON outputs plus a plot script into the output directory and returns an
// exit code:
//   0 requested checks passed     1 a requested check failed
//   2 hyperbolicity               3 not genuinely coupled
//   4 other structural failure    5 bad configuration or parameters
//   6 numerical failure (blow-up, phase exit, fit, root finding)

#include <filesystem>
#include <string>
#include <vector>

#include "nsk/config.hpp"
#include "nsk/error.hpp"

namespace nsk {

struct CommandOptions {
    RunConfig config;
    std::filesystem::path out_dir = ".";
    int jobs = 1;
};

struct CommandResult {
    int exit_code = 0;
    /// Machine-readable failure reason; empty on success.
    std::string reason;
    std::vector<std::filesystem::path> files;
};

int exit_code_for(ErrorKind kind);

CommandResult cmd_check(const CommandOptions& opts);
CommandResult cmd_dispersion(const CommandOptions& opts);
CommandResult cmd_envelope(const CommandOptions& opts);
CommandResult cmd_linear_decay(const CommandOptions& opts);
CommandResult cmd_simulate(const CommandOptions& opts);
CommandResult cmd_integrals(const CommandOptions& opts);
/// Every command above; runs up to opts.jobs of them at once. The exit
/// code is the first nonzero one in command order.
CommandResult cmd_all(const CommandOptions& opts);

/// Names accepted by run_command, in `all` order.
const std::vector<std::string>& command_names();

/// Dispatches by name. Throws Error(config) for an unknown name.
CommandResult run_command(const std::string& name, const CommandOptions& opts);

}  // namespace nsk
