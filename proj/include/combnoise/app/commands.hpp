#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "combnoise/app/config.hpp"
#include "combnoise/app/validate.hpp"

namespace combnoise::app {

enum ExitCode : int { exit_ok = 0, exit_io = 1, exit_usage = 2, exit_validation = 3, exit_numeric = 4 };

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    ValidationOptions validation; // validate command only
};

struct CommandResult {
    int exit_code = exit_ok;
    std::vector<std::string> files;
    nlohmann::json manifest;
};

CommandResult run_ofd_sweep(const RunConfig& cfg, const CommandOptions& options);
CommandResult run_dcs_advantage(const RunConfig& cfg, const CommandOptions& options);
CommandResult run_cyclo_trace(const RunConfig& cfg, const CommandOptions& options);
CommandResult run_validate(const RunConfig& cfg, const CommandOptions& options);

// Dispatch by command name; maps library exceptions to exit codes and prints
// the reason to stderr.
int run_command(const std::string& command, const RunConfig& cfg, const CommandOptions& options);

} // namespace combnoise::app
