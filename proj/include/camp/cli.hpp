#pragma once

#include <string>
#include <vector>

namespace camp {

/// Stable process exit codes, documented in --help.
struct ExitStatus {
    static constexpr int Ok = 0;
    static constexpr int ValidationFailed = 1;
    static constexpr int GenerationFailed = 2;
    static constexpr int SimulationFailed = 3;
    static constexpr int UsageError = 64;
};

/// Runs the command-line pipeline. Never exits the process; returns the
/// exit code so tests can drive it in-process.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, const char* const* argv);

} // namespace camp
