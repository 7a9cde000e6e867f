// Command dispatch for the shuntlab front-end.
#pragma once

#include "scenario.hpp"

#include <iosfwd>
#include <optional>

namespace shuntlab::cli {

struct RunRequest {
    std::string command;
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> out;
    std::optional<int> figure;
    bool plot_scripts = false;
};

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

/// Loads the scenario, runs the command and writes its files. Errors are
/// reported on `err` and mapped to exit codes: 2 for configuration and domain
/// errors, 3 for NumericalError, 1 for anything else.
int run(const RunRequest& request, std::ostream& log, std::ostream& err);

/// Single-analysis commands; `out` must exist.
void run_analysis(const std::string& command, const Scenario& sc, const std::filesystem::path& out, std::ostream& log);

const std::vector<int>& reproducible_figures();
void reproduce_figure(int figure, const Scenario& sc, const std::filesystem::path& out, std::ostream& log);

}  // namespace shuntlab::cli
