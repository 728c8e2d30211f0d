// cli.hpp: command-line front end and run manifests.

#pragma once

#include "qzsim/model.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qzsim::cli {

enum ExitCode : int { ok = 0, usage_error = 2, io_error = 3, numerical_error = 4 };

/// Everything needed to reproduce one command invocation.
struct RunManifest {
    std::string command{};
    std::string tool_version{};
    SystemParams params{};
    nlohmann::json protocol{};  // segments for single runs, grid for sweeps, null otherwise
    std::optional<double> dt_ns{};
    nlohmann::json settings{};  // resolved command settings (tau, delta, cycles, ...)
    std::vector<std::string> outputs{};
    double wall_clock_seconds{0.0};

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

std::string tool_version();

/// Runs `qzsim <subcommand> ...` and returns the process exit code.
/// Subcommands: free, quench, zeno, bound-state, sweep.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qzsim::cli
