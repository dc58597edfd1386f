#pragma once

#include <filesystem>
#include <optional>

#include "qcmc/config.hpp"

namespace qcmc {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int threads = 1;
};

/// Executes the experiment selected by `experiment = "..."` in the config and
/// writes <name>.csv plus <name>.manifest.json under out_dir. Returns the
/// paths written. Throws ValidationError / ComputeError / ResourceError;
/// the CLI maps these to exit codes 2 / 3 / 4.
std::vector<std::filesystem::path> run_experiment(const Config& config, const RunOptions& options);

std::vector<std::string> experiment_names();

}  // namespace qcmc
