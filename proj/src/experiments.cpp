#include "qcmc/experiments.hpp"

namespace qcmc {

std::vector<std::string> experiment_names() { return {}; }

std::vector<std::filesystem::path> run_experiment(const Config&, const RunOptions&) {
    throw ValidationError("experiments not wired yet");
}

}  // namespace qcmc
