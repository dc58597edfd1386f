#pragma once

#include <string>
#include <vector>

namespace qcmc {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double expected = 0.0;
    std::string detail;
};

struct CheckGroup {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

/// Named verification suites driven by the CLI (`verify <suite>`) and reused
/// by the acceptance binary. Suites: kernel, lor, bounds, estimators,
/// figures. `fast` trims the figure suite to the one-qubit checks.
CheckGroup run_verify_suite(const std::string& suite, bool fast);

std::vector<std::string> verify_suite_names();

/// Prints one line per check; returns true when everything passed.
bool print_check_group(const CheckGroup& group);

}  // namespace qcmc
