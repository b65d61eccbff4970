#pragma once

#include <string>
#include <vector>

#include "isopyc/config.hpp"

namespace isopyc {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Suites: elliptic {1,2}, identities {3,4}, waves {5}, divergence {6,7},
/// sweep {8}, bridge {9}, energy {10,11}.
std::vector<std::string> known_suites();

/// Runs one named suite. Throws ConfigError for an unknown suite name.
SuiteReport run_suite(const std::string& name, const RunConfig& cfg);

/// Runs one numbered acceptance criterion (1..11).
SuiteReport run_criterion(int k, const RunConfig& cfg);

} // namespace isopyc
