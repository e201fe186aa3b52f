#pragma once

#include "cme/config.hpp"
#include "cme/patterson.hpp"

namespace cme {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;   // measured quantity
    double bound = 0.0;   // tolerance it was held against
    std::string detail;
    double seconds = 0.0;
};

struct ValidateReport {
    std::string config_name;
    std::string config_hash;
    std::vector<CheckResult> checks;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }
};

// Full engine-vs-oracle diff suite for one system; the set of checks depends
// on the config family (polya / free / generic).
ValidateReport validate_config(const SystemConfig& cfg);

}  // namespace cme
