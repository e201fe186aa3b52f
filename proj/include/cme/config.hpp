#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "cme/extension.hpp"

namespace cme {

// Thrown on malformed configs; `field` points at the offending JSON path.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& msg)
        : std::runtime_error(f + ": " + msg), field(std::move(f)) {}
};

struct NumericsConfig {
    int N = 40;
    int depth = 3;
    int ball_radius = 3;
    std::vector<double> schedule;  // optional s_k values for diagnostics
    std::uint64_t seed = 0;
    bool exact = false;
    double tol = 1e-4;
};

struct SystemConfig {
    std::string name;    // optional "name" field
    std::string family;  // "polya" | "free" | "generic" — picks the validate oracle
    ExtensionSpec extension;
    NumericsConfig numerics;
    std::string config_hash;  // FNV-1a over the canonical serialization
};

SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& json_text);

// Canonical hash used to stamp every output artifact.
std::string fnv1a_hex(const std::string& data);

}  // namespace cme
