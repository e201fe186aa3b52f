#pragma once

#include <string>

#include "cme/config.hpp"

namespace cme_test {

// Nearest-neighbour walk on Z with weights pp (step +1) and pm (step -1).
inline cme::SystemConfig polya1(const std::string& pp, const std::string& pm, int N = 40) {
    std::string j = std::string(R"({
      "name": "t_polya1", "family": "polya",
      "shift": {"symbols": ["+1", "-1"], "adjacency": [[1,1],[1,1]],
                "dagger": {"+1": "-1", "-1": "+1"}},
      "potential": {"depth": 1, "values": {"+1": ")") + pp + R"(", "-1": ")" + pm + R"("}},
      "group": {"kind": "lattice", "d": 1},
      "psi": {"+1": [1], "-1": [-1]},
      "numerics": {"N": )" + std::to_string(N) +
                    R"(, "depth": 3, "ball_radius": 3, "seed": 0, "exact": false, "tol": 0.0001}})";
    return cme::parse_config(j);
}

// Uniform nearest-neighbour walk on the free group F_2.
inline cme::SystemConfig free2(int N = 20) {
    std::string j = R"({
      "name": "t_free2", "family": "free",
      "shift": {"symbols": ["a", "A", "b", "B"],
                "adjacency": [[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]],
                "dagger": {"a": "A", "A": "a", "b": "B", "B": "b"}},
      "potential": {"depth": 1, "values": {"a": "1/4", "A": "1/4", "b": "1/4", "B": "1/4"}},
      "group": {"kind": "free", "d": 2},
      "psi": {"a": [1], "A": [-1], "b": [2], "B": [-2]},
      "numerics": {"N": )" + std::to_string(N) +
                    R"(, "depth": 2, "ball_radius": 2, "seed": 0, "exact": false, "tol": 0.001}})";
    return cme::parse_config(j);
}

// Golden-mean shift with a depth-2 potential and Z steps (-1, +2).
inline cme::SystemConfig golden(int N = 60) {
    std::string j = R"({
      "name": "t_golden", "family": "generic",
      "shift": {"symbols": ["1", "2"], "adjacency": [[1,1],[1,0]],
                "dagger": {"1": "1", "2": "2"}},
      "potential": {"depth": 2, "values": {"1,1": "9/20", "1,2": "11/20", "2,1": "1"}},
      "group": {"kind": "lattice", "d": 1},
      "psi": {"1": [-1], "2": [2]},
      "numerics": {"N": )" + std::to_string(N) +
                    R"(, "depth": 3, "ball_radius": 3, "seed": 0, "exact": false, "tol": 0.001}})";
    return cme::parse_config(j);
}

}  // namespace cme_test
