#pragma once

#include "padfeec/linalg.hpp"
#include "padfeec/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace padfeec {

struct RunConfig {
    std::string command = "suite all";
    std::string mesh = "box:2";
    int k = -1;                // -1: every applicable degree
    std::string bc = "both";   // none | homogeneous | both
    std::string scheme = "all";
    std::string space = "abc";
    std::string source = "random:1";  // zero | const:<c> | random:<seed> | cos
    Tolerances tol;
    std::string output;        // report path, stdout when empty
    std::string mesh_out;      // mesh gen target
    std::string format = "json";
    int samples = 20;
    std::vector<int> levels;   // refinement levels for base-pair tables
    bool check_equivalence = false;
    bool timings = false;

    void validate() const;
    nlohmann::ordered_json to_json() const;
    // Missing keys keep the values already in *this.
    void merge_json(const nlohmann::ordered_json& j);
};

const std::vector<std::string>& known_commands();

// Runs the named pipeline. Module errors become failed records.
Report run(const RunConfig& config);

}  // namespace padfeec
