#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holoweight/quadrature.hpp"

namespace hw {

/// Suite run description. Parsed from a minimal line-oriented text format:
///   key = value          # comment
///   eta = [const, pow:1, "sing:1.5"]
/// Unknown or duplicated keys are rejected with the offending line number.
struct RunConfig {
    std::string domain_id = "disc";
    double collar_inner = 0.05;
    double collar_outer = 0.15;
    std::vector<int> ks = {1, 2, 3};
    std::vector<std::string> g_ids = {"one", "conj_pow:1", "conj_pow:2", "conj_pow:3"};
    std::vector<std::string> eta_ids = {"const",    "pow:1", "pow:2",    "pow:3",
                                        "exp",      "rat2",  "sing:1.5", "sing:1.9"};
    std::vector<std::string> variants = {"corrected"};
    double tol_rel = 1e-8;           // per-cell pass tolerance, smooth test functions
    double tol_rel_singular = 1e-4;  // test functions with a boundary singularity
    double tol_abs = 1e-8 * 3.14159265358979323846;  // used when lhs = 0
    double quad_rel_tol = 1e-10;
    double quad_rel_tol_singular = 1e-6;
    double quad_abs_tol = 1e-13;
    int max_subdivisions = 4000;
    int base_rule = 16;
    int threads = 1;
    std::uint64_t seed = 1;
    std::string out_dir;
};

RunConfig default_config();

/// Strict parse; every error message carries the line number. Referenced ids
/// (domain, g, eta, variant) are resolved eagerly so typos fail here, not
/// mid-run.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

/// Quadrature settings of a config, with the singular-tolerance switch.
QuadratureConfig quadrature_settings(const RunConfig& cfg, bool singular_eta);

}  // namespace hw
