#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stablekernel {

struct ModelConfig {
    std::string preset = "constant";
    std::map<std::string, double> params;
};

/// Zero n_x / extent select the pipeline's default lattice; empty times select its default nodes.
struct GridConfig {
    int n_x = 0;
    double extent = 0.0;
    int n_t = 40;
    double horizon = 1.0;
    std::vector<double> times;
};

struct Tolerances {
    double symbol_rel_budget = 1e-8;
    double refinement_threshold = 0.05;
    int parametrix_n_max = 8;
    double parametrix_tail_tol = 1e-6;
    int drift_n_max = 12;
    double drift_tail_tol = 1e-6;
    double ck_limit = 1e-3;
    double duhamel_limit = 1e-3;
    double mass_limit = 5e-4;
    double ks_allowance = 1e-2;
};

struct DensityConfig {
    double y = 0.0;
};

struct ParametrixConfig {
    bool refine = false;  ///< also measure bound ratios on the doubled lattice
};

/// Zero epsilon_cut / dt select the simulator defaults.
struct McConfig {
    std::uint64_t n_paths = 20000;
    double epsilon_cut = 0.0;
    double dt = 0.0;
    std::string small_jump_mode = "gaussian-substitute";
    double x0 = 0.0;
    double horizon = 1.0;
    double exit_time = 0.5;
    std::vector<double> exit_radii = {2.0, 4.0, 8.0};  ///< in units of exit_time^{1/alpha}
    std::uint64_t exit_paths = 20000;
};

struct VerifyConfig {
    std::vector<int> acceptance{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};  ///< run after the preset suite; [] skips the suite
};

struct RunConfig {
    std::string pipeline = "density";
    std::string output = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    ModelConfig model;
    GridConfig grid;
    Tolerances tolerances;
    DensityConfig density;
    ParametrixConfig parametrix;
    McConfig mc;
    VerifyConfig verify;
};

const std::vector<std::string>& pipeline_names();

/// Strict JSON reader: every key must be known (ConfigError names the JSON pointer of the
/// first unknown or mistyped key); absent keys keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Every field, in declaration order; parse_config(to_json(c)) == c.
std::string to_json(const RunConfig& config, int indent = 2);
/// SHA-256 of the compact canonical JSON, hex encoded.
std::string config_hash(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace stablekernel
