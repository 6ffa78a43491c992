#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loglin/types.hpp"

namespace loglin::sim {

enum class Method { ffk, ull, lll };

const char* method_name(Method m);
Method parse_method(const std::string& name); // throws invalid_input

struct GridSpec {
    enum class Kind { linear, logarithmic } kind;
    int count;
    double min;
    double max;
};

std::vector<double> grid_values(const GridSpec& g);

/// One-shot measurement-update comparison over a prior-accuracy grid.
struct SweepConfig {
    GridSpec alpha_grid{GridSpec::Kind::linear, 40, 1.0, 50.0};
    GridSpec delta_grid{GridSpec::Kind::logarithmic, 40, 2.0, 1000.0};
    int n_mc = 1000;
    std::size_t oracle_samples = 100000;
    double s = 0.25;
    MatX r;            // sensor noise, d x d
    MatX h;            // observation matrix, d x n
    VecX x0;           // true kinematic state
    MatX extent_truth; // true extent matrix X0
    std::uint64_t base_seed = 1;
};

struct Segment {
    enum class Kind { straight, turn } kind;
    int steps;
    double turn_rate_deg_s = 0.0;
};

/// Multi-scan single-target tracking scenario.
struct TrackConfig {
    int horizon = 181;
    double tau = 10.0;     // scan period [s]
    double sigma_v = 0.1;  // process noise intensity [m/s^2]
    double tau0 = 15.0;    // extent forgetting time constant [s]
    double s = 0.25;
    MatX r;
    MatX h;
    VecX x0;                        // true initial kinematic state
    double extent_axis_along = 170.0; // sqrt eigenvalue along velocity [m]
    double extent_axis_cross = 400.0; // sqrt eigenvalue across velocity [m]
    double alpha0 = 10.0;
    double delta0 = 5.0;
    double nu_init_poisson_mean = 10.0;
    std::vector<Segment> segments;  // step counts must sum to horizon
    std::uint64_t base_seed = 1;
    int n_mc = 50000;
    double clip_error_m = 0.0;      // 0 disables clipping of per-run errors
};

/// Reference configurations with the benchmark constants baked in.
SweepConfig default_sweep_config();
TrackConfig default_track_config();

// JSON round trip; field names match the struct members.
SweepConfig parse_sweep_config(const std::string& json_text);
TrackConfig parse_track_config(const std::string& json_text);
std::string serialize(const SweepConfig& cfg);
std::string serialize(const TrackConfig& cfg);

/// FNV-1a over a canonical serialization, for the run manifest.
std::uint64_t config_hash(const std::string& canonical_json);

} // namespace loglin::sim
