#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "loglin/sim/config.hpp"
#include "loglin/sim/scenario.hpp"

namespace loglin::sim {

/// Executes fn(0..n-1) on `workers` threads. Work items pull from a shared
/// counter; results must be written to pre-sized per-index slots so the
/// output is independent of scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// One-shot sweep
// ---------------------------------------------------------------------------

struct SweepCell {
    double alpha;
    double delta;
    Method method;
    double e_x;
    double e_extent;
    int n_fail;
};

struct SweepResult {
    std::vector<SweepCell> cells; // alpha-major, delta inner, method innermost
    long total_runs = 0;
};

/// Runs FFK and ULL against the importance-sampling reference on every
/// (alpha, delta) cell. Per-run failures are excluded from the error sums and
/// counted in n_fail. Output is byte-deterministic for a fixed base seed,
/// independent of the worker count.
SweepResult run_sweep(const SweepConfig& cfg, int workers);

std::string sweep_csv(const SweepResult& result);

// ---------------------------------------------------------------------------
// Tracking scenario
// ---------------------------------------------------------------------------

struct RunRecord {
    long run_id;
    Method method;
    bool ok;
    std::string fail_reason;
    double e_x;          // per-run kinematic error over the track
    double e_extent;     // per-run extent error over the track
    double cycle_mean_s; // mean wall-clock of one measurement update
    long spd_repairs;
};

struct MethodAggregate {
    Method method;
    long n_ok = 0;
    long n_fail = 0;
    double e_x_mean = 0.0, e_x_std = 0.0;
    double e_extent_mean = 0.0, e_extent_std = 0.0;
    double cycle_mean = 0.0, cycle_std = 0.0;
    long spd_repairs = 0;
};

struct TrackResult {
    std::vector<RunRecord> records; // run-major, method inner
    std::vector<MethodAggregate> aggregates;
};

TrackResult run_track(const TrackConfig& cfg, const std::set<Method>& methods, int workers);

/// Full records; the cycle-time column is wall-clock and varies between
/// executions, every other column is seed-deterministic.
std::string track_csv(const TrackResult& result);
/// Same rows without the timing column (byte-stable across reruns).
std::string track_csv_deterministic(const TrackResult& result);

std::string format_track_summary(const TrackResult& result);

/// Manifest accompanying every output set: config hash, seed, code version,
/// active kernel backend.
std::string manifest_json(const std::string& canonical_config, std::uint64_t base_seed);

/// 17-significant-digit decimal, enough to round-trip any double exactly.
std::string fmt17(double v);

} // namespace loglin::sim
