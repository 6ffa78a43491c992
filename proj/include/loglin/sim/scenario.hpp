#pragma once

#include <vector>

#include "loglin/ett/ett.hpp"
#include "loglin/rng/stream.hpp"
#include "loglin/sim/config.hpp"
#include "loglin/types.hpp"

namespace loglin::sim {

/// Prior covariance used when initializing filters in both benchmark scenarios:
/// diag(50^2, 50^2, 10^2, 10^2).
MatX benchmark_init_cov();

/// One Monte-Carlo instance of the one-shot scenario: a randomized predicted
/// density plus one scan drawn from the true target.
struct McInstance {
    ett::KinematicBelief kin_prior;
    ett::ExtentBelief ext_prior;
    ett::MeasurementBatch batch;
};

/// Draws, in this order: kinematic prior mean ~ N(x0, P/alpha); prior dof
/// nu = max(7, Poisson(100)); extent mean ~ Wishart(delta, X0/delta) scaled to
/// the scale matrix V = mean * (nu - 2d - 2); measurement count
/// m = max(2, Poisson(10)); then m points ~ N(H x0, s X0 + R).
McInstance generate_mc_instance(const SweepConfig& cfg, double alpha, double delta,
                                rng::RngStream& stream);

struct TruthState {
    VecX x;      // position and velocity
    MatX extent;
};

/// Deterministic truth sequence: constant speed, straight and coordinated-turn
/// segments, extent eigenvalues fixed with the along-track axis following the
/// instantaneous velocity direction.
std::vector<TruthState> generate_trajectory(const TrackConfig& cfg);

/// Filter initialization for one tracking run, mirroring the one-shot law with
/// (alpha0, delta0) and nu = max(7, Poisson(nu_init_poisson_mean)).
struct TrackInit {
    ett::KinematicBelief kin;
    ett::ExtentBelief ext;
};

TrackInit draw_track_init(const TrackConfig& cfg, const TruthState& truth0,
                          rng::RngStream& stream);

/// One scan from the true target: m = max(2, Poisson(10)) points from
/// N(H x_true, s X_true + R).
ett::MeasurementBatch draw_scan(const MatX& h, double s, const MatX& r,
                                const TruthState& truth, rng::RngStream& stream);

} // namespace loglin::sim
