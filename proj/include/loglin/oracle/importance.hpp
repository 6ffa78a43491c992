#pragma once

#include <cstddef>

#include "loglin/ett/ett.hpp"
#include "loglin/rng/stream.hpp"
#include "loglin/types.hpp"

namespace loglin::oracle {

struct OracleResult {
    VecX x_opt;      // posterior mean of the kinematic state
    MatX extent_opt; // posterior mean of the extent matrix
    double ess;      // effective sample size 1 / sum w_i^2
    std::size_t n_samples;
};

/// Reference posterior by plain importance sampling with the predicted density
/// as proposal: (x_i, X_i) ~ N(x, P) IW(nu, V), log-weights summed over the
/// scan's Gaussian factors N(y_j; H x_i, s X_i + R), normalized with one
/// log-sum-exp pass. No resampling. Throws degenerate_weights if every weight
/// underflows. For d = 2 the weight loop runs through the batch kernels.
OracleResult importance_posterior(const ett::KinematicBelief& kin,
                                  const ett::ExtentBelief& ext, const ett::EttModel& model,
                                  const ett::MeasurementBatch& b, std::size_t n_samples,
                                  rng::RngStream& stream);

} // namespace loglin::oracle
