#pragma once

#include <array>
#include <functional>
#include <optional>

#include "loglin/expfam/family.hpp"
#include "loglin/expfam/gaussian.hpp"
#include "loglin/types.hpp"

namespace loglin::lin {

/// First-order expansion of a scalar function L in an invertible transform t:
/// L(x) ~ offset + gradient . (t(x) - t_nominal).
struct LinearizationResult {
    double offset;    // L at the expansion point
    VecX gradient;    // dL/dt, same shape as t(x)
    VecX nominal;     // expansion point x_hat
    VecX t_nominal;   // t(x_hat)

    double approx(const VecX& t_of_x) const {
        return offset + gradient.dot(t_of_x - t_nominal);
    }
};

struct Transform {
    std::function<VecX(const VecX&)> forward;
    std::function<VecX(const VecX&)> inverse;
};

/// Linearizes L with respect to t about t(x_hat). The gradient is the central
/// finite difference of z -> L(t^-1(z)) at z = t(x_hat) with per-component
/// step max(1e-6, 1e-6 |z_i|), unless an analytic gradient is supplied.
LinearizationResult linearize_wrt_transform(
    const std::function<double(const VecX&)>& l, const Transform& t, const VecX& x_hat,
    const std::optional<std::function<VecX(const VecX&)>>& analytic_gradient = std::nullopt);

/// Scalar convenience wrapper.
LinearizationResult linearize_wrt_transform_1d(
    const std::function<double(double)>& l, const std::function<double(double)>& t,
    const std::function<double(double)>& t_inverse, double x_hat);

/// Measurement update for a Gaussian prior and likelihood N(y; c(x), R),
/// linearizing c about the prior mean. `jacobian` is the d x n Jacobian of c
/// at the prior mean (caller-supplied). Works in information form, so the
/// posterior covariance is SPD by construction.
expfam::GaussianParams ekf_measurement_update(
    const expfam::GaussianParams& prior,
    const std::function<VecX(const VecX&)>& c, const MatX& jacobian, const MatX& r,
    const VecX& y);

// ---------------------------------------------------------------------------
// Scalar normal / inverse-gamma model: prior IGamma(x; alpha, beta), likelihood
// N(y; 0, x + sigma2). Four ways of linearizing the log-likelihood in
// T(x) = (log x, 1/x), with different integrability behavior.
// ---------------------------------------------------------------------------

struct IGammaParams {
    double alpha; // shape > 0
    double beta;  // scale > 0
};

void validate(const IGammaParams& p);

struct IGammaSolution {
    int id;                        // 1..4
    expfam::LikelihoodOffset offset;
    bool integrable_in_y;          // false only for solution 1
    bool posterior_always_proper;  // true for solutions 3 and 4 (x_hat > 0)
};

/// The four (log x, 1/x) offsets for linearizing
/// -2 L = log(x + sigma2) + y^2/(x + sigma2) about x_hat > 0.
std::array<IGammaSolution, 4> igamma_solution_offsets(const IGammaParams& prior,
                                                      double sigma2, double y,
                                                      double x_hat);

/// Exact log-likelihood of the model, used when probing integrability.
double igamma_model_loglik(double x, double y, double sigma2);

/// Full first-order approximate log-likelihood for one solution (value
/// anchored at x_hat, so the y-dependent constant is kept).
double igamma_solution_loglik(int id, double x, double y, double sigma2, double x_hat);

/// alpha' = alpha - lambda_log, beta' = beta - lambda_inv; throws
/// posterior_improper unless alpha' > 0 and beta' > 0.
IGammaParams igamma_posterior(const IGammaParams& prior,
                              const expfam::LikelihoodOffset& offset);

/// The linearization point the reference derivation suggests, alpha/beta.
/// (The inverse-gamma mean is actually beta/(alpha-1); both are accepted,
/// this is the default.)
inline double igamma_default_nominal(const IGammaParams& p) { return p.alpha / p.beta; }

} // namespace loglin::lin
