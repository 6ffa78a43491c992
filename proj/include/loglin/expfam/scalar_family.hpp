#pragma once

#include <functional>
#include <vector>

#include "loglin/expfam/family.hpp"

namespace loglin::expfam {

/// Evaluator bundle for a 1-d exponential family: base measure and the
/// sufficient-statistic components in block order. Used by the quadrature
/// based checks, where densities are evaluated pointwise on a grid.
struct ScalarFamily {
    Family tag;
    enum class Support { real_line, positive_reals } support;
    std::function<double(double)> log_base;
    std::vector<std::function<double(double)>> t;
};

ScalarFamily quad_trig_family();     // T = (x^2, x, cos x, sin x), h = 1
ScalarFamily inverse_gamma_family(); // T = (log x, 1/x), h = 1
ScalarFamily gamma_family();         // T = (log x, x), h = 1
ScalarFamily gaussian1d_family();    // T = (x, x^2), h = (2 pi)^-1/2

/// eta . T(x) for a scalar family; every block must be 1x1.
double natural_dot_t(const std::vector<Block>& blocks, const ScalarFamily& family, double x);

/// Offset of the likelihood p(y|x) proportional to exp(-(y-x)^2/24 + cos(y-x)):
/// lambda(y) = (-1/24, y/12, cos y, sin y) against T(x) = (x^2, x, cos x, sin x).
LikelihoodOffset sin_example_offset(double y);

/// Exact log-likelihood of the same model, for density plots and
/// integrability probes: -(y-x)^2/24 + cos(y-x).
double sin_example_loglik(double x, double y);

/// A Gaussian-like prior for the quad_trig family: coefficients (a, 0, 0, 0).
NaturalParam quad_trig_prior(double x2_coeff);

NaturalParam igamma_natural(double alpha, double beta); // eta = (-alpha-1, -beta)

} // namespace loglin::expfam
