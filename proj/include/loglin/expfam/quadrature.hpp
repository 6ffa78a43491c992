#pragma once

#include <cstddef>
#include <functional>

#include "loglin/expfam/scalar_family.hpp"

namespace loglin::expfam {

/// log of the trapezoid-rule integral of exp(logf) over [a, b] with n uniform
/// points, evaluated with a max shift so the sum never overflows.
double log_trapezoid(const std::function<double(double)>& logf, double a, double b,
                     std::size_t n);

struct NormalizedDensity {
    double normalizer;     // integral of exp(logdensity) over [a, b]
    double log_normalizer;
    double a, b;
    std::function<double(double)> pdf; // exp(logdensity(x) - log_normalizer)
};

/// Trapezoid normalization of a scalar log-density on [a, b]. n_points >= 1025.
NormalizedDensity normalize_scalar_density(const std::function<double(double)>& logdensity,
                                           double a, double b, std::size_t n_points);

enum class Verdict { yes, no, indeterminate };

/// Interval-doubling divergence heuristic: integrate exp(logf) over
/// [-L, L] (real line) or [1/L, L] (positive reals) for L = 10, 20, ...;
/// the integral is declared divergent when it keeps growing by more than 10%
/// across the final doubling.
Verdict integrability_by_doubling(const std::function<double(double)>& logf,
                                  ScalarFamily::Support support);

struct ConjugacyReport {
    Verdict linear_in_t;            // offsets are linear in T by construction
    Verdict likelihood_integrable_y; // approximate likelihood integrates over y
    Verdict posterior_integrable_x;  // posterior natural parameter normalizable
};

/// Checks the two integrability conditions a conjugate likelihood must satisfy
/// beyond linearity in T. The y condition is probed on the full approximate
/// likelihood exp(approx_loglik(x, y)) at several fixed x spanning the prior's
/// scale; the x condition integrates h(x) exp((eta + lambda) . T(x)).
ConjugacyReport check_conjugacy_scalar(
    const ScalarFamily& family,
    const std::function<double(double, double)>& approx_loglik, // (x, y)
    const NaturalParam& eta_prior, const LikelihoodOffset& offset_at_y,
    double x_scale);

} // namespace loglin::expfam
