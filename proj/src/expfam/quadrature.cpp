#include "loglin/expfam/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "loglin/errors.hpp"

namespace loglin::expfam {

double log_trapezoid(const std::function<double(double)>& logf, double a, double b,
                     std::size_t n) {
    if (n < 2 || !(b > a))
        throw invalid_input("log_trapezoid: bad interval or point count");
    const double h = (b - a) / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a + h * static_cast<double>(i);
        const double v = logf(x);
        if (std::isnan(v))
            throw numerical_failure("log_trapezoid: NaN log-density on grid");
        vals[i] = v;
        shift = std::max(shift, v);
    }
    if (!std::isfinite(shift)) {
        if (shift > 0.0) throw numerical_failure("log_trapezoid: +inf log-density on grid");
        return -std::numeric_limits<double>::infinity(); // identically zero integrand
    }
    // Kahan-compensated sum of the shifted exponentials.
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        const double term = w * std::exp(vals[i] - shift) - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return shift + std::log(h) + std::log(sum);
}

NormalizedDensity normalize_scalar_density(const std::function<double(double)>& logdensity,
                                           double a, double b, std::size_t n_points) {
    if (n_points < 1025)
        throw invalid_input("normalize_scalar_density: need at least 1025 grid points");
    const double log_z = log_trapezoid(logdensity, a, b, n_points);
    if (!std::isfinite(log_z))
        throw numerical_failure("normalize_scalar_density: normalizer is not finite");
    NormalizedDensity out;
    out.log_normalizer = log_z;
    out.normalizer = std::exp(log_z);
    out.a = a;
    out.b = b;
    out.pdf = [logdensity, log_z](double x) { return std::exp(logdensity(x) - log_z); };
    return out;
}

namespace {

constexpr std::size_t kDoublingPoints = 1 << 14;
constexpr int kDoublings = 7;
const double kGrowthThreshold = std::log(1.1);

double log_integral_on(const std::function<double(double)>& logf,
                       ScalarFamily::Support support, double half_width) {
    if (support == ScalarFamily::Support::real_line)
        return log_trapezoid(logf, -half_width, half_width, kDoublingPoints + 1);
    // Positive support: substitute x = e^u so both endpoints stretch together.
    const double lu = std::log(half_width);
    return log_trapezoid([&logf](double u) { return logf(std::exp(u)) + u; }, -lu, lu,
                         kDoublingPoints + 1);
}

} // namespace

Verdict integrability_by_doubling(const std::function<double(double)>& logf,
                                  ScalarFamily::Support support) {
    double half_width = 10.0;
    double prev = -std::numeric_limits<double>::infinity();
    double growth = 0.0;
    try {
        for (int k = 0; k <= kDoublings; ++k) {
            const double cur = log_integral_on(logf, support, half_width);
            if (k > 0) {
                if (!std::isfinite(cur)) return Verdict::indeterminate;
                growth = cur - prev;
            }
            prev = cur;
            half_width *= 2.0;
        }
    } catch (const numerical_failure&) {
        // Overflowing integrand: the doubling blew up, which is divergence
        // unless the failure happened on the very first interval.
        return std::isfinite(prev) ? Verdict::no : Verdict::indeterminate;
    }
    if (!std::isfinite(prev)) return Verdict::indeterminate;
    return growth > kGrowthThreshold ? Verdict::no : Verdict::yes;
}

ConjugacyReport check_conjugacy_scalar(
    const ScalarFamily& family,
    const std::function<double(double, double)>& approx_loglik,
    const NaturalParam& eta_prior, const LikelihoodOffset& offset_at_y,
    double x_scale) {
    ConjugacyReport report{Verdict::yes, Verdict::indeterminate, Verdict::indeterminate};

    // y-integrability, probed at fixed x values spread around x_scale. One
    // divergent probe is enough to sink the verdict.
    std::vector<double> probes;
    for (double f : {0.25, 1.0, 4.0, 16.0}) probes.push_back(f * x_scale);
    if (family.support == ScalarFamily::Support::real_line)
        for (double f : {-1.0, -4.0}) probes.push_back(f * x_scale);

    Verdict y_verdict = Verdict::yes;
    for (double x_probe : probes) {
        if (family.support == ScalarFamily::Support::positive_reals && !(x_probe > 0.0))
            continue;
        const Verdict v = integrability_by_doubling(
            [&approx_loglik, x_probe](double y) { return approx_loglik(x_probe, y); },
            ScalarFamily::Support::real_line);
        if (v == Verdict::no) {
            y_verdict = Verdict::no;
            break;
        }
        if (v == Verdict::indeterminate) y_verdict = Verdict::indeterminate;
    }
    report.likelihood_integrable_y = y_verdict;

    // x-integrability of the posterior natural parameter.
    std::vector<Block> post = eta_prior.blocks;
    if (!same_schema(eta_prior, offset_at_y))
        throw invalid_input("check_conjugacy_scalar: offset schema mismatch");
    for (std::size_t i = 0; i < post.size(); ++i) post[i].value += offset_at_y.blocks[i].value;
    report.posterior_integrable_x = integrability_by_doubling(
        [&family, &post](double x) {
            return family.log_base(x) + natural_dot_t(post, family, x);
        },
        family.support);

    return report;
}

} // namespace loglin::expfam
