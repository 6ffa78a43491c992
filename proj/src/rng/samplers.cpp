#include "loglin/rng/samplers.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"

namespace loglin::rng {

VecX sample_gaussian(RngStream& stream, const VecX& mu, const MatX& cov) {
    if (cov.rows() != cov.cols() || cov.rows() != mu.size())
        throw invalid_parameter("sample_gaussian: dimension mismatch");
    Eigen::LLT<MatX> llt(cov);
    if (llt.info() != Eigen::Success)
        throw invalid_parameter("sample_gaussian: covariance not SPD");
    VecX z(mu.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.next_gaussian();
    return mu + llt.matrixL() * z;
}

namespace {

long poisson_inversion(RngStream& stream, double lambda) {
    const double u = stream.next_uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    long k = 0;
    // Mass beyond lambda + 40*sqrt(lambda) + 100 is far below 2^-64.
    const long cap = static_cast<long>(lambda + 40.0 * std::sqrt(lambda) + 100.0);
    while (u > cdf && k < cap) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

} // namespace

long sample_poisson(RngStream& stream, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw invalid_parameter("sample_poisson: lambda must be finite and >= 0");
    long total = 0;
    while (lambda > 30.0) {
        total += poisson_inversion(stream, 30.0);
        lambda -= 30.0;
    }
    return total + poisson_inversion(stream, lambda);
}

double sample_gamma(RngStream& stream, double shape) {
    if (!(shape > 0.0))
        throw invalid_parameter("sample_gamma: shape must be > 0");
    if (shape < 1.0) {
        const double boost = std::pow(stream.next_uniform(), 1.0 / shape);
        return sample_gamma(stream, shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = stream.next_gaussian();
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = stream.next_uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_chi_squared(RngStream& stream, double dof) {
    if (!(dof > 0.0))
        throw invalid_parameter("sample_chi_squared: dof must be > 0");
    return 2.0 * sample_gamma(stream, 0.5 * dof);
}

MatX sample_wishart(RngStream& stream, double n, const MatX& scale) {
    const Eigen::Index d = scale.rows();
    if (scale.cols() != d)
        throw invalid_parameter("sample_wishart: scale must be square");
    if (!(n > static_cast<double>(d) - 1.0))
        throw invalid_parameter("sample_wishart: need n > d - 1");
    Eigen::LLT<MatX> llt(scale);
    if (llt.info() != Eigen::Success)
        throw invalid_parameter("sample_wishart: scale not SPD");

    // Bartlett factor: diagonal chi draws first, then the strict lower triangle,
    // row by row, so the consumption order is part of the stream contract.
    MatX a = MatX::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        a(i, i) = std::sqrt(sample_chi_squared(stream, n - static_cast<double>(i)));
    for (Eigen::Index i = 1; i < d; ++i)
        for (Eigen::Index j = 0; j < i; ++j) a(i, j) = stream.next_gaussian();

    const MatX la = llt.matrixL() * a;
    return la * la.transpose();
}

MatX sample_invwishart(RngStream& stream, double nu, const MatX& scale) {
    const Eigen::Index d = scale.rows();
    if (!(nu > 2.0 * static_cast<double>(d)))
        throw invalid_parameter("sample_invwishart: need nu > 2d");
    Eigen::LLT<MatX> llt(scale);
    if (llt.info() != Eigen::Success)
        throw invalid_parameter("sample_invwishart: scale not SPD");
    const MatX scale_inv = llt.solve(MatX::Identity(d, d));
    const MatX w = sample_wishart(stream, nu - static_cast<double>(d) - 1.0,
                                  0.5 * (scale_inv + scale_inv.transpose()));
    Eigen::LLT<MatX> wllt(w);
    if (wllt.info() != Eigen::Success)
        throw numerical_failure("sample_invwishart: degenerate Wishart draw");
    const MatX x = wllt.solve(MatX::Identity(d, d));
    return 0.5 * (x + x.transpose());
}

} // namespace loglin::rng
