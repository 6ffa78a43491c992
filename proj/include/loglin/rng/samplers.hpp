#pragma once

#include "loglin/rng/stream.hpp"
#include "loglin/types.hpp"

namespace loglin::rng {

/// Draw from N(mu, cov). cov must be SPD (Cholesky factorization inside).
VecX sample_gaussian(RngStream& stream, const VecX& mu, const MatX& cov);

/// Poisson(lambda) by CDF inversion for lambda <= 30; larger means are split
/// into independent chunks of at most 30 and the counts summed, which is
/// exact because Poisson(a) + Poisson(b) = Poisson(a + b) for independent draws.
long sample_poisson(RngStream& stream, double lambda);

/// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 boosted through
/// Gamma(shape + 1) * U^(1/shape).
double sample_gamma(RngStream& stream, double shape);

double sample_chi_squared(RngStream& stream, double dof);

/// Wishart(n, scale) via Bartlett decomposition; mean is n * scale. Needs n > d - 1.
MatX sample_wishart(RngStream& stream, double n, const MatX& scale);

/// Inverse Wishart with density |V|^((nu-d-1)/2) exp tr(-V X^-1 / 2) / (c |X|^(nu/2)):
/// X ~ IW(nu, V) iff X^-1 ~ Wishart(nu - d - 1, V^-1). Needs nu > 2d. Mean V/(nu-2d-2).
MatX sample_invwishart(RngStream& stream, double nu, const MatX& scale);

} // namespace loglin::rng
