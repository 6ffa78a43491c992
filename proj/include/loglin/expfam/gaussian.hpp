#pragma once

#include "loglin/expfam/family.hpp"
#include "loglin/types.hpp"

namespace loglin::expfam {

struct GaussianParams {
    VecX mean;
    MatX cov;
};

/// eta(mu, Sigma) = (Sigma^-1 mu, -Sigma^-1 / 2).
NaturalParam gaussian_to_natural(const GaussianParams& p);

/// Inverse map: Sigma = -eta2^-1 / 2, mu = Sigma eta1.
GaussianParams natural_to_gaussian(const NaturalParam& eta);

/// A(eta) = mu^T Sigma^-1 mu / 2 + log|Sigma| / 2 with (mu, Sigma) recovered from eta.
double gaussian_log_partition(const NaturalParam& eta);

/// Conjugate offset implied by a linear-Gaussian likelihood N(y; Cx, R):
/// lambda = (C^T R^-1 y, -C^T R^-1 C / 2). Adding it to a Gaussian prior's
/// natural parameter is the information-filter measurement update.
LikelihoodOffset linear_gaussian_offset(const MatX& c, const MatX& r, const VecX& y);

} // namespace loglin::expfam
