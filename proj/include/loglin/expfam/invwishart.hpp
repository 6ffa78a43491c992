#pragma once

#include "loglin/expfam/family.hpp"
#include "loglin/types.hpp"

namespace loglin::expfam {

/// Inverse Wishart in the convention
///   IW(X; nu, V) = |V|^((nu-d-1)/2) exp tr(-V X^-1 / 2)
///                  / (2^((nu-d-1)d/2) Gamma_d[(nu-d-1)/2] |X|^(nu/2)),
/// which requires nu > 2d and has mean V / (nu - 2d - 2).
struct InvWishartParams {
    double dof;
    MatX scale;

    Eigen::Index dim() const { return scale.rows(); }
};

void validate(const InvWishartParams& p);

/// eta = (-nu/2, -V/2) against T(X) = (log|X|, X^-1).
NaturalParam invwishart_to_natural(const InvWishartParams& p);

InvWishartParams natural_to_invwishart(const NaturalParam& eta);

/// V / (nu - 2d - 2); throws mean_undefined when nu <= 2d + 2.
MatX invwishart_mean(const InvWishartParams& p);

/// eta . T(X) = -(nu/2) log|X| - tr(V X^-1)/2, the unnormalized log density.
double invwishart_unnormalized_logpdf(const InvWishartParams& p, const MatX& x);

/// Full log density including the multivariate-gamma normalizer.
double invwishart_logpdf(const InvWishartParams& p, const MatX& x);

/// log Gamma_d(a) = d(d-1)/4 log pi + sum_j lgamma(a + (1-j)/2), j = 1..d.
double log_multivariate_gamma(int d, double a);

} // namespace loglin::expfam
