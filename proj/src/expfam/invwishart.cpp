#include "loglin/expfam/invwishart.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"
#include "loglin/linalg.hpp"

namespace loglin::expfam {

void validate(const InvWishartParams& p) {
    const double d = static_cast<double>(p.dim());
    if (!(p.dof > 2.0 * d))
        throw invalid_parameter("inverse Wishart: need nu > 2d");
    linalg::require_spd(p.scale, "inverse Wishart scale");
}

NaturalParam invwishart_to_natural(const InvWishartParams& p) {
    validate(p);
    NaturalParam eta{Family::inverse_wishart, {}};
    eta.blocks.push_back(Block::scalar("eta_logdet", -0.5 * p.dof));
    eta.blocks.push_back(Block::sym_matrix("eta_inv", -0.5 * p.scale));
    return eta;
}

InvWishartParams natural_to_invwishart(const NaturalParam& eta) {
    if (eta.family != Family::inverse_wishart || eta.blocks.size() != 2)
        throw invalid_input("natural_to_invwishart: not an inverse-Wishart natural parameter");
    InvWishartParams p{-2.0 * eta.blocks[0].as_scalar(), -2.0 * eta.blocks[1].value};
    validate(p);
    return p;
}

MatX invwishart_mean(const InvWishartParams& p) {
    validate(p);
    const double divisor = p.dof - 2.0 * static_cast<double>(p.dim()) - 2.0;
    if (!(divisor > 0.0))
        throw mean_undefined("inverse Wishart mean needs nu > 2d + 2");
    return p.scale / divisor;
}

double invwishart_unnormalized_logpdf(const InvWishartParams& p, const MatX& x) {
    linalg::require_spd(x, "inverse Wishart argument");
    const MatX xinv = linalg::inverse_spd(x);
    return -0.5 * p.dof * linalg::logdet_spd(x) - 0.5 * (p.scale * xinv).trace();
}

double log_multivariate_gamma(int d, double a) {
    double out = 0.25 * static_cast<double>(d) * static_cast<double>(d - 1) *
                 std::log(3.14159265358979323846);
    for (int j = 1; j <= d; ++j) out += std::lgamma(a + 0.5 * (1.0 - j));
    return out;
}

double invwishart_logpdf(const InvWishartParams& p, const MatX& x) {
    validate(p);
    const int d = static_cast<int>(p.dim());
    const double half_m = 0.5 * (p.dof - d - 1.0);
    const double log_norm = half_m * linalg::logdet_spd(p.scale) -
                            half_m * d * std::log(2.0) -
                            log_multivariate_gamma(d, half_m);
    return log_norm + invwishart_unnormalized_logpdf(p, x);
}

} // namespace loglin::expfam
