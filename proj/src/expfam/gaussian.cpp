#include "loglin/expfam/gaussian.hpp"

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"
#include "loglin/linalg.hpp"

namespace loglin::expfam {

NaturalParam gaussian_to_natural(const GaussianParams& p) {
    if (p.cov.rows() != p.cov.cols() || p.cov.rows() != p.mean.size())
        throw invalid_parameter("gaussian_to_natural: dimension mismatch");
    const MatX cov = linalg::symmetrize(p.cov);
    Eigen::LLT<MatX> llt(cov);
    if (llt.info() != Eigen::Success)
        throw invalid_parameter("gaussian_to_natural: covariance not SPD");
    NaturalParam eta{Family::gaussian, {}};
    eta.blocks.push_back(Block::vector("eta1", llt.solve(p.mean)));
    eta.blocks.push_back(Block::sym_matrix(
        "eta2", -0.5 * llt.solve(MatX::Identity(cov.rows(), cov.cols()))));
    return eta;
}

GaussianParams natural_to_gaussian(const NaturalParam& eta) {
    if (eta.family != Family::gaussian || eta.blocks.size() != 2)
        throw invalid_input("natural_to_gaussian: not a gaussian natural parameter");
    const MatX info = -2.0 * eta.blocks[1].value; // Sigma^-1
    Eigen::LLT<MatX> llt(info);
    if (llt.info() != Eigen::Success)
        throw invalid_parameter("natural_to_gaussian: eta2 not negative definite");
    GaussianParams p;
    p.cov = llt.solve(MatX::Identity(info.rows(), info.cols()));
    p.cov = 0.5 * (p.cov + p.cov.transpose());
    p.mean = p.cov * eta.blocks[0].value;
    return p;
}

double gaussian_log_partition(const NaturalParam& eta) {
    const GaussianParams p = natural_to_gaussian(eta);
    Eigen::LLT<MatX> llt(p.cov);
    return 0.5 * p.mean.dot(llt.solve(p.mean)) + 0.5 * linalg::logdet_spd(p.cov);
}

LikelihoodOffset linear_gaussian_offset(const MatX& c, const MatX& r, const VecX& y) {
    linalg::require_spd(r, "linear_gaussian_offset: R");
    if (c.rows() != r.rows() || y.size() != r.rows())
        throw invalid_input("linear_gaussian_offset: dimension mismatch");
    Eigen::LLT<MatX> llt(linalg::symmetrize(r));
    LikelihoodOffset lambda{Family::gaussian, {}};
    lambda.blocks.push_back(Block::vector("eta1", c.transpose() * llt.solve(y)));
    lambda.blocks.push_back(
        Block::sym_matrix("eta2", -0.5 * c.transpose() * llt.solve(c)));
    return lambda;
}

} // namespace loglin::expfam
