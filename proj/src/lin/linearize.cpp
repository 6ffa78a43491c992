#include "loglin/lin/linearize.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"
#include "loglin/linalg.hpp"

namespace loglin::lin {

LinearizationResult linearize_wrt_transform(
    const std::function<double(const VecX&)>& l, const Transform& t, const VecX& x_hat,
    const std::optional<std::function<VecX(const VecX&)>>& analytic_gradient) {
    LinearizationResult out;
    out.nominal = x_hat;
    out.t_nominal = t.forward(x_hat);
    out.offset = l(x_hat);
    if (!std::isfinite(out.offset))
        throw numerical_failure("linearize_wrt_transform: L(x_hat) is not finite");

    if (analytic_gradient) {
        out.gradient = (*analytic_gradient)(out.t_nominal);
        return out;
    }

    const VecX& z0 = out.t_nominal;
    out.gradient.resize(z0.size());
    for (Eigen::Index i = 0; i < z0.size(); ++i) {
        const double h = std::max(1e-6, 1e-6 * std::abs(z0(i)));
        VecX zp = z0, zm = z0;
        zp(i) += h;
        zm(i) -= h;
        const double fp = l(t.inverse(zp));
        const double fm = l(t.inverse(zm));
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw numerical_failure(
                "linearize_wrt_transform: non-finite value in finite-difference stencil");
        out.gradient(i) = (fp - fm) / (2.0 * h);
    }
    return out;
}

LinearizationResult linearize_wrt_transform_1d(
    const std::function<double(double)>& l, const std::function<double(double)>& t,
    const std::function<double(double)>& t_inverse, double x_hat) {
    Transform tv{[t](const VecX& x) { return VecX::Constant(1, t(x(0))); },
                 [t_inverse](const VecX& z) { return VecX::Constant(1, t_inverse(z(0))); }};
    VecX x0 = VecX::Constant(1, x_hat);
    return linearize_wrt_transform([l](const VecX& x) { return l(x(0)); }, tv, x0);
}

expfam::GaussianParams ekf_measurement_update(
    const expfam::GaussianParams& prior, const std::function<VecX(const VecX&)>& c,
    const MatX& jacobian, const MatX& r, const VecX& y) {
    linalg::require_spd(r, "ekf_measurement_update: R");
    const Eigen::Index n = prior.mean.size();
    const Eigen::Index d = y.size();
    if (jacobian.rows() != d || jacobian.cols() != n || r.rows() != d)
        throw invalid_input("ekf_measurement_update: dimension mismatch");

    Eigen::LLT<MatX> rllt(linalg::symmetrize(r));
    Eigen::LLT<MatX> pllt(linalg::symmetrize(prior.cov));
    if (pllt.info() != Eigen::Success)
        throw invalid_parameter("ekf_measurement_update: prior covariance not SPD");

    // Posterior natural parameter
    //   phi1 = J^T R^-1 (y - c(mu) + J mu) + Sigma^-1 mu
    //   phi2 = -(J^T R^-1 J + Sigma^-1) / 2
    const VecX innovation = y - c(prior.mean) + jacobian * prior.mean;
    const VecX phi1 = jacobian.transpose() * rllt.solve(innovation) + pllt.solve(prior.mean);
    const MatX info = jacobian.transpose() * rllt.solve(jacobian) +
                      pllt.solve(MatX::Identity(n, n));

    Eigen::LLT<MatX> illt(0.5 * (info + info.transpose()));
    if (illt.info() != Eigen::Success)
        throw numerical_failure("ekf_measurement_update: posterior information not SPD");
    expfam::GaussianParams post;
    post.cov = illt.solve(MatX::Identity(n, n));
    post.cov = 0.5 * (post.cov + post.cov.transpose());
    post.mean = post.cov * phi1;
    return post;
}

void validate(const IGammaParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0))
        throw invalid_parameter("IGammaParams: need alpha > 0 and beta > 0");
}

namespace {

expfam::LikelihoodOffset igamma_offset(double c_log, double c_inv) {
    expfam::LikelihoodOffset lambda{expfam::Family::inverse_gamma, {}};
    lambda.blocks.push_back(expfam::Block::scalar("log_x", c_log));
    lambda.blocks.push_back(expfam::Block::scalar("inv_x", c_inv));
    return lambda;
}

} // namespace

std::array<IGammaSolution, 4> igamma_solution_offsets(const IGammaParams& prior,
                                                      double sigma2, double y,
                                                      double x_hat) {
    validate(prior);
    if (!(x_hat > 0.0))
        throw invalid_parameter("igamma_solution_offsets: need x_hat > 0");
    if (!(sigma2 > 0.0))
        throw invalid_parameter("igamma_solution_offsets: need sigma2 > 0");

    const double w = x_hat + sigma2;
    const double y2 = y * y;

    // Coefficients of -2 L_hat in (log x, 1/x); the offsets carry -1/2 of them.
    const double s1_log = x_hat / w - y2 * x_hat / (w * w);
    const double s2_inv = -x_hat * x_hat / w + y2 * x_hat * x_hat / (w * w);
    const double s3_log = x_hat / w;
    const double s3_inv = y2 * x_hat * x_hat / (w * w);
    const double s4_log = 1.0;
    const double s4_inv = sigma2 * x_hat / w + y2 * x_hat * x_hat / (w * w);

    return {IGammaSolution{1, igamma_offset(-0.5 * s1_log, 0.0), false, false},
            IGammaSolution{2, igamma_offset(0.0, -0.5 * s2_inv), true, false},
            IGammaSolution{3, igamma_offset(-0.5 * s3_log, -0.5 * s3_inv), true, true},
            IGammaSolution{4, igamma_offset(-0.5 * s4_log, -0.5 * s4_inv), true, true}};
}

double igamma_model_loglik(double x, double y, double sigma2) {
    const double v = x + sigma2;
    return -0.5 * (std::log(v) + y * y / v);
}

double igamma_solution_loglik(int id, double x, double y, double sigma2, double x_hat) {
    const double w = x_hat + sigma2;
    const double y2 = y * y;
    const double anchor = -0.5 * (std::log(w) + y2 / w); // exact value at x_hat
    switch (id) {
        case 1: {
            const double c = x_hat / w - y2 * x_hat / (w * w);
            return anchor - 0.5 * c * (std::log(x) - std::log(x_hat));
        }
        case 2: {
            const double c = -x_hat * x_hat / w + y2 * x_hat * x_hat / (w * w);
            return anchor - 0.5 * c * (1.0 / x - 1.0 / x_hat);
        }
        case 3: {
            const double cl = x_hat / w;
            const double ci = y2 * x_hat * x_hat / (w * w);
            return anchor - 0.5 * cl * (std::log(x) - std::log(x_hat)) -
                   0.5 * ci * (1.0 / x - 1.0 / x_hat);
        }
        case 4: {
            const double ci = sigma2 * x_hat / w + y2 * x_hat * x_hat / (w * w);
            return anchor - 0.5 * (std::log(x) - std::log(x_hat)) -
                   0.5 * ci * (1.0 / x - 1.0 / x_hat);
        }
        default:
            throw invalid_input("igamma_solution_loglik: solution id must be 1..4");
    }
}

IGammaParams igamma_posterior(const IGammaParams& prior,
                              const expfam::LikelihoodOffset& offset) {
    validate(prior);
    if (offset.family != expfam::Family::inverse_gamma || offset.blocks.size() != 2)
        throw invalid_input("igamma_posterior: offset is not in (log x, 1/x) layout");
    const double alpha_post = prior.alpha - offset.blocks[0].as_scalar();
    const double beta_post = prior.beta - offset.blocks[1].as_scalar();
    if (!(alpha_post > 0.0) || !(beta_post > 0.0))
        throw posterior_improper("igamma_posterior: posterior (alpha, beta) left (0, inf)^2");
    return {alpha_post, beta_post};
}

} // namespace loglin::lin
