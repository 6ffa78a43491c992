#include "loglin/ett/ett.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"
#include "loglin/linalg.hpp"

namespace loglin::ett {

namespace {

// Internal smoothing of computed symmetric quantities; the strict
// linalg::symmetrize with its asymmetry check is reserved for input
// validation at API boundaries.
MatX sym_avg(const MatX& a) { return 0.5 * (a + a.transpose()); }

} // namespace

void validate(const KinematicBelief& b) {
    if (b.cov.rows() != b.cov.cols() || b.cov.rows() != b.mean.size())
        throw invalid_parameter("KinematicBelief: dimension mismatch");
    linalg::require_spd(b.cov, "kinematic covariance");
}

void validate(const ExtentBelief& b) {
    if (!(b.dof > 2.0 * static_cast<double>(b.dim())))
        throw invalid_parameter("ExtentBelief: need nu > 2d");
    linalg::require_spd(b.scale, "extent scale");
}

void validate(const EttModel& m) {
    if (!(m.s > 0.0))
        throw invalid_parameter("EttModel: need s > 0");
    linalg::require_spd(m.r, "EttModel R");
    if (m.h.rows() != m.r.rows())
        throw invalid_parameter("EttModel: H and R row mismatch");
    Eigen::FullPivLU<MatX> lu(m.h);
    if (lu.rank() < m.h.rows())
        throw invalid_parameter("EttModel: H must have full row rank");
}

void validate(const MotionModel& m) {
    if (m.a.rows() != m.a.cols() || m.q.rows() != m.q.cols() || m.a.rows() != m.q.rows())
        throw invalid_parameter("MotionModel: A and Q must be square and compatible");
    if (!(m.tau > 0.0) || !(m.tau0 > 0.0))
        throw invalid_parameter("MotionModel: need tau > 0 and tau0 > 0");
    if (!linalg::is_psd(m.q))
        throw invalid_parameter("MotionModel: Q must be symmetric PSD");
}

MatX extent_mean(const ExtentBelief& b) {
    const double divisor = b.dof - 2.0 * static_cast<double>(b.dim()) - 2.0;
    if (!(divisor > 0.0))
        throw mean_undefined("extent_mean: need nu > 2d + 2");
    return b.scale / divisor;
}

BatchStats batch_stats(const MeasurementBatch& b, const VecX& predicted) {
    if (b.count() < 1)
        throw invalid_input("batch_stats: empty batch");
    const Eigen::Index d = predicted.size();
    VecX mean = VecX::Zero(d);
    MatX spread = MatX::Zero(d, d);
    for (const VecX& y : b.points) {
        if (y.size() != d)
            throw invalid_input("batch_stats: measurement dimension mismatch");
        mean += y;
        const VecX r = y - predicted;
        spread += r * r.transpose();
    }
    const double inv_m = 1.0 / static_cast<double>(b.count());
    return {mean * inv_m, spread * inv_m};
}

MatX scatter_about_mean(const MeasurementBatch& b) {
    if (b.count() < 1)
        throw invalid_input("scatter_about_mean: empty batch");
    const Eigen::Index d = b.points.front().size();
    VecX mean = VecX::Zero(d);
    for (const VecX& y : b.points) mean += y;
    mean /= static_cast<double>(b.count());
    MatX scatter = MatX::Zero(d, d);
    for (const VecX& y : b.points) {
        const VecX r = y - mean;
        scatter += r * r.transpose();
    }
    return scatter / static_cast<double>(b.count());
}

namespace {

MatX innovation_cov_total(const EttModel& model, const MatX& extent_hat) {
    return sym_avg(model.s * extent_hat + model.r);
}

ExtentBelief apply_increment(const ExtentBelief& prior, int m, const MatX& increment,
                             UpdateDiag* diag) {
    ExtentBelief post;
    post.dof = prior.dof + static_cast<double>(m);
    const MatX raw = prior.scale + increment;
    linalg::SpdRepair rep = linalg::repair_spd(raw);
    if (rep.repaired && diag) ++diag->spd_repairs;
    post.scale = rep.value;
    return post;
}

} // namespace

KinematicBelief kinematic_update(const KinematicBelief& prior, const EttModel& model,
                                 const MeasurementBatch& b, const MatX& extent_hat) {
    if (b.count() < 1)
        throw invalid_input("kinematic_update: empty batch");
    const BatchStats stats = batch_stats(b, model.h * prior.mean);
    const double m = static_cast<double>(b.count());
    const MatX s_mat = sym_avg(
        MatX(model.h * prior.cov * model.h.transpose())) +
        innovation_cov_total(model, extent_hat) / m;
    Eigen::LLT<MatX> llt(s_mat);
    if (llt.info() != Eigen::Success)
        throw numerical_failure("kinematic_update: innovation covariance singular");
    // K = P H^T S^-1 via one solve against H P.
    const MatX gain = llt.solve(model.h * prior.cov).transpose();
    KinematicBelief post;
    post.mean = prior.mean + gain * (stats.mean - model.h * prior.mean);
    post.cov = sym_avg(MatX(prior.cov - gain * s_mat * gain.transpose()));
    return post;
}

KinematicBelief kinematic_update_information(const KinematicBelief& prior,
                                             const EttModel& model,
                                             const MeasurementBatch& b,
                                             const MatX& extent_hat) {
    if (b.count() < 1)
        throw invalid_input("kinematic_update_information: empty batch");
    const double m = static_cast<double>(b.count());
    VecX ybar = VecX::Zero(model.h.rows());
    for (const VecX& y : b.points) ybar += y;
    ybar /= m;

    const MatX c = innovation_cov_total(model, extent_hat);
    Eigen::LLT<MatX> cllt(c);
    if (cllt.info() != Eigen::Success)
        throw numerical_failure("kinematic_update_information: sX+R singular");
    Eigen::LLT<MatX> pllt(prior.cov);
    if (pllt.info() != Eigen::Success)
        throw invalid_parameter("kinematic_update_information: prior covariance not SPD");

    const Eigen::Index n = prior.mean.size();
    const MatX info = pllt.solve(MatX::Identity(n, n)) +
                      m * model.h.transpose() * cllt.solve(model.h);
    Eigen::LLT<MatX> illt(sym_avg(info));
    if (illt.info() != Eigen::Success)
        throw numerical_failure("kinematic_update_information: posterior information singular");
    KinematicBelief post;
    post.cov = illt.solve(MatX::Identity(n, n));
    post.cov = 0.5 * (post.cov + post.cov.transpose());
    post.mean = post.cov * (pllt.solve(prior.mean) +
                            m * model.h.transpose() * cllt.solve(ybar));
    return post;
}

MatX ffk_increment(const MatX& y1, const MatX& y2, int m, const MatX& extent_hat,
                   const MatX& hph, const MatX& sxr) {
    if (m < 2)
        throw invalid_input("ffk_increment: need at least 2 measurements");
    const double md = static_cast<double>(m);
    const MatX ybar1 = sym_avg(MatX(hph + sxr / md));
    const MatX ybar2 = sym_avg(MatX((md - 1.0) / md * sxr));
    if (!linalg::is_spd(ybar1) || !linalg::is_spd(ybar2))
        throw numerical_failure("ffk_increment: expected spread matrix singular");
    const MatX x_half = linalg::sqrt_spd(extent_hat);
    const MatX y1_half_inv = linalg::invsqrt_spd(ybar1);
    const MatX y2_half_inv = linalg::invsqrt_spd(ybar2);
    const MatX t1 = x_half * y1_half_inv * y1 * y1_half_inv * x_half;
    const MatX t2 = x_half * y2_half_inv * y2 * y2_half_inv * x_half;
    return sym_avg(MatX(t1 + (md - 1.0) * t2));
}

MatX linearized_increment(const MatX& spread, int m, const MatX& extent_hat,
                          const MatX& center, double s) {
    const double md = static_cast<double>(m);
    Eigen::LLT<MatX> llt(center);
    if (llt.info() != Eigen::Success)
        throw numerical_failure("linearized_increment: innovation center singular");
    // X_hat C^-1 [Y - C] C^-1 X_hat via two solves.
    const MatX left = llt.solve(extent_hat);           // C^-1 X_hat
    const MatX mid = spread - center;
    return sym_avg(
        MatX(md * extent_hat + md * s * left.transpose() * mid * left));
}

ExtentBelief ffk_extent_update(const ExtentBelief& prior, const KinematicBelief& kin_prior,
                               const EttModel& model, const MeasurementBatch& b,
                               UpdateDiag* diag) {
    if (b.count() < 2)
        throw invalid_input("ffk_extent_update: need at least 2 measurements");
    const MatX x_hat = extent_mean(prior);
    const VecX predicted = model.h * kin_prior.mean;
    const BatchStats stats = batch_stats(b, predicted);
    const VecX dbar = stats.mean - predicted;
    const MatX y1 = dbar * dbar.transpose();
    const MatX y2 = scatter_about_mean(b);
    const MatX hph = sym_avg(
        MatX(model.h * kin_prior.cov * model.h.transpose()));
    const MatX inc = ffk_increment(y1, y2, b.count(), x_hat, hph,
                                   innovation_cov_total(model, x_hat));
    return apply_increment(prior, b.count(), inc, diag);
}

ExtentBelief ull_extent_update(const ExtentBelief& prior, const KinematicBelief& kin_prior,
                               const EttModel& model, const MeasurementBatch& b,
                               UpdateDiag* diag) {
    if (b.count() < 1)
        throw invalid_input("ull_extent_update: empty batch");
    const MatX x_hat = extent_mean(prior);
    const BatchStats stats = batch_stats(b, model.h * kin_prior.mean);
    const MatX hph = sym_avg(
        MatX(model.h * kin_prior.cov * model.h.transpose()));
    const MatX center = sym_avg(
        MatX(hph + innovation_cov_total(model, x_hat)));
    const MatX inc = linearized_increment(stats.spread, b.count(), x_hat, center, model.s);
    return apply_increment(prior, b.count(), inc, diag);
}

ExtentBelief lll_extent_update(const ExtentBelief& prior, const EttModel& model,
                               const MeasurementBatch& b, const VecX& x_hat_kin,
                               UpdateDiag* diag) {
    if (b.count() < 1)
        throw invalid_input("lll_extent_update: empty batch");
    const MatX x_hat = extent_mean(prior);
    const BatchStats stats = batch_stats(b, model.h * x_hat_kin);
    const MatX center = innovation_cov_total(model, x_hat);
    const MatX inc = linearized_increment(stats.spread, b.count(), x_hat, center, model.s);
    return apply_increment(prior, b.count(), inc, diag);
}

Factorization factorize_likelihood(const EttModel& model, const MeasurementBatch& b,
                               const VecX& x_hat, const MatX& extent_hat) {
    if (b.count() < 1)
        throw invalid_input("factorize_likelihood: empty batch");
    linalg::require_spd(extent_hat, "factorize_likelihood: X_hat");
    const BatchStats stats = batch_stats(b, model.h * x_hat);
    const MatX center = innovation_cov_total(model, extent_hat);
    Factorization f;
    f.gaussian_cov = center;
    f.iw_dof = b.count();
    f.iw_scale = linearized_increment(stats.spread, b.count(), extent_hat, center, model.s);
    return f;
}

MatX grad_f1(const MatX& z, double s, const MatX& r) {
    linalg::require_spd(z, "grad_f1: Z");
    linalg::require_spd(r, "grad_f1: R");
    if (s < 0.0)
        throw invalid_parameter("grad_f1: need s >= 0");
    const MatX r_inv = linalg::inverse_spd(r);
    const MatX sum = sym_avg(MatX(z + s * r_inv));
    Eigen::LLT<MatX> llt(sum);
    if (llt.info() != Eigen::Success)
        throw numerical_failure("grad_f1: Z + s R^-1 singular");
    const MatX inv = llt.solve(MatX::Identity(z.rows(), z.cols()));
    return inv.transpose();
}

MatX grad_f2(const MatX& z, double s, const MatX& r, const MatX& n) {
    linalg::require_spd(z, "grad_f2: Z");
    linalg::require_spd(r, "grad_f2: R");
    if (s < 0.0)
        throw invalid_parameter("grad_f2: need s >= 0");
    if (!linalg::is_psd(n))
        throw invalid_parameter("grad_f2: N must be symmetric PSD");
    if (s == 0.0) return MatX::Zero(z.rows(), z.cols());
    const MatX z_inv = linalg::inverse_spd(z);
    const MatX mid = sym_avg(MatX(s * z_inv + r));
    Eigen::LLT<MatX> llt(mid);
    if (llt.info() != Eigen::Success)
        throw numerical_failure("grad_f2: s Z^-1 + R singular");
    const MatX w = llt.solve(z_inv); // (s Z^-1 + R)^-1 Z^-1
    return s * (w.transpose() * n * w).transpose();
}

TimeUpdateResult time_update(const KinematicBelief& kin, const ExtentBelief& ext,
                             const MotionModel& motion) {
    validate(kin);
    validate(ext);
    validate(motion);
    TimeUpdateResult out;
    out.kin.mean = motion.a * kin.mean;
    out.kin.cov = sym_avg(
        MatX(motion.a * kin.cov * motion.a.transpose() + motion.q));

    const double d = static_cast<double>(ext.dim());
    const double prev_div = ext.dof - 2.0 * d - 2.0;
    if (!(prev_div > 0.0))
        throw invalid_parameter("time_update: extent mean undefined (nu <= 2d + 2)");
    double dof_next = std::exp(-motion.tau / motion.tau0) * ext.dof;
    // Keep the extent mean defined with margin after forgetting.
    dof_next = std::max(dof_next, 2.0 * d + 3.0);
    out.ext.dof = dof_next;
    out.ext.scale = ext.scale * ((dof_next - 2.0 * d - 2.0) / prev_div);
    return out;
}

} // namespace loglin::ett
