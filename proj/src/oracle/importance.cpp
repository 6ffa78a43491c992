#include "loglin/oracle/importance.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"
#include "loglin/kern/kernels.hpp"
#include "loglin/linalg.hpp"
#include "loglin/rng/samplers.hpp"

namespace loglin::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Shifts, exponentiates and normalizes log-weights in place; returns the ESS.
double normalize_weights(std::vector<double>& logw, std::vector<double>& w) {
    const std::size_t cnt = logw.size();
    const double shift = kern::max_value(logw.data(), cnt);
    if (!std::isfinite(shift))
        throw degenerate_weights("importance_posterior: all weights underflowed");
    w.resize(cnt);
    double total = 0.0;
    for (std::size_t i = 0; i < cnt; ++i) {
        w[i] = std::exp(logw[i] - shift);
        total += w[i];
    }
    const double inv_total = 1.0 / total;
    for (std::size_t i = 0; i < cnt; ++i) w[i] *= inv_total;
    return 1.0 / kern::dot(w.data(), w.data(), cnt);
}

} // namespace

OracleResult importance_posterior(const ett::KinematicBelief& kin,
                                  const ett::ExtentBelief& ext, const ett::EttModel& model,
                                  const ett::MeasurementBatch& b, std::size_t n_samples,
                                  rng::RngStream& stream) {
    if (n_samples < 1000)
        throw invalid_input("importance_posterior: need at least 1000 samples");
    if (b.count() < 1)
        throw invalid_input("importance_posterior: empty batch");
    ett::validate(kin);
    ett::validate(ext);
    ett::validate(model);

    const Eigen::Index n = kin.mean.size();
    const Eigen::Index d = model.h.rows();
    const std::size_t m = static_cast<std::size_t>(b.count());
    const std::size_t cnt = n_samples;

    Eigen::LLT<MatX> pllt(kin.cov);
    if (pllt.info() != Eigen::Success)
        throw invalid_parameter("importance_posterior: kinematic covariance not SPD");
    const MatX chol_p = pllt.matrixL();

    // One contiguous array per state component so the weighted reductions can
    // run through the batch kernels.
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(n),
                                        std::vector<double>(cnt));
    std::vector<double> logw(cnt);
    std::vector<double> w;
    const double log_const =
        -0.5 * static_cast<double>(m) * static_cast<double>(d) * kLogTwoPi;

    OracleResult out;
    out.n_samples = cnt;
    out.x_opt.resize(n);

    if (d == 2) {
        std::vector<double> mx(cnt), my(cnt), c00(cnt), c01(cnt), c11(cnt);
        std::vector<double> ex00(cnt), ex01(cnt), ex11(cnt);
        std::vector<double> yx(m), yy(m);
        for (std::size_t j = 0; j < m; ++j) {
            yx[j] = b.points[j](0);
            yy[j] = b.points[j](1);
        }
        VecX z(n);
        for (std::size_t i = 0; i < cnt; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) z(k) = stream.next_gaussian();
            const VecX x = kin.mean + chol_p * z;
            const MatX extent = rng::sample_invwishart(stream, ext.dof, ext.scale);
            for (Eigen::Index k = 0; k < n; ++k)
                xs[static_cast<std::size_t>(k)][i] = x(k);
            ex00[i] = extent(0, 0);
            ex01[i] = extent(0, 1);
            ex11[i] = extent(1, 1);
            const VecX hx = model.h * x;
            mx[i] = hx(0);
            my[i] = hx(1);
            c00[i] = model.s * extent(0, 0) + model.r(0, 0);
            c01[i] = model.s * extent(0, 1) + model.r(0, 1);
            c11[i] = model.s * extent(1, 1) + model.r(1, 1);
        }
        std::vector<double> quad(cnt), det(cnt);
        const kern::Gauss2Inputs in{mx.data(), my.data(), c00.data(), c01.data(),
                                    c11.data(), cnt,      yx.data(),  yy.data(),
                                    m};
        kern::gauss2_misfit(in, quad.data(), det.data());
        for (std::size_t i = 0; i < cnt; ++i) {
            if (!(det[i] > 0.0) || !std::isfinite(quad[i]))
                logw[i] = kNegInf;
            else
                logw[i] = log_const - 0.5 * static_cast<double>(m) * std::log(det[i]) -
                          0.5 * quad[i];
        }
        out.ess = normalize_weights(logw, w);
        for (Eigen::Index k = 0; k < n; ++k)
            out.x_opt(k) = kern::dot(w.data(), xs[static_cast<std::size_t>(k)].data(), cnt);
        out.extent_opt.resize(2, 2);
        out.extent_opt(0, 0) = kern::dot(w.data(), ex00.data(), cnt);
        out.extent_opt(0, 1) = out.extent_opt(1, 0) = kern::dot(w.data(), ex01.data(), cnt);
        out.extent_opt(1, 1) = kern::dot(w.data(), ex11.data(), cnt);
        return out;
    }

    // General-d path, scalar linear algebra per sample.
    std::vector<MatX> extents(cnt);
    VecX z(n);
    for (std::size_t i = 0; i < cnt; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) z(k) = stream.next_gaussian();
        const VecX x = kin.mean + chol_p * z;
        extents[i] = rng::sample_invwishart(stream, ext.dof, ext.scale);
        for (Eigen::Index k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)][i] = x(k);
        const VecX hx = model.h * x;
        const MatX c = linalg::symmetrize(MatX(model.s * extents[i] + model.r));
        Eigen::LLT<MatX> cllt(c);
        if (cllt.info() != Eigen::Success) {
            logw[i] = kNegInf;
            continue;
        }
        double quad = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const VecX r = b.points[j] - hx;
            quad += r.dot(cllt.solve(r));
        }
        logw[i] = log_const - 0.5 * static_cast<double>(m) * linalg::logdet_spd(c) -
                  0.5 * quad;
    }
    out.ess = normalize_weights(logw, w);
    for (Eigen::Index k = 0; k < n; ++k)
        out.x_opt(k) = kern::dot(w.data(), xs[static_cast<std::size_t>(k)].data(), cnt);
    out.extent_opt = MatX::Zero(d, d);
    for (std::size_t i = 0; i < cnt; ++i) out.extent_opt += w[i] * extents[i];
    out.extent_opt = 0.5 * (out.extent_opt + out.extent_opt.transpose());
    return out;
}

} // namespace loglin::oracle
