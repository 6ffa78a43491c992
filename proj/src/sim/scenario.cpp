#include "loglin/sim/scenario.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"
#include "loglin/linalg.hpp"
#include "loglin/rng/samplers.hpp"

namespace loglin::sim {

MatX benchmark_init_cov() {
    Vec4 diag(50.0 * 50.0, 50.0 * 50.0, 10.0 * 10.0, 10.0 * 10.0);
    return diag.asDiagonal();
}

namespace {

constexpr double kNuPoissonMean = 100.0;  // one-shot prior dof law
constexpr double kMeasPoissonMean = 10.0; // measurement count law
constexpr double kNuFloor = 7.0;
constexpr long kMeasFloor = 2;

ett::MeasurementBatch draw_points(const MatX& mean_cov_chol_l, const VecX& mean, long m,
                                  rng::RngStream& stream) {
    ett::MeasurementBatch batch;
    batch.points.reserve(static_cast<std::size_t>(m));
    const Eigen::Index d = mean.size();
    VecX z(d);
    for (long j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) z(k) = stream.next_gaussian();
        batch.points.push_back(mean + mean_cov_chol_l * z);
    }
    return batch;
}

} // namespace

McInstance generate_mc_instance(const SweepConfig& cfg, double alpha, double delta,
                                rng::RngStream& stream) {
    if (!(alpha >= 1.0) || !(delta >= 2.0))
        throw invalid_input("generate_mc_instance: need alpha >= 1 and delta >= 2");
    const Eigen::Index d = cfg.extent_truth.rows();
    const double two_d_plus_2 = 2.0 * static_cast<double>(d) + 2.0;

    McInstance inst;
    inst.kin_prior.cov = benchmark_init_cov();
    inst.kin_prior.mean =
        rng::sample_gaussian(stream, cfg.x0, inst.kin_prior.cov / alpha);

    const double nu = std::max(
        kNuFloor, static_cast<double>(rng::sample_poisson(stream, kNuPoissonMean)));
    const MatX extent_mean_draw =
        rng::sample_wishart(stream, delta, cfg.extent_truth / delta);
    inst.ext_prior.dof = nu;
    inst.ext_prior.scale = extent_mean_draw * (nu - two_d_plus_2);

    const long m =
        std::max(kMeasFloor, rng::sample_poisson(stream, kMeasPoissonMean));
    const MatX meas_cov =
        linalg::symmetrize(MatX(cfg.s * cfg.extent_truth + cfg.r));
    Eigen::LLT<MatX> llt(meas_cov);
    if (llt.info() != Eigen::Success)
        throw invalid_parameter("generate_mc_instance: s X0 + R not SPD");
    inst.batch = draw_points(llt.matrixL(), cfg.h * cfg.x0, m, stream);
    return inst;
}

std::vector<TruthState> generate_trajectory(const TrackConfig& cfg) {
    int steps = 0;
    for (const auto& s : cfg.segments) steps += s.steps;
    if (steps != cfg.horizon)
        throw invalid_input("generate_trajectory: segment steps must sum to the horizon");
    if (cfg.x0.size() != 4)
        throw invalid_input("generate_trajectory: planar model needs a 4-state truth");

    const double a_along = cfg.extent_axis_along * cfg.extent_axis_along;
    const double a_cross = cfg.extent_axis_cross * cfg.extent_axis_cross;

    auto extent_for = [&](const Vec2& vel) {
        const double speed = vel.norm();
        if (!(speed > 0.0))
            throw invalid_input("generate_trajectory: zero velocity has no heading");
        const Vec2 h = vel / speed;
        const Vec2 p(-h(1), h(0));
        return MatX(a_along * h * h.transpose() + a_cross * p * p.transpose());
    };

    std::vector<TruthState> out;
    out.reserve(static_cast<std::size_t>(cfg.horizon));
    Vec2 pos = cfg.x0.head<2>();
    Vec2 vel = cfg.x0.tail<2>();
    out.push_back({(VecX(4) << pos, vel).finished(), extent_for(vel)});

    for (const auto& seg : cfg.segments) {
        for (int i = 0; i < seg.steps && static_cast<int>(out.size()) < cfg.horizon; ++i) {
            if (seg.kind == Segment::Kind::straight) {
                pos += cfg.tau * vel;
            } else {
                const double omega = seg.turn_rate_deg_s * 3.14159265358979323846 / 180.0;
                const double th = omega * cfg.tau;
                Mat2 rot;
                rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
                Mat2 integ;
                integ << std::sin(th) / omega, -(1.0 - std::cos(th)) / omega,
                    (1.0 - std::cos(th)) / omega, std::sin(th) / omega;
                pos += integ * vel;
                vel = rot * vel;
            }
            out.push_back({(VecX(4) << pos, vel).finished(), extent_for(vel)});
        }
    }
    return out;
}

TrackInit draw_track_init(const TrackConfig& cfg, const TruthState& truth0,
                          rng::RngStream& stream) {
    const Eigen::Index d = truth0.extent.rows();
    const double two_d_plus_2 = 2.0 * static_cast<double>(d) + 2.0;
    TrackInit init;
    init.kin.cov = benchmark_init_cov();
    init.kin.mean = rng::sample_gaussian(stream, truth0.x, init.kin.cov / cfg.alpha0);
    const double nu = std::max(
        kNuFloor,
        static_cast<double>(rng::sample_poisson(stream, cfg.nu_init_poisson_mean)));
    const MatX mean_draw =
        rng::sample_wishart(stream, cfg.delta0, truth0.extent / cfg.delta0);
    init.ext.dof = nu;
    init.ext.scale = mean_draw * (nu - two_d_plus_2);
    return init;
}

ett::MeasurementBatch draw_scan(const MatX& h, double s, const MatX& r,
                                const TruthState& truth, rng::RngStream& stream) {
    const long m = std::max(kMeasFloor, rng::sample_poisson(stream, kMeasPoissonMean));
    const MatX meas_cov = linalg::symmetrize(MatX(s * truth.extent + r));
    Eigen::LLT<MatX> llt(meas_cov);
    if (llt.info() != Eigen::Success)
        throw invalid_parameter("draw_scan: s X + R not SPD");
    return draw_points(llt.matrixL(), h * truth.x, m, stream);
}

} // namespace loglin::sim
