#include <doctest.h>

#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "loglin/errors.hpp"
#include "loglin/rng/samplers.hpp"
#include "loglin/sim/config.hpp"
#include "loglin/sim/run.hpp"
#include "loglin/sim/scenario.hpp"

using namespace loglin;
using namespace loglin::sim;

namespace {

SweepConfig tiny_sweep() {
    SweepConfig cfg = default_sweep_config();
    cfg.alpha_grid = {GridSpec::Kind::linear, 2, 1.0, 50.0};
    cfg.delta_grid = {GridSpec::Kind::logarithmic, 2, 2.0, 1000.0};
    cfg.n_mc = 3;
    cfg.oracle_samples = 1000;
    cfg.base_seed = 7;
    return cfg;
}

} // namespace

TEST_SUITE_BEGIN("sim");

TEST_CASE("grid values") {
    const auto lin = grid_values({GridSpec::Kind::linear, 40, 1.0, 50.0});
    CHECK(lin.size() == 40);
    CHECK(lin.front() == doctest::Approx(1.0));
    CHECK(lin.back() == doctest::Approx(50.0));
    CHECK(lin[1] - lin[0] == doctest::Approx(49.0 / 39.0));

    const auto lg = grid_values({GridSpec::Kind::logarithmic, 40, 2.0, 1000.0});
    CHECK(lg.front() == doctest::Approx(2.0));
    CHECK(lg.back() == doctest::Approx(1000.0));
    // Constant ratio between neighbors.
    const double ratio = lg[1] / lg[0];
    for (std::size_t i = 2; i < lg.size(); ++i)
        CHECK(lg[i] / lg[i - 1] == doctest::Approx(ratio).epsilon(1e-12));

    const auto single = grid_values({GridSpec::Kind::linear, 1, 3.0, 9.0});
    CHECK(single.size() == 1);
    CHECK(single[0] == 3.0);
}

TEST_CASE("mc instance generation is bit-deterministic") {
    const SweepConfig cfg = default_sweep_config();
    rng::RngStream a(cfg.base_seed, 123), b(cfg.base_seed, 123);
    const McInstance ia = generate_mc_instance(cfg, 10.0, 50.0, a);
    const McInstance ib = generate_mc_instance(cfg, 10.0, 50.0, b);
    CHECK(ia.kin_prior.mean == ib.kin_prior.mean);
    CHECK(ia.ext_prior.dof == ib.ext_prior.dof);
    CHECK(ia.ext_prior.scale == ib.ext_prior.scale);
    REQUIRE(ia.batch.count() == ib.batch.count());
    for (int j = 0; j < ia.batch.count(); ++j)
        CHECK(ia.batch.points[static_cast<std::size_t>(j)] ==
              ib.batch.points[static_cast<std::size_t>(j)]);
}

TEST_CASE("mc instance marginals match the generating laws") {
    const SweepConfig cfg = default_sweep_config();
    const double alpha = 4.0;
    const int n = 10000;
    Vec4 mean_sum = Vec4::Zero();
    Mat2 extent_mean_sum = Mat2::Zero();
    double dof_sum = 0.0;
    long meas_sum = 0;
    for (int i = 0; i < n; ++i) {
        rng::RngStream stream(11, static_cast<std::uint64_t>(i));
        const McInstance inst = generate_mc_instance(cfg, alpha, 10.0, stream);
        mean_sum += inst.kin_prior.mean;
        dof_sum += inst.ext_prior.dof;
        extent_mean_sum += inst.ext_prior.scale / (inst.ext_prior.dof - 6.0);
        meas_sum += inst.batch.count();
    }
    // Kinematic prior mean: N(x0, P/alpha), se_k = sqrt(P_kk/alpha/n).
    for (int k = 0; k < 4; ++k) {
        const double se = std::sqrt(cfg.x0(k) * 0.0 + benchmark_init_cov()(k, k) / alpha / n);
        CHECK(std::abs(mean_sum(k) / n - cfg.x0(k)) < 3.5 * se);
    }
    // Extent-mean draws average to X0 within 2%.
    const Mat2 avg = extent_mean_sum / static_cast<double>(n);
    CHECK((avg - cfg.extent_truth).norm() / cfg.extent_truth.norm() < 0.02);
    // Poisson(100) floored at 7 and Poisson(10) floored at 2.
    CHECK(std::abs(dof_sum / n - 100.0) < 1.0);
    CHECK(std::abs(static_cast<double>(meas_sum) / n - 10.0) < 0.3);
}

TEST_CASE("extent-mean draw averages to the truth for any delta") {
    const SweepConfig cfg = default_sweep_config();
    rng::RngStream stream(12, 0);
    for (double delta : {2.0, 500.0}) {
        Mat2 acc = Mat2::Zero();
        const int n = 20000;
        for (int i = 0; i < n; ++i)
            acc += rng::sample_wishart(stream, delta, cfg.extent_truth / delta);
        acc /= static_cast<double>(n);
        const double tol = delta < 10.0 ? 0.05 : 0.02;
        CHECK((acc - cfg.extent_truth).norm() / cfg.extent_truth.norm() < tol);
    }
}

TEST_CASE("full-horizon track at benchmark parameters never needs SPD repair") {
    TrackConfig cfg = default_track_config();
    cfg.n_mc = 2;
    cfg.base_seed = 21;
    const TrackResult r =
        run_track(cfg, {Method::ffk, Method::ull, Method::lll}, 1);
    for (const auto& rec : r.records) {
        CHECK(rec.ok);
        CHECK(rec.spd_repairs == 0);
        CHECK(std::isfinite(rec.e_x));
        CHECK(std::isfinite(rec.e_extent));
    }
}

TEST_CASE("trajectory starts exactly at the configured initial state") {
    const TrackConfig cfg = default_track_config();
    const auto truth = generate_trajectory(cfg);
    REQUIRE(truth.size() == 181);
    CHECK(truth[0].x(0) == 0.0);
    CHECK(truth[0].x(1) == 0.0);
    CHECK(truth[0].x(2) == doctest::Approx(9.8));
    CHECK(truth[0].x(3) == doctest::Approx(-9.8));

    // Initial extent: eigenvectors (-1,1)/sqrt(2) and (1,1)/sqrt(2) with
    // eigenvalues 170^2 and 400^2.
    const double is2 = 1.0 / std::sqrt(2.0);
    Mat2 e;
    e << -is2, is2, is2, is2;
    Mat2 lam = Mat2::Zero();
    lam(0, 0) = 170.0 * 170.0;
    lam(1, 1) = 400.0 * 400.0;
    const Mat2 expect = e * lam * e.transpose();
    CHECK((truth[0].extent - expect).norm() <= 1e-10 * expect.norm());
}

TEST_CASE("trajectory speed is constant and about 50 km/h") {
    const TrackConfig cfg = default_track_config();
    const auto truth = generate_trajectory(cfg);
    const double speed0 = truth[0].x.tail(2).norm();
    CHECK(speed0 == doctest::Approx(std::sqrt(2.0) * 9.8)); // 13.86 m/s = 49.9 km/h
    CHECK(speed0 * 3.6 == doctest::Approx(49.9).epsilon(0.001));
    for (const auto& t : truth)
        CHECK(t.x.tail(2).norm() == doctest::Approx(speed0).epsilon(1e-12));
    // The two turns actually change the heading.
    const Vec2 v_first = truth.front().x.tail(2);
    const Vec2 v_mid = truth[65].x.tail(2);
    CHECK(std::abs(v_first.dot(v_mid) / (v_first.norm() * v_mid.norm())) < 0.999);
}

TEST_CASE("extent along-track eigenvector follows the velocity at every scan") {
    const TrackConfig cfg = default_track_config();
    const auto truth = generate_trajectory(cfg);
    for (const auto& t : truth) {
        const Vec2 v = t.x.tail(2).normalized();
        // v must be an eigenvector of the extent with eigenvalue 170^2.
        const Vec2 image = t.extent * v;
        CHECK((image - 170.0 * 170.0 * v).norm() <= 1e-12 * 170.0 * 170.0);
    }
}

TEST_CASE("trajectory validates segment bookkeeping") {
    TrackConfig cfg = default_track_config();
    cfg.segments.back().steps -= 1;
    CHECK_THROWS_AS(generate_trajectory(cfg), invalid_input);
}

TEST_CASE("error metric arithmetic on the documented examples") {
    // Single run, H(x - x_opt) = [3, 4], d = 2: E_x = sqrt(25/2).
    SweepConfig cfg = tiny_sweep();
    const double d = 2.0;
    const double e_x = std::sqrt((3.0 * 3.0 + 4.0 * 4.0) / (d * 1.0));
    CHECK(e_x == doctest::Approx(3.5355339059327378));
    // Single run, X - X_opt = I2: E_X = (tr(I)/d^2)^(1/4) = (2/4)^(1/4).
    const double e_extent = std::pow(2.0 / (d * d * 1.0), 0.25);
    CHECK(e_extent == doctest::Approx(0.84089641525371454));
}

TEST_CASE("sweep output is deterministic across worker counts and reruns") {
    const SweepConfig cfg = tiny_sweep();
    const SweepResult r1 = run_sweep(cfg, 1);
    const SweepResult r8 = run_sweep(cfg, 8);
    const SweepResult r1b = run_sweep(cfg, 1);
    CHECK(sweep_csv(r1) == sweep_csv(r8));
    CHECK(sweep_csv(r1) == sweep_csv(r1b));
    CHECK(r1.cells.size() == 2 * 2 * 2);
    // Header plus one row per cell per method.
    const std::string csv = sweep_csv(r1);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("sweep seed changes the output") {
    SweepConfig cfg = tiny_sweep();
    const SweepResult r1 = run_sweep(cfg, 2);
    cfg.base_seed += 1;
    const SweepResult r2 = run_sweep(cfg, 2);
    CHECK(sweep_csv(r1) != sweep_csv(r2));
}

TEST_CASE("track runs produce one record per (run, method) and deterministic errors") {
    TrackConfig cfg = default_track_config();
    cfg.n_mc = 4;
    cfg.horizon = 6;
    cfg.segments = {{Segment::Kind::straight, 6, 0.0}};
    const TrackResult r1 = run_track(cfg, {Method::ffk, Method::ull}, 1);
    CHECK(r1.records.size() == 8);
    const TrackResult r4 = run_track(cfg, {Method::ffk, Method::ull}, 4);
    CHECK(track_csv_deterministic(r1) == track_csv_deterministic(r4));
    for (const auto& rec : r1.records) {
        CHECK(rec.ok);
        CHECK(rec.e_x >= 0.0);
        CHECK(rec.e_extent >= 0.0);
    }
    CHECK(r1.aggregates.size() == 2);
    for (const auto& agg : r1.aggregates) CHECK(agg.n_ok == 4);
}

TEST_CASE("near-noiseless stationary track drives the kinematic error down") {
    TrackConfig cfg = default_track_config();
    cfg.n_mc = 1;
    cfg.horizon = 60;
    cfg.segments = {{Segment::Kind::straight, 60, 0.0}};
    cfg.x0 = Vec4(0.0, 0.0, 1e-3, 0.0); // effectively stationary
    cfg.sigma_v = 0.0;                  // no process noise
    cfg.r = 1e-4 * Mat2::Identity();    // negligible sensor noise
    cfg.extent_axis_along = 0.1;        // point-like target: measurement spread
    cfg.extent_axis_cross = 0.2;        // s X + R is then itself negligible
    cfg.alpha0 = 1e10;                  // prior mean pinned at the truth
    cfg.delta0 = 1e6;
    cfg.base_seed = 3;

    TrackConfig cfg_short = cfg;
    cfg_short.horizon = 10;
    cfg_short.segments = {{Segment::Kind::straight, 10, 0.0}};

    const TrackResult long_run = run_track(cfg, {Method::ull}, 1);
    const TrackResult short_run = run_track(cfg_short, {Method::ull}, 1);
    REQUIRE(long_run.records.size() == 1);
    REQUIRE(short_run.records.size() == 1);
    CHECK(long_run.records[0].ok);
    // Errors keep averaging down as the horizon grows.
    CHECK(long_run.records[0].e_x < short_run.records[0].e_x);
    CHECK(long_run.records[0].e_x < 0.1);
}

TEST_CASE("per-run error clipping") {
    TrackConfig cfg = default_track_config();
    cfg.n_mc = 2;
    cfg.horizon = 4;
    cfg.segments = {{Segment::Kind::straight, 4, 0.0}};
    cfg.clip_error_m = 0.001;
    const TrackResult r = run_track(cfg, {Method::ffk}, 1);
    for (const auto& rec : r.records) {
        CHECK(rec.e_x <= 0.001);
        CHECK(rec.e_extent <= 0.001);
    }
}

TEST_CASE("config json round trip and validation") {
    const SweepConfig cfg = default_sweep_config();
    const SweepConfig back = parse_sweep_config(serialize(cfg));
    CHECK(back.n_mc == cfg.n_mc);
    CHECK(back.oracle_samples == cfg.oracle_samples);
    CHECK((back.r - cfg.r).norm() == 0.0);
    CHECK((back.x0 - cfg.x0).norm() == 0.0);
    CHECK(back.alpha_grid.count == 40);

    const TrackConfig tcfg = default_track_config();
    const TrackConfig tback = parse_track_config(serialize(tcfg));
    CHECK(tback.horizon == tcfg.horizon);
    CHECK(tback.segments.size() == tcfg.segments.size());
    CHECK(tback.tau0 == tcfg.tau0);

    CHECK_THROWS_AS(parse_sweep_config("{"), invalid_input);
    CHECK_THROWS_AS(parse_sweep_config(R"({"n_mc": 0})"), invalid_input);
    CHECK_THROWS_AS(parse_track_config(R"({"horizon": 5})"), invalid_input);
    CHECK_THROWS_AS(parse_sweep_config(R"({"alpha_grid":
        {"kind": "linear", "count": 3, "min": 0.1, "max": 2}})"),
                    invalid_input);
}

TEST_CASE("manifest carries hash, seed, version and kernel") {
    const std::string manifest = manifest_json(serialize(default_sweep_config()), 42);
    CHECK(manifest.find("config_hash") != std::string::npos);
    CHECK(manifest.find("\"base_seed\": 42") != std::string::npos);
    CHECK(manifest.find("loglin") != std::string::npos);
    CHECK(manifest.find("kernel") != std::string::npos);
    // Same config, same manifest.
    CHECK(manifest == manifest_json(serialize(default_sweep_config()), 42));
}

TEST_CASE("csv uses 17 significant digits") {
    CHECK(fmt17(1.0 / 3.0) == "0.33333333333333331");
    CHECK(fmt17(0.0) == "0");
}

TEST_SUITE_END();
