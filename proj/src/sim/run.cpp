#include "loglin/sim/run.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "loglin/errors.hpp"
#include "loglin/kern/kernels.hpp"
#include "loglin/oracle/importance.hpp"
#include "loglin/version.hpp"

namespace loglin::sim {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers < 1) workers = 1;
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

struct SweepRunOutcome {
    bool oracle_ok = false;
    bool ffk_ok = false;
    bool ull_ok = false;
    double ffk_x_term = 0.0, ffk_extent_term = 0.0;
    double ull_x_term = 0.0, ull_extent_term = 0.0;
};

SweepRunOutcome sweep_one_run(const SweepConfig& cfg, double alpha, double delta,
                              std::uint64_t stream_id) {
    SweepRunOutcome out;
    rng::RngStream stream(cfg.base_seed, stream_id);
    const ett::EttModel model{cfg.h, cfg.s, cfg.r};

    McInstance inst;
    oracle::OracleResult ref;
    try {
        inst = generate_mc_instance(cfg, alpha, delta, stream);
        ref = oracle::importance_posterior(inst.kin_prior, inst.ext_prior, model,
                                           inst.batch, cfg.oracle_samples, stream);
        out.oracle_ok = true;
    } catch (const error&) {
        return out;
    }

    auto error_terms = [&](const ett::KinematicBelief& kin_post,
                           const ett::ExtentBelief& ext_post, double& x_term,
                           double& extent_term) {
        const VecX dx = cfg.h * (kin_post.mean - ref.x_opt);
        x_term = dx.squaredNorm();
        const MatX dext = ett::extent_mean(ext_post) - ref.extent_opt;
        extent_term = (dext * dext).trace();
    };

    try {
        const MatX x_hat = ett::extent_mean(inst.ext_prior);
        const ett::KinematicBelief kin_post =
            ett::kinematic_update(inst.kin_prior, model, inst.batch, x_hat);
        const ett::ExtentBelief ext_post =
            ett::ffk_extent_update(inst.ext_prior, inst.kin_prior, model, inst.batch);
        error_terms(kin_post, ext_post, out.ffk_x_term, out.ffk_extent_term);
        out.ffk_ok = true;
    } catch (const error&) {
    }

    try {
        const MatX x_hat = ett::extent_mean(inst.ext_prior);
        const ett::KinematicBelief kin_post =
            ett::kinematic_update(inst.kin_prior, model, inst.batch, x_hat);
        const ett::ExtentBelief ext_post =
            ett::ull_extent_update(inst.ext_prior, inst.kin_prior, model, inst.batch);
        error_terms(kin_post, ext_post, out.ull_x_term, out.ull_extent_term);
        out.ull_ok = true;
    } catch (const error&) {
    }
    return out;
}

} // namespace

SweepResult run_sweep(const SweepConfig& cfg, int workers) {
    const std::vector<double> alphas = grid_values(cfg.alpha_grid);
    const std::vector<double> deltas = grid_values(cfg.delta_grid);
    const std::size_t n_cells = alphas.size() * deltas.size();
    const auto n_mc = static_cast<std::size_t>(cfg.n_mc);
    const std::size_t n_runs = n_cells * n_mc;
    const double d = static_cast<double>(cfg.h.rows());

    std::vector<SweepRunOutcome> outcomes(n_runs);
    parallel_for(n_runs, workers, [&](std::size_t run) {
        const std::size_t cell = run / n_mc;
        const double alpha = alphas[cell / deltas.size()];
        const double delta = deltas[cell % deltas.size()];
        outcomes[run] = sweep_one_run(cfg, alpha, delta, run);
    });

    SweepResult result;
    result.total_runs = static_cast<long>(n_runs);
    result.cells.reserve(n_cells * 2);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const double alpha = alphas[cell / deltas.size()];
        const double delta = deltas[cell % deltas.size()];
        double ffk_x = 0.0, ffk_extent = 0.0, ull_x = 0.0, ull_extent = 0.0;
        long ffk_ok = 0, ull_ok = 0;
        for (std::size_t j = 0; j < n_mc; ++j) {
            const SweepRunOutcome& o = outcomes[cell * n_mc + j];
            if (o.oracle_ok && o.ffk_ok) {
                ffk_x += o.ffk_x_term;
                ffk_extent += o.ffk_extent_term;
                ++ffk_ok;
            }
            if (o.oracle_ok && o.ull_ok) {
                ull_x += o.ull_x_term;
                ull_extent += o.ull_extent_term;
                ++ull_ok;
            }
        }
        auto push = [&](Method m, double x_sum, double extent_sum, long ok) {
            SweepCell c{alpha, delta, m, 0.0, 0.0, static_cast<int>(n_mc - static_cast<std::size_t>(ok))};
            if (ok > 0) {
                c.e_x = std::sqrt(x_sum / (d * static_cast<double>(ok)));
                c.e_extent = std::pow(extent_sum / (d * d * static_cast<double>(ok)), 0.25);
            }
            result.cells.push_back(c);
        };
        push(Method::ffk, ffk_x, ffk_extent, ffk_ok);
        push(Method::ull, ull_x, ull_extent, ull_ok);
    }
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = "alpha,delta,method,E_x,E_X,n_fail\n";
    for (const SweepCell& c : result.cells) {
        out += fmt17(c.alpha);
        out += ',';
        out += fmt17(c.delta);
        out += ',';
        out += method_name(c.method);
        out += ',';
        out += fmt17(c.e_x);
        out += ',';
        out += fmt17(c.e_extent);
        out += ',';
        out += std::to_string(c.n_fail);
        out += '\n';
    }
    return out;
}

namespace {

struct TrackAccum {
    double x_sq_sum = 0.0;
    double extent_sq_sum = 0.0;
    double cycle_sum_s = 0.0;
    ett::KinematicBelief kin;
    ett::ExtentBelief ext;
    ett::UpdateDiag diag;
    bool ok = true;
    std::string reason;
};

std::vector<RunRecord> track_one_run(const TrackConfig& cfg,
                                     const std::vector<Method>& methods,
                                     const std::vector<TruthState>& truth, long run_id) {
    rng::RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(run_id));
    const ett::EttModel model{cfg.h, cfg.s, cfg.r};
    const ett::MotionModel motion = [&] {
        ett::MotionModel m;
        m.tau = cfg.tau;
        m.tau0 = cfg.tau0;
        m.a = MatX::Identity(4, 4);
        m.a(0, 2) = cfg.tau;
        m.a(1, 3) = cfg.tau;
        const double t2 = cfg.tau * cfg.tau;
        const double sv2 = cfg.sigma_v * cfg.sigma_v;
        m.q = MatX::Zero(4, 4);
        m.q.topLeftCorner(2, 2) = sv2 * t2 * t2 / 4.0 * Mat2::Identity();
        m.q.topRightCorner(2, 2) = sv2 * t2 * cfg.tau / 2.0 * Mat2::Identity();
        m.q.bottomLeftCorner(2, 2) = sv2 * t2 * cfg.tau / 2.0 * Mat2::Identity();
        m.q.bottomRightCorner(2, 2) = sv2 * t2 * Mat2::Identity();
        return m;
    }();

    const TrackInit init = draw_track_init(cfg, truth.front(), stream);
    std::vector<TrackAccum> acc(methods.size());
    for (auto& a : acc) {
        a.kin = init.kin;
        a.ext = init.ext;
    }

    const double d = static_cast<double>(cfg.h.rows());
    const double k_total = static_cast<double>(cfg.horizon);

    for (int k = 0; k < cfg.horizon; ++k) {
        const ett::MeasurementBatch batch =
            draw_scan(cfg.h, cfg.s, cfg.r, truth[static_cast<std::size_t>(k)], stream);
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            TrackAccum& a = acc[mi];
            if (!a.ok) continue;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const MatX x_hat = ett::extent_mean(a.ext);
                const ett::KinematicBelief kin_post =
                    ett::kinematic_update(a.kin, model, batch, x_hat);
                ett::ExtentBelief ext_post;
                switch (methods[mi]) {
                    case Method::ffk:
                        ext_post = ett::ffk_extent_update(a.ext, a.kin, model, batch, &a.diag);
                        break;
                    case Method::ull:
                        ext_post = ett::ull_extent_update(a.ext, a.kin, model, batch, &a.diag);
                        break;
                    case Method::lll:
                        ext_post = ett::lll_extent_update(a.ext, model, batch, a.kin.mean,
                                                          &a.diag);
                        break;
                }
                const auto t1 = std::chrono::steady_clock::now();
                a.cycle_sum_s += std::chrono::duration<double>(t1 - t0).count();
                a.kin = kin_post;
                a.ext = ext_post;
            } catch (const error& e) {
                a.ok = false;
                a.reason = e.what();
                continue;
            }
            const TruthState& t = truth[static_cast<std::size_t>(k)];
            const VecX dx = cfg.h * a.kin.mean - cfg.h * t.x;
            a.x_sq_sum += dx.squaredNorm();
            const MatX dext = ett::extent_mean(a.ext) - t.extent;
            a.extent_sq_sum += (dext * dext).trace();

            if (k + 1 < cfg.horizon) {
                const ett::TimeUpdateResult pred = ett::time_update(a.kin, a.ext, motion);
                a.kin = pred.kin;
                a.ext = pred.ext;
            }
        }
    }

    std::vector<RunRecord> records;
    records.reserve(methods.size());
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const TrackAccum& a = acc[mi];
        RunRecord r{};
        r.run_id = run_id;
        r.method = methods[mi];
        r.ok = a.ok;
        r.fail_reason = a.reason;
        r.spd_repairs = a.diag.spd_repairs;
        if (a.ok) {
            r.e_x = std::sqrt(a.x_sq_sum / (d * k_total));
            r.e_extent = std::pow(a.extent_sq_sum / (d * d * k_total), 0.25);
            if (cfg.clip_error_m > 0.0) {
                r.e_x = std::min(r.e_x, cfg.clip_error_m);
                r.e_extent = std::min(r.e_extent, cfg.clip_error_m);
            }
            r.cycle_mean_s = a.cycle_sum_s / k_total;
        }
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace

TrackResult run_track(const TrackConfig& cfg, const std::set<Method>& methods_in,
                      int workers) {
    if (methods_in.empty())
        throw invalid_input("run_track: no methods selected");
    const std::vector<Method> methods(methods_in.begin(), methods_in.end());
    const std::vector<TruthState> truth = generate_trajectory(cfg);

    std::vector<std::vector<RunRecord>> per_run(static_cast<std::size_t>(cfg.n_mc));
    parallel_for(static_cast<std::size_t>(cfg.n_mc), workers, [&](std::size_t j) {
        per_run[j] = track_one_run(cfg, methods, truth, static_cast<long>(j));
    });

    TrackResult result;
    result.records.reserve(per_run.size() * methods.size());
    for (auto& rr : per_run)
        for (auto& r : rr) result.records.push_back(std::move(r));

    for (Method m : methods) {
        MethodAggregate agg;
        agg.method = m;
        double sx = 0.0, sxx = 0.0, se = 0.0, see = 0.0, sc = 0.0, scc = 0.0;
        for (const RunRecord& r : result.records) {
            if (r.method != m) continue;
            agg.spd_repairs += r.spd_repairs;
            if (!r.ok) {
                ++agg.n_fail;
                continue;
            }
            ++agg.n_ok;
            sx += r.e_x;
            sxx += r.e_x * r.e_x;
            se += r.e_extent;
            see += r.e_extent * r.e_extent;
            sc += r.cycle_mean_s;
            scc += r.cycle_mean_s * r.cycle_mean_s;
        }
        if (agg.n_ok > 0) {
            const double n = static_cast<double>(agg.n_ok);
            agg.e_x_mean = sx / n;
            agg.e_extent_mean = se / n;
            agg.cycle_mean = sc / n;
            auto stddev = [n](double sumsq, double mean) {
                return n > 1.0 ? std::sqrt(std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0)))
                               : 0.0;
            };
            agg.e_x_std = stddev(sxx, agg.e_x_mean);
            agg.e_extent_std = stddev(see, agg.e_extent_mean);
            agg.cycle_std = stddev(scc, agg.cycle_mean);
        }
        result.aggregates.push_back(agg);
    }
    return result;
}

namespace {

std::string track_rows(const TrackResult& result, bool with_cycle) {
    std::string out = with_cycle ? "run_id,method,E_x,E_X,cycle_mean_s\n"
                                 : "run_id,method,E_x,E_X\n";
    for (const RunRecord& r : result.records) {
        if (!r.ok) continue;
        out += std::to_string(r.run_id);
        out += ',';
        out += method_name(r.method);
        out += ',';
        out += fmt17(r.e_x);
        out += ',';
        out += fmt17(r.e_extent);
        if (with_cycle) {
            out += ',';
            out += fmt17(r.cycle_mean_s);
        }
        out += '\n';
    }
    return out;
}

} // namespace

std::string track_csv(const TrackResult& result) { return track_rows(result, true); }

std::string track_csv_deterministic(const TrackResult& result) {
    return track_rows(result, false);
}

std::string format_track_summary(const TrackResult& result) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-6s %14s %14s %18s %8s %8s\n", "method",
                  "E_x mean+-sd", "E_X mean+-sd", "cycle [s] mean+-sd", "ok", "fail");
    out += line;
    for (const MethodAggregate& a : result.aggregates) {
        std::snprintf(line, sizeof(line), "%-6s %7.4f+-%5.4f %7.4f+-%5.4f %9.3g+-%8.3g %8ld %8ld\n",
                      method_name(a.method), a.e_x_mean, a.e_x_std, a.e_extent_mean,
                      a.e_extent_std, a.cycle_mean, a.cycle_std, a.n_ok, a.n_fail);
        out += line;
        if (a.spd_repairs > 0) {
            std::snprintf(line, sizeof(line), "       (%ld SPD repairs)\n", a.spd_repairs);
            out += line;
        }
    }
    return out;
}

std::string manifest_json(const std::string& canonical_config, std::uint64_t base_seed) {
    nlohmann::json j{{"config_hash", config_hash(canonical_config)},
                     {"base_seed", base_seed},
                     {"code_version", version_string()},
                     {"kernel", kern::backend_name(kern::active_backend())}};
    return j.dump(2) + "\n";
}

} // namespace loglin::sim
