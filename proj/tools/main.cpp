// Command-line driver: measurement-update benchmarks (sweep, track) and
// diagnostic suites (gradcheck, conjugacy).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "loglin/errors.hpp"
#include "loglin/ett/ett.hpp"
#include "loglin/expfam/invwishart.hpp"
#include "loglin/expfam/quadrature.hpp"
#include "loglin/expfam/scalar_family.hpp"
#include "loglin/kern/kernels.hpp"
#include "loglin/lin/linearize.hpp"
#include "loglin/linalg.hpp"
#include "loglin/sim/config.hpp"
#include "loglin/sim/run.hpp"
#include "loglin/version.hpp"

namespace fs = std::filesystem;
using namespace loglin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitBadConfig = 2;

void error_report(const std::string& type, const std::string& what) {
    nlohmann::json j{{"error", type}, {"what", what}};
    std::cerr << j.dump() << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write file: " + path.string());
    out << content;
}

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("LOGLIN_OUT_DIR"); env && *env) return env;
    return "results";
}

void apply_kernel_choice(const std::string& kernel) {
    if (kernel.empty() || kernel == "auto") {
        kern::reset_backend();
    } else if (kernel == "scalar") {
        kern::set_backend(kern::Backend::scalar);
    } else if (kernel == "avx2") {
        kern::set_backend(kern::Backend::avx2);
    } else {
        throw invalid_input("unknown kernel '" + kernel + "' (scalar, avx2 or auto)");
    }
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string kernel;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_config = true) {
    if (with_config)
        cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--out", flags.out_dir, "output directory (default: results)");
    cmd->add_option("--seed", flags.seed, "base seed override");
    cmd->add_option("--workers", flags.workers, "worker threads (affects wall-clock only)")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--kernel", flags.kernel, "kernel backend: auto, scalar, avx2");
}

int cmd_sweep(const CommonFlags& flags, std::optional<int> n_mc,
              std::optional<std::size_t> oracle_samples, std::optional<int> alpha_count,
              std::optional<int> delta_count, std::optional<double> r_std) {
    sim::SweepConfig cfg = flags.config_path.empty()
                               ? sim::default_sweep_config()
                               : sim::parse_sweep_config(read_file(flags.config_path));
    if (n_mc) cfg.n_mc = *n_mc;
    if (oracle_samples) cfg.oracle_samples = *oracle_samples;
    if (alpha_count) cfg.alpha_grid.count = *alpha_count;
    if (delta_count) cfg.delta_grid.count = *delta_count;
    if (r_std) cfg.r = (*r_std) * (*r_std) * Mat2::Identity();
    if (flags.seed) cfg.base_seed = *flags.seed;

    const fs::path out = resolve_out_dir(flags.out_dir);
    fs::create_directories(out);
    const sim::SweepResult result = sim::run_sweep(cfg, flags.workers);
    write_file(out / "sweep.csv", sim::sweep_csv(result));
    write_file(out / "manifest.json", sim::manifest_json(sim::serialize(cfg), cfg.base_seed));
    std::printf("sweep: %ld runs over %d x %d grid -> %s\n", result.total_runs,
                cfg.alpha_grid.count, cfg.delta_grid.count,
                (out / "sweep.csv").string().c_str());
    return kExitOk;
}

int cmd_track(const CommonFlags& flags, const std::string& methods_csv,
              std::optional<int> runs, std::optional<int> horizon,
              std::optional<double> clip) {
    sim::TrackConfig cfg = flags.config_path.empty()
                               ? sim::default_track_config()
                               : sim::parse_track_config(read_file(flags.config_path));
    if (runs) cfg.n_mc = *runs;
    if (horizon) {
        cfg.horizon = *horizon;
        cfg.segments = {{sim::Segment::Kind::straight, *horizon, 0.0}};
    }
    if (clip) cfg.clip_error_m = *clip;
    if (flags.seed) cfg.base_seed = *flags.seed;

    std::set<sim::Method> methods;
    std::stringstream ss(methods_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) methods.insert(sim::parse_method(tok));
    if (methods.empty()) throw invalid_input("track: empty method list");

    const fs::path out = resolve_out_dir(flags.out_dir);
    fs::create_directories(out);
    const sim::TrackResult result = sim::run_track(cfg, methods, flags.workers);
    write_file(out / "track.csv", sim::track_csv(result));
    write_file(out / "manifest.json", sim::manifest_json(sim::serialize(cfg), cfg.base_seed));
    std::printf("track: %d runs, horizon %d\n%s", cfg.n_mc, cfg.horizon,
                sim::format_track_summary(result).c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck: finite-difference verification of the extent-gradient formulas
// and the tangency of the linearized likelihood factorization.
// ---------------------------------------------------------------------------

MatX random_spd(std::mt19937& gen, int d, double eps = 0.5) {
    std::normal_distribution<double> nd(0.0, 1.0);
    MatX a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = nd(gen);
    return a * a.transpose() + eps * MatX::Identity(d, d);
}

VecX random_vec(std::mt19937& gen, int d, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    VecX v(d);
    for (int i = 0; i < d; ++i) v(i) = nd(gen);
    return v;
}

double fd_vs_analytic(const std::function<double(const MatX&)>& f, const MatX& z,
                      const MatX& analytic, double h = 1e-5) {
    double worst = 0.0;
    const double scale = analytic.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index j = i; j < z.cols(); ++j) {
            MatX zp = z, zm = z;
            zp(i, j) += h;
            zm(i, j) -= h;
            if (i != j) {
                zp(j, i) += h;
                zm(j, i) -= h;
            }
            const double fd = (f(zp) - f(zm)) / (2.0 * h);
            const double expect = (i == j) ? analytic(i, j) : 2.0 * analytic(i, j);
            const double denom = std::max(std::abs(expect), 1e-8 * std::max(scale, 1.0));
            worst = std::max(worst, std::abs(fd - expect) / denom);
        }
    }
    return worst;
}

double exact_neg2_loglik(const ett::EttModel& model, const std::vector<VecX>& pts,
                         const VecX& x, const MatX& extent) {
    const MatX c = model.s * extent + model.r;
    const MatX cinv = c.inverse();
    double out = static_cast<double>(pts.size()) *
                 (std::log(c.determinant()) +
                  static_cast<double>(c.rows()) * std::log(2.0 * M_PI));
    for (const VecX& y : pts) {
        const VecX r = y - model.h * x;
        out += r.dot(cinv * r);
    }
    return out;
}

int cmd_gradcheck(std::uint64_t seed, int trials) {
    std::mt19937 gen(static_cast<unsigned>(seed));
    std::uniform_real_distribution<double> sd(0.1, 3.0);
    const double threshold = 1e-5;
    bool all_ok = true;

    auto report = [&](const char* name, double worst) {
        const bool ok = worst < threshold;
        all_ok = all_ok && ok;
        std::printf("%-34s max_rel_err=%10.3e  threshold=%.0e  %s\n", name, worst,
                    threshold, ok ? "PASS" : "FAIL");
    };

    for (int d : {2, 3}) {
        double worst_f1 = 0.0, worst_f2 = 0.0;
        for (int t = 0; t < trials; ++t) {
            const MatX z = random_spd(gen, d);
            const MatX r = random_spd(gen, d);
            const MatX n = random_spd(gen, d, 0.0);
            const double s = sd(gen);
            worst_f1 = std::max(
                worst_f1,
                fd_vs_analytic(
                    [&](const MatX& zz) {
                        const MatX root = linalg::sqrt_spd(zz);
                        return std::log(
                            (s * MatX::Identity(d, d) + root * r * root).determinant());
                    },
                    z, ett::grad_f1(z, s, r)));
            worst_f2 = std::max(
                worst_f2, fd_vs_analytic(
                              [&](const MatX& zz) {
                                  return ((s * zz.inverse() + r).inverse() * n).trace();
                              },
                              z, ett::grad_f2(z, s, r, n)));
        }
        char label[64];
        std::snprintf(label, sizeof(label), "F1 gradient (%dx%d, %d trials)", d, d, trials);
        report(label, worst_f1);
        std::snprintf(label, sizeof(label), "F2 gradient (%dx%d, %d trials)", d, d, trials);
        report(label, worst_f2);
    }

    // Invertible-transform linearization: gradient vs an independent central
    // difference in the transformed variable.
    {
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            const double x_hat = 0.5 + 3.0 * std::generate_canonical<double, 53>(gen);
            const auto l = [&](double x) { return std::log(x + 2.0) + 0.3 * x * x; };
            const auto res = lin::linearize_wrt_transform_1d(
                l, [](double x) { return 1.0 / x; }, [](double z) { return 1.0 / z; },
                x_hat);
            const double z0 = res.t_nominal(0);
            const double h = 1e-6 * std::max(1.0, std::abs(z0));
            const double fd = (l(1.0 / (z0 + h)) - l(1.0 / (z0 - h))) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - res.gradient(0)) /
                                        std::max(std::abs(fd), 1e-8));
        }
        report("transform linearization gradient", worst);
    }

    // Likelihood factorization: tangency in Z = X^-1 against the exact scan
    // log-likelihood.
    {
        MatX h(2, 4);
        h << 1, 0, 0, 0, 0, 1, 0, 0;
        const ett::EttModel model{h, 0.5, 4.0 * Mat2::Identity()};
        double worst_grad = 0.0, worst_var = 0.0;
        for (int t = 0; t < trials / 5 + 1; ++t) {
            const VecX x_hat = random_vec(gen, 4, 5.0);
            const MatX extent_hat = random_spd(gen, 2, 1.0) * 5.0;
            ett::MeasurementBatch batch;
            for (int j = 0; j < 6; ++j)
                batch.points.push_back(model.h * x_hat + random_vec(gen, 2, 4.0));
            const auto f = ett::factorize_likelihood(model, batch, x_hat, extent_hat);
            const MatX analytic = -6.0 * extent_hat + f.iw_scale;
            worst_grad = std::max(
                worst_grad,
                fd_vs_analytic(
                    [&](const MatX& z) {
                        return exact_neg2_loglik(model, batch.points, x_hat, z.inverse());
                    },
                    MatX(extent_hat.inverse()), analytic, 1e-6));

            // Variance of (exact - approx) over perturbation directions; the
            // Gaussian factors cancel at fixed x, leaving the IW factor.
            const expfam::InvWishartParams iw{static_cast<double>(f.iw_dof), f.iw_scale};
            auto diff = [&](const MatX& extent) {
                return exact_neg2_loglik(model, batch.points, x_hat, extent) +
                       2.0 * expfam::invwishart_unnormalized_logpdf(iw, extent);
            };
            const double d0 = diff(extent_hat);
            double mean = 0.0, sq = 0.0;
            const int dirs = 12;
            for (int k = 0; k < dirs; ++k) {
                const MatX raw = random_vec(gen, 2) * random_vec(gen, 2).transpose();
                const MatX dext = 1e-4 * 0.5 * (raw + raw.transpose()) * extent_hat.norm();
                const double v = diff(extent_hat + dext) - d0;
                mean += v;
                sq += v * v;
            }
            mean /= dirs;
            worst_var = std::max(worst_var, sq / dirs - mean * mean);
        }
        report("factorization Z-gradient", worst_grad);
        const bool ok = worst_var < 1e-8;
        all_ok = all_ok && ok;
        std::printf("%-34s variance=%10.3e  threshold=1e-08  %s\n",
                    "factorization tangency", worst_var, ok ? "PASS" : "FAIL");
    }

    return all_ok ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// conjugacy: density grids for the multi-modal scalar example and the four
// scalar-variance linearizations, for external plotting.
// ---------------------------------------------------------------------------

int cmd_conjugacy(const CommonFlags& flags) {
    const fs::path out = resolve_out_dir(flags.out_dir);
    fs::create_directories(out);

    // Multi-modal scalar model at y = 3: prior exp(-x^2/10), likelihood
    // exp(-(y-x)^2/24 + cos(y-x)).
    const double y_obs = 3.0;
    const auto fam = expfam::quad_trig_family();
    const auto prior = expfam::quad_trig_prior(-0.1);
    const auto post = expfam::conjugate_update(prior, expfam::sin_example_offset(y_obs));
    const double a = -30.0, b = 30.0;
    const std::size_t n_grid = (1 << 14) + 1;
    const auto prior_nd = expfam::normalize_scalar_density(
        [&](double x) { return expfam::natural_dot_t(prior.blocks, fam, x); }, a, b, n_grid);
    const auto like_nd = expfam::normalize_scalar_density(
        [&](double x) { return expfam::sin_example_loglik(x, y_obs); }, a, b, n_grid);
    const auto post_nd = expfam::normalize_scalar_density(
        [&](double x) { return expfam::natural_dot_t(post.blocks, fam, x); }, a, b, n_grid);

    std::string csv = "x,prior,likelihood,posterior\n";
    const int n_out = 2001;
    for (int i = 0; i < n_out; ++i) {
        const double x = -15.0 + 35.0 * i / (n_out - 1.0);
        csv += sim::fmt17(x) + ',' + sim::fmt17(prior_nd.pdf(x)) + ',' +
               sim::fmt17(like_nd.pdf(x)) + ',' + sim::fmt17(post_nd.pdf(x)) + '\n';
    }
    write_file(out / "example_multimodal.csv", csv);

    // Refined-grid self check of the posterior normalization.
    const std::size_t n_fine = 2 * (n_grid - 1) + 1;
    const double hh = (b - a) / static_cast<double>(n_fine - 1);
    double integral = 0.0;
    for (std::size_t i = 0; i < n_fine; ++i) {
        const double x = a + hh * static_cast<double>(i);
        integral += ((i == 0 || i == n_fine - 1) ? 0.5 : 1.0) * post_nd.pdf(x);
    }
    integral *= hh;
    std::printf("multimodal posterior integral on refined grid: %.9f\n", integral);

    // Four linearizations of the scalar-variance model.
    const lin::IGammaParams igprior{3.0, 2.0};
    const double sigma2 = 1.0;
    const double x_hat = lin::igamma_default_nominal(igprior);
    std::string sol_csv = "solution,y,lambda_log,lambda_inv,alpha_post,beta_post,proper\n";
    for (int i = 0; i <= 80; ++i) {
        const double y = -6.0 + 12.0 * i / 80.0;
        const auto sols = lin::igamma_solution_offsets(igprior, sigma2, y, x_hat);
        for (const auto& sol : sols) {
            double alpha_post = std::nan(""), beta_post = std::nan("");
            bool proper = true;
            try {
                const auto p = lin::igamma_posterior(igprior, sol.offset);
                alpha_post = p.alpha;
                beta_post = p.beta;
            } catch (const posterior_improper&) {
                proper = false;
            }
            sol_csv += std::to_string(sol.id) + ',' + sim::fmt17(y) + ',' +
                       sim::fmt17(sol.offset.blocks[0].as_scalar()) + ',' +
                       sim::fmt17(sol.offset.blocks[1].as_scalar()) + ',' +
                       sim::fmt17(alpha_post) + ',' + sim::fmt17(beta_post) + ',' +
                       (proper ? '1' : '0') + '\n';
        }
    }
    write_file(out / "variance_linearizations.csv", sol_csv);

    // Conjugacy verdicts at a representative observation.
    const auto ig_fam = expfam::inverse_gamma_family();
    const auto eta = expfam::igamma_natural(igprior.alpha, igprior.beta);
    const auto sols = lin::igamma_solution_offsets(igprior, sigma2, 2.0, x_hat);
    auto verdict = [](expfam::Verdict v) {
        return v == expfam::Verdict::yes ? "yes"
               : v == expfam::Verdict::no ? "no"
                                          : "indeterminate";
    };
    for (const auto& sol : sols) {
        const auto rep = expfam::check_conjugacy_scalar(
            ig_fam,
            [&, id = sol.id](double x, double y) {
                return lin::igamma_solution_loglik(id, x, y, sigma2, x_hat);
            },
            eta, sol.offset, x_hat);
        std::printf("solution %d: linear_in_T=%s  y-integrable=%s  posterior-integrable=%s\n",
                    sol.id, verdict(rep.linear_in_t), verdict(rep.likelihood_integrable_y),
                    verdict(rep.posterior_integrable_x));
    }
    std::printf("wrote %s and %s\n", (out / "example_multimodal.csv").string().c_str(),
                (out / "variance_linearizations.csv").string().c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential-family log-likelihood linearization toolkit"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    CommonFlags sweep_flags, track_flags, conj_flags;
    std::optional<int> n_mc, alpha_count, delta_count, runs, horizon;
    std::optional<std::size_t> oracle_samples;
    std::optional<double> r_std, clip;
    std::string methods_csv = "ffk,ull";
    std::uint64_t grad_seed = 1;
    int grad_trials = 50;
    std::string grad_kernel;

    CLI::App* sweep = app.add_subcommand("sweep", "one-shot update comparison vs the "
                                                  "importance-sampling reference");
    add_common(sweep, sweep_flags);
    sweep->add_option("--n-mc", n_mc, "Monte-Carlo runs per grid cell");
    sweep->add_option("--oracle-samples", oracle_samples, "importance samples per run");
    sweep->add_option("--alpha-count", alpha_count, "alpha grid size");
    sweep->add_option("--delta-count", delta_count, "delta grid size");
    sweep->add_option("--r-std", r_std, "isotropic sensor noise standard deviation [m]");

    CLI::App* track = app.add_subcommand("track", "multi-scan single-target tracking runs");
    add_common(track, track_flags);
    track->add_option("--methods", methods_csv, "comma list from {ffk, ull, lll}");
    track->add_option("--runs", runs, "number of Monte-Carlo runs");
    track->add_option("--horizon", horizon, "scan count (overrides segments)");
    track->add_option("--clip", clip, "clip per-run errors at this value [m]");

    CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference gradient and "
                                                     "tangency verification");
    grad->add_option("--seed", grad_seed, "seed for the random instances");
    grad->add_option("--trials", grad_trials, "instances per check")->check(CLI::Range(1, 10000));
    grad->add_option("--kernel", grad_kernel, "kernel backend: auto, scalar, avx2");

    CLI::App* conj = app.add_subcommand("conjugacy", "scalar conjugacy demonstrations, "
                                                     "emits density-grid CSVs");
    add_common(conj, conj_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return kExitBadConfig;
    }

    try {
        if (*sweep) {
            apply_kernel_choice(sweep_flags.kernel);
            return cmd_sweep(sweep_flags, n_mc, oracle_samples, alpha_count, delta_count,
                             r_std);
        }
        if (*track) {
            apply_kernel_choice(track_flags.kernel);
            return cmd_track(track_flags, methods_csv, runs, horizon, clip);
        }
        if (*grad) {
            apply_kernel_choice(grad_kernel);
            return cmd_gradcheck(grad_seed, grad_trials);
        }
        if (*conj) {
            apply_kernel_choice(conj_flags.kernel);
            return cmd_conjugacy(conj_flags);
        }
    } catch (const invalid_input& e) {
        error_report("invalid_input", e.what());
        return kExitBadConfig;
    } catch (const error& e) {
        error_report("runtime_failure", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        error_report("unexpected", e.what());
        return kExitRuntime;
    }
    return kExitBadConfig;
}
