#include "loglin/sim/config.hpp"

#include <cmath>

#include <json.hpp>

#include "loglin/errors.hpp"

namespace loglin::sim {

using nlohmann::json;

const char* method_name(Method m) {
    switch (m) {
        case Method::ffk: return "ffk";
        case Method::ull: return "ull";
        case Method::lll: return "lll";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "ffk" || name == "FFK") return Method::ffk;
    if (name == "ull" || name == "ULL") return Method::ull;
    if (name == "lll" || name == "LLL") return Method::lll;
    throw invalid_input("unknown method '" + name + "' (expected ffk, ull or lll)");
}

std::vector<double> grid_values(const GridSpec& g) {
    if (g.count < 1)
        throw invalid_input("grid count must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(g.count));
    if (g.count == 1) {
        out[0] = g.min;
        return out;
    }
    if (g.kind == GridSpec::Kind::linear) {
        const double step = (g.max - g.min) / static_cast<double>(g.count - 1);
        for (int i = 0; i < g.count; ++i)
            out[static_cast<std::size_t>(i)] = g.min + step * static_cast<double>(i);
    } else {
        if (!(g.min > 0.0) || !(g.max > 0.0))
            throw invalid_input("logarithmic grid needs positive endpoints");
        const double lmin = std::log(g.min);
        const double step = (std::log(g.max) - lmin) / static_cast<double>(g.count - 1);
        for (int i = 0; i < g.count; ++i)
            out[static_cast<std::size_t>(i)] = std::exp(lmin + step * static_cast<double>(i));
    }
    return out;
}

namespace {

MatX benchmark_h() {
    MatX h(2, 4);
    h << 1, 0, 0, 0,
         0, 1, 0, 0;
    return h;
}

MatX sweep_truth_extent() {
    Mat2 e;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    e << inv_sqrt2, inv_sqrt2,
         inv_sqrt2, -inv_sqrt2;
    Mat2 d = Mat2::Zero();
    d(0, 0) = 300.0 * 300.0;
    d(1, 1) = 200.0 * 200.0;
    return e * d * e.transpose();
}

json vec_to_json(const VecX& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat_to_json(const MatX& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

VecX json_to_vec(const json& a) {
    if (!a.is_array()) throw invalid_input("config: expected an array for a vector field");
    VecX v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i];
    return v;
}

MatX json_to_mat(const json& a) {
    if (!a.is_array() || a.empty() || !a[0].is_array())
        throw invalid_input("config: expected an array of arrays for a matrix field");
    const auto rows = static_cast<Eigen::Index>(a.size());
    const auto cols = static_cast<Eigen::Index>(a[0].size());
    MatX m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(a[static_cast<std::size_t>(i)].size()) != cols)
            throw invalid_input("config: ragged matrix rows");
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

GridSpec json_to_grid(const json& g) {
    GridSpec out{};
    const std::string kind = g.at("kind");
    if (kind == "linear")
        out.kind = GridSpec::Kind::linear;
    else if (kind == "logarithmic")
        out.kind = GridSpec::Kind::logarithmic;
    else
        throw invalid_input("grid kind must be 'linear' or 'logarithmic'");
    out.count = g.at("count");
    out.min = g.at("min");
    out.max = g.at("max");
    return out;
}

json grid_to_json(const GridSpec& g) {
    return json{{"kind", g.kind == GridSpec::Kind::linear ? "linear" : "logarithmic"},
                {"count", g.count},
                {"min", g.min},
                {"max", g.max}};
}

} // namespace

SweepConfig default_sweep_config() {
    SweepConfig cfg;
    cfg.r = 100.0 * 100.0 * Mat2::Identity();
    cfg.h = benchmark_h();
    cfg.x0 = Vec4(0.0, 0.0, 100.0, 100.0);
    cfg.extent_truth = sweep_truth_extent();
    return cfg;
}

TrackConfig default_track_config() {
    TrackConfig cfg;
    cfg.r = 20.0 * 20.0 * Mat2::Identity();
    cfg.h = benchmark_h();
    cfg.x0 = Vec4(0.0, 0.0, 9.8, -9.8);
    cfg.segments = {{Segment::Kind::straight, 50, 0.0},
                    {Segment::Kind::turn, 30, 0.3},
                    {Segment::Kind::straight, 40, 0.0},
                    {Segment::Kind::turn, 30, -0.3},
                    {Segment::Kind::straight, 31, 0.0}};
    return cfg;
}

SweepConfig parse_sweep_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw invalid_input(std::string("sweep config: ") + e.what());
    }
    SweepConfig cfg = default_sweep_config();
    try {
        if (j.contains("alpha_grid")) cfg.alpha_grid = json_to_grid(j["alpha_grid"]);
        if (j.contains("delta_grid")) cfg.delta_grid = json_to_grid(j["delta_grid"]);
        if (j.contains("n_mc")) cfg.n_mc = j["n_mc"];
        if (j.contains("oracle_samples")) cfg.oracle_samples = j["oracle_samples"];
        if (j.contains("s")) cfg.s = j["s"];
        if (j.contains("R")) cfg.r = json_to_mat(j["R"]);
        if (j.contains("H")) cfg.h = json_to_mat(j["H"]);
        if (j.contains("x0")) cfg.x0 = json_to_vec(j["x0"]);
        if (j.contains("X0")) cfg.extent_truth = json_to_mat(j["X0"]);
        if (j.contains("base_seed")) cfg.base_seed = j["base_seed"];
    } catch (const json::exception& e) {
        throw invalid_input(std::string("sweep config: ") + e.what());
    }
    if (cfg.n_mc < 1 || cfg.alpha_grid.count < 1 || cfg.delta_grid.count < 1)
        throw invalid_input("sweep config: grid counts and n_mc must be >= 1");
    if (!(cfg.alpha_grid.min >= 1.0))
        throw invalid_input("sweep config: alpha grid must start at >= 1");
    if (!(cfg.delta_grid.min >= 2.0))
        throw invalid_input("sweep config: delta grid must start at >= 2");
    return cfg;
}

TrackConfig parse_track_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw invalid_input(std::string("track config: ") + e.what());
    }
    TrackConfig cfg = default_track_config();
    try {
        if (j.contains("horizon")) cfg.horizon = j["horizon"];
        if (j.contains("tau")) cfg.tau = j["tau"];
        if (j.contains("sigma_v")) cfg.sigma_v = j["sigma_v"];
        if (j.contains("tau0")) cfg.tau0 = j["tau0"];
        if (j.contains("s")) cfg.s = j["s"];
        if (j.contains("R")) cfg.r = json_to_mat(j["R"]);
        if (j.contains("H")) cfg.h = json_to_mat(j["H"]);
        if (j.contains("x0")) cfg.x0 = json_to_vec(j["x0"]);
        if (j.contains("extent_axis_along")) cfg.extent_axis_along = j["extent_axis_along"];
        if (j.contains("extent_axis_cross")) cfg.extent_axis_cross = j["extent_axis_cross"];
        if (j.contains("alpha0")) cfg.alpha0 = j["alpha0"];
        if (j.contains("delta0")) cfg.delta0 = j["delta0"];
        if (j.contains("nu_init_poisson_mean"))
            cfg.nu_init_poisson_mean = j["nu_init_poisson_mean"];
        if (j.contains("base_seed")) cfg.base_seed = j["base_seed"];
        if (j.contains("n_mc")) cfg.n_mc = j["n_mc"];
        if (j.contains("clip_error_m")) cfg.clip_error_m = j["clip_error_m"];
        if (j.contains("segments")) {
            cfg.segments.clear();
            for (const auto& s : j["segments"]) {
                Segment seg{};
                const std::string kind = s.at("kind");
                if (kind == "straight")
                    seg.kind = Segment::Kind::straight;
                else if (kind == "turn")
                    seg.kind = Segment::Kind::turn;
                else
                    throw invalid_input("segment kind must be 'straight' or 'turn'");
                seg.steps = s.at("steps");
                if (s.contains("rate_deg_s")) seg.turn_rate_deg_s = s["rate_deg_s"];
                cfg.segments.push_back(seg);
            }
        }
    } catch (const json::exception& e) {
        throw invalid_input(std::string("track config: ") + e.what());
    }
    if (cfg.horizon < 1 || cfg.n_mc < 1)
        throw invalid_input("track config: horizon and n_mc must be >= 1");
    if (!(cfg.tau > 0.0) || !(cfg.tau0 > 0.0))
        throw invalid_input("track config: tau and tau0 must be > 0");
    int steps = 0;
    for (const auto& s : cfg.segments) steps += s.steps;
    if (steps != cfg.horizon)
        throw invalid_input("track config: segment steps must sum to the horizon");
    return cfg;
}

std::string serialize(const SweepConfig& cfg) {
    json j{{"alpha_grid", grid_to_json(cfg.alpha_grid)},
           {"delta_grid", grid_to_json(cfg.delta_grid)},
           {"n_mc", cfg.n_mc},
           {"oracle_samples", cfg.oracle_samples},
           {"s", cfg.s},
           {"R", mat_to_json(cfg.r)},
           {"H", mat_to_json(cfg.h)},
           {"x0", vec_to_json(cfg.x0)},
           {"X0", mat_to_json(cfg.extent_truth)},
           {"base_seed", cfg.base_seed}};
    return j.dump(2);
}

std::string serialize(const TrackConfig& cfg) {
    json segs = json::array();
    for (const auto& s : cfg.segments) {
        json seg{{"kind", s.kind == Segment::Kind::straight ? "straight" : "turn"},
                 {"steps", s.steps}};
        if (s.kind == Segment::Kind::turn) seg["rate_deg_s"] = s.turn_rate_deg_s;
        segs.push_back(seg);
    }
    json j{{"horizon", cfg.horizon},
           {"tau", cfg.tau},
           {"sigma_v", cfg.sigma_v},
           {"tau0", cfg.tau0},
           {"s", cfg.s},
           {"R", mat_to_json(cfg.r)},
           {"H", mat_to_json(cfg.h)},
           {"x0", vec_to_json(cfg.x0)},
           {"extent_axis_along", cfg.extent_axis_along},
           {"extent_axis_cross", cfg.extent_axis_cross},
           {"alpha0", cfg.alpha0},
           {"delta0", cfg.delta0},
           {"nu_init_poisson_mean", cfg.nu_init_poisson_mean},
           {"segments", segs},
           {"base_seed", cfg.base_seed},
           {"n_mc", cfg.n_mc},
           {"clip_error_m", cfg.clip_error_m}};
    return j.dump(2);
}

std::uint64_t config_hash(const std::string& canonical_json) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_json) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace loglin::sim
