#include "loglin/expfam/family.hpp"

#include <Eigen/Cholesky>

#include "loglin/errors.hpp"
#include "loglin/linalg.hpp"

namespace loglin::expfam {

std::string_view family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::inverse_wishart: return "inverse_wishart";
        case Family::gamma: return "gamma";
        case Family::inverse_gamma: return "inverse_gamma";
        case Family::quad_trig: return "quad_trig";
    }
    return "unknown";
}

Block Block::scalar(std::string label, double v) {
    Block b{std::move(label), BlockKind::scalar, MatX(1, 1)};
    b.value(0, 0) = v;
    return b;
}

Block Block::vector(std::string label, const VecX& v) {
    return Block{std::move(label), BlockKind::vector, v};
}

Block Block::sym_matrix(std::string label, const MatX& m) {
    return Block{std::move(label), BlockKind::sym_matrix, linalg::symmetrize(m)};
}

double Block::as_scalar() const {
    if (kind != BlockKind::scalar)
        throw invalid_input("block '" + label + "' is not scalar");
    return value(0, 0);
}

bool Block::same_schema(const Block& other) const {
    return label == other.label && kind == other.kind &&
           value.rows() == other.value.rows() && value.cols() == other.value.cols();
}

bool same_schema(const NaturalParam& eta, const LikelihoodOffset& lambda) {
    if (eta.family != lambda.family) return false;
    if (eta.blocks.size() != lambda.blocks.size()) return false;
    for (std::size_t i = 0; i < eta.blocks.size(); ++i)
        if (!eta.blocks[i].same_schema(lambda.blocks[i])) return false;
    return true;
}

namespace {

bool negative_definite(const MatX& m) {
    Eigen::LLT<MatX> llt(MatX(-m));
    return llt.info() == Eigen::Success;
}

} // namespace

void require_in_natural_space(const NaturalParam& eta) {
    switch (eta.family) {
        case Family::gaussian: {
            if (eta.blocks.size() != 2)
                throw invalid_input("gaussian natural parameter needs 2 blocks");
            if (!negative_definite(eta.blocks[1].value))
                throw posterior_improper("gaussian: second natural block not negative definite");
            return;
        }
        case Family::inverse_wishart: {
            if (eta.blocks.size() != 2)
                throw invalid_input("inverse_wishart natural parameter needs 2 blocks");
            const double d = static_cast<double>(eta.blocks[1].value.rows());
            // eta1 = -nu/2 must satisfy nu > 2d, i.e. eta1 < -d.
            if (!(eta.blocks[0].as_scalar() < -d))
                throw posterior_improper("inverse_wishart: dof block violates nu > 2d");
            if (!negative_definite(eta.blocks[1].value))
                throw posterior_improper("inverse_wishart: scale block not negative definite");
            return;
        }
        case Family::gamma: {
            // eta = (alpha - 1, -beta) with alpha > 0, beta > 0.
            if (!(eta.blocks[0].as_scalar() > -1.0) || !(eta.blocks[1].as_scalar() < 0.0))
                throw posterior_improper("gamma: natural parameter outside (alpha>0, beta>0)");
            return;
        }
        case Family::inverse_gamma: {
            // eta = (-alpha - 1, -beta) with alpha > 0, beta > 0.
            if (!(eta.blocks[0].as_scalar() < -1.0) || !(eta.blocks[1].as_scalar() < 0.0))
                throw posterior_improper(
                    "inverse_gamma: natural parameter outside (alpha>0, beta>0)");
            return;
        }
        case Family::quad_trig: {
            // exp(a x^2 + b x + c cos x + d sin x) integrates iff a < 0.
            if (!(eta.blocks[0].as_scalar() < 0.0))
                throw posterior_improper("quad_trig: x^2 coefficient must be negative");
            return;
        }
    }
}

NaturalParam conjugate_update(const NaturalParam& eta, const LikelihoodOffset& lambda) {
    if (!same_schema(eta, lambda))
        throw invalid_input("conjugate_update: offset schema does not match prior family layout");
    NaturalParam post = eta;
    for (std::size_t i = 0; i < post.blocks.size(); ++i) {
        post.blocks[i].value += lambda.blocks[i].value;
        if (post.blocks[i].kind == BlockKind::sym_matrix)
            post.blocks[i].value =
                0.5 * (post.blocks[i].value + post.blocks[i].value.transpose());
    }
    require_in_natural_space(post);
    return post;
}

LikelihoodOffset add_offsets(const LikelihoodOffset& a, const LikelihoodOffset& b) {
    if (a.family != b.family || a.blocks.size() != b.blocks.size())
        throw invalid_input("add_offsets: schema mismatch");
    LikelihoodOffset out = a;
    for (std::size_t i = 0; i < out.blocks.size(); ++i) {
        if (!out.blocks[i].same_schema(b.blocks[i]))
            throw invalid_input("add_offsets: schema mismatch");
        out.blocks[i].value += b.blocks[i].value;
    }
    return out;
}

const std::vector<DistributionInfo>& distribution_registry() {
    static const std::vector<DistributionInfo> table = {
        {"exponential", "x", {}, false},
        {"normal_known_variance", "x/sigma", {}, false},
        {"normal", "(x, x x^T)", {"normal N(y; Cx, R)", "lognormal logN(y; x, sigma^2)"}, true},
        {"pareto_known_minimum", "log x", {}, false},
        {"weibull_known_shape", "x^k", {}, false},
        {"chi_squared", "log x", {}, false},
        {"dirichlet", "(log x_1, ..., log x_n)", {}, false},
        {"laplace_known_mean", "|x - mu|", {}, false},
        {"inverse_gaussian", "(x, 1/x)", {}, false},
        {"scaled_inverse_chi_squared", "(log x, 1/x)", {}, false},
        {"beta", "(log x, log(1 - x))", {}, false},
        {"lognormal", "(log x, (log x)^2)", {}, false},
        {"gamma",
         "(log x, x)",
         {"exponential Exp(y; x)", "inverse gamma IGamma(y; a, x)", "gamma Gamma(y; a, x)",
          "normal N(y; mu, 1/x)"},
         true},
        {"inverse_gamma",
         "(log x, 1/x)",
         {"normal N(y; mu, x)", "Weibull(y; x, k)"},
         true},
        {"gaussian_gamma", "(log tau, tau, tau x, tau x^2)", {"normal N(y; x, 1/tau)"}, false},
        {"wishart", "(log|X|, X)", {"normal N(y; mu, X^-1)"}, false},
        {"inverse_wishart", "(log|X|, X^-1)", {"normal N(y; mu, X)"}, true},
    };
    return table;
}

const DistributionInfo* registry_lookup(std::string_view name) {
    for (const auto& row : distribution_registry())
        if (row.name == name) return &row;
    return nullptr;
}

} // namespace loglin::expfam
