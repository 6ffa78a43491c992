#include "loglin/expfam/scalar_family.hpp"

#include <cmath>

#include "loglin/errors.hpp"

namespace loglin::expfam {

ScalarFamily quad_trig_family() {
    return {Family::quad_trig,
            ScalarFamily::Support::real_line,
            [](double) { return 0.0; },
            {[](double x) { return x * x; }, [](double x) { return x; },
             [](double x) { return std::cos(x); }, [](double x) { return std::sin(x); }}};
}

ScalarFamily inverse_gamma_family() {
    return {Family::inverse_gamma,
            ScalarFamily::Support::positive_reals,
            [](double) { return 0.0; },
            {[](double x) { return std::log(x); }, [](double x) { return 1.0 / x; }}};
}

ScalarFamily gamma_family() {
    return {Family::gamma,
            ScalarFamily::Support::positive_reals,
            [](double) { return 0.0; },
            {[](double x) { return std::log(x); }, [](double x) { return x; }}};
}

ScalarFamily gaussian1d_family() {
    return {Family::gaussian,
            ScalarFamily::Support::real_line,
            [](double) { return -0.5 * 1.8378770664093454836; },
            {[](double x) { return x; }, [](double x) { return x * x; }}};
}

double natural_dot_t(const std::vector<Block>& blocks, const ScalarFamily& family, double x) {
    if (blocks.size() != family.t.size())
        throw invalid_input("natural_dot_t: block count does not match family layout");
    double acc = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].value.size() != 1)
            throw invalid_input("natural_dot_t: non-scalar block in scalar family");
        acc += blocks[i].value(0, 0) * family.t[i](x);
    }
    return acc;
}

LikelihoodOffset sin_example_offset(double y) {
    if (!std::isfinite(y))
        throw invalid_input("sin_example_offset: y must be finite");
    LikelihoodOffset lambda{Family::quad_trig, {}};
    lambda.blocks.push_back(Block::scalar("x2", -1.0 / 24.0));
    lambda.blocks.push_back(Block::scalar("x", y / 12.0));
    lambda.blocks.push_back(Block::scalar("cos", std::cos(y)));
    lambda.blocks.push_back(Block::scalar("sin", std::sin(y)));
    return lambda;
}

double sin_example_loglik(double x, double y) {
    const double r = y - x;
    return -r * r / 24.0 + std::cos(r);
}

NaturalParam quad_trig_prior(double x2_coeff) {
    NaturalParam eta{Family::quad_trig, {}};
    eta.blocks.push_back(Block::scalar("x2", x2_coeff));
    eta.blocks.push_back(Block::scalar("x", 0.0));
    eta.blocks.push_back(Block::scalar("cos", 0.0));
    eta.blocks.push_back(Block::scalar("sin", 0.0));
    require_in_natural_space(eta);
    return eta;
}

NaturalParam igamma_natural(double alpha, double beta) {
    NaturalParam eta{Family::inverse_gamma, {}};
    eta.blocks.push_back(Block::scalar("log_x", -alpha - 1.0));
    eta.blocks.push_back(Block::scalar("inv_x", -beta));
    require_in_natural_space(eta);
    return eta;
}

} // namespace loglin::expfam
