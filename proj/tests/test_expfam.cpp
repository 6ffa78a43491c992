#include <doctest.h>

#include <cmath>
#include <random>

#include "loglin/errors.hpp"
#include "loglin/expfam/family.hpp"
#include "loglin/expfam/gaussian.hpp"
#include "loglin/expfam/invwishart.hpp"
#include "loglin/expfam/quadrature.hpp"
#include "loglin/expfam/scalar_family.hpp"
#include "loglin/rng/samplers.hpp"
#include "support/oracles.hpp"

using namespace loglin;
using namespace loglin::expfam;

TEST_SUITE_BEGIN("expfam");

TEST_CASE("gaussian_to_natural identity and scalar cases") {
    GaussianParams p{VecX::Zero(2), MatX::Identity(2, 2)};
    const NaturalParam eta = gaussian_to_natural(p);
    CHECK(eta.blocks[0].value.norm() == doctest::Approx(0.0));
    CHECK((eta.blocks[1].value + 0.5 * MatX::Identity(2, 2)).norm() ==
          doctest::Approx(0.0));

    GaussianParams q{VecX::Constant(1, 1.0), MatX::Constant(1, 1, 4.0)};
    const NaturalParam eta_q = gaussian_to_natural(q);
    CHECK(eta_q.blocks[0].value(0, 0) == doctest::Approx(0.25));
    CHECK(eta_q.blocks[1].value(0, 0) == doctest::Approx(-0.125));
}

TEST_CASE("gaussian natural parameter satisfies the defining linear systems") {
    // Oracle: eta1 and eta2 must solve Sigma eta1 = mu and -2 eta2 Sigma = I.
    std::mt19937 gen(101);
    for (int trial = 0; trial < 20; ++trial) {
        GaussianParams p{oracles::random_vec(gen, 3, 2.0), oracles::random_spd(gen, 3)};
        const NaturalParam eta = gaussian_to_natural(p);
        CHECK((p.cov * eta.blocks[0].value - p.mean).norm() < 1e-10 * p.mean.norm() + 1e-12);
        CHECK((-2.0 * eta.blocks[1].value * p.cov - MatX::Identity(3, 3)).norm() < 1e-10);
    }
}

TEST_CASE("natural_to_gaussian inverts the map") {
    NaturalParam eta{Family::gaussian, {}};
    eta.blocks.push_back(Block::vector("eta1", VecX::Zero(2)));
    eta.blocks.push_back(Block::sym_matrix("eta2", -0.5 * MatX::Identity(2, 2)));
    const GaussianParams p = natural_to_gaussian(eta);
    CHECK(p.mean.norm() == doctest::Approx(0.0));
    CHECK((p.cov - MatX::Identity(2, 2)).norm() == doctest::Approx(0.0).epsilon(1e-14));

    NaturalParam eta_s{Family::gaussian, {}};
    eta_s.blocks.push_back(Block::vector("eta1", VecX::Constant(1, 0.25)));
    eta_s.blocks.push_back(Block::sym_matrix("eta2", MatX::Constant(1, 1, -0.125)));
    const GaussianParams q = natural_to_gaussian(eta_s);
    CHECK(q.mean(0) == doctest::Approx(1.0));
    CHECK(q.cov(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("gaussian round-trip on 100 random SPD inputs per dimension") {
    std::mt19937 gen(102);
    for (int d : {1, 2, 4}) {
        for (int trial = 0; trial < 100; ++trial) {
            GaussianParams p{oracles::random_vec(gen, d, 3.0), oracles::random_spd(gen, d)};
            const GaussianParams back = natural_to_gaussian(gaussian_to_natural(p));
            CHECK((back.mean - p.mean).norm() <= 1e-12 * (1.0 + p.mean.norm()));
            CHECK((back.cov - p.cov).norm() <= 1e-12 * p.cov.norm());
        }
    }
}

TEST_CASE("gaussian conversions reject invalid input") {
    GaussianParams bad{VecX::Zero(2), -MatX::Identity(2, 2)};
    CHECK_THROWS_AS(gaussian_to_natural(bad), invalid_parameter);

    NaturalParam eta{Family::gaussian, {}};
    eta.blocks.push_back(Block::vector("eta1", VecX::Zero(2)));
    eta.blocks.push_back(Block::sym_matrix("eta2", 0.5 * MatX::Identity(2, 2)));
    CHECK_THROWS_AS(natural_to_gaussian(eta), invalid_parameter);
}

TEST_CASE("gaussian log partition closed form") {
    GaussianParams p{VecX::Zero(2), MatX::Identity(2, 2)};
    CHECK(gaussian_log_partition(gaussian_to_natural(p)) == doctest::Approx(0.0));

    GaussianParams q{VecX::Constant(1, 1.0), MatX::Constant(1, 1, 4.0)};
    CHECK(gaussian_log_partition(gaussian_to_natural(q)) ==
          doctest::Approx(0.125 + 0.5 * std::log(4.0)));
}

TEST_CASE("gaussian log partition agrees with direct quadrature (d = 1)") {
    // Oracle: A(eta) = log integral h(x) exp(eta . T(x)) dx on a fine grid.
    std::mt19937 gen(103);
    const ScalarFamily fam = gaussian1d_family();
    for (int trial = 0; trial < 5; ++trial) {
        GaussianParams p{oracles::random_vec(gen, 1, 2.0),
                         MatX::Constant(1, 1, 0.5 + std::abs(oracles::random_vec(gen, 1)(0)))};
        const NaturalParam eta = gaussian_to_natural(p);
        const double mu = p.mean(0);
        const double sd = std::sqrt(p.cov(0, 0));
        const double quad = log_trapezoid(
            [&](double x) { return fam.log_base(x) + natural_dot_t(eta.blocks, fam, x); },
            mu - 30.0 * sd, mu + 30.0 * sd, (1 << 16) + 1);
        CHECK(gaussian_log_partition(eta) == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("inverse Wishart natural form") {
    InvWishartParams p{7.0, MatX::Identity(2, 2)};
    const NaturalParam eta = invwishart_to_natural(p);
    CHECK(eta.blocks[0].as_scalar() == doctest::Approx(-3.5));
    CHECK((eta.blocks[1].value + 0.5 * MatX::Identity(2, 2)).norm() == doctest::Approx(0.0));

    // Unnormalized log density at X = I equals eta . T(I) = tr(-V/2).
    CHECK(invwishart_unnormalized_logpdf(p, MatX::Identity(2, 2)) ==
          doctest::Approx(-1.0));

    std::mt19937 gen(104);
    for (int trial = 0; trial < 20; ++trial) {
        InvWishartParams q{6.5 + trial, oracles::random_spd(gen, 2, 1.0)};
        const InvWishartParams back = natural_to_invwishart(invwishart_to_natural(q));
        CHECK(back.dof == doctest::Approx(q.dof).epsilon(1e-14));
        CHECK((back.scale - q.scale).norm() <= 1e-12 * q.scale.norm());
    }

    InvWishartParams bad{4.0, MatX::Identity(2, 2)};
    CHECK_THROWS_AS(invwishart_to_natural(bad), invalid_parameter);
}

TEST_CASE("inverse Wishart mean") {
    InvWishartParams p{7.0, MatX::Identity(2, 2)};
    CHECK((invwishart_mean(p) - MatX::Identity(2, 2)).norm() == doctest::Approx(0.0));

    MatX v(2, 2);
    v << 8.0, 0.0, 0.0, 4.0;
    InvWishartParams q{10.0, v};
    MatX expect(2, 2);
    expect << 2.0, 0.0, 0.0, 1.0;
    CHECK((invwishart_mean(q) - expect).norm() == doctest::Approx(0.0));

    InvWishartParams undef{6.0, MatX::Identity(2, 2)};
    CHECK_THROWS_AS(invwishart_mean(undef), mean_undefined);
}

TEST_CASE("inverse Wishart density normalizes (d = 1 quadrature)") {
    // Oracle: integral of exp(invwishart_logpdf) over (0, inf) is 1.
    InvWishartParams p{9.0, MatX::Constant(1, 1, 5.0)};
    const double log_z = log_trapezoid(
        [&](double u) {
            const double x = std::exp(u);
            return invwishart_logpdf(p, MatX::Constant(1, 1, x)) + u;
        },
        std::log(1e-6), std::log(1e6), (1 << 16) + 1);
    CHECK(std::exp(log_z) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("conjugate_update identity and blockwise sum") {
    GaussianParams p{VecX::Constant(1, 2.0), MatX::Constant(1, 1, 1.0)};
    const NaturalParam eta = gaussian_to_natural(p);
    LikelihoodOffset zero{Family::gaussian, {}};
    zero.blocks.push_back(Block::vector("eta1", VecX::Zero(1)));
    zero.blocks.push_back(Block::sym_matrix("eta2", MatX::Zero(1, 1)));
    const NaturalParam same = conjugate_update(eta, zero);
    CHECK((same.blocks[0].value - eta.blocks[0].value).norm() == 0.0);
    CHECK((same.blocks[1].value - eta.blocks[1].value).norm() == 0.0);

    NaturalParam prior{Family::gaussian, {}};
    prior.blocks.push_back(Block::vector("eta1", VecX::Constant(1, 1.0)));
    prior.blocks.push_back(Block::sym_matrix("eta2", MatX::Constant(1, 1, -1.0)));
    LikelihoodOffset lam{Family::gaussian, {}};
    lam.blocks.push_back(Block::vector("eta1", VecX::Constant(1, 2.0)));
    lam.blocks.push_back(Block::sym_matrix("eta2", MatX::Constant(1, 1, -0.5)));
    const NaturalParam post = conjugate_update(prior, lam);
    CHECK(post.blocks[0].value(0, 0) == doctest::Approx(3.0));
    CHECK(post.blocks[1].value(0, 0) == doctest::Approx(-1.5));
}

TEST_CASE("linear-Gaussian conjugate update reproduces the Kalman posterior") {
    // Oracle: textbook gain-form Kalman update.
    std::mt19937 gen(105);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3, d = 2;
        GaussianParams prior{oracles::random_vec(gen, n, 2.0), oracles::random_spd(gen, n)};
        MatX c(d, n);
        for (int i = 0; i < d; ++i) c.row(i) = oracles::random_vec(gen, n).transpose();
        const MatX r = oracles::random_spd(gen, d);
        const VecX y = oracles::random_vec(gen, d, 2.0);

        const NaturalParam post_eta =
            conjugate_update(gaussian_to_natural(prior), linear_gaussian_offset(c, r, y));
        const GaussianParams post = natural_to_gaussian(post_eta);
        const auto expect = oracles::kalman_gain_update(prior.mean, prior.cov, c, r, y);
        CHECK((post.mean - expect.mean).norm() <= 1e-10 * (1.0 + expect.mean.norm()));
        CHECK((post.cov - expect.cov).norm() <= 1e-10 * expect.cov.norm());
    }
}

TEST_CASE("conjugate update composition is additive") {
    std::mt19937 gen(106);
    GaussianParams prior{oracles::random_vec(gen, 2, 1.0), oracles::random_spd(gen, 2)};
    const NaturalParam eta = gaussian_to_natural(prior);
    const LikelihoodOffset l1 = linear_gaussian_offset(
        MatX::Identity(2, 2), oracles::random_spd(gen, 2), oracles::random_vec(gen, 2));
    const LikelihoodOffset l2 = linear_gaussian_offset(
        MatX::Identity(2, 2), oracles::random_spd(gen, 2), oracles::random_vec(gen, 2));
    const NaturalParam seq = conjugate_update(conjugate_update(eta, l1), l2);
    const NaturalParam joint = conjugate_update(eta, add_offsets(l1, l2));
    for (int b : {0, 1}) {
        const double scale = joint.blocks[b].value.cwiseAbs().maxCoeff();
        CHECK((seq.blocks[b].value - joint.blocks[b].value).cwiseAbs().maxCoeff() <=
              1e-14 * std::max(scale, 1.0));
    }
}

TEST_CASE("schema mixing is a hard error") {
    GaussianParams p{VecX::Zero(2), MatX::Identity(2, 2)};
    const NaturalParam eta = gaussian_to_natural(p);

    LikelihoodOffset igamma_off{Family::inverse_gamma, {}};
    igamma_off.blocks.push_back(Block::scalar("log_x", -0.5));
    igamma_off.blocks.push_back(Block::scalar("inv_x", -0.5));
    CHECK_THROWS_AS(conjugate_update(eta, igamma_off), invalid_input);

    LikelihoodOffset wrong_dim{Family::gaussian, {}};
    wrong_dim.blocks.push_back(Block::vector("eta1", VecX::Zero(3)));
    wrong_dim.blocks.push_back(Block::sym_matrix("eta2", MatX::Zero(3, 3)));
    CHECK_THROWS_AS(conjugate_update(eta, wrong_dim), invalid_input);
}

TEST_CASE("update leaving the natural parameter space is rejected") {
    GaussianParams p{VecX::Zero(1), MatX::Constant(1, 1, 1.0)};
    const NaturalParam eta = gaussian_to_natural(p);
    LikelihoodOffset push_out{Family::gaussian, {}};
    push_out.blocks.push_back(Block::vector("eta1", VecX::Zero(1)));
    push_out.blocks.push_back(Block::sym_matrix("eta2", MatX::Constant(1, 1, 2.0)));
    CHECK_THROWS_AS(conjugate_update(eta, push_out), posterior_improper);
}

TEST_CASE("sin-likelihood offset values") {
    const LikelihoodOffset at0 = sin_example_offset(0.0);
    CHECK(at0.blocks[0].as_scalar() == doctest::Approx(-1.0 / 24.0));
    CHECK(at0.blocks[1].as_scalar() == doctest::Approx(0.0));
    CHECK(at0.blocks[2].as_scalar() == doctest::Approx(1.0));
    CHECK(at0.blocks[3].as_scalar() == doctest::Approx(0.0));

    const LikelihoodOffset at3 = sin_example_offset(3.0);
    CHECK(at3.blocks[0].as_scalar() == doctest::Approx(-1.0 / 24.0));
    CHECK(at3.blocks[1].as_scalar() == doctest::Approx(0.25));
    CHECK(at3.blocks[2].as_scalar() == doctest::Approx(std::cos(3.0)));
    CHECK(at3.blocks[3].as_scalar() == doctest::Approx(std::sin(3.0)));

    const NaturalParam post = conjugate_update(quad_trig_prior(-0.1), at3);
    CHECK(post.blocks[0].as_scalar() == doctest::Approx(-1.0 / 24.0 - 0.1));

    CHECK_THROWS_AS(sin_example_offset(std::nan("")), invalid_input);
}

TEST_CASE("sin-likelihood offset matches the exact log-likelihood up to y-terms") {
    // lambda(y) . T(x) and the exact log-likelihood may differ only by a
    // function of y alone.
    const ScalarFamily fam = quad_trig_family();
    for (double y : {-2.0, 0.5, 3.0}) {
        const LikelihoodOffset lam = sin_example_offset(y);
        const double base = sin_example_loglik(0.7, y) - natural_dot_t(lam.blocks, fam, 0.7);
        for (double x : {-3.0, -0.2, 1.9, 8.0}) {
            const double diff =
                sin_example_loglik(x, y) - natural_dot_t(lam.blocks, fam, x);
            CHECK(diff == doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("invwishart mean agrees with Monte-Carlo sample mean") {
    // Oracle: 1e5 sampler draws vs the closed-form mean.
    rng::RngStream stream(900, 0);
    MatX v(2, 2);
    v << 8.0, 0.0, 0.0, 4.0;
    const InvWishartParams p{10.0, v};
    MatX acc = MatX::Zero(2, 2);
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += rng::sample_invwishart(stream, p.dof, p.scale);
    acc /= static_cast<double>(n);
    const MatX expect = invwishart_mean(p);
    CHECK((acc - expect).norm() / expect.norm() < 0.02);
}

TEST_CASE("distribution registry carries the reference metadata") {
    const auto* gamma_row = registry_lookup("gamma");
    REQUIRE(gamma_row != nullptr);
    CHECK(gamma_row->sufficient_stat == "(log x, x)");
    CHECK(gamma_row->implemented);
    CHECK(gamma_row->conjugate_likelihoods.size() == 4);

    const auto* iw_row = registry_lookup("inverse_wishart");
    REQUIRE(iw_row != nullptr);
    CHECK(iw_row->sufficient_stat == "(log|X|, X^-1)");
    CHECK(iw_row->implemented);

    const auto* beta_row = registry_lookup("beta");
    REQUIRE(beta_row != nullptr);
    CHECK_FALSE(beta_row->implemented);

    CHECK(registry_lookup("no_such_family") == nullptr);
    CHECK(distribution_registry().size() == 17);
}

TEST_SUITE_END();
