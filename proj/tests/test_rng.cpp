#include <doctest.h>

#include <cmath>
#include <vector>

#include "loglin/errors.hpp"
#include "loglin/rng/philox.hpp"
#include "loglin/rng/samplers.hpp"
#include "loglin/rng/stream.hpp"

using namespace loglin;

TEST_SUITE_BEGIN("rng");

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 known-answer test set.
    auto out = rng::Philox::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = rng::Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = rng::Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams replay identically and are distinct") {
    rng::RngStream a(42, 7);
    rng::RngStream b(42, 7);
    rng::RngStream c(42, 8);
    rng::RngStream d(43, 7);
    bool c_differs = false, d_differs = false;
    for (int i = 0; i < 256; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        if (va != c.next_u64()) c_differs = true;
        if (va != d.next_u64()) d_differs = true;
    }
    CHECK(c_differs);
    CHECK(d_differs);
}

TEST_CASE("uniform draws live in (0, 1] and have the right mean") {
    rng::RngStream s(1, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("gaussian moments") {
    rng::RngStream s(2, 0);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = s.next_gaussian();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sumsq / n - 1.0) < 0.02);
}

TEST_CASE("poisson(10) mean within 1% over 1e6 draws") {
    rng::RngStream s(3, 0);
    long long sum = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += rng::sample_poisson(s, 10.0);
    const double mean = static_cast<double>(sum) / n;
    CHECK(std::abs(mean - 10.0) / 10.0 < 0.01);
}

TEST_CASE("poisson large-lambda split preserves mean and variance") {
    rng::RngStream s(4, 0);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double k = static_cast<double>(rng::sample_poisson(s, 100.0));
        sum += k;
        sumsq += k * k;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 100.0) / 100.0 < 0.01);
    CHECK(std::abs(var - 100.0) / 100.0 < 0.03);
}

TEST_CASE("poisson edge cases") {
    rng::RngStream s(5, 0);
    CHECK(rng::sample_poisson(s, 0.0) == 0);
    CHECK_THROWS_AS(rng::sample_poisson(s, -1.0), invalid_parameter);
}

TEST_CASE("gamma mean and variance") {
    rng::RngStream s(6, 0);
    for (double shape : {0.7, 1.0, 4.5}) {
        double sum = 0.0, sumsq = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double g = rng::sample_gamma(s, shape);
            sum += g;
            sumsq += g * g;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        CHECK(std::abs(mean - shape) / shape < 0.02);
        CHECK(std::abs(var - shape) / shape < 0.05);
    }
}

TEST_CASE("wishart sample mean approaches n * scale") {
    rng::RngStream s(7, 0);
    MatX scale(2, 2);
    scale << 2.0, 0.3, 0.3, 1.0;
    const double n_dof = 5.0;
    MatX acc = MatX::Zero(2, 2);
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += rng::sample_wishart(s, n_dof, scale);
    acc /= static_cast<double>(n);
    const MatX expect = n_dof * scale;
    CHECK((acc - expect).norm() / expect.norm() < 0.02);
}

TEST_CASE("invwishart rejects nu <= 2d") {
    rng::RngStream s(8, 0);
    CHECK_THROWS_AS(rng::sample_invwishart(s, 4.0, MatX::Identity(2, 2)),
                    invalid_parameter);
}

TEST_SUITE_END();
