#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "loglin/errors.hpp"
#include "loglin/kern/kernels.hpp"

using namespace loglin;

namespace {

struct KernelFixture {
    std::vector<double> mx, my, c00, c01, c11, yx, yy;
    std::size_t n, m;

    explicit KernelFixture(std::size_t n_samples, std::size_t n_points, unsigned seed) {
        n = n_samples;
        m = n_points;
        std::mt19937 gen(seed);
        std::uniform_real_distribution<double> ud(0.5, 3.0);
        std::normal_distribution<double> nd(0.0, 2.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = ud(gen), c = ud(gen);
            const double b = 0.8 * std::sqrt(a * c) * (2.0 * ud(gen) / 3.0 - 0.5);
            c00.push_back(a);
            c11.push_back(c);
            c01.push_back(b);
            mx.push_back(nd(gen));
            my.push_back(nd(gen));
        }
        for (std::size_t j = 0; j < m; ++j) {
            yx.push_back(nd(gen));
            yy.push_back(nd(gen));
        }
    }

    kern::Gauss2Inputs inputs() const {
        return {mx.data(), my.data(), c00.data(), c01.data(), c11.data(), n,
                yx.data(), yy.data(), m};
    }
};

} // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("scalar misfit kernel agrees with per-sample Eigen arithmetic") {
    KernelFixture fx(257, 9, 501);
    std::vector<double> quad(fx.n), det(fx.n);
    kern::scalar::gauss2_misfit(fx.inputs(), quad.data(), det.data());
    for (std::size_t i = 0; i < fx.n; ++i) {
        Eigen::Matrix2d c;
        c << fx.c00[i], fx.c01[i], fx.c01[i], fx.c11[i];
        CHECK(det[i] == doctest::Approx(c.determinant()).epsilon(1e-12));
        double q = 0.0;
        for (std::size_t j = 0; j < fx.m; ++j) {
            Eigen::Vector2d r(fx.yx[j] - fx.mx[i], fx.yy[j] - fx.my[i]);
            q += r.dot(c.inverse() * r);
        }
        CHECK(quad[i] == doctest::Approx(q).epsilon(1e-10));
    }
}

TEST_CASE("avx2 kernels are equivalent to the scalar references") {
    if (!kern::avx2_supported()) return; // nothing to check on this host
    // Sizes straddle the vector width so the tail path is exercised too.
    for (std::size_t n : {std::size_t{1}, std::size_t{4}, std::size_t{5}, std::size_t{1023}}) {
        KernelFixture fx(n, 11, static_cast<unsigned>(600 + n));
        std::vector<double> q_s(n), d_s(n), q_v(n), d_v(n);
        kern::scalar::gauss2_misfit(fx.inputs(), q_s.data(), d_s.data());
        kern::avx2::gauss2_misfit(fx.inputs(), q_v.data(), d_v.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(d_v[i] == doctest::Approx(d_s[i]).epsilon(1e-12));
            CHECK(q_v[i] == doctest::Approx(q_s[i]).epsilon(1e-12));
        }

        const double dot_s = kern::scalar::dot(fx.c00.data(), fx.c11.data(), n);
        const double dot_v = kern::avx2::dot(fx.c00.data(), fx.c11.data(), n);
        CHECK(dot_v == doctest::Approx(dot_s).epsilon(1e-13));

        // max is an exact operation: bitwise equality expected.
        CHECK(kern::avx2::max_value(fx.mx.data(), n) ==
              kern::scalar::max_value(fx.mx.data(), n));
    }
}

TEST_CASE("backend selection") {
    const kern::Backend initial = kern::active_backend();
    kern::set_backend(kern::Backend::scalar);
    CHECK(kern::active_backend() == kern::Backend::scalar);

    KernelFixture fx(37, 5, 700);
    std::vector<double> q1(fx.n), d1(fx.n);
    kern::gauss2_misfit(fx.inputs(), q1.data(), d1.data());
    std::vector<double> q2(fx.n), d2(fx.n);
    kern::scalar::gauss2_misfit(fx.inputs(), q2.data(), d2.data());
    for (std::size_t i = 0; i < fx.n; ++i) CHECK(q1[i] == q2[i]); // same code path

    if (kern::avx2_supported()) {
        kern::set_backend(kern::Backend::avx2);
        CHECK(kern::active_backend() == kern::Backend::avx2);
    } else {
        CHECK_THROWS_AS(kern::set_backend(kern::Backend::avx2), invalid_input);
    }
    kern::reset_backend();
    CHECK(kern::active_backend() == initial);
}

TEST_CASE("detection is consistent with the build") {
    if (!kern::avx2_compiled_in()) CHECK_FALSE(kern::avx2_supported());
    CHECK(std::string(kern::backend_name(kern::Backend::scalar)) == "scalar");
    CHECK(std::string(kern::backend_name(kern::Backend::avx2)) == "avx2");
}

TEST_SUITE_END();
