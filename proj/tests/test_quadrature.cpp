#include <numbers>

#include "doctest.h"
#include "kf/parallel.hpp"
#include "kf/quadrature.hpp"

using namespace kf;

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    for (int n : {8, 13, 24}) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        double total_w = 0.0;
        for (double wi : w) total_w += wi;
        CHECK(total_w == doctest::Approx(2.0).epsilon(1e-14));
        // degree 2n-1 monomial: exact value 2/(k+1) for even k, 0 for odd
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += w[i] * std::pow(x[i], k);
            const double expect = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
            CHECK(std::abs(sum - expect) < 1e-12);
        }
    }
}

TEST_CASE("gaussian integral over all space") {
    // integral of exp(-r^2) = pi^(3/2)
    QuadratureSpec spec;
    spec.radial = 24;
    spec.polar = 12;
    spec.azimuth = 8;
    spec.levels = 2;
    const QuadratureResult res =
        integrate_ball([](const Vec3& x) { return std::exp(-x.r2()); }, spec);
    const double expected = std::pow(std::numbers::pi, 1.5);
    CHECK(std::abs(res.value - expected) < 1e-8);
    CHECK(res.error < 1e-6);
    CHECK(res.history.size() == 2);
}

TEST_CASE("ball volume with finite radius") {
    QuadratureSpec spec;
    spec.radial = 16;
    spec.polar = 8;
    spec.azimuth = 8;
    spec.levels = 2;
    const QuadratureResult res =
        integrate_ball([](const Vec3&) { return 1.0; }, spec, 2.0);
    CHECK(res.value == doctest::Approx(4.0 / 3.0 * std::numbers::pi * 8.0).epsilon(1e-10));
}

TEST_CASE("results do not depend on the thread count") {
    QuadratureSpec spec;
    spec.radial = 12;
    spec.polar = 12;
    spec.azimuth = 16;
    spec.levels = 2;
    auto f = [](const Vec3& x) { return std::exp(-0.7 * x.r2()) * (1.0 + x.x * x.y); };
    set_default_thread_count(1);
    const double v1 = integrate_ball(f, spec).value;
    set_default_thread_count(7);
    const double v7 = integrate_ball(f, spec).value;
    set_default_thread_count(0);
    const double v0 = integrate_ball(f, spec).value;
    CHECK(v1 == v7);
    CHECK(v1 == v0);
}

TEST_CASE("spec validation") {
    QuadratureSpec bad;
    bad.radial = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = QuadratureSpec{};
    bad.levels = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = QuadratureSpec{};
    bad.r0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

}  // TEST_SUITE
