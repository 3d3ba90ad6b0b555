#include <numbers>

#include "doctest.h"
#include "kf/linking.hpp"
#include "kf/trace.hpp"

using namespace kf;

namespace {

Curve circle(const Point3& center, double radius, int plane, int n) {
    Curve c;
    c.closed = true;
    for (int i = 0; i < n; ++i) {
        const double t = 2 * std::numbers::pi * i / n;
        Point3 p = center;
        if (plane == 0) {
            p.x += radius * std::cos(t);
            p.y += radius * std::sin(t);
        } else {
            p.x += radius * std::cos(t);
            p.z += radius * std::sin(t);
        }
        c.vertices.push_back(p);
    }
    c.recompute_metrics();
    return c;
}

}  // namespace

TEST_SUITE("linking") {

TEST_CASE("separated circles are unlinked") {
    const Curve a = circle({0, 0, 0}, 1.0, 0, 256);
    const Curve b = circle({5, 0, 0}, 1.0, 0, 256);
    const LinkingResult lk = gauss_linking(a, b);
    CHECK(lk.value == 0);
    CHECK(std::abs(lk.raw) < 0.05);
}

TEST_CASE("standard embedded pair links once") {
    // planar-diagram oracle: this embedding has exactly one crossing pair
    const Curve a = circle({0, 0, 0}, 1.0, 0, 256);
    const Curve b = circle({1, 0, 0}, 1.0, 1, 256);
    const LinkingResult lk = gauss_linking(a, b);
    CHECK(std::llabs(lk.value) == 1);
    CHECK(std::abs(lk.raw - static_cast<double>(lk.value)) < 0.05);
}

TEST_CASE("symmetry and orientation reversal") {
    const Curve a = circle({0, 0, 0}, 1.0, 0, 200);
    const Curve b = circle({1, 0, 0}, 1.0, 1, 220);
    const LinkingResult ab = gauss_linking(a, b);
    const LinkingResult ba = gauss_linking(b, a);
    CHECK(std::abs(ab.raw - ba.raw) < 1e-10);
    const LinkingResult rev = gauss_linking(reversed(a), b);
    CHECK(std::abs(rev.raw + ab.raw) < 1e-10);
}

TEST_CASE("preconditions are enforced") {
    Curve open_curve = circle({0, 0, 0}, 1.0, 0, 64);
    open_curve.closed = false;
    const Curve b = circle({1, 0, 0}, 1.0, 1, 64);
    CHECK_THROWS_WITH_AS(gauss_linking(open_curve, b), doctest::Contains("open"),
                         std::runtime_error);

    // nearly touching circles with coarse segments violate the distance rule
    const Curve close_a = circle({0, 0, 0}, 1.0, 0, 16);
    const Curve close_b = circle({0.05, 0, 0}, 1.0, 1, 16);
    CHECK_THROWS_WITH_AS(gauss_linking(close_a, close_b), doctest::Contains("too close"),
                         std::runtime_error);
}

TEST_CASE("two hopf field lines link exactly once") {
    const RationalMap hopf = preset("hopf");
    const Curve f1 = trace_fieldline(hopf, {0.5, 0, 0}, TraceParams{});
    const Curve f2 = trace_fieldline(hopf, {0.0, 1.5, 0.3}, TraceParams{});
    REQUIRE(f1.closed);
    REQUIRE(f2.closed);
    Curve a = resample_uniform(f1, 2048);
    Curve b = resample_uniform(f2, 2048);
    const LinkingResult lk = gauss_linking(a, b);
    CHECK(lk.value == 1);  // equals the Hopf invariant, cross-checked below
    CHECK(std::abs(lk.raw - 1.0) < 0.05);
}

TEST_CASE("hopf invariant via preimage linking: hopf map") {
    const HopfInvariantResult r = hopf_invariant_linking(preset("hopf"));
    CHECK(r.value == 1);
}

TEST_CASE("hopf invariant via preimage linking: trefoil") {
    const HopfInvariantResult r = hopf_invariant_linking(preset("trefoil"));
    CHECK(r.value == 6);
}

TEST_CASE("hopf invariant via preimage linking: torus(1,0,2,3)") {
    const HopfInvariantResult r = hopf_invariant_linking(preset_torus(1, 0, 2, 3));
    CHECK(r.value == 2);
}

}  // TEST_SUITE
