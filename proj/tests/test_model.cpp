#include <doctest.h>

#include <cmath>

#include "opdsim/model.hpp"
#include "opdsim/rng.hpp"
#include "oracles.hpp"

using namespace opdsim;

namespace {

AgentParams base_params() {
    AgentParams p;
    p.d = 1.0;
    p.u = 1.1;
    p.b = 0.0;
    p.k_z = 2.0;
    p.k_x = 3.0;
    p.k_y = 0.15;
    p.k = 10.0;
    p.sigma = 0.1;
    p.l = 1.0;
    return p;
}

// tanh via exponentials, as an independent route.
double tanh_ref(double z) {
    const double e = std::exp(2.0 * z);
    return (e - 1.0) / (e + 1.0);
}

}  // namespace

TEST_CASE("saturation basics") {
    CHECK(saturation(0.0) == 0.0);
    CHECK(saturation(1.5) == doctest::Approx(0.905148).epsilon(1e-6));
    CHECK(saturation(1.5) == doctest::Approx(tanh_ref(1.5)).epsilon(1e-12));
    SimRng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double z = rng.uniform(-4, 4);
        CHECK(saturation(z) == doctest::Approx(-saturation(-z)).epsilon(1e-14));
        CHECK(std::fabs(saturation(z)) < 1.0);
    }
    // S'(0) = 1
    CHECK((saturation(1e-7) - saturation(-1e-7)) / 2e-7 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("switch function") {
    CHECK(switch_fn(0.0, 0.1) == 1.0);
    CHECK(switch_fn(0.3, 0.1) == doctest::Approx(0.011109).epsilon(1e-4));
    CHECK(switch_fn(0.3, 0.1) == doctest::Approx(std::exp(-4.5)).epsilon(1e-14));
    SimRng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double z = rng.uniform(-5, 5);
        const double s = rng.uniform(0.05, 1.0);
        CHECK(switch_fn(z, s) == switch_fn(-z, s));
        CHECK(switch_fn(z, s) >= 0.0);
        CHECK(switch_fn(z, s) <= 1.0);
        // positive whenever the exponent stays in double range (no clamping,
        // underflow to zero is accepted beyond that)
        if (z * z / (2 * s * s) < 700.0) CHECK(switch_fn(z, s) > 0.0);
    }
    // strictly decreasing in |z|
    CHECK(switch_fn(0.2, 0.1) > switch_fn(0.25, 0.1));
}

TEST_CASE("uncoupled opinion field") {
    AgentParams p = base_params();
    p.u = 1.0;
    CHECK(uncoupled_opinion_field(p, 0.0) == 0.0);

    p.u = 2.0;
    const double z = 1e-6;
    CHECK(uncoupled_opinion_field(p, z) == doctest::Approx((p.u - p.d) * z).epsilon(1e-5));

    // With the saddle-node bias of the u = 1.3 normal form, a root sits near
    // the predicted saddle z = 0.3162 and the positive roots bracket it.
    p.u = 1.3;
    p.b = -0.0632456;
    auto f = [&](double zz) { return uncoupled_opinion_field(p, zz); };
    const auto roots = oracle::grid_roots(f, 0.0, 2.0, 1e-4);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(0.227473).epsilon(1e-3));
    CHECK(std::fabs(roots[0] - 0.3162) < 0.12);
    CHECK(roots[0] < 0.3162);
    CHECK(roots[1] > 0.3162);
}

TEST_CASE("waypoint x") {
    AgentParams p = base_params();
    CHECK(waypoint_x(p, 0.0, 0.5) == 0.0);
    CHECK(waypoint_x(p, 1.0, 0.5) == doctest::Approx(0.49999).epsilon(1e-4));
    CHECK(waypoint_x(p, -1.0, 0.5) == doctest::Approx(-waypoint_x(p, 1.0, 0.5)).epsilon(1e-14));
    SimRng rng(3);
    for (int i = 0; i < 500; ++i) {
        const double z = rng.uniform(-5, 5);
        const double rho = rng.uniform(0, 1);
        CHECK(std::fabs(waypoint_x(p, z, rho)) <= rho / p.l + 1e-15);
        if (z != 0.0) CHECK(waypoint_x(p, z, 0.7) * z >= 0.0);
    }
}

TEST_CASE("coupled field fixed point and limits") {
    const AgentParams p = base_params();
    const Vec2 at0 = coupled_field(p, 0.0, 0.0, 0.5);
    CHECK(at0.dz == 0.0);
    CHECK(at0.dx == 0.0);

    // eta -> 0: uncoupled recovery for |z| >= 6 sigma
    SimRng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double z = (rng.uniform01() < 0.5 ? -1 : 1) * rng.uniform(6 * p.sigma, 3.0);
        const double x = rng.uniform(-1, 1);
        const Vec2 f = coupled_field(p, z, x, 0.5);
        const double bound = p.k_z * std::fabs(z - x) * std::exp(-18.0);
        CHECK(std::fabs(f.dz - uncoupled_opinion_field(p, z)) <= bound + 1e-300);
    }

    // eta -> 1: motion toward the origin, dx = -(x - z) at z = 0
    for (double x : {-0.8, -0.1, 0.3, 1.0}) {
        const Vec2 f = coupled_field(p, 0.0, x, 0.5);
        CHECK(f.dx == doctest::Approx(-x).epsilon(1e-14));
    }
}

TEST_CASE("coupled field odd symmetry at b = 0") {
    const AgentParams p = base_params();
    SimRng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const double z = rng.uniform(-2, 2);
        const double x = rng.uniform(-2, 2);
        const Vec2 f = coupled_field(p, z, x, 0.5);
        const Vec2 g = coupled_field(p, -z, -x, 0.5);
        CHECK(f.dz == doctest::Approx(-g.dz).epsilon(1e-12));
        CHECK(f.dx == doctest::Approx(-g.dx).epsilon(1e-12));
    }
}

TEST_CASE("y field") {
    AgentParams p = base_params();
    CHECK(y_field(p, 0.4, 0.4) == 0.0);
    CHECK(y_field(p, 0.0, 1.0) == doctest::Approx(0.15).epsilon(1e-14));
    SimRng rng(17);
    for (int i = 0; i < 200; ++i) {
        const double y = rng.uniform(-2, 2), yb = rng.uniform(-2, 2);
        const double v = y_field(p, y, yb);
        CHECK(v * (yb - y) >= 0.0);
    }
}

TEST_CASE("analytic jacobian matches finite differences") {
    const AgentParams p = base_params();
    SimRng rng(23);
    for (int i = 0; i < 100; ++i) {
        const double z = rng.uniform(-1.5, 1.5);
        const double x = rng.uniform(-1.5, 1.5);
        const double rho = rng.uniform(0.05, 1.0);
        const Mat2 j = coupled_jacobian(p, z, x, rho);
        const double e = 1e-6;
        const Vec2 fzp = coupled_field(p, z + e, x, rho), fzm = coupled_field(p, z - e, x, rho);
        const Vec2 fxp = coupled_field(p, z, x + e, rho), fxm = coupled_field(p, z, x - e, rho);
        CHECK(j.a11 == doctest::Approx((fzp.dz - fzm.dz) / (2 * e)).epsilon(1e-5));
        CHECK(j.a12 == doctest::Approx((fxp.dz - fxm.dz) / (2 * e)).epsilon(1e-5));
        CHECK(j.a21 == doctest::Approx((fzp.dx - fzm.dx) / (2 * e)).epsilon(1e-5));
        CHECK(j.a22 == doctest::Approx((fxp.dx - fxm.dx) / (2 * e)).epsilon(1e-5));
    }
}

TEST_CASE("eigenvalues of 2x2") {
    const Eig2 e = eigenvalues(Mat2{-2.5, 2.0, 1.0, -1.0});
    CHECK(std::min(e.re1, e.re2) == doctest::Approx(-3.3508).epsilon(1e-4));
    CHECK(std::max(e.re1, e.re2) == doctest::Approx(-0.1492).epsilon(1e-4));
    const Eig2 c = eigenvalues(Mat2{0.0, 1.0, -1.0, 0.0});
    CHECK(c.re1 == doctest::Approx(0.0));
    CHECK(std::fabs(c.im1) == doctest::Approx(1.0));
}

TEST_CASE("params validation") {
    AgentParams p = base_params();
    CHECK_NOTHROW(p.validate());
    p.b = -0.3;  // any real bias is fine
    CHECK_NOTHROW(p.validate());
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    p.d = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("patch geometry") {
    const Patch p1{1, 0.2, 1.0, -0.5, 0.5};
    const Patch p2 = p1.mirrored();
    CHECK(p2.id == 2);
    CHECK(p2.x_min == doctest::Approx(-1.0));
    CHECK(p2.x_max == doctest::Approx(-0.2));
    CHECK(classify_position(0.5, 0.0, p1, p2) == PatchRegion::patch1);
    CHECK(classify_position(-0.5, 0.0, p1, p2) == PatchRegion::patch2);
    CHECK(classify_position(0.0, 0.0, p1, p2) == PatchRegion::transit);
    CHECK(classify_position(0.5, 0.9, p1, p2) == PatchRegion::transit);
}
