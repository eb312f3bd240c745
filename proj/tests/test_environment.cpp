#include <doctest.h>

#include <cmath>

#include "opdsim/environment.hpp"

using namespace opdsim;

TEST_CASE("efficiency quotient") {
    EfficiencyAccount a;
    a.q0 = 2.0;
    a.epsilon = 0.01;
    CHECK(efficiency(a) == doctest::Approx(200.0).epsilon(1e-12));
    a.collected_count = 3;
    a.distance_in_patch = 2.0;
    CHECK(efficiency(a) == doctest::Approx(5.0 / 2.01).epsilon(1e-12));
    // strictly decreasing in distance with no pickup
    double prev = efficiency(a);
    for (double d = 2.1; d < 4.0; d += 0.3) {
        a.distance_in_patch = d;
        CHECK(efficiency(a) < prev);
        prev = efficiency(a);
    }
}

TEST_CASE("bias from efficiency") {
    EfficiencyAccount a;
    a.q0 = 2.0;
    a.epsilon = 0.01;
    a.q_min = 1.5;
    a.s = 1.0;

    // q = q_min gives exactly zero
    a.collected_count = 0;
    a.distance_in_patch = a.q0 / a.q_min - a.epsilon;
    CHECK(bias_from_efficiency(a) == doctest::Approx(0.0).epsilon(1e-12));

    // fresh account: q huge, tanh(q) ~ 1
    a.distance_in_patch = 0.0;
    CHECK(bias_from_efficiency(a) == doctest::Approx(1.0 - 0.905148).epsilon(1e-5));

    // depleted: q -> 0+
    a.distance_in_patch = 1e9;
    CHECK(bias_from_efficiency(a) == doctest::Approx(-0.905148).epsilon(1e-5));

    // |b| < 1 always, and the sign semantics follow s and q vs q_min
    for (double s : {1.0, -1.0}) {
        a.s = s;
        for (double d : {0.0, 0.5, 1.0, 1.4, 2.0, 100.0}) {
            a.distance_in_patch = d;
            const double b = bias_from_efficiency(a);
            CHECK(std::fabs(b) < 1.0);
            const double q = efficiency(a);
            if (q > a.q_min) CHECK(b * s > 0.0);
            if (q < a.q_min) CHECK(b * s < 0.0);
        }
    }
}

TEST_CASE("patch entry resets the account") {
    const Patch p1{1, 0.2, 1.0, -0.5, 0.5};
    const Patch p2 = p1.mirrored();
    EfficiencyAccount a;
    a.collected_count = 7;
    a.distance_in_patch = 3.0;
    a.s = -1.0;

    const EfficiencyAccount a1 = on_patch_entry(a, p1);
    CHECK(a1.s == 1.0);
    CHECK(a1.collected_count == 0);
    CHECK(a1.distance_in_patch == 0.0);
    CHECK(a1.account_patch == 1);
    // first post-entry bias ~ s (1 - tanh(q_min))
    CHECK(bias_from_efficiency(a1) == doctest::Approx(1.0 - std::tanh(a1.q_min)).epsilon(1e-4));

    const EfficiencyAccount a2 = on_patch_entry(a, p2);
    CHECK(a2.s == -1.0);
    CHECK(a2.account_patch == 2);
}

TEST_CASE("sense and collect") {
    const Patch p1{1, 0.2, 1.0, -0.5, 0.5};
    const Patch p2 = p1.mirrored();
    TrashField field;
    field.items.push_back(TrashItem{0.5, 0.0});
    field.items.push_back(TrashItem{0.9, 0.4});

    // nothing within radius
    CHECK(sense_and_collect(0.7, -0.3, field, 0.05, p1, p2, 1.0) == 0);
    CHECK(field.collected_total() == 0);

    // item exactly at the agent position
    CHECK(sense_and_collect(0.5, 0.0, field, 0.05, p1, p2, 2.0) == 1);
    CHECK(field.items[0].collected);
    CHECK(field.items[0].collected_at == 2.0);

    // collected items are never collected twice
    CHECK(sense_and_collect(0.5, 0.0, field, 0.05, p1, p2, 3.0) == 0);

    // outside both patches nothing is sensed
    TrashField f2;
    f2.items.push_back(TrashItem{0.21, 0.0});
    CHECK(sense_and_collect(0.19, 0.0, f2, 0.5, p1, p2, 0.0) == 0);
}

TEST_CASE("scatter places items inside the patch") {
    const Patch p2{2, -1.0, -0.2, -0.3, 0.3};
    TrashField field;
    SimRng rng(99);
    field.scatter(p2, 500, rng);
    CHECK(field.items.size() == 500);
    for (const auto& it : field.items) CHECK(p2.contains(it.x, it.y));
    CHECK(field.uncollected_in(p2) == 500);
}
