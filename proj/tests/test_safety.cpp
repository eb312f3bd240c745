#include <doctest.h>

#include <cmath>

#include "opdsim/rng.hpp"
#include "opdsim/safety.hpp"

using namespace opdsim;

namespace {

SafetyConfig cfg_with(double r, double m = 0.0, double a = 2.0) {
    SafetyConfig c;
    c.agent_radius = r;
    c.margin = m;
    c.gain_alpha = a;
    return c;
}

double norm(const XY& v) { return std::hypot(v.x, v.y); }

}  // namespace

TEST_CASE("no neighbors passes the command through") {
    const FilterResult r = filter_velocity(XY{0, 0}, XY{0.3, -0.1}, {}, cfg_with(0.05));
    CHECK(r.velocity.x == 0.3);
    CHECK(r.velocity.y == -0.1);
    CHECK(r.speed_ratio == 1.0);
}

TEST_CASE("distant neighbor leaves the command unchanged") {
    const FilterResult r =
        filter_velocity(XY{0, 0}, XY{0.3, 0.0}, {XY{5.0, 0.0}}, cfg_with(0.05, 0.01));
    CHECK(r.velocity.x == 0.3);
    CHECK(r.velocity.y == 0.0);
    CHECK(r.speed_ratio == 1.0);
}

TEST_CASE("head-on pair at contact distance cannot keep approaching") {
    const SafetyConfig cfg = cfg_with(0.05, 0.01);
    const double d = 2 * cfg.agent_radius + cfg.margin;
    const XY pa{0, 0}, pb{d, 0};
    const FilterResult ra = filter_velocity(pa, XY{1, 0}, {pb}, cfg);
    const FilterResult rb = filter_velocity(pb, XY{-1, 0}, {pa}, cfg);
    // separation rate component of the filtered relative velocity
    const double sep_rate = (ra.velocity.x - rb.velocity.x) * (pa.x - pb.x) +
                            (ra.velocity.y - rb.velocity.y) * (pa.y - pb.y);
    CHECK(sep_rate >= -1e-12);
}

TEST_CASE("non-overlapping constraints never increase speed") {
    // With all pairs separated by at least the safe distance, every half-space
    // contains v = 0 and each projection is norm-decreasing.
    const SafetyConfig cfg = cfg_with(0.04, 0.01);
    const double d_safe = 2 * cfg.agent_radius + cfg.margin;
    SimRng rng(4242);
    for (int trial = 0; trial < 500; ++trial) {
        const XY self{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        std::vector<XY> nbrs;
        const int n = 1 + (int)(rng.uniform01() * 6);
        for (int i = 0; i < n; ++i) {
            const double ang = rng.uniform(0, 2 * M_PI);
            const double dist = d_safe + rng.uniform(0.0, 0.5);
            nbrs.push_back(XY{self.x + dist * std::cos(ang), self.y + dist * std::sin(ang)});
        }
        const XY cmd{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        const FilterResult r = filter_velocity(self, cmd, nbrs, cfg);
        CHECK(norm(r.velocity) <= norm(cmd) + 1e-12);
        CHECK(r.speed_ratio <= 1.0 + 1e-12);
        CHECK(r.speed_ratio >= 0.0);
    }
}

TEST_CASE("adding a neighbor does not raise the filtered speed") {
    const SafetyConfig cfg = cfg_with(0.04, 0.01);
    const double d_safe = 2 * cfg.agent_radius + cfg.margin;
    SimRng rng(777);
    for (int trial = 0; trial < 300; ++trial) {
        const XY self{0, 0};
        std::vector<XY> nbrs;
        const int n = (int)(rng.uniform01() * 5);
        for (int i = 0; i < n; ++i) {
            const double ang = rng.uniform(0, 2 * M_PI);
            const double dist = d_safe + rng.uniform(0.0, 0.4);
            nbrs.push_back(XY{dist * std::cos(ang), dist * std::sin(ang)});
        }
        const XY cmd{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        const double before = norm(filter_velocity(self, cmd, nbrs, cfg).velocity);
        const double ang = rng.uniform(0, 2 * M_PI);
        const double dist = d_safe + rng.uniform(0.0, 0.4);
        nbrs.push_back(XY{dist * std::cos(ang), dist * std::sin(ang)});
        const double after = norm(filter_velocity(self, cmd, nbrs, cfg).velocity);
        CHECK(after <= before + 1e-12);
    }
}

TEST_CASE("surrounded and overlapped means deadlock") {
    const SafetyConfig cfg = cfg_with(0.1, 0.0, 2.0);
    const double d = 0.5 * (2 * cfg.agent_radius);  // overlapping
    const std::vector<XY> nbrs{XY{d, 0}, XY{-d, 0}, XY{0, d}, XY{0, -d}};
    const FilterResult r = filter_velocity(XY{0, 0}, XY{0.4, 0.1}, nbrs, cfg);
    CHECK(r.velocity.x == 0.0);
    CHECK(r.velocity.y == 0.0);
    CHECK(r.speed_ratio == 0.0);
}

TEST_CASE("effective Kx tracking") {
    EffectiveKxTracker t(50);
    CHECK(t.effective(0.15) == 0.15);  // empty window -> nominal
    for (int i = 0; i < 10; ++i) t.record(1.0);
    CHECK(t.effective(0.15) == doctest::Approx(0.15));
    for (int i = 0; i < 200; ++i) t.record(0.0);
    CHECK(t.effective(0.15) == doctest::Approx(0.0));  // fully deadlocked
    EffectiveKxTracker w(4);
    w.record(1.0);
    w.record(1.0);
    w.record(0.0);
    w.record(0.0);
    CHECK(w.effective(2.0) == doctest::Approx(1.0));
    w.record(0.0);
    CHECK(w.effective(2.0) == doctest::Approx(0.5));  // window slid to (1,0,0,0)
    w.record(0.0);
    CHECK(w.effective(2.0) == doctest::Approx(0.0));
}
