#pragma once

#include <vector>

#include "opdsim/model.hpp"
#include "opdsim/rng.hpp"

namespace opdsim {

struct TrashItem {
    double x = 0.0;
    double y = 0.0;
    bool collected = false;
    double collected_at = -1.0;
};

struct TrashField {
    std::vector<TrashItem> items;

    int uncollected_in(const Patch& p) const;
    int collected_total() const;
    void scatter(const Patch& p, int count, SimRng& rng);
};

struct EnvironmentConfig {
    double q0 = 2.0;           // efficiency numerator floor
    double epsilon = 0.01;     // efficiency denominator guard
    double q_min = 1.5;        // switching threshold efficiency
    double pickup_radius = 0.05;

    void validate() const;
};

// Per-agent efficiency bookkeeping; reset on every patch entry.
struct EfficiencyAccount {
    int collected_count = 0;
    double distance_in_patch = 0.0;
    double q0 = 2.0;
    double epsilon = 0.01;
    double s = 1.0;  // +1 while assigned to patch 1, -1 for patch 2
    double q_min = 1.5;
    int account_patch = 1;
};

// q = (collected + q0) / (distance + epsilon).
inline double efficiency(const EfficiencyAccount& a) {
    return (a.collected_count + a.q0) / (a.distance_in_patch + a.epsilon);
}

// b(q) = s (tanh q - tanh q_min).
inline double bias_from_efficiency(const EfficiencyAccount& a) {
    return a.s * (std::tanh(efficiency(a)) - std::tanh(a.q_min));
}

// Counters zeroed, sign set by the entered patch.
EfficiencyAccount on_patch_entry(const EfficiencyAccount& a, const Patch& entered);

// Collects every uncollected item within `radius` of (x, y), provided the
// position lies inside one of the patches. Returns the number picked.
int sense_and_collect(double x, double y, TrashField& field, double radius, const Patch& p1,
                      const Patch& p2, double time);

}  // namespace opdsim
