#include "opdsim/environment.hpp"

#include <stdexcept>

namespace opdsim {

int TrashField::uncollected_in(const Patch& p) const {
    int n = 0;
    for (const auto& it : items)
        if (!it.collected && p.contains(it.x, it.y)) ++n;
    return n;
}

int TrashField::collected_total() const {
    int n = 0;
    for (const auto& it : items)
        if (it.collected) ++n;
    return n;
}

void TrashField::scatter(const Patch& p, int count, SimRng& rng) {
    for (int i = 0; i < count; ++i) {
        TrashItem it;
        it.x = rng.uniform(p.x_min, p.x_max);
        it.y = rng.uniform(p.y_min, p.y_max);
        items.push_back(it);
    }
}

void EnvironmentConfig::validate() const {
    if (!(q0 > 0.0)) throw std::invalid_argument("q0 must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(q_min > 0.0)) throw std::invalid_argument("q_min must be > 0");
    if (!(pickup_radius > 0.0)) throw std::invalid_argument("pickup_radius must be > 0");
}

EfficiencyAccount on_patch_entry(const EfficiencyAccount& a, const Patch& entered) {
    EfficiencyAccount out = a;
    out.collected_count = 0;
    out.distance_in_patch = 0.0;
    out.s = entered.id == 1 ? 1.0 : -1.0;
    out.account_patch = entered.id;
    return out;
}

int sense_and_collect(double x, double y, TrashField& field, double radius, const Patch& p1,
                      const Patch& p2, double time) {
    if (classify_position(x, y, p1, p2) == PatchRegion::transit) return 0;
    int picked = 0;
    const double r2 = radius * radius;
    for (auto& it : field.items) {
        if (it.collected) continue;
        const double dx = it.x - x, dy = it.y - y;
        if (dx * dx + dy * dy <= r2) {
            it.collected = true;
            it.collected_at = time;
            ++picked;
        }
    }
    return picked;
}

}  // namespace opdsim
