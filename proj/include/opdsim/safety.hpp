#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace opdsim {

struct SafetyConfig {
    double agent_radius = 0.0;  // 0 disables the filter
    double margin = 0.0;
    double gain_alpha = 2.0;  // barrier aggressiveness
    int window_steps = 50;    // speed-ratio averaging window

    bool enabled() const { return agent_radius > 0.0; }
};

struct XY {
    double x = 0.0, y = 0.0;
};

struct FilterResult {
    XY velocity;
    double speed_ratio = 1.0;  // ||safe|| / max(||cmd||, tiny); 0 when deadlocked
};

// Minimal-deviation velocity respecting, for each neighbor j, the barrier
// half-space  <v, p - p_j> >= -(alpha/2)(||p - p_j||^2 - (2 r + margin)^2),
// solved by cyclic projection onto violated half-spaces (at most 20 sweeps).
// Infeasible instances return zero velocity and speed_ratio 0.
FilterResult filter_velocity(const XY& self_pos, const XY& cmd,
                             const std::vector<XY>& neighbors, const SafetyConfig& cfg);

// Trailing-window average of speed ratios, mapped onto the agent's K_x.
class EffectiveKxTracker {
public:
    explicit EffectiveKxTracker(int window = 50) : window_(window > 0 ? window : 1) {}

    void record(double speed_ratio) {
        ratios_.push_back(speed_ratio);
        if (ratios_.size() > static_cast<std::size_t>(window_)) ratios_.erase(ratios_.begin());
    }

    // Nominal K_x scaled by the window-average ratio; nominal when empty.
    double effective(double nominal_kx) const {
        if (ratios_.empty()) return nominal_kx;
        double s = 0.0;
        for (double r : ratios_) s += r;
        return nominal_kx * s / static_cast<double>(ratios_.size());
    }

    double mean_ratio() const {
        if (ratios_.empty()) return 1.0;
        double s = 0.0;
        for (double r : ratios_) s += r;
        return s / static_cast<double>(ratios_.size());
    }

private:
    int window_;
    std::vector<double> ratios_;
};

}  // namespace opdsim
