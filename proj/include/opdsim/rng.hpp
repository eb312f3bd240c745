#pragma once

#include <cstdint>
#include <random>

namespace opdsim {

// Deterministic RNG for scenario reproducibility. mt19937_64 output is fixed
// by the standard; the uniform mappings below avoid the implementation-defined
// std::uniform_real_distribution so that identical seeds give identical
// trajectories on any platform.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : gen_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace opdsim
