#pragma once

#include <cmath>
#include <cstdint>

namespace pacsim {

// Counter-based generator (splitmix64 core). Each (seed, stream) pair gives an
// independent sequence, so trial i of a simulation can use stream i and the
// result does not depend on how trials are distributed over threads.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) {
        state_ = mix(seed ^ mix(stream ^ 0x9e3779b97f4a7c15ull));
        have_gauss_ = false;
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0,1)
    double next_double() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    uint8_t next_bit() { return next_u64() >> 63; }

    // standard normal via Box-Muller; portable, unlike std::normal_distribution
    double next_gauss() {
        if (have_gauss_) {
            have_gauss_ = false;
            return gauss_;
        }
        double u1 = ((next_u64() >> 11) + 1) * 0x1.0p-53; // (0,1]
        double u2 = (next_u64() >> 11) * 0x1.0p-53;       // [0,1)
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925287 * u2;
        gauss_ = r * std::sin(t);
        have_gauss_ = true;
        return r * std::cos(t);
    }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t state_;
    double gauss_ = 0.0;
    bool have_gauss_;
};

} // namespace pacsim
