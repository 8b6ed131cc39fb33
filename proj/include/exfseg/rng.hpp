#pragma once

#include <cstdint>
#include <random>

namespace exfseg {

/// Explicit random generator state. Owned by one worker at a time;
/// never shared.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    /// Uniform draw in (0, 1]; safe as an argument of log().
    double uniform01() {
        uint64_t u = gen_() >> 11; // 53 bits
        return (static_cast<double>(u) + 1.0) * 0x1p-53;
    }

    uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// splitmix64 finalizer; used to derive independent child seeds
/// from (base_seed, index) counters.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t child_seed(uint64_t base_seed, uint64_t index) {
    return splitmix64(base_seed + 0x632BE59BD9B4E019ULL * (index + 1));
}

} // namespace exfseg
