#ifndef INDEMNIFY_RNG_HPP
#define INDEMNIFY_RNG_HPP

#include <cstdint>

namespace indemnify {

// splitmix64 generator. Kept in-tree because seeded verification runs must
// be byte-reproducible, and the distributions in <random> are not pinned
// down by the standard.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Index in [0, n).
    std::uint64_t next_index(std::uint64_t n) { return next_u64() % n; }

    // Decorrelated stream for a numbered subtask, so parallel trials do not
    // depend on scheduling order.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 mix(seed ^ (0x632be59bd9b4e019ull * (index + 1)));
        mix.next_u64();
        mix.next_u64();
        return mix;
    }

private:
    std::uint64_t state_;
};

}  // namespace indemnify

#endif
