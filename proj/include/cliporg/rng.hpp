#pragma once

#include <cstdint>

namespace cliporg {

/// Deterministic 64-bit PRNG (splitmix64).
///
/// The <random> engines are portable but the distributions are not, so a
/// corpus generated through std::uniform_*_distribution would differ between
/// standard libraries. This generator produces the same stream everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [lo, hi], both inclusive. Requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    /// Stateless combiner for deriving independent sub-seeds; the result does
    /// not depend on how many values were drawn from this generator.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
        Rng r(seed ^ (salt * 0xd6e8feb86659fd93ull));
        r.next_u64();
        return r.next_u64();
    }

    /// Independent generator keyed off this generator's original seed.
    Rng derive(std::uint64_t salt) const { return Rng(mix(seed_, salt)); }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace cliporg
