#ifndef RWRE_RNG_HPP
#define RWRE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>

namespace rwre {

// Stafford's mix13 finalizer, the core bijective mixer used everywhere below.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Keyed combine: order-sensitive, suitable for deriving substream keys.
inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a + 0x9e3779b97f4a7c15ULL + mix64(b));
}

inline double to_unit(std::uint64_t z) {
    // 53 high bits -> [0,1)
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Counter-based pseudo-random function. Pure in (key, counter words), so a
// value can be recomputed at any time without storing state. Used to realize
// environments lazily over the whole lattice.
class Prf {
public:
    explicit Prf(std::uint64_t key) : key_(key) {}

    std::uint64_t operator()(std::uint64_t c0) const {
        return mix64(hash_combine(key_, c0));
    }
    std::uint64_t operator()(std::uint64_t c0, std::uint64_t c1) const {
        return mix64(hash_combine(hash_combine(key_, c0), c1));
    }
    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

// Sequential stream built on splitmix64. Streams derived from distinct
// (seed, stream id) pairs are treated as independent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed + 0x9e3779b97f4a7c15ULL)) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(hash_combine(seed, stream)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    double next_unit() { return to_unit(next_u64()); }

    // Index into a cumulative-weight table (strictly increasing, last = total).
    std::size_t next_index(std::span<const double> cumulative) {
        const double u = next_unit() * cumulative.back();
        std::size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cumulative[mid]) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

    // Box-Muller; platform-independent unlike std::normal_distribution.
    double next_gaussian() {
        double u1 = next_unit();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace rwre

#endif
