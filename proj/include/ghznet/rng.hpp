#pragma once

#include <cstdint>

namespace ghznet {

/// splitmix64; used to expand seeds into independent stream parameters.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// PCG32 (pcg_oneseq_64_32). Small state, cheap to construct per round.
class Pcg32 {
public:
    Pcg32(std::uint64_t init_state, std::uint64_t init_seq) {
        state_ = 0;
        inc_ = (init_seq << 1u) | 1u;
        next();
        state_ += init_state;
        next();
    }

    std::uint32_t next() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next64() {
        return (static_cast<std::uint64_t>(next()) << 32) | next();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    int bit() { return static_cast<int>(next() >> 31); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint32_t below(std::uint32_t n) {
        // Lemire's multiply-shift with rejection.
        std::uint64_t m = static_cast<std::uint64_t>(next()) * n;
        std::uint32_t lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            std::uint32_t t = (0u - n) % n;
            while (lo < t) {
                m = static_cast<std::uint64_t>(next()) * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

/// Counter-based substream: (master seed, round id) -> independent generator.
/// Identical inputs give identical streams regardless of evaluation order,
/// which is what makes parallel and serial runs agree bit for bit.
inline Pcg32 make_round_rng(std::uint64_t master_seed, std::uint64_t round_id) {
    SplitMix64 sm(master_seed ^ (0x9e3779b97f4a7c15ULL * (round_id + 1)));
    std::uint64_t a = sm.next();
    std::uint64_t b = sm.next();
    return Pcg32(a, b);
}

} // namespace ghznet
