#ifndef RSF_RNG_HPP
#define RSF_RNG_HPP

#include <array>
#include <cstdint>
#include <cmath>

namespace rsf {

// SplitMix64 step; used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with splittable seeding: (seed, stream) pairs give statistically
// independent sequences, so ensembles assign one stream per forest index and
// reproduce bit-identically regardless of thread count. All derived draws
// (uniform doubles, normals, bounded ints) avoid std::* distributions to stay
// deterministic across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        std::uint64_t b = splitmix64(s);
        std::uint64_t t = a ^ (stream * 0xD2B74407B1CE6E93ULL) ^ (b + stream);
        for (auto& w : state_) w = splitmix64(t);
        bool all_zero = true;
        for (auto w : state_) all_zero = all_zero && w == 0;
        if (all_zero) state_[0] = 0x1ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Unbiased integer in [0, n) (Lemire rejection).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal via the Marsaglia polar method (deterministic, cached spare).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Poisson draw; Knuth product for small mean, normal approximation above.
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            const double limit = std::exp(-mean);
            long k = 0;
            double p = 1.0;
            do {
                ++k;
                p *= next_double();
            } while (p > limit);
            return k - 1;
        }
        // Split mean to keep the product method in its accurate range.
        const double half = std::floor(mean / 2.0);
        return poisson(half) + poisson(mean - half);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream id for the k-th forest of a run; keeps sampling, signal generation
// and label draws on disjoint stream ranges.
namespace streams {
constexpr std::uint64_t forest_base = 0;
constexpr std::uint64_t signal = 1ULL << 56;
constexpr std::uint64_t noise = (1ULL << 56) + 1;
constexpr std::uint64_t generator = (1ULL << 56) + 2;
constexpr std::uint64_t labels = (1ULL << 56) + 3;
constexpr std::uint64_t misc = (1ULL << 56) + 4;
}  // namespace streams

}  // namespace rsf

#endif
