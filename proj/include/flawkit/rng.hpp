#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace flawkit {

/// SplitMix64 finalizer. Used both as a stream splitter and as a stateless hash.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key of child stream `index` under `key`. Children of distinct indices never share a key path.
constexpr std::uint64_t split_key(std::uint64_t key, std::uint64_t index) noexcept {
    return mix64(mix64(key) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/**
 * xoshiro256** seeded from a 64-bit stream key.
 *
 * Streams are addressed by keys: `Rng::stream(seed, i)` is trial i's generator,
 * and `child(i)` derives further independent substreams without consuming output.
 * All integer and real draws are implemented here (not via <random> distributions)
 * so output is identical across standard libraries.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    static constexpr const char* algorithm = "xoshiro256** keyed by splitmix64 stream splitting";

    explicit Rng(std::uint64_t key = 0) : key_(key) {
        std::uint64_t z = key;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            w = mix64(z);
        }
    }

    static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(split_key(seed, index)); }

    Rng child(std::uint64_t index) const { return Rng(split_key(key_, index)); }
    std::uint64_t key() const { return key_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's nearly-divisionless rejection.
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Index drawn from nonnegative weights (need not be normalized). Weights must not all be zero.
    std::size_t pick(std::span<const double> weights) noexcept {
        double total = 0;
        for (double w : weights) total += w;
        double x = uniform() * total;
        std::size_t last = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0) continue;
            last = i;
            if (x < weights[i]) return i;
            x -= weights[i];
        }
        return last;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t key_;
    std::uint64_t s_[4];
};

} // namespace flawkit
