#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "gapestim/errors.hpp"

namespace gapestim {

// splitmix64, used to expand a user seed into generator state.
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

// xoshiro256++ (Blackman/Vigna). Fixed here as the project-wide generator so
// that seeded runs reproduce bit-identically on every platform.
class Xoshiro256PlusPlus {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256PlusPlus(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) from the top 53 bits.
    double next_double() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Inverse-CDF sampler over a fixed probability vector. The cumulative sums
// are computed left to right and the last entry is pinned to 1, so sampling
// is deterministic given the probabilities and the uniform variate.
class CategoricalSampler {
public:
    explicit CategoricalSampler(std::span<const double> probs) : cdf_(probs.size()) {
        if (probs.empty()) throw InvalidParameterError("categorical sampler needs at least one outcome");
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] < 0.0) throw InvalidParameterError("negative probability in categorical sampler");
            acc += probs[i];
            cdf_[i] = acc;
        }
        cdf_.back() = 1.0;
    }

    int sample(double u) const {
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return static_cast<int>(it - cdf_.begin());
    }

    int sample(Xoshiro256PlusPlus& rng) const { return sample(rng.next_double()); }

private:
    std::vector<double> cdf_;
};

} // namespace gapestim
