#pragma once

#include <cstdint>
#include <limits>

namespace bifurcation {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Counter-based 64-bit generator: output k of stream s is a fixed mix of
/// (master_seed, s, k), so every trial owns an independent, reproducible
/// substream regardless of which thread runs it. Mixing is the SplitMix64
/// finalizer.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_(mix(master_seed ^ mix(stream_id + kStreamSalt))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t draws() const { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace bifurcation
