#pragma once

#include <cstdint>
#include <random>

namespace fbgather {

using Rng = std::mt19937_64;

/// Independent random streams per purpose. Keeping them apart means an
/// architecture that draws differently in one place cannot shift another
/// stream, which is what makes FB/NF paired trials share trajectories.
enum class Stream : std::uint64_t {
    Placement = 1,
    Motion = 2,
    Noise = 3,
    Backoff = 4,
};

inline Rng make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x9e3779b9u};
    return Rng(seq);
}

/// Seed of trial `index` derived from a base seed.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

}  // namespace fbgather
