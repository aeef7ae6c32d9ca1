#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace mfbounds {

struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(Seed, Seed) = default;
};

// SplitMix64 finalizer; used to derive well-separated generator states from
// (seed, stream id) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Named sub-streams so that a generator needing several independent sources
// (e.g. the MRW field and the driving Brownian motion) draws them from
// disjoint streams of the same seed.
enum class StreamId : std::uint64_t {
    primary = 0,
    secondary = 1,
    tertiary = 2,
};

// One independent random stream per (seed, stream id). The engine and the
// transforms below are fully specified, so output is bit-identical on every
// platform with IEEE doubles.
class RandomStream {
public:
    explicit RandomStream(Seed seed, StreamId stream = StreamId::primary)
        : engine_(splitmix64(seed.value ^ splitmix64(static_cast<std::uint64_t>(stream) + 1))) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_(engine_); }

    double exponential() { return -std::log(uniform()); }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

inline std::vector<double> gaussian_variates(std::size_t count, Seed seed) {
    RandomStream rng(seed);
    std::vector<double> out(count);
    for (auto& z : out) z = rng.normal();
    return out;
}

}  // namespace mfbounds
