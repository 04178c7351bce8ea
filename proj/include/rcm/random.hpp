#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>

namespace rcm {

// Counter-based randomness. Every random quantity in a replication is a pure
// function of (master seed, replication, stream, index...), hashed through the
// SplitMix64 finalizer. Nothing depends on draw order or thread schedule.
enum class Stream : std::uint64_t {
    PointCount = 1,
    PointPosition = 2,
    Edge = 3,
    Quadrature = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Absorbs words left to right: h <- splitmix64(h ^ w).
constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto w : words) h = splitmix64(h ^ w);
    return h;
}

// Uniform in [0,1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

struct ReplicationKey {
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;

    std::uint64_t stream_seed(Stream s) const {
        return hash_words({seed, replication, static_cast<std::uint64_t>(s)});
    }

    // Uniform for the unordered pair {i,j}; symmetric in its arguments.
    double pair_uniform(std::uint64_t i, std::uint64_t j) const {
        if (i > j) std::swap(i, j);
        return to_unit(hash_words({seed, replication, static_cast<std::uint64_t>(Stream::Edge), i, j}));
    }

    friend bool operator==(const ReplicationKey&, const ReplicationKey&) = default;
};

} // namespace rcm
