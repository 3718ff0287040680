#pragma once

#include <cstdint>
#include <random>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace qsearch {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of the independent stream owned by path (or trial) `index`. Depends only
// on (seed, index), so batches reproduce regardless of how paths are scheduled.
inline constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Standard normal draws for one path.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t index) : engine_(stream_seed(seed, index)) {}

    double operator()() { return normal_(engine_); }

    bool bernoulli(double p) { return boost::random::bernoulli_distribution<double>(p)(engine_); }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qsearch
