#pragma once

#include <cstdint>
#include <initializer_list>

namespace phikit {

// splitmix64 finalizer; used both as a stream generator and as a stateless
// counter hash so that any sample can be recomputed from (seed, counters).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_seq(std::uint64_t seed, std::initializer_list<std::uint64_t> xs) {
    std::uint64_t h = mix64(seed);
    for (auto x : xs) h = mix64(h ^ mix64(x + 0x632be59bd9b4e019ULL));
    return h;
}

// Child seed for task `i` of a parent stream.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t i) { return hash_seq(seed, {0x5eedULL, i}); }

inline double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

class Rng {
public:
    using result_type = std::uint64_t;
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }
    result_type operator()() { return mix64(seed_ ^ mix64(ctr_++)); }

    double uniform() { return to_unit((*this)()); }
    bool bernoulli(double p) { return uniform() < p; }
    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t seed_;
    std::uint64_t ctr_ = 0;
};

}  // namespace phikit
