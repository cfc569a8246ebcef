#pragma once

// Seedable, splittable random streams. Every consumer (per-type arrivals,
// per-type service durations, policy sampling) gets its own stream derived
// from the run seed, so runs are reproducible and policies compared under a
// common seed see identical traffic (common random numbers).

#include <cmath>
#include <cstdint>
#include <random>

namespace packsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class StreamKind : std::uint64_t { Arrival = 1, Service = 2, Policy = 3, Instance = 4 };

class RngStream {
public:
    RngStream() : eng_(0) {}
    RngStream(std::uint64_t seed, StreamKind kind, std::uint64_t idx)
        : eng_(splitmix64(splitmix64(seed ^ (static_cast<std::uint64_t>(kind) << 56)) + idx)) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return eng_() % n; }

    // Uniform integer in [lo, hi] inclusive.
    long uniform_int(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace packsim
