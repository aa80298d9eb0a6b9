#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace pottsgram {

// splitmix64 finalizer; used to turn (seed, substream index) into an
// engine seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seedable random source built on mt19937_64. The engine itself is fully
// specified by the standard; the uniform mappings below are hand-rolled
// because std::uniform_*_distribution output is implementation-defined
// and we promise identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Substream for sample `index`: seed xor a Weyl-multiplied index,
    // mixed through splitmix64.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))));
    }

    static const char* generator_name() { return "mt19937_64+splitmix64-substream"; }

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n). Lemire multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        auto wide = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(wide);
        if (lo < n) {
            const std::uint64_t cutoff = (0 - n) % n;
            while (lo < cutoff) {
                wide = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(wide);
            }
        }
        return static_cast<std::uint64_t>(wide >> 64);
    }

    // Double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace pottsgram
