#pragma once

#include <cmath>
#include <cstdint>

namespace gdens {

// SplitMix64 finalizer; used to key per-chunk streams from (seed, chunk).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derive a domain-separated sub-seed (centering runs, doubling runs, ...).
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag));
}

// xoshiro256++ with explicit, platform-independent output; the normal and
// exponential transforms below are written out so that a fixed seed yields
// bitwise-identical streams on any conforming implementation.
class RandomStream {
  public:
    // Counter-based construction: stream (seed, chunk) is independent of
    // every other chunk and of how chunks are scheduled across threads.
    RandomStream(std::uint64_t seed, std::uint64_t chunk) {
        std::uint64_t base = mix64(seed ^ mix64(chunk * 0xD6E8FEB86659FD93ULL + 1));
        for (int i = 0; i < 4; ++i)
            s_[i] = mix64(base + static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next_u64() {
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

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the spare deviate is cached, which is
    // deterministic because each chunk owns exactly one stream.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01(); // (0,1], keeps log finite
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    void fill_normal(double* out, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) out[i] = normal();
    }

    // Exp(1).
    double exponential() { return -std::log1p(-uniform01()); }

    // Exp(1) restricted to stratum k of `strata` equal-probability strata:
    // inverse CDF applied to (k+U)/strata.  strata == 1 gives plain Exp(1).
    double exponential_stratified(std::uint32_t k, std::uint32_t strata) {
        double p = (static_cast<double>(k) + uniform01()) / static_cast<double>(strata);
        return -std::log1p(-p);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace gdens
