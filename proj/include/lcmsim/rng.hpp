// Deterministic per-replica random streams.
//
// Every sampler in the library draws from a SeededRng identified by a
// (seed, stream) pair. Replica r of an experiment uses stream r, so results
// are reproducible bit-for-bit and independent of how replicas are scheduled
// across threads.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace lcmsim {

// xoshiro256++ with splitmix64 state derivation from (seed, stream).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        std::uint64_t x = mix64(seed + 0x9e3779b97f4a7c15ull) ^
                          mix64(stream * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull);
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ull;
            word = mix64(x);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1): midpoints of the 2^53 lattice,
    // so logarithms are always finite.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Exponential with unit mean.
    double next_exponential() { return -std::log(next_unit()); }

    // Uniform on {0, 1, ..., n-1} without modulo bias (Lemire rejection).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("next_below: n must be positive");
        unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(wide);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                wide = static_cast<unsigned __int128>(next_u64()) * n;
                low = static_cast<std::uint64_t>(wide);
            }
        }
        return static_cast<std::uint64_t>(wide >> 64);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace lcmsim
