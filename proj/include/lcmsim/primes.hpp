// Sieve-backed prime infrastructure: smallest-prime-factor table,
// factorization into prime powers, prime enumeration and the weighted
// prime sums that appear in the exact formulas.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lcmsim {

struct PrimePower {
    std::uint32_t prime;
    std::uint32_t exponent;

    bool operator==(const PrimePower&) const = default;
};

// Sparse prime -> exponent map, entries sorted by prime, exponents >= 1.
class ExponentMap {
public:
    ExponentMap() = default;
    explicit ExponentMap(std::vector<PrimePower> entries);

    const std::vector<PrimePower>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // Reconstructed integer prod p^e. Exact for any value produced by
    // FactorizationTable::factorize (the product is the factorized input).
    std::uint64_t value() const;

    // sum e * log p.
    double log_value() const;

    bool operator==(const ExponentMap&) const = default;

private:
    std::vector<PrimePower> entries_;
};

// Smallest-prime-factor table for 2..n_max plus the cached list of primes.
// Immutable after construction; safe to share across threads.
//
// Memory is 4 bytes per integer plus ~4 bytes per prime, so n_max = 1e8
// costs ~420 MB. Construction refuses n_max above kMaxNmax.
class FactorizationTable {
public:
    static constexpr std::uint32_t kMaxNmax = 400'000'000;

    explicit FactorizationTable(std::uint32_t n_max);

    std::uint32_t n_max() const { return n_max_; }

    std::uint32_t smallest_prime_factor(std::uint32_t k) const;

    bool is_prime(std::uint32_t k) const {
        return k >= 2 && k <= n_max_ && spf_[k] == k;
    }

    ExponentMap factorize(std::uint32_t k) const;

    // Streaming factorization for hot loops; fn(prime, exponent) is invoked
    // once per prime factor in increasing prime order. k = 1 yields nothing.
    template <typename Fn>
    void for_each_prime_power(std::uint32_t k, Fn&& fn) const {
        check_range(k);
        while (k > 1) {
            const std::uint32_t p = spf_[k];
            std::uint32_t e = 0;
            do {
                k /= p;
                ++e;
            } while (k % p == 0);
            fn(p, e);
        }
    }

    // All primes <= x in increasing order; length pi(x).
    std::span<const std::uint32_t> primes_up_to(std::uint32_t x) const;

    std::span<const std::uint32_t> primes() const { return primes_; }

    // sum_{p <= x} (log p)^power / p, compensated. power in {1,2,3,4}.
    double mertens_log_sum(std::uint32_t x, int power) const;

private:
    void check_range(std::uint32_t k) const;

    std::uint32_t n_max_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

}  // namespace lcmsim
