// All randomness: uniform draws on [n], the coupon-collector pathwise
// construction of uniform random subsets, geometric multiplicities and the
// fixed-sample-size limit-law sampler.

#pragma once

#include <cstdint>
#include <vector>

#include "lcmsim/primes.hpp"
#include "lcmsim/rng.hpp"

namespace lcmsim {

// One realization of the coupon path: iid uniform draws on [n] truncated at
// the first time tau(m) at which m distinct values have appeared.
// stop_times[k-1] = tau(k), the index of the k-th new value; tau(1) = 1.
struct CouponPath {
    std::uint32_t n = 0;
    std::uint32_t m = 0;
    std::vector<std::uint32_t> draws;       // U_1 .. U_tau(m)
    std::vector<std::uint64_t> stop_times;  // tau(1) < ... < tau(m)
};

// Uniform draw from {1, ..., n}.
std::uint64_t sample_uniform(std::uint64_t n, SeededRng& rng);

// Walks iid uniform draws until m distinct values have been seen.
// With clamp set, m > n is reduced to m = n (tau saturates at the full
// collection); otherwise m > n is rejected.
CouponPath sample_coupon_path(std::uint32_t n, std::uint32_t m, SeededRng& rng,
                              bool clamp = false);

// tau(m) alone, without materializing the path.
std::uint64_t sample_tau_coupon(std::uint32_t n, std::uint32_t m, SeededRng& rng,
                                bool clamp = false);

// tau(m) as the sum of m independent geometric waiting times with success
// probabilities 1 - (i-1)/n. Same distribution as sample_tau_coupon.
std::uint64_t sample_tau_geometric(std::uint64_t n, std::uint64_t m, SeededRng& rng,
                                   bool clamp = false);

// Uniformly distributed m-element subset of {1, ..., n}, realized as the
// distinct values along one coupon path. Returned sorted ascending.
std::vector<std::uint32_t> sample_subset(std::uint32_t n, std::uint32_t m, SeededRng& rng);

// Geometric multiplicity with tail P{G >= j} = p^{-j}, sampled as
// floor(E / log p) for a unit-mean exponential E.
std::uint64_t sample_geometric(std::uint64_t p, SeededRng& rng);

// One draw of the fixed-m limit law
//   sum_{j<=m} log U_j + sum_{p <= p_max} log p (max_k G_k(p) - sum_k G_k(p)),
// with U_j iid uniform on (0,1) and G_k(p) iid geometric. The prime series
// is truncated at p_max; callers report the cutoff alongside results.
double sample_fixed_m_limit(std::uint32_t m, std::uint32_t p_max, SeededRng& rng,
                            const FactorizationTable& table);

}  // namespace lcmsim
