// Exact brute-force ground truth on tiny instances: full enumeration of the
// iid model over [n]^m and the uniform-subset model over the C(n,m)
// m-element subsets, for validating samplers and closed-form formulas.

#pragma once

#include <cstdint>

#include "lcmsim/primes.hpp"

namespace lcmsim {

enum class ExactModel { Iid, Subset };

struct ExactSummary {
    ExactModel model;
    std::uint32_t n;
    std::uint32_t m;
    double mean;         // E log lcm
    double variance;     // population variance of log lcm
    std::uint64_t support_size;  // n^m or C(n,m)
};

// Exact mean/variance of log lcm(U_1, ..., U_m) over all n^m tuples,
// enumerated as multisets with multinomial weights. Guarded at n^m <= 1e8.
ExactSummary enumerate_iid(std::uint32_t n, std::uint32_t m, const FactorizationTable& table);

// Exact mean/variance of log lcm over all C(n,m) subsets, equal weights.
// Guarded at C(n,m) <= 1e7.
ExactSummary enumerate_subsets(std::uint32_t n, std::uint32_t m,
                               const FactorizationTable& table);

struct MeanVariance {
    double mean;
    double variance;
};

// Direct enumeration of log U~(n,m) over k = 1..n: the per-integer oracle
// for the closed-form mean and variance evaluators.
MeanVariance enumerate_log_u_tilde(std::uint32_t n, std::uint32_t m,
                                   const FactorizationTable& table);

}  // namespace lcmsim
