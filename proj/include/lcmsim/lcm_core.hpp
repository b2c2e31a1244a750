// Log-lcm functionals over random samples: the running lcm accumulator, the
// iid process Y, its squarefree indicator proxy Z, the coupon-coupled subset
// process, the geometric-multiplicity analogue Y^, the truncated proxy
// log U~(n,m) and the Cesaro reciprocal-gcd estimator.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lcmsim/primes.hpp"
#include "lcmsim/rng.hpp"

namespace lcmsim {

// Running max-exponent state: after absorbing a set S, entry p holds
// max_{s in S} multiplicity of p in s, so log_value() == log lcm(S).
// Indicator mode caps exponents at 1 (log of the radical of the lcm).
class LcmAccumulator {
public:
    enum class Mode { MaxExponent, Indicator };

    explicit LcmAccumulator(Mode mode = Mode::MaxExponent) : mode_(mode) {}

    void absorb(std::uint32_t value, const FactorizationTable& table);

    // sum e log p over the stored exponents, compensated, in prime order.
    double log_value() const;

    std::uint64_t count() const { return count_; }
    ExponentMap exponents() const;

private:
    struct Entry {
        std::uint32_t exponent;
        double log_prime;
    };

    Mode mode_;
    std::uint64_t count_ = 0;
    std::map<std::uint32_t, Entry> entries_;
};

// log lcm(S); empty sets and 1s contribute nothing (lcm of the empty set
// is 1). Multiset invariant: repeats do not change the value.
double log_lcm(std::span<const std::uint32_t> values, const FactorizationTable& table);

// sum_{p > m, p | k} log p: the truncated squarefree content of k.
double log_u_tilde(std::uint32_t k, std::uint32_t m, const FactorizationTable& table);

struct ProcessMeta {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::string label;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Values of one process replica on a fixed time grid.
struct ProcessSample {
    std::vector<double> grid;
    std::vector<double> values;
    ProcessMeta meta;
};

struct PairedProcessSample {
    ProcessSample first;
    ProcessSample second;
};

// Y_n: values[i] = log lcm(U_1, ..., U_{floor(m t_i)}) along one shared iid
// uniform sequence, so the grid values are nested prefixes.
ProcessSample y_process(std::uint32_t n, std::uint32_t m, std::span<const double> grid,
                        SeededRng& rng, const FactorizationTable& table);

// Z_n: same construction with indicator exponents (each prime counted once).
ProcessSample z_process(std::uint32_t n, std::uint32_t m, std::span<const double> grid,
                        SeededRng& rng, const FactorizationTable& table);

// Y and Z evaluated on one common draw sequence, for direct gap measurement.
PairedProcessSample yz_process_paired(std::uint32_t n, std::uint32_t m,
                                      std::span<const double> grid, SeededRng& rng,
                                      const FactorizationTable& table);

// log lcm(B_n(floor(m t_i))): the subset process realized through the coupon
// path, i.e. the iid process stopped at the times of new distinct values.
// Distinct-value targets above n saturate at the full collection.
ProcessSample subset_lcm_process(std::uint32_t n, std::uint32_t m,
                                 std::span<const double> grid, SeededRng& rng,
                                 const FactorizationTable& table);

// Samples the geometric-model processes
//   Y^(M) = sum_{p<=n} log p max_{k<=M} G_k(p)          (max variant)
//   Z^(M) = sum_{p<=n} log p 1{max_{k<=M} G_k(p) >= 1}  (indicator variant)
// on a grid of M_i = floor(m t_i), with independent geometric arrays per
// prime, nested in k. Per-prime draws are skipped in O(1) when the block
// maximum is zero, which happens with probability (1 - 1/p)^dM.
// Construction precomputes the per-prime skip thresholds once; sample() is
// then cheap and usable concurrently from independent rngs.
class GeomProcessSampler {
public:
    GeomProcessSampler(std::uint32_t n, std::uint32_t m, std::span<const double> grid,
                       const FactorizationTable& table);

    // first = max variant Y^, second = indicator variant Z^ (paired draws).
    PairedProcessSample sample(SeededRng& rng) const;

private:
    std::uint32_t n_;
    std::uint32_t m_;
    std::vector<double> grid_;
    std::vector<std::uint64_t> segment_draws_;   // dM per grid segment
    std::vector<std::uint32_t> primes_;
    std::vector<double> log_primes_;
    std::vector<double> skip_thresholds_;  // [segment][prime], (1-1/p)^dM
};

// One replica of the max-variant geometric process.
ProcessSample y_hat_process(std::uint32_t n, std::uint32_t m, std::span<const double> grid,
                            SeededRng& rng, const FactorizationTable& table);

struct MeanEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t count = 0;
};

// Monte Carlo estimate of E[1 / gcd(U_1, U_2)] over uniform pairs from [n].
MeanEstimate reciprocal_gcd_mean(std::uint32_t n, std::uint64_t replicas, SeededRng& rng);

}  // namespace lcmsim
