// Exact evaluation of every closed-form quantity the simulations are
// checked against: harmonic numbers, coupon-collector moments, the
// centering c_n, the regime-dependent normalizations a_n and b_n,
// divisibility tails, and the exact mean/variance of the truncated
// squarefree proxy log U~(n,m).

#pragma once

#include <cstdint>

#include "lcmsim/primes.hpp"

namespace lcmsim {

// Case A: m <= sqrt(n); case B: sqrt(n) < m < n.
enum class RegimeLabel { CaseA, CaseB };

RegimeLabel classify_regime(std::uint64_t n, std::uint64_t m);

// H_n = sum_{k<=n} 1/k and H_{n,2} = sum_{k<=n} 1/k^2. Exact compensated
// summation up to 1e9; the Euler-Maclaurin expansion above that.
double harmonic(std::uint64_t n);
double harmonic2(std::uint64_t n);

// E tau(n,m) = n (H_n - H_{n-m}); the number of uniform draws from [n]
// needed to see m distinct values. m = 0 gives 0.
double expected_tau(std::uint64_t n, std::uint64_t m);

// Var tau(n,m) = n^2 (H_{n,2} - H_{n-m,2}) - n (H_n - H_{n-m}).
double variance_tau(std::uint64_t n, std::uint64_t m);

// c_n(y) = sum_{p<=n} log p (1 - (1 - floor(n/p)/n)^y), the exact centering
// of the indicator process.
double centering_c(std::uint64_t n, double y, const FactorizationTable& table);

// c_n evaluated at y = -n log(1 - m t / n), the centering for the
// subset process in the large-m regime. Requires m * t < n.
double centering_c_timechanged(std::uint64_t n, std::uint64_t m, double t,
                               const FactorizationTable& table);

struct Normalization {
    double value;
    RegimeLabel regime;
};

// Variance normalization a_n for the uniform-sample processes:
//   case A: m log^2(m) / 2
//   case B: m (log n - log m)(3 log m - log n) / 2
// Continuous across the m = sqrt(n) boundary.
Normalization normalization_a(std::uint64_t n, std::uint64_t m);

// Variance normalization b_n = m (log^2 n - log^2 m) / 2 for the
// geometric-multiplicity model. b_n / a_n >= 3 whenever m <= sqrt(n).
double normalization_b(std::uint64_t n, std::uint64_t m);

// P{ multiplicity of p in a uniform draw from [n] >= j } = floor(n/p^j)/n.
double multiplicity_tail(std::uint64_t n, std::uint64_t p, std::uint32_t j);

// E log U~(n,m) = sum_{m<p<=n} log p floor(n/p)/n.
double exact_mean_log_u_tilde(std::uint64_t n, std::uint64_t m,
                              const FactorizationTable& table);

// Var log U~(n,m), exactly:
//   sum_{m<p<=n} log^2 p floor(n/p)/n
//   - (sum_{m<p<=n} log p floor(n/p)/n)^2
//   + 2 sum_{m<p<q<=n, pq<=n} log p log q floor(n/(pq))/n.
// The pair sum is empty when m >= sqrt(n).
double exact_variance_log_u_tilde(std::uint64_t n, std::uint64_t m,
                                  const FactorizationTable& table);

// Leading-order value of Var log U~(n,m): a_n / m for the matching regime.
double asymptotic_variance(std::uint64_t n, std::uint64_t m);

// Var (Bin(m, theta) - 1)_+ in closed form:
//   m theta (1-theta) - 2 m theta (1-theta)^m + (1-theta)^m (1 - (1-theta)^m).
// Always <= (m theta)^2.
double binomial_plus_variance(std::uint64_t m, double theta);

}  // namespace lcmsim
