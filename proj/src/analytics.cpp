#include "lcmsim/analytics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lcmsim/kahan.hpp"

namespace lcmsim {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kZeta2 = 1.6449340668482264;

constexpr std::uint64_t kExactHarmonicLimit = 1'000'000'000;

void require_m_below_n(std::uint64_t n, std::uint64_t m) {
    if (m < 2 || m >= n) {
        throw std::domain_error("regime normalizations require 2 <= m < n");
    }
}

// sum_{k=a..b} 1/k, compensated.
double reciprocal_sum(std::uint64_t a, std::uint64_t b) {
    KahanSum sum;
    for (std::uint64_t k = a; k <= b; ++k) sum.add(1.0 / static_cast<double>(k));
    return sum.value();
}

double reciprocal_square_sum(std::uint64_t a, std::uint64_t b) {
    KahanSum sum;
    for (std::uint64_t k = a; k <= b; ++k) {
        const double x = static_cast<double>(k);
        sum.add(1.0 / (x * x));
    }
    return sum.value();
}

}  // namespace

RegimeLabel classify_regime(std::uint64_t n, std::uint64_t m) {
    require_m_below_n(n, m);
    return (m * m <= n) ? RegimeLabel::CaseA : RegimeLabel::CaseB;
}

double harmonic(std::uint64_t n) {
    if (n == 0) return 0.0;
    if (n <= kExactHarmonicLimit) return reciprocal_sum(1, n);
    const double x = static_cast<double>(n);
    return std::log(x) + kEulerGamma + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x);
}

double harmonic2(std::uint64_t n) {
    if (n == 0) return 0.0;
    if (n <= kExactHarmonicLimit) return reciprocal_square_sum(1, n);
    const double x = static_cast<double>(n);
    return kZeta2 - 1.0 / x + 1.0 / (2.0 * x * x);
}

double expected_tau(std::uint64_t n, std::uint64_t m) {
    if (n == 0) throw std::domain_error("expected_tau: n must be positive");
    if (m > n) throw std::domain_error("expected_tau: m exceeds n");
    if (m == 0) return 0.0;
    // n (H_n - H_{n-m}) evaluated as a partial sum to avoid cancellation.
    return static_cast<double>(n) * reciprocal_sum(n - m + 1, n);
}

double variance_tau(std::uint64_t n, std::uint64_t m) {
    if (n == 0) throw std::domain_error("variance_tau: n must be positive");
    if (m > n) throw std::domain_error("variance_tau: m exceeds n");
    if (m == 0) return 0.0;
    const double nn = static_cast<double>(n);
    return nn * nn * reciprocal_square_sum(n - m + 1, n) - nn * reciprocal_sum(n - m + 1, n);
}

double centering_c(std::uint64_t n, double y, const FactorizationTable& table) {
    if (n < 2) throw std::domain_error("centering_c: n must be at least 2");
    if (y < 0.0) throw std::domain_error("centering_c: y must be nonnegative");
    if (n > table.n_max()) throw std::out_of_range("centering_c: n exceeds table bound");
    KahanSum sum;
    for (const std::uint32_t p : table.primes_up_to(static_cast<std::uint32_t>(n))) {
        const double frac = static_cast<double>(n / p) / static_cast<double>(n);
        // (1 - frac)^y via exp(y log1p(-frac)), stable for small and large frac.
        sum.add(std::log(static_cast<double>(p)) * (1.0 - std::exp(y * std::log1p(-frac))));
    }
    return sum.value();
}

double centering_c_timechanged(std::uint64_t n, std::uint64_t m, double t,
                               const FactorizationTable& table) {
    if (t < 0.0) throw std::domain_error("centering_c_timechanged: t must be nonnegative");
    const double mt = static_cast<double>(m) * t;
    if (mt >= static_cast<double>(n)) {
        throw std::domain_error("centering_c_timechanged: m*t must be below n");
    }
    const double y = -static_cast<double>(n) * std::log1p(-mt / static_cast<double>(n));
    return centering_c(n, y, table);
}

Normalization normalization_a(std::uint64_t n, std::uint64_t m) {
    const RegimeLabel regime = classify_regime(n, m);
    const double logm = std::log(static_cast<double>(m));
    const double logn = std::log(static_cast<double>(n));
    if (regime == RegimeLabel::CaseA) {
        return {0.5 * static_cast<double>(m) * logm * logm, regime};
    }
    return {0.5 * static_cast<double>(m) * (logn - logm) * (3.0 * logm - logn), regime};
}

double normalization_b(std::uint64_t n, std::uint64_t m) {
    require_m_below_n(n, m);
    const double logm = std::log(static_cast<double>(m));
    const double logn = std::log(static_cast<double>(n));
    return 0.5 * static_cast<double>(m) * (logn * logn - logm * logm);
}

double multiplicity_tail(std::uint64_t n, std::uint64_t p, std::uint32_t j) {
    if (p < 2 || p > n) throw std::domain_error("multiplicity_tail: need 2 <= p <= n");
    if (j == 0) return 1.0;
    std::uint64_t power = 1;
    for (std::uint32_t i = 0; i < j; ++i) {
        if (power > n / p) return 0.0;
        power *= p;
    }
    return static_cast<double>(n / power) / static_cast<double>(n);
}

double exact_mean_log_u_tilde(std::uint64_t n, std::uint64_t m,
                              const FactorizationTable& table) {
    if (m < 1 || m >= n) throw std::domain_error("exact_mean_log_u_tilde: need 1 <= m < n");
    if (n > table.n_max()) throw std::out_of_range("exact_mean_log_u_tilde: n exceeds table");
    KahanSum sum;
    for (const std::uint32_t p : table.primes_up_to(static_cast<std::uint32_t>(n))) {
        if (p <= m) continue;
        sum.add(std::log(static_cast<double>(p)) * static_cast<double>(n / p));
    }
    return sum.value() / static_cast<double>(n);
}

double exact_variance_log_u_tilde(std::uint64_t n, std::uint64_t m,
                                  const FactorizationTable& table) {
    if (m < 1 || m >= n) throw std::domain_error("exact_variance_log_u_tilde: need 1 <= m < n");
    if (n > table.n_max()) throw std::out_of_range("exact_variance_log_u_tilde: n exceeds table");
    const auto primes = table.primes_up_to(static_cast<std::uint32_t>(n));
    const double nn = static_cast<double>(n);

    KahanSum square_term;  // sum log^2 p floor(n/p)/n
    KahanSum mean_term;    // sum log p floor(n/p)/n
    for (const std::uint32_t p : primes) {
        if (p <= m) continue;
        const double lp = std::log(static_cast<double>(p));
        const double frac = static_cast<double>(n / p) / nn;
        square_term.add(lp * lp * frac);
        mean_term.add(lp * frac);
    }

    // Pair sum over m < p < q with pq <= n; empty once m >= sqrt(n).
    KahanSum pair_term;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const std::uint64_t p = primes[i];
        if (p <= m) continue;
        if (p * p > n) break;
        const double lp = std::log(static_cast<double>(p));
        for (std::size_t j = i + 1; j < primes.size(); ++j) {
            const std::uint64_t q = primes[j];
            if (p * q > n) break;
            pair_term.add(lp * std::log(static_cast<double>(q)) *
                          static_cast<double>(n / (p * q)) / nn);
        }
    }

    const double mean = mean_term.value();
    return square_term.value() - mean * mean + 2.0 * pair_term.value();
}

double asymptotic_variance(std::uint64_t n, std::uint64_t m) {
    return normalization_a(n, m).value / static_cast<double>(m);
}

double binomial_plus_variance(std::uint64_t m, double theta) {
    if (m < 1) throw std::domain_error("binomial_plus_variance: m must be positive");
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::domain_error("binomial_plus_variance: theta must lie in (0,1)");
    }
    const double md = static_cast<double>(m);
    const double miss = std::exp(md * std::log1p(-theta));  // (1-theta)^m
    return md * theta * (1.0 - theta) - 2.0 * md * theta * miss + miss * (1.0 - miss);
}

}  // namespace lcmsim
