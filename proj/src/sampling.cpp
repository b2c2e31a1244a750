#include "lcmsim/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "distinct_tracker.hpp"

namespace lcmsim {

namespace {

using detail::DistinctTracker;

std::uint32_t clamp_or_reject(std::uint32_t n, std::uint32_t m, bool clamp) {
    if (n == 0) throw std::domain_error("coupon sampler: n must be positive");
    if (m > n) {
        if (!clamp) throw std::domain_error("coupon sampler: m exceeds n (use clamp)");
        return n;
    }
    return m;
}

}  // namespace

std::uint64_t sample_uniform(std::uint64_t n, SeededRng& rng) {
    if (n == 0) throw std::domain_error("sample_uniform: n must be positive");
    return rng.next_below(n) + 1;
}

CouponPath sample_coupon_path(std::uint32_t n, std::uint32_t m, SeededRng& rng, bool clamp) {
    m = clamp_or_reject(n, m, clamp);
    CouponPath path;
    path.n = n;
    path.m = m;
    path.stop_times.reserve(m);
    DistinctTracker tracker(n);
    std::uint64_t time = 0;
    std::uint32_t distinct = 0;
    while (distinct < m) {
        const auto value = static_cast<std::uint32_t>(sample_uniform(n, rng));
        ++time;
        path.draws.push_back(value);
        if (tracker.insert(value)) {
            ++distinct;
            path.stop_times.push_back(time);
        }
    }
    return path;
}

std::uint64_t sample_tau_coupon(std::uint32_t n, std::uint32_t m, SeededRng& rng, bool clamp) {
    m = clamp_or_reject(n, m, clamp);
    DistinctTracker tracker(n);
    std::uint64_t time = 0;
    std::uint32_t distinct = 0;
    while (distinct < m) {
        ++time;
        if (tracker.insert(static_cast<std::uint32_t>(sample_uniform(n, rng)))) {
            ++distinct;
        }
    }
    return time;
}

std::uint64_t sample_tau_geometric(std::uint64_t n, std::uint64_t m, SeededRng& rng, bool clamp) {
    if (n == 0) throw std::domain_error("sample_tau_geometric: n must be positive");
    if (m > n) {
        if (!clamp) throw std::domain_error("sample_tau_geometric: m exceeds n (use clamp)");
        m = n;
    }
    std::uint64_t tau = 0;
    for (std::uint64_t i = 1; i <= m; ++i) {
        if (i == 1) {
            tau += 1;  // first draw is always new
            continue;
        }
        // Waiting time with failure probability f = (i-1)/n:
        // X = 1 + floor(E / -log f).
        const double failure = static_cast<double>(i - 1) / static_cast<double>(n);
        const double wait = rng.next_exponential() / -std::log(failure);
        tau += 1 + static_cast<std::uint64_t>(wait);
    }
    return tau;
}

std::vector<std::uint32_t> sample_subset(std::uint32_t n, std::uint32_t m, SeededRng& rng) {
    if (m < 1 || m > n) throw std::domain_error("sample_subset: need 1 <= m <= n");
    DistinctTracker tracker(n);
    std::vector<std::uint32_t> subset;
    subset.reserve(m);
    while (subset.size() < m) {
        const auto value = static_cast<std::uint32_t>(sample_uniform(n, rng));
        if (tracker.insert(value)) subset.push_back(value);
    }
    std::sort(subset.begin(), subset.end());
    return subset;
}

std::uint64_t sample_geometric(std::uint64_t p, SeededRng& rng) {
    if (p < 2) throw std::domain_error("sample_geometric: p must be at least 2");
    return static_cast<std::uint64_t>(rng.next_exponential() /
                                      std::log(static_cast<double>(p)));
}

double sample_fixed_m_limit(std::uint32_t m, std::uint32_t p_max, SeededRng& rng,
                            const FactorizationTable& table) {
    if (m < 1) throw std::domain_error("sample_fixed_m_limit: m must be positive");
    if (p_max < 2) throw std::domain_error("sample_fixed_m_limit: p_max must be at least 2");
    const auto primes = table.primes_up_to(p_max);

    double value = 0.0;
    for (std::uint32_t j = 0; j < m; ++j) value += std::log(rng.next_unit());

    // Per coordinate k, generate only the primes with G_k(p) >= 1. The
    // indicator sequence Bernoulli(1/p) over the ordered prime list is
    // sampled by geometric jumps under the dominating rate 2^-oct within
    // each octave block [2^oct, 2^{oct+1}), thinning candidates with
    // probability 2^oct / p.
    struct MaxSum {
        std::uint64_t max = 0;
        std::uint64_t sum = 0;
    };
    std::map<std::uint32_t, MaxSum> hits;
    for (std::uint32_t k = 0; k < m; ++k) {
        std::size_t idx = 0;
        while (idx < primes.size()) {
            const std::uint32_t block_floor = std::bit_floor(primes[idx]);
            // end of the current octave block
            std::size_t block_end = idx;
            while (block_end < primes.size() && primes[block_end] < 2ull * block_floor) {
                ++block_end;
            }
            const double dominating = 1.0 / static_cast<double>(block_floor);  // <= 1/2
            const double jump_rate = -std::log1p(-dominating);
            std::size_t pos = idx;
            while (true) {
                const std::uint64_t jump =
                    1 + static_cast<std::uint64_t>(rng.next_exponential() / jump_rate);
                if (jump > block_end - pos) break;
                pos += jump;
                const std::uint32_t p = primes[pos - 1];
                // accept with probability (1/p) / dominating = block_floor / p
                if (rng.next_unit() * static_cast<double>(p) <
                    static_cast<double>(block_floor)) {
                    // G | G >= 1 is 1 + G by the tail identity
                    const std::uint64_t g = 1 + sample_geometric(p, rng);
                    auto& entry = hits[p];
                    entry.max = std::max(entry.max, g);
                    entry.sum += g;
                }
            }
            idx = block_end;
        }
    }
    for (const auto& [p, ms] : hits) {
        value += std::log(static_cast<double>(p)) *
                 (static_cast<double>(ms.max) - static_cast<double>(ms.sum));
    }
    return value;
}

}  // namespace lcmsim
