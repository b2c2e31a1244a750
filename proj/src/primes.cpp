#include "lcmsim/primes.hpp"

#include <algorithm>
#include <cmath>
#include <new>
#include <stdexcept>
#include <string>

#include "lcmsim/kahan.hpp"

namespace lcmsim {

ExponentMap::ExponentMap(std::vector<PrimePower> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].exponent == 0) {
            throw std::invalid_argument("ExponentMap: zero exponent");
        }
        if (i > 0 && entries_[i - 1].prime >= entries_[i].prime) {
            throw std::invalid_argument("ExponentMap: primes must be strictly increasing");
        }
    }
}

std::uint64_t ExponentMap::value() const {
    std::uint64_t v = 1;
    for (const auto& [p, e] : entries_) {
        for (std::uint32_t i = 0; i < e; ++i) v *= p;
    }
    return v;
}

double ExponentMap::log_value() const {
    KahanSum sum;
    for (const auto& [p, e] : entries_) {
        sum.add(static_cast<double>(e) * std::log(static_cast<double>(p)));
    }
    return sum.value();
}

FactorizationTable::FactorizationTable(std::uint32_t n_max) : n_max_(n_max) {
    if (n_max < 2) {
        throw std::invalid_argument("FactorizationTable: n_max must be at least 2");
    }
    if (n_max > kMaxNmax) {
        throw std::length_error(
            "FactorizationTable: n_max " + std::to_string(n_max) + " exceeds bound " +
            std::to_string(kMaxNmax) + " (" + std::to_string(4ull * (n_max + 1ull)) +
            " bytes required)");
    }
    try {
        spf_.assign(static_cast<std::size_t>(n_max) + 1, 0);
    } catch (const std::bad_alloc&) {
        throw std::length_error("FactorizationTable: allocation failed for n_max " +
                                std::to_string(n_max));
    }
    for (std::uint64_t i = 2; i <= n_max; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            for (std::uint64_t j = i * i; j <= n_max; j += i) {
                if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
            }
        }
    }
    std::size_t count = 0;
    for (std::uint64_t k = 2; k <= n_max; ++k) {
        if (spf_[k] == k) ++count;
    }
    primes_.reserve(count);
    for (std::uint64_t k = 2; k <= n_max; ++k) {
        if (spf_[k] == k) primes_.push_back(static_cast<std::uint32_t>(k));
    }
}

void FactorizationTable::check_range(std::uint32_t k) const {
    if (k < 1 || k > n_max_) {
        throw std::out_of_range("FactorizationTable: value " + std::to_string(k) +
                                " outside [1, " + std::to_string(n_max_) + "]");
    }
}

std::uint32_t FactorizationTable::smallest_prime_factor(std::uint32_t k) const {
    check_range(k);
    if (k < 2) throw std::out_of_range("smallest_prime_factor: k must be at least 2");
    return spf_[k];
}

ExponentMap FactorizationTable::factorize(std::uint32_t k) const {
    if (k < 2) throw std::out_of_range("factorize: k must be at least 2");
    std::vector<PrimePower> entries;
    for_each_prime_power(k, [&](std::uint32_t p, std::uint32_t e) {
        entries.push_back({p, e});
    });
    return ExponentMap(std::move(entries));
}

std::span<const std::uint32_t> FactorizationTable::primes_up_to(std::uint32_t x) const {
    if (x > n_max_) {
        throw std::out_of_range("primes_up_to: x " + std::to_string(x) + " exceeds n_max " +
                                std::to_string(n_max_));
    }
    const auto end = std::upper_bound(primes_.begin(), primes_.end(), x);
    return {primes_.data(), static_cast<std::size_t>(end - primes_.begin())};
}

double FactorizationTable::mertens_log_sum(std::uint32_t x, int power) const {
    if (x < 2 || x > n_max_) {
        throw std::out_of_range("mertens_log_sum: x outside [2, n_max]");
    }
    if (power < 1 || power > 4) {
        throw std::invalid_argument("mertens_log_sum: power must be in {1,2,3,4}");
    }
    KahanSum sum;
    for (const std::uint32_t p : primes_up_to(x)) {
        const double lp = std::log(static_cast<double>(p));
        double term = lp;
        for (int i = 1; i < power; ++i) term *= lp;
        sum.add(term / static_cast<double>(p));
    }
    return sum.value();
}

}  // namespace lcmsim
