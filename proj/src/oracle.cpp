#include "lcmsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcmsim/kahan.hpp"
#include "lcmsim/lcm_core.hpp"

namespace lcmsim {

namespace {

constexpr std::uint64_t kIidGuard = 100'000'000;     // n^m
constexpr std::uint64_t kSubsetGuard = 10'000'000;   // C(n,m)

// n^m with saturation above the guard.
std::uint64_t power_capped(std::uint64_t n, std::uint32_t m, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (std::uint32_t i = 0; i < m; ++i) {
        if (v > cap / n) return cap + 1;
        v *= n;
    }
    return v;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t m, std::uint64_t cap) {
    if (m > n) return 0;
    m = std::min(m, n - m);
    unsigned __int128 v = 1;
    for (std::uint64_t i = 1; i <= m; ++i) {
        v = v * (n - m + i) / i;
        if (v > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(v);
}

// Shared exponent state with an undo journal, so the enumeration recursion
// can absorb and roll back one element at a time.
class JournaledLcm {
public:
    explicit JournaledLcm(const FactorizationTable& table) : table_(table) {}

    std::size_t absorb(std::uint32_t value) {
        const std::size_t mark = journal_.size();
        if (value > 1) {
            table_.for_each_prime_power(value, [&](std::uint32_t p, std::uint32_t e) {
                auto [it, inserted] = exponents_.try_emplace(p, 0u);
                if (e > it->second) {
                    journal_.push_back({p, it->second});
                    it->second = e;
                }
            });
        }
        return mark;
    }

    void rollback(std::size_t mark) {
        while (journal_.size() > mark) {
            const auto [p, old_exponent] = journal_.back();
            journal_.pop_back();
            if (old_exponent == 0) {
                exponents_.erase(p);
            } else {
                exponents_[p] = old_exponent;
            }
        }
    }

    double log_value() const {
        KahanSum sum;
        for (const auto& [p, e] : exponents_) {
            sum.add(static_cast<double>(e) * std::log(static_cast<double>(p)));
        }
        return sum.value();
    }

private:
    const FactorizationTable& table_;
    std::map<std::uint32_t, std::uint32_t> exponents_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> journal_;
};

struct WeightedMoments {
    KahanSum weight;
    KahanSum first;   // sum w v
    KahanSum second;  // sum w v^2

    void add(double w, double v) {
        weight.add(w);
        first.add(w * v);
        second.add(w * v * v);
    }

    MeanVariance finish() const {
        const double total = weight.value();
        const double mean = first.value() / total;
        double variance = second.value() / total - mean * mean;
        if (variance < 0.0) variance = 0.0;
        return {mean, variance};
    }
};

// Walks multisets {v_1 <= ... <= v_m} of [n]; the weight of a multiset is
// the multinomial count m! / prod(multiplicity!) of tuples realizing it.
void walk_multisets(std::uint32_t n, std::uint32_t m, std::uint32_t low,
                    std::uint32_t depth, unsigned __int128 numerator,
                    std::uint32_t run_length, JournaledLcm& lcm, WeightedMoments& out) {
    if (depth == m) {
        out.add(static_cast<double>(numerator), lcm.log_value());
        return;
    }
    for (std::uint32_t v = low; v <= n; ++v) {
        // extending a run of equal values divides the weight by the new
        // run length; a fresh value keeps it
        const std::uint32_t next_run = (v == low && depth > 0) ? run_length + 1 : 1;
        const unsigned __int128 next_numerator =
            numerator * static_cast<std::uint32_t>(depth + 1) / next_run;
        const std::size_t mark = lcm.absorb(v);
        walk_multisets(n, m, v, depth + 1, next_numerator, next_run, lcm, out);
        lcm.rollback(mark);
    }
}

void walk_subsets(std::uint32_t n, std::uint32_t m, std::uint32_t low, std::uint32_t depth,
                  JournaledLcm& lcm, WeightedMoments& out) {
    if (depth == m) {
        out.add(1.0, lcm.log_value());
        return;
    }
    for (std::uint32_t v = low; v + (m - depth - 1) <= n; ++v) {
        const std::size_t mark = lcm.absorb(v);
        walk_subsets(n, m, v + 1, depth + 1, lcm, out);
        lcm.rollback(mark);
    }
}

}  // namespace

ExactSummary enumerate_iid(std::uint32_t n, std::uint32_t m, const FactorizationTable& table) {
    if (n < 1 || m < 1) throw std::domain_error("enumerate_iid: need n >= 1 and m >= 1");
    if (n > table.n_max()) throw std::out_of_range("enumerate_iid: n exceeds table");
    const std::uint64_t support = power_capped(n, m, kIidGuard);
    if (support > kIidGuard) {
        throw std::domain_error("enumerate_iid: n^m exceeds the enumeration budget of " +
                                std::to_string(kIidGuard) + " tuples");
    }
    JournaledLcm lcm(table);
    WeightedMoments moments;
    walk_multisets(n, m, 1, 0, 1, 0, lcm, moments);
    const auto [mean, variance] = moments.finish();
    return {ExactModel::Iid, n, m, mean, variance, support};
}

ExactSummary enumerate_subsets(std::uint32_t n, std::uint32_t m,
                               const FactorizationTable& table) {
    if (n < 1 || m < 1 || m > n) throw std::domain_error("enumerate_subsets: need 1 <= m <= n");
    if (n > table.n_max()) throw std::out_of_range("enumerate_subsets: n exceeds table");
    const std::uint64_t support = binomial_capped(n, m, kSubsetGuard);
    if (support > kSubsetGuard) {
        throw std::domain_error("enumerate_subsets: C(n,m) exceeds the enumeration budget of " +
                                std::to_string(kSubsetGuard) + " subsets");
    }
    JournaledLcm lcm(table);
    WeightedMoments moments;
    walk_subsets(n, m, 1, 0, lcm, moments);
    const auto [mean, variance] = moments.finish();
    return {ExactModel::Subset, n, m, mean, variance, support};
}

MeanVariance enumerate_log_u_tilde(std::uint32_t n, std::uint32_t m,
                                   const FactorizationTable& table) {
    if (m < 1 || m >= n) throw std::domain_error("enumerate_log_u_tilde: need 1 <= m < n");
    if (n > table.n_max()) throw std::out_of_range("enumerate_log_u_tilde: n exceeds table");
    WeightedMoments moments;
    for (std::uint32_t k = 1; k <= n; ++k) {
        moments.add(1.0, log_u_tilde(k, m, table));
    }
    return moments.finish();
}

}  // namespace lcmsim
