#include "lcmsim/lcm_core.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "distinct_tracker.hpp"
#include "lcmsim/kahan.hpp"
#include "lcmsim/sampling.hpp"

namespace lcmsim {

namespace {

void validate_grid(std::span<const double> grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw std::domain_error("grid times must be nonnegative");
        if (i > 0 && grid[i] < grid[i - 1]) {
            throw std::domain_error("grid times must be ascending");
        }
    }
}

std::vector<std::uint64_t> draw_targets(std::uint32_t m, std::span<const double> grid) {
    std::vector<std::uint64_t> targets;
    targets.reserve(grid.size());
    for (const double t : grid) {
        targets.push_back(static_cast<std::uint64_t>(std::floor(static_cast<double>(m) * t)));
    }
    return targets;
}

ProcessMeta make_meta(std::uint32_t n, std::uint32_t m, std::string label,
                      const SeededRng& rng) {
    return ProcessMeta{n, m, std::move(label), rng.seed(), rng.stream()};
}

}  // namespace

void LcmAccumulator::absorb(std::uint32_t value, const FactorizationTable& table) {
    ++count_;
    if (value == 1) return;
    table.for_each_prime_power(value, [&](std::uint32_t p, std::uint32_t e) {
        if (mode_ == Mode::Indicator) e = 1;
        auto [it, inserted] = entries_.try_emplace(p, Entry{e, 0.0});
        if (inserted) {
            it->second.log_prime = std::log(static_cast<double>(p));
        } else if (e > it->second.exponent) {
            it->second.exponent = e;
        }
    });
}

double LcmAccumulator::log_value() const {
    KahanSum sum;
    for (const auto& [p, entry] : entries_) {
        sum.add(static_cast<double>(entry.exponent) * entry.log_prime);
    }
    return sum.value();
}

ExponentMap LcmAccumulator::exponents() const {
    std::vector<PrimePower> entries;
    entries.reserve(entries_.size());
    for (const auto& [p, entry] : entries_) entries.push_back({p, entry.exponent});
    return ExponentMap(std::move(entries));
}

double log_lcm(std::span<const std::uint32_t> values, const FactorizationTable& table) {
    LcmAccumulator acc;
    for (const std::uint32_t v : values) acc.absorb(v, table);
    return acc.log_value();
}

double log_u_tilde(std::uint32_t k, std::uint32_t m, const FactorizationTable& table) {
    if (k < 1 || k > table.n_max()) throw std::out_of_range("log_u_tilde: k outside table");
    if (m < 1) throw std::domain_error("log_u_tilde: m must be positive");
    if (k == 1) return 0.0;
    KahanSum sum;
    table.for_each_prime_power(k, [&](std::uint32_t p, std::uint32_t) {
        if (p > m) sum.add(std::log(static_cast<double>(p)));
    });
    return sum.value();
}

PairedProcessSample yz_process_paired(std::uint32_t n, std::uint32_t m,
                                      std::span<const double> grid, SeededRng& rng,
                                      const FactorizationTable& table) {
    if (n < 1 || n > table.n_max()) throw std::out_of_range("process: n outside table");
    validate_grid(grid);
    const auto targets = draw_targets(m, grid);

    PairedProcessSample out;
    out.first.grid.assign(grid.begin(), grid.end());
    out.first.meta = make_meta(n, m, "Y", rng);
    out.second.grid = out.first.grid;
    out.second.meta = make_meta(n, m, "Z", rng);

    LcmAccumulator y_acc(LcmAccumulator::Mode::MaxExponent);
    LcmAccumulator z_acc(LcmAccumulator::Mode::Indicator);
    std::uint64_t drawn = 0;
    for (const std::uint64_t target : targets) {
        while (drawn < target) {
            const auto value = static_cast<std::uint32_t>(sample_uniform(n, rng));
            y_acc.absorb(value, table);
            z_acc.absorb(value, table);
            ++drawn;
        }
        out.first.values.push_back(y_acc.log_value());
        out.second.values.push_back(z_acc.log_value());
    }
    return out;
}

ProcessSample y_process(std::uint32_t n, std::uint32_t m, std::span<const double> grid,
                        SeededRng& rng, const FactorizationTable& table) {
    if (n < 1 || n > table.n_max()) throw std::out_of_range("process: n outside table");
    validate_grid(grid);
    const auto targets = draw_targets(m, grid);

    ProcessSample out;
    out.grid.assign(grid.begin(), grid.end());
    out.meta = make_meta(n, m, "Y", rng);
    LcmAccumulator acc(LcmAccumulator::Mode::MaxExponent);
    std::uint64_t drawn = 0;
    for (const std::uint64_t target : targets) {
        while (drawn < target) {
            acc.absorb(static_cast<std::uint32_t>(sample_uniform(n, rng)), table);
            ++drawn;
        }
        out.values.push_back(acc.log_value());
    }
    return out;
}

ProcessSample z_process(std::uint32_t n, std::uint32_t m, std::span<const double> grid,
                        SeededRng& rng, const FactorizationTable& table) {
    if (n < 1 || n > table.n_max()) throw std::out_of_range("process: n outside table");
    validate_grid(grid);
    const auto targets = draw_targets(m, grid);

    ProcessSample out;
    out.grid.assign(grid.begin(), grid.end());
    out.meta = make_meta(n, m, "Z", rng);
    LcmAccumulator acc(LcmAccumulator::Mode::Indicator);
    std::uint64_t drawn = 0;
    for (const std::uint64_t target : targets) {
        while (drawn < target) {
            acc.absorb(static_cast<std::uint32_t>(sample_uniform(n, rng)), table);
            ++drawn;
        }
        out.values.push_back(acc.log_value());
    }
    return out;
}

ProcessSample subset_lcm_process(std::uint32_t n, std::uint32_t m,
                                 std::span<const double> grid, SeededRng& rng,
                                 const FactorizationTable& table) {
    if (n < 1 || n > table.n_max()) throw std::out_of_range("process: n outside table");
    validate_grid(grid);
    auto targets = draw_targets(m, grid);
    // distinct counts saturate at the full collection
    for (auto& target : targets) target = std::min<std::uint64_t>(target, n);

    ProcessSample out;
    out.grid.assign(grid.begin(), grid.end());
    out.meta = make_meta(n, m, "subset", rng);

    LcmAccumulator acc(LcmAccumulator::Mode::MaxExponent);
    detail::DistinctTracker tracker(n);
    std::uint64_t distinct = 0;
    for (const std::uint64_t target : targets) {
        while (distinct < target) {
            const auto value = static_cast<std::uint32_t>(sample_uniform(n, rng));
            acc.absorb(value, table);
            if (tracker.insert(value)) ++distinct;
        }
        out.values.push_back(acc.log_value());
    }
    return out;
}

GeomProcessSampler::GeomProcessSampler(std::uint32_t n, std::uint32_t m,
                                       std::span<const double> grid,
                                       const FactorizationTable& table)
    : n_(n), m_(m), grid_(grid.begin(), grid.end()) {
    if (n < 2 || n > table.n_max()) throw std::out_of_range("GeomProcessSampler: n outside table");
    validate_grid(grid);
    const auto targets = draw_targets(m, grid);
    segment_draws_.reserve(targets.size());
    std::uint64_t previous = 0;
    for (const std::uint64_t target : targets) {
        segment_draws_.push_back(target - previous);
        previous = target;
    }
    const auto primes = table.primes_up_to(n);
    primes_.assign(primes.begin(), primes.end());
    log_primes_.reserve(primes_.size());
    for (const std::uint32_t p : primes_) log_primes_.push_back(std::log(static_cast<double>(p)));

    skip_thresholds_.resize(segment_draws_.size() * primes_.size());
    for (std::size_t seg = 0; seg < segment_draws_.size(); ++seg) {
        const auto draws = static_cast<double>(segment_draws_[seg]);
        for (std::size_t i = 0; i < primes_.size(); ++i) {
            skip_thresholds_[seg * primes_.size() + i] =
                std::exp(draws * std::log1p(-1.0 / static_cast<double>(primes_[i])));
        }
    }
}

PairedProcessSample GeomProcessSampler::sample(SeededRng& rng) const {
    const std::size_t k = grid_.size();
    std::vector<KahanSum> y_sums(k);
    std::vector<KahanSum> z_sums(k);

    for (std::size_t i = 0; i < primes_.size(); ++i) {
        const double p = primes_[i];
        std::uint64_t running_max = 0;
        for (std::size_t seg = 0; seg < k; ++seg) {
            const std::uint64_t draws = segment_draws_[seg];
            if (draws > 0) {
                const double u = rng.next_unit();
                // block max B = min{ j >= 0 : (1 - p^-(j+1))^draws >= u }
                if (u > skip_thresholds_[seg * primes_.size() + i]) {
                    std::uint64_t j = 1;
                    double pinv_pow = 1.0 / (p * p);  // p^-(j+1)
                    while (std::exp(static_cast<double>(draws) * std::log1p(-pinv_pow)) < u) {
                        ++j;
                        pinv_pow /= p;
                    }
                    if (j > running_max) running_max = j;
                }
            }
            if (running_max > 0) {
                y_sums[seg].add(log_primes_[i] * static_cast<double>(running_max));
                z_sums[seg].add(log_primes_[i]);
            }
        }
    }

    PairedProcessSample out;
    out.first.grid = grid_;
    out.first.meta = ProcessMeta{n_, m_, "Y_hat", rng.seed(), rng.stream()};
    out.second.grid = grid_;
    out.second.meta = ProcessMeta{n_, m_, "Z_hat", rng.seed(), rng.stream()};
    for (std::size_t seg = 0; seg < k; ++seg) {
        out.first.values.push_back(y_sums[seg].value());
        out.second.values.push_back(z_sums[seg].value());
    }
    return out;
}

ProcessSample y_hat_process(std::uint32_t n, std::uint32_t m, std::span<const double> grid,
                            SeededRng& rng, const FactorizationTable& table) {
    const GeomProcessSampler sampler(n, m, grid, table);
    return sampler.sample(rng).first;
}

MeanEstimate reciprocal_gcd_mean(std::uint32_t n, std::uint64_t replicas, SeededRng& rng) {
    if (n < 1) throw std::domain_error("reciprocal_gcd_mean: n must be positive");
    if (replicas < 1) throw std::domain_error("reciprocal_gcd_mean: replicas must be positive");
    KahanSum sum;
    KahanSum sum_sq;
    for (std::uint64_t r = 0; r < replicas; ++r) {
        const auto a = static_cast<std::uint32_t>(sample_uniform(n, rng));
        const auto b = static_cast<std::uint32_t>(sample_uniform(n, rng));
        const double v = 1.0 / static_cast<double>(std::gcd(a, b));
        sum.add(v);
        sum_sq.add(v * v);
    }
    const double count = static_cast<double>(replicas);
    const double mean = sum.value() / count;
    double variance = 0.0;
    if (replicas > 1) {
        variance = (sum_sq.value() - count * mean * mean) / (count - 1.0);
        if (variance < 0.0) variance = 0.0;
    }
    return {mean, std::sqrt(variance / count), replicas};
}

}  // namespace lcmsim
