#include "lcmsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcmsim {

namespace {

// Regularized lower incomplete gamma P(a, x) via series / continued fraction.
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // series expansion
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(log_prefactor);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(log_prefactor) * h;
}

}  // namespace

MomentReport MomentAccumulator::report() const {
    if (count_ < 2) throw std::domain_error("moment summary needs at least two samples");
    const double n = static_cast<double>(count_);
    const double m1 = s1_.value() / n;
    const double m2 = s2_.value() / n;
    const double m3 = s3_.value() / n;
    const double m4 = s4_.value() / n;

    const double c2 = std::max(0.0, m2 - m1 * m1);
    const double c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
    const double c4 = std::max(
        0.0, m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1);

    MomentReport report;
    report.count = count_;
    report.mean = m1;
    report.variance = c2 * n / (n - 1.0);
    report.central3 = c3;
    report.central4 = c4;
    report.se_mean = std::sqrt(report.variance / n);
    report.se_variance = std::sqrt(std::max(0.0, c4 - c2 * c2) / n);
    return report;
}

MomentReport moment_summary(std::span<const double> samples) {
    MomentAccumulator acc;
    for (const double x : samples) acc.add(x);
    return acc.report();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_normal(std::span<const double> samples) {
    if (samples.size() < 50) {
        throw std::domain_error("ks_normal needs at least 50 samples");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = normal_cdf(sorted[i]);
        const double lower = cdf - static_cast<double>(i) / n;
        const double upper = static_cast<double>(i + 1) / n - cdf;
        sup = std::max({sup, lower, upper});
    }
    return sup;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::domain_error("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double sup = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        sup = std::max(sup, std::abs(static_cast<double>(i) / static_cast<double>(sa.size()) -
                                     static_cast<double>(j) / static_cast<double>(sb.size())));
    }
    return sup;
}

double ks_critical_value(std::uint64_t count, double alpha) {
    if (count == 0 || alpha <= 0.0 || alpha >= 1.0) {
        throw std::domain_error("ks_critical_value: bad arguments");
    }
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(count));
}

double chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw std::domain_error("chi_square_uniform: need >= 2 cells");
    std::uint64_t total = 0;
    for (const std::uint64_t c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    if (expected < 5.0) {
        throw std::domain_error("chi_square_uniform: expected count per cell below 5");
    }
    KahanSum stat;
    for (const std::uint64_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat.add(d * d / expected);
    }
    return stat.value();
}

double chi_square_critical_value(std::uint64_t degrees, double alpha) {
    if (degrees == 0 || alpha <= 0.0 || alpha >= 1.0) {
        throw std::domain_error("chi_square_critical_value: bad arguments");
    }
    const double a = static_cast<double>(degrees) / 2.0;
    const double target = 1.0 - alpha;
    // bisection on x/2 over a bracket that always contains the quantile
    double lo = 0.0;
    double hi = std::max(100.0, 4.0 * static_cast<double>(degrees));
    while (gamma_p(a, hi / 2.0) < target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_p(a, mid / 2.0) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CovarianceReport covariance_check(const std::vector<ProcessSample>& replicas,
                                  double normalization) {
    if (replicas.size() < 1000) {
        throw std::domain_error("covariance_check: need >= 1000 replicas");
    }
    if (!(normalization > 0.0)) {
        throw std::domain_error("covariance_check: normalization must be positive");
    }
    const auto& front = replicas.front();
    const auto& grid = front.grid;
    const std::size_t k = grid.size();
    for (const auto& sample : replicas) {
        if (sample.grid != grid) {
            throw std::invalid_argument("covariance_check: replicas must share one grid");
        }
        if (sample.values.size() != k) {
            throw std::invalid_argument("covariance_check: malformed process sample");
        }
        if (sample.meta.n != front.meta.n || sample.meta.m != front.meta.m ||
            sample.meta.label != front.meta.label) {
            throw std::invalid_argument("covariance_check: replicas must share meta");
        }
    }
    const double n = static_cast<double>(replicas.size());

    std::vector<KahanSum> sums(k);
    for (const auto& sample : replicas) {
        for (std::size_t i = 0; i < k; ++i) sums[i].add(sample.values[i] / normalization);
    }
    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) means[i] = sums[i].value() / n;

    CovarianceReport report;
    report.grid = grid;
    report.empirical.assign(k * k, 0.0);
    report.target.assign(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            KahanSum cross;
            for (const auto& sample : replicas) {
                cross.add((sample.values[i] / normalization - means[i]) *
                          (sample.values[j] / normalization - means[j]));
            }
            const double cov = cross.value() / (n - 1.0);
            report.empirical[i * k + j] = cov;
            report.empirical[j * k + i] = cov;
            const double target = std::min(grid[i], grid[j]);
            report.target[i * k + j] = target;
            report.target[j * k + i] = target;
            report.max_abs_deviation =
                std::max(report.max_abs_deviation, std::abs(cov - target));
        }
    }
    return report;
}

}  // namespace lcmsim
