// Statistical verdict machinery: moment summaries with standard errors,
// Kolmogorov-Smirnov distances, chi-square uniformity statistics, and the
// Brownian finite-dimensional covariance check.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lcmsim/kahan.hpp"
#include "lcmsim/lcm_core.hpp"

namespace lcmsim {

struct MomentReport {
    std::uint64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double central3 = 0.0;  // population central moments
    double central4 = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
};

// Streaming compensated power sums (count, sum x, ..., sum x^4); partial
// accumulators merge associatively, so replicas can be reduced in any fixed
// chunk order independently of thread scheduling.
class MomentAccumulator {
public:
    void add(double x) {
        ++count_;
        const double x2 = x * x;
        s1_.add(x);
        s2_.add(x2);
        s3_.add(x2 * x);
        s4_.add(x2 * x2);
    }

    void merge(const MomentAccumulator& other) {
        count_ += other.count_;
        s1_.merge(other.s1_);
        s2_.merge(other.s2_);
        s3_.merge(other.s3_);
        s4_.merge(other.s4_);
    }

    std::uint64_t count() const { return count_; }
    MomentReport report() const;

private:
    std::uint64_t count_ = 0;
    KahanSum s1_, s2_, s3_, s4_;
};

// Summary of a sample; rejects fewer than two observations.
MomentReport moment_summary(std::span<const double> samples);

// Standard normal CDF.
double normal_cdf(double x);

// Sup distance between the empirical CDF of the (caller-standardized)
// sample and the standard normal CDF. Requires at least 50 observations.
double ks_normal(std::span<const double> samples);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// One-sample KS critical value sqrt(-log(alpha/2)/2) / sqrt(n).
double ks_critical_value(std::uint64_t count, double alpha);

// Pearson statistic against equal cell probabilities. Requires at least two
// cells and expected count >= 5 per cell.
double chi_square_uniform(std::span<const std::uint64_t> counts);

// Upper quantile of the chi-square distribution (inverted regularized
// incomplete gamma), used for 99.9% critical values at arbitrary df.
double chi_square_critical_value(std::uint64_t degrees, double alpha);

struct CovarianceReport {
    std::vector<double> grid;
    std::vector<double> empirical;  // row-major k x k, unbiased
    std::vector<double> target;     // min(t_i, t_j)
    double max_abs_deviation = 0.0;
};

// Empirical covariance of process replicas against the Brownian target
// min(s,t). Values are divided by `normalization` (the sqrt of the variance
// scale); replicas must share an identical grid.
CovarianceReport covariance_check(const std::vector<ProcessSample>& replicas,
                                  double normalization);

}  // namespace lcmsim
