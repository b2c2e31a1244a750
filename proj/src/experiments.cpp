#include "lcmsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lcmsim/analytics.hpp"
#include "lcmsim/kahan.hpp"
#include "lcmsim/lcm_core.hpp"
#include "lcmsim/oracle.hpp"
#include "lcmsim/primes.hpp"
#include "lcmsim/sampling.hpp"
#include "lcmsim/stats.hpp"

namespace lcmsim {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kAlpha = 0.001;  // fixed 99.9% significance policy

// ---------------------------------------------------------------- helpers

std::uint32_t checked_u32(std::uint64_t v, const char* name) {
    if (v > 0xffffffffull) throw UsageError(std::string(name) + " too large");
    return static_cast<std::uint32_t>(v);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

MetricResult value_metric(std::string name, std::string provenance, double estimate,
                          std::optional<double> t = std::nullopt,
                          std::optional<double> std_error = std::nullopt) {
    MetricResult metric;
    metric.name = std::move(name);
    metric.provenance = std::move(provenance);
    metric.t = t;
    metric.estimate = estimate;
    metric.std_error = std_error;
    metric.rule = "value";
    metric.pass = true;
    return metric;
}

MetricResult within_metric(std::string name, std::string provenance, double estimate,
                           double target, double tolerance,
                           std::optional<double> t = std::nullopt,
                           std::optional<double> std_error = std::nullopt) {
    MetricResult metric;
    metric.name = std::move(name);
    metric.provenance = std::move(provenance);
    metric.t = t;
    metric.estimate = estimate;
    metric.target = target;
    metric.tolerance = tolerance;
    metric.std_error = std_error;
    metric.rule = "|estimate - target| <= tolerance";
    metric.pass = std::abs(estimate - target) <= tolerance;
    return metric;
}

MetricResult below_metric(std::string name, std::string provenance, double estimate,
                          double bound, std::optional<double> t = std::nullopt) {
    MetricResult metric;
    metric.name = std::move(name);
    metric.provenance = std::move(provenance);
    metric.t = t;
    metric.estimate = estimate;
    metric.target = bound;
    metric.rule = "estimate < target";
    metric.pass = estimate < bound;
    return metric;
}

MetricResult above_metric(std::string name, std::string provenance, double estimate,
                          double bound, std::optional<double> t = std::nullopt) {
    MetricResult metric;
    metric.name = std::move(name);
    metric.provenance = std::move(provenance);
    metric.t = t;
    metric.estimate = estimate;
    metric.target = bound;
    metric.rule = "estimate > target";
    metric.pass = estimate > bound;
    return metric;
}

double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

MomentReport reduce_moments(const std::vector<double>& values) {
    MomentAccumulator acc;
    for (const double v : values) acc.add(v);
    return acc.report();
}

double forced_normalization_a(std::uint64_t n, std::uint64_t m, const std::string& mode,
                              std::string& regime_out) {
    const auto [auto_value, auto_label] = normalization_a(n, m);
    RegimeLabel label = auto_label;
    if (mode == "A") label = RegimeLabel::CaseA;
    if (mode == "B") label = RegimeLabel::CaseB;
    regime_out = (label == RegimeLabel::CaseA) ? "A" : "B";
    const double logm = std::log(static_cast<double>(m));
    const double logn = std::log(static_cast<double>(n));
    const double value =
        (label == RegimeLabel::CaseA)
            ? 0.5 * static_cast<double>(m) * logm * logm
            : 0.5 * static_cast<double>(m) * (logn - logm) * (3.0 * logm - logn);
    // forcing case B below m ~ n^(1/3) drives the formula nonpositive
    if (!(value > 0.0)) {
        throw UsageError("case " + regime_out + " normalization is not positive at n=" +
                         std::to_string(n) + ", m=" + std::to_string(m));
    }
    return value;
}

// -------------------------------------------------------------- verify-tau

RunReport run_verify_tau(const ExperimentConfig& config) {
    require(config.n >= 1 && config.m >= 1 && config.m <= config.n,
            "verify-tau needs 1 <= m <= n");
    const auto n = checked_u32(config.n, "n");
    const auto m = checked_u32(config.m, "m");

    std::vector<double> coupon(config.replicas);
    std::vector<double> geometric(config.replicas);
    parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
        SeededRng rng(config.seed, r);
        coupon[r] = static_cast<double>(sample_tau_coupon(n, m, rng));
        geometric[r] = static_cast<double>(sample_tau_geometric(n, m, rng));
    });
    const MomentReport rc = reduce_moments(coupon);
    const MomentReport rg = reduce_moments(geometric);

    const double mean_target = expected_tau(n, m);
    const double var_target = variance_tau(n, m);
    const char* mean_fact = "coupon stopping-time mean n (H_n - H_{n-m})";
    const char* var_fact =
        "coupon stopping-time variance n^2 (H_{n,2} - H_{n-m,2}) - n (H_n - H_{n-m})";

    RunReport report;
    report.metrics.push_back(within_metric("tau_mean_coupon", mean_fact, rc.mean,
                                           mean_target, 3.0 * rc.se_mean, std::nullopt,
                                           rc.se_mean));
    report.metrics.push_back(within_metric("tau_variance_coupon", var_fact, rc.variance,
                                           var_target, 3.0 * rc.se_variance, std::nullopt,
                                           rc.se_variance));
    report.metrics.push_back(within_metric("tau_mean_geometric", mean_fact, rg.mean,
                                           mean_target, 3.0 * rg.se_mean, std::nullopt,
                                           rg.se_mean));
    report.metrics.push_back(within_metric("tau_variance_geometric", var_fact, rg.variance,
                                           var_target, 3.0 * rg.se_variance, std::nullopt,
                                           rg.se_variance));
    report.metrics.push_back(within_metric(
        "tau_mean_agreement", "one path construction, two representations", rc.mean - rg.mean,
        0.0, 3.0 * combined_se(rc.se_mean, rg.se_mean)));
    report.metrics.push_back(within_metric(
        "tau_variance_agreement", "one path construction, two representations",
        rc.variance - rg.variance, 0.0, 3.0 * combined_se(rc.se_variance, rg.se_variance)));
    return report;
}

// ------------------------------------------------- verify-subset-uniformity

std::vector<std::vector<std::uint64_t>> binomial_table(std::uint32_t n) {
    std::vector<std::vector<std::uint64_t>> c(n + 1, std::vector<std::uint64_t>(n + 1, 0));
    for (std::uint32_t i = 0; i <= n; ++i) {
        c[i][0] = 1;
        for (std::uint32_t j = 1; j <= i; ++j) {
            c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
        }
    }
    return c;
}

RunReport run_verify_subset_uniformity(const ExperimentConfig& config) {
    require(config.n >= 2 && config.m >= 1 && config.m <= config.n,
            "verify-subset-uniformity needs 1 <= m <= n");
    require(config.n <= 64, "verify-subset-uniformity: n must be small (cells = C(n,m))");
    const auto n = checked_u32(config.n, "n");
    const auto m = checked_u32(config.m, "m");
    const auto binom = binomial_table(n);
    const std::uint64_t cells = binom[n][m];
    require(cells >= 2 && cells <= 100000, "verify-subset-uniformity: unusable cell count");
    require(config.replicas >= 5 * cells,
            "verify-subset-uniformity: need at least 5 replicas per cell");

    // colex rank of the sorted subset: sum C(c_i - 1, i)
    std::vector<std::uint32_t> ranks(config.replicas);
    parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
        SeededRng rng(config.seed, r);
        const auto subset = sample_subset(n, m, rng);
        std::uint64_t rank = 0;
        for (std::size_t i = 0; i < subset.size(); ++i) {
            rank += binom[subset[i] - 1][i + 1];
        }
        ranks[r] = static_cast<std::uint32_t>(rank);
    });
    std::vector<std::uint64_t> counts(cells, 0);
    for (const std::uint32_t rank : ranks) ++counts[rank];

    const double statistic = chi_square_uniform(counts);
    const double critical = chi_square_critical_value(cells - 1, kAlpha);

    RunReport report;
    report.metrics.push_back(below_metric(
        "subset_uniformity_chi_square",
        "uniformity over all C(n,m) subsets from the coupon construction", statistic,
        critical));
    return report;
}

// ------------------------------------------------------------ verify-cesaro

RunReport run_verify_cesaro(const ExperimentConfig& config) {
    require(config.n >= 1, "verify-cesaro needs n >= 1");
    const auto n = checked_u32(config.n, "n");

    std::vector<double> values(config.replicas);
    parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
        SeededRng rng(config.seed, r);
        const auto a = static_cast<std::uint32_t>(sample_uniform(n, rng));
        const auto b = static_cast<std::uint32_t>(sample_uniform(n, rng));
        values[r] = 1.0 / static_cast<double>(std::gcd(a, b));
    });
    const MomentReport moments = reduce_moments(values);

    RunReport report;
    report.metrics.push_back(within_metric(
        "cesaro_reciprocal_gcd", "E 1/gcd of a uniform pair tends to zeta(3)/zeta(2)",
        moments.mean, kCesaroConstant, 0.003, std::nullopt, moments.se_mean));
    return report;
}

// -------------------------------------------------------------- clt runners

struct CltSetup {
    std::vector<double> grid;
    std::vector<double> centerings;
    double scale;  // sqrt(a_n)
};

void add_marginal_metrics(RunReport& report, const std::vector<double>& grid,
                          std::vector<std::vector<double>>& standardized) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (!(t > 0.0)) continue;
        auto& ws = standardized[i];
        const double root_t = std::sqrt(t);
        for (double& w : ws) w /= root_t;
        const MomentReport moments = reduce_moments(ws);
        report.metrics.push_back(within_metric(
            "marginal_mean", "brownian marginal: mean 0 after centering", moments.mean, 0.0,
            0.1, t, moments.se_mean));
        report.metrics.push_back(within_metric(
            "marginal_variance", "brownian marginal: unit variance under a_n", moments.variance,
            1.0, 0.25, t, moments.se_variance));
        report.metrics.push_back(below_metric(
            "marginal_ks", "brownian marginal: normal law (logarithmic convergence)",
            ks_normal(ws), 0.05, t));
    }
}

void add_covariance_metric(RunReport& report, const ExperimentConfig& config,
                           const std::vector<double>& grid,
                           const std::vector<std::vector<double>>& centered,
                           const std::string& label) {
    if (grid.size() < 2 || config.replicas < 1000) return;
    std::vector<ProcessSample> samples(config.replicas);
    for (std::uint64_t r = 0; r < config.replicas; ++r) {
        samples[r].grid = grid;
        samples[r].meta = ProcessMeta{config.n, config.m, label, config.seed, r};
        samples[r].values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            samples[r].values[i] = centered[i][r];
        }
    }
    const CovarianceReport cov = covariance_check(samples, 1.0);
    report.metrics.push_back(below_metric(
        "covariance_max_deviation", "brownian finite-dimensional covariance min(s,t)",
        cov.max_abs_deviation, 0.2));
}

RunReport run_clt(const ExperimentConfig& config, bool subset_model) {
    require(config.n >= 4 && config.m >= 2 && config.m < config.n,
            "clt needs 2 <= m < n");
    require(!config.grid.empty(), "clt needs a nonempty time grid");
    require(config.replicas >= 100, "clt needs at least 100 replicas");
    const auto n = checked_u32(config.n, "n");
    const auto m = checked_u32(config.m, "m");
    const FactorizationTable table(n);

    RunReport report;
    const double a_n = forced_normalization_a(config.n, config.m, config.case_override,
                                              report.regime);
    report.normalization = a_n;
    const double scale = std::sqrt(a_n);

    // centering per grid time; the subset model in regime B uses the
    // time-changed clock -n log(1 - mt/n)
    const bool time_changed = subset_model && report.regime == "B";
    report.centering = time_changed ? "c_n(-n log(1 - m t / n))" : "c_n(floor(m t))";
    report.hypothesis_ok = true;
    if (time_changed) {
        const double logn = std::log(static_cast<double>(config.n));
        report.hypothesis_ok =
            static_cast<double>(config.m) * logn <= static_cast<double>(config.n);
    }
    std::vector<double> centerings(config.grid.size());
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
        const double t = config.grid[i];
        if (time_changed) {
            require(static_cast<double>(config.m) * t < static_cast<double>(config.n),
                    "clt-subset case B needs m * max(t) < n");
            centerings[i] = centering_c_timechanged(config.n, config.m, t, table);
        } else {
            centerings[i] =
                centering_c(config.n, std::floor(static_cast<double>(config.m) * t), table);
        }
    }

    // per-grid-point standardized values, replica-major fill
    std::vector<std::vector<double>> centered(config.grid.size(),
                                              std::vector<double>(config.replicas));
    std::vector<std::uint8_t> lipschitz_ok(config.replicas, 1);
    const double logn = std::log(static_cast<double>(config.n));
    parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
        SeededRng rng(config.seed, r);
        const ProcessSample sample =
            subset_model ? subset_lcm_process(n, m, config.grid, rng, table)
                         : y_process(n, m, config.grid, rng, table);
        for (std::size_t i = 0; i < config.grid.size(); ++i) {
            centered[i][r] = (sample.values[i] - centerings[i]) / scale;
            if (i > 0 && !subset_model) {
                const double steps = std::floor(static_cast<double>(m) * config.grid[i]) -
                                     std::floor(static_cast<double>(m) * config.grid[i - 1]);
                const double delta = sample.values[i] - sample.values[i - 1];
                const double slack = 1e-9 * (1.0 + steps * logn);
                if (delta < -slack || delta > steps * logn + slack) lipschitz_ok[r] = 0;
            }
        }
    });

    if (!subset_model) {
        std::uint64_t violations = 0;
        for (const std::uint8_t ok : lipschitz_ok) violations += (ok == 0);
        report.metrics.push_back(within_metric(
            "lipschitz_violations", "path increments bounded by (k - l) log n",
            static_cast<double>(violations), 0.0, 0.0));
    }

    add_covariance_metric(report, config, config.grid, centered,
                          subset_model ? "subset" : "Y");
    add_marginal_metrics(report, config.grid, centered);
    return report;
}

// ---------------------------------------------------------------------- gap

RunReport run_gap(const ExperimentConfig& config) {
    require(config.n >= 4 && config.m >= 2 && config.m < config.n, "gap needs 2 <= m < n");
    const auto n = checked_u32(config.n, "n");
    const auto m = checked_u32(config.m, "m");
    const FactorizationTable table(n);
    const std::vector<double> grid{1.0};

    std::vector<double> gaps(config.replicas);
    std::vector<double> z_values(config.replicas);
    std::vector<std::uint8_t> order_ok(config.replicas, 1);
    parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
        SeededRng rng(config.seed, r);
        const auto [y, z] = yz_process_paired(n, m, grid, rng, table);
        gaps[r] = y.values[0] - z.values[0];
        z_values[r] = z.values[0];
        if (gaps[r] < -1e-9) order_ok[r] = 0;
    });
    const MomentReport gap_moments = reduce_moments(gaps);
    const MomentReport z_moments = reduce_moments(z_values);
    const double root_m = std::sqrt(static_cast<double>(config.m));

    std::uint64_t violations = 0;
    for (const std::uint8_t ok : order_ok) violations += (ok == 0);

    RunReport report;
    report.centering = "c_n(floor(m t))";
    report.metrics.push_back(within_metric(
        "z_below_y_violations", "indicator exponents never exceed true exponents",
        static_cast<double>(violations), 0.0, 0.0));
    report.metrics.push_back(within_metric(
        "z_mean_centering", "E Z(1) = c_n(m) exactly", z_moments.mean,
        centering_c(config.n, static_cast<double>(config.m), table),
        3.0 * z_moments.se_mean, std::nullopt, z_moments.se_mean));
    report.metrics.push_back(value_metric("gap_mean", "paired mean of Y(m) - Z(1)",
                                          gap_moments.mean, std::nullopt,
                                          gap_moments.se_mean));
    report.metrics.push_back(below_metric(
        "gap_mean_over_sqrt_m", "coupling gap grows like sqrt(m)",
        gap_moments.mean / root_m, 10.0));
    return report;
}

// --------------------------------------------------------------- geom-model

RunReport run_geom_model(const ExperimentConfig& config) {
    require(config.n >= 4 && config.m >= 2 && config.m < config.n,
            "geom-model needs 2 <= m < n");
    require(config.replicas >= 100, "geom-model needs at least 100 replicas");
    const auto n = checked_u32(config.n, "n");
    const auto m = checked_u32(config.m, "m");
    const FactorizationTable table(n);
    const std::vector<double> grid{1.0};
    const GeomProcessSampler sampler(n, m, grid, table);

    std::vector<double> y_hat(config.replicas);
    std::vector<double> z_hat(config.replicas);
    std::vector<std::uint8_t> order_ok(config.replicas, 1);
    parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
        SeededRng rng(config.seed, r);
        const auto pair = sampler.sample(rng);
        y_hat[r] = pair.first.values[0];
        z_hat[r] = pair.second.values[0];
        if (z_hat[r] > y_hat[r] + 1e-9) order_ok[r] = 0;
    });
    const MomentReport yr = reduce_moments(y_hat);
    const MomentReport zr = reduce_moments(z_hat);

    const double b_n = normalization_b(config.n, config.m);
    std::string regime;
    const double a_n = forced_normalization_a(config.n, config.m, config.case_override, regime);

    // E Z^(1) = sum_p log p (1 - (1 - 1/p)^m)
    KahanSum z_target;
    for (const std::uint32_t p : table.primes()) {
        z_target.add(std::log(static_cast<double>(p)) *
                     (1.0 - std::exp(static_cast<double>(m) *
                                     std::log1p(-1.0 / static_cast<double>(p)))));
    }

    std::uint64_t violations = 0;
    for (const std::uint8_t ok : order_ok) violations += (ok == 0);

    RunReport report;
    report.regime = regime;
    report.normalization = b_n;
    report.centering = "sum_p log p (1 - (1 - 1/p)^m)";
    report.metrics.push_back(within_metric(
        "zhat_below_yhat_violations", "indicators never exceed maxima",
        static_cast<double>(violations), 0.0, 0.0));
    report.metrics.push_back(within_metric(
        "zhat_mean_centering", "E Z^(1) equals the geometric-model centering exactly",
        zr.mean, z_target.value(), 3.0 * zr.se_mean, std::nullopt, zr.se_mean));
    report.metrics.push_back(within_metric(
        "yhat_variance_over_b", "geometric-model variance scales like b_n",
        yr.variance / b_n, 1.0, 0.3, std::nullopt, yr.se_variance / b_n));
    report.metrics.push_back(above_metric(
        "yhat_variance_over_a", "the true-model normalization a_n under-scales Y^ "
        "(b_n / a_n >= 3 below the square-root boundary)",
        yr.variance / a_n, 2.0));
    return report;
}

// ------------------------------------------------------------------ fixed-m

RunReport run_fixed_m(const ExperimentConfig& config) {
    require(config.n >= 2, "fixed-m needs n >= 2 for the finite-n side");
    require(config.m >= 1, "fixed-m needs m >= 1");
    require(config.p_max >= 2, "fixed-m needs p_max >= 2");
    const auto n = checked_u32(config.n, "n");
    const auto m = checked_u32(config.m, "m");
    const auto p_max = checked_u32(config.p_max, "p_max");
    const FactorizationTable table(std::max(n, p_max));

    std::vector<double> limit_draws(config.replicas);
    std::vector<double> finite_draws(config.replicas);
    const double m_log_n = static_cast<double>(m) * std::log(static_cast<double>(n));
    parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
        SeededRng rng(config.seed, r);
        limit_draws[r] = sample_fixed_m_limit(m, p_max, rng, table);
        std::vector<std::uint32_t> draws(m);
        for (auto& d : draws) d = static_cast<std::uint32_t>(sample_uniform(n, rng));
        finite_draws[r] = log_lcm(draws, table) - m_log_n;
    });
    const MomentReport rl = reduce_moments(limit_draws);
    const MomentReport rf = reduce_moments(finite_draws);

    RunReport report;
    report.centering = "m log n";
    report.metrics.push_back(value_metric("limit_mean", "truncated fixed-m limit law",
                                          rl.mean, std::nullopt, rl.se_mean));
    report.metrics.push_back(value_metric("finite_mean", "log lcm of m uniform draws minus m log n",
                                          rf.mean, std::nullopt, rf.se_mean));
    report.metrics.push_back(within_metric(
        "fixed_m_mean_agreement",
        "fixed-m limit law matches the finite-n distribution in the mean",
        rl.mean - rf.mean, 0.0, 3.0 * combined_se(rl.se_mean, rf.se_mean)));
    return report;
}

// ------------------------------------------------------------- oracle-check

RunReport run_oracle_check(const ExperimentConfig& config) {
    require(config.n >= 1 && config.m >= 1 && config.m <= config.n,
            "oracle-check needs 1 <= m <= n");
    const auto n = checked_u32(config.n, "n");
    const auto m = checked_u32(config.m, "m");
    const FactorizationTable table(std::max(n, 64u));

    RunReport report;

    const ExactSummary iid = enumerate_iid(n, m, table);
    {
        std::vector<double> values(config.replicas);
        parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
            SeededRng rng(config.seed, r);
            std::vector<std::uint32_t> draws(m);
            for (auto& d : draws) d = static_cast<std::uint32_t>(sample_uniform(n, rng));
            values[r] = log_lcm(draws, table);
        });
        const MomentReport mc = reduce_moments(values);
        report.metrics.push_back(within_metric(
            "iid_mean_agreement", "exact enumeration over all n^m tuples", mc.mean, iid.mean,
            3.0 * mc.se_mean, std::nullopt, mc.se_mean));
        report.metrics.push_back(within_metric(
            "iid_variance_agreement", "exact enumeration over all n^m tuples", mc.variance,
            iid.variance, 3.0 * mc.se_variance, std::nullopt, mc.se_variance));
    }

    const ExactSummary subset = enumerate_subsets(n, m, table);
    {
        std::vector<double> values(config.replicas);
        parallel_replicas(config.replicas, config.threads, [&](std::uint64_t r) {
            SeededRng rng(config.seed + 1, r);
            values[r] = log_lcm(sample_subset(n, m, rng), table);
        });
        const MomentReport mc = reduce_moments(values);
        report.metrics.push_back(within_metric(
            "subset_mean_agreement", "exact enumeration over all C(n,m) subsets", mc.mean,
            subset.mean, 3.0 * mc.se_mean, std::nullopt, mc.se_mean));
        report.metrics.push_back(within_metric(
            "subset_variance_agreement", "exact enumeration over all C(n,m) subsets",
            mc.variance, subset.variance, 3.0 * mc.se_variance, std::nullopt,
            mc.se_variance));
    }

    if (config.sweep) {
        double worst_mean = 0.0;
        double worst_variance = 0.0;
        for (std::uint32_t nn = 2; nn <= 50; ++nn) {
            for (std::uint32_t mm = 1; mm < nn; ++mm) {
                const MeanVariance oracle = enumerate_log_u_tilde(nn, mm, table);
                worst_mean = std::max(
                    worst_mean,
                    std::abs(oracle.mean - exact_mean_log_u_tilde(nn, mm, table)));
                worst_variance = std::max(
                    worst_variance,
                    std::abs(oracle.variance - exact_variance_log_u_tilde(nn, mm, table)));
            }
        }
        report.metrics.push_back(within_metric(
            "u_tilde_mean_sweep", "closed form vs per-integer enumeration, n <= 50",
            worst_mean, 0.0, 1e-12));
        report.metrics.push_back(within_metric(
            "u_tilde_variance_sweep", "closed form vs per-integer enumeration, n <= 50",
            worst_variance, 0.0, 1e-12));
    }
    return report;
}

// -------------------------------------------------------------------- exact

RunReport run_exact(const ExperimentConfig& config) {
    RunReport report;
    const std::string& what = config.what;
    require(!what.empty(), "exact needs --what");

    if (what == "c_n" || what == "cn") {
        require(config.n >= 2, "exact c_n needs n >= 2");
        const FactorizationTable table(checked_u32(config.n, "n"));
        report.metrics.push_back(value_metric(
            "c_n", "sum_p log p (1 - (1 - floor(n/p)/n)^y)",
            centering_c(config.n, config.y, table)));
    } else if (what == "c_n_time") {
        require(config.n >= 2 && config.m >= 1, "exact c_n_time needs n and m");
        require(config.grid.size() == 1, "exact c_n_time needs one --t");
        const FactorizationTable table(checked_u32(config.n, "n"));
        report.metrics.push_back(value_metric(
            "c_n_time", "c_n at y = -n log(1 - m t / n)",
            centering_c_timechanged(config.n, config.m, config.grid[0], table)));
    } else if (what == "a_n") {
        const auto [value, regime] = normalization_a(config.n, config.m);
        report.regime = (regime == RegimeLabel::CaseA) ? "A" : "B";
        report.metrics.push_back(
            value_metric("a_n", "regime-dependent variance normalization", value));
    } else if (what == "b_n") {
        report.metrics.push_back(value_metric(
            "b_n", "geometric-model variance normalization m/2 (log^2 n - log^2 m)",
            normalization_b(config.n, config.m)));
    } else if (what == "tau_mean") {
        report.metrics.push_back(value_metric("tau_mean", "n (H_n - H_{n-m})",
                                              expected_tau(config.n, config.m)));
    } else if (what == "tau_var") {
        report.metrics.push_back(value_metric(
            "tau_var", "n^2 (H_{n,2} - H_{n-m,2}) - n (H_n - H_{n-m})",
            variance_tau(config.n, config.m)));
    } else if (what == "u_mean") {
        require(config.n >= 2, "exact u_mean needs n >= 2");
        const FactorizationTable table(checked_u32(config.n, "n"));
        report.metrics.push_back(value_metric(
            "u_mean", "sum_{m<p<=n} log p floor(n/p)/n",
            exact_mean_log_u_tilde(config.n, config.m, table)));
    } else if (what == "u_var") {
        require(config.n >= 2, "exact u_var needs n >= 2");
        const FactorizationTable table(checked_u32(config.n, "n"));
        report.metrics.push_back(value_metric(
            "u_var", "exact variance of the truncated squarefree content",
            exact_variance_log_u_tilde(config.n, config.m, table)));
    } else if (what == "asym_var") {
        report.metrics.push_back(value_metric("asym_var", "a_n / m",
                                              asymptotic_variance(config.n, config.m)));
    } else if (what == "binom_var") {
        report.metrics.push_back(value_metric(
            "binom_var", "closed-form Var (Bin(m,theta) - 1)_+",
            binomial_plus_variance(config.m, config.theta)));
    } else {
        throw UsageError("exact: unknown --what '" + what + "'");
    }
    return report;
}

}  // namespace

// ------------------------------------------------------------ infrastructure

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LCMSIM_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_replicas(std::uint64_t replicas, int threads,
                       const std::function<void(std::uint64_t)>& body) {
    const int workers = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(resolve_threads(threads)), replicas));
    if (workers <= 1) {
        for (std::uint64_t r = 0; r < replicas; ++r) body(r);
        return;
    }
    constexpr std::uint64_t kChunk = 256;
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::uint64_t begin = next.fetch_add(kChunk);
                if (begin >= replicas) return;
                const std::uint64_t end = std::min(begin + kChunk, replicas);
                try {
                    for (std::uint64_t r = begin; r < end; ++r) body(r);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& thread : pool) thread.join();
    if (failure) std::rethrow_exception(failure);
}

RunReport run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    require(config.replicas >= 1, "replicas must be at least 1");
    for (std::size_t i = 1; i < config.grid.size(); ++i) {
        require(config.grid[i] >= config.grid[i - 1], "--t values must be ascending");
    }
    require(config.grid.empty() || config.grid.front() >= 0.0,
            "--t values must be nonnegative");
    require(config.format == "json" || config.format == "csv",
            "--format must be json or csv");
    require(config.case_override == "auto" || config.case_override == "A" ||
                config.case_override == "B",
            "--case must be auto, A or B");

    RunReport report;
    if (config.subcommand == "exact") {
        report = run_exact(config);
    } else if (config.subcommand == "verify-tau") {
        report = run_verify_tau(config);
    } else if (config.subcommand == "verify-subset-uniformity") {
        report = run_verify_subset_uniformity(config);
    } else if (config.subcommand == "verify-cesaro") {
        report = run_verify_cesaro(config);
    } else if (config.subcommand == "clt") {
        report = run_clt(config, false);
    } else if (config.subcommand == "clt-subset") {
        report = run_clt(config, true);
    } else if (config.subcommand == "gap") {
        report = run_gap(config);
    } else if (config.subcommand == "geom-model") {
        report = run_geom_model(config);
    } else if (config.subcommand == "fixed-m") {
        report = run_fixed_m(config);
    } else if (config.subcommand == "oracle-check") {
        report = run_oracle_check(config);
    } else {
        throw UsageError("unknown subcommand '" + config.subcommand + "'");
    }

    report.config = config;
    report.version = kLibraryVersion;
    report.all_pass = true;
    for (const MetricResult& metric : report.metrics) report.all_pass &= metric.pass;
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return report;
}

// ------------------------------------------------------------- serialization

std::string report_to_json(const RunReport& report) {
    ordered_json config;
    config["subcommand"] = report.config.subcommand;
    config["n"] = report.config.n;
    config["m"] = report.config.m;
    config["t"] = report.config.grid;
    config["replicas"] = report.config.replicas;
    config["seed"] = report.config.seed;
    config["threads"] = report.config.threads;
    config["format"] = report.config.format;
    config["case"] = report.config.case_override;
    config["out"] = report.config.out;
    if (report.config.subcommand == "exact") {
        config["what"] = report.config.what;
        config["y"] = report.config.y;
        config["theta"] = report.config.theta;
    }
    if (report.config.subcommand == "fixed-m") {
        config["p_max"] = report.config.p_max;
    }
    if (report.config.subcommand == "oracle-check") {
        config["sweep"] = report.config.sweep;
    }

    ordered_json metrics = ordered_json::array();
    for (const MetricResult& metric : report.metrics) {
        ordered_json j;
        j["metric"] = metric.name;
        j["provenance"] = metric.provenance;
        if (metric.t) j["t"] = *metric.t;
        j["estimate"] = metric.estimate;
        if (metric.target) j["target"] = *metric.target;
        if (metric.tolerance) j["tolerance"] = *metric.tolerance;
        if (metric.std_error) j["std_error"] = *metric.std_error;
        j["rule"] = metric.rule;
        j["pass"] = metric.pass;
        metrics.push_back(std::move(j));
    }

    ordered_json root;
    root["version"] = report.version;
    root["config"] = std::move(config);
    root["regime"] = report.regime;
    root["centering"] = report.centering;
    root["normalization"] = report.normalization;
    root["hypothesis_ok"] = report.hypothesis_ok;
    root["metrics"] = std::move(metrics);
    root["all_pass"] = report.all_pass;
    root["wall_ms"] = report.wall_ms;
    return root.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& report) {
    std::ostringstream out;
    out << "metric,t,estimate,target,tolerance,pass\n";
    out.precision(17);
    for (const MetricResult& metric : report.metrics) {
        out << metric.name << ',';
        if (metric.t) out << *metric.t;
        out << ',' << metric.estimate << ',';
        if (metric.target) out << *metric.target;
        out << ',';
        if (metric.tolerance) out << *metric.tolerance;
        out << ',' << (metric.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

}  // namespace lcmsim
