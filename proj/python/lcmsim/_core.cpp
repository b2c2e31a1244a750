// Python bindings for the lcmsim core: prime tables, samplers, log-lcm
// processes, exact formulas, enumeration oracles and statistics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lcmsim/analytics.hpp"
#include "lcmsim/experiments.hpp"
#include "lcmsim/lcm_core.hpp"
#include "lcmsim/oracle.hpp"
#include "lcmsim/primes.hpp"
#include "lcmsim/rng.hpp"
#include "lcmsim/sampling.hpp"
#include "lcmsim/stats.hpp"

namespace py = pybind11;
using namespace lcmsim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "simulation and exact evaluation of log-lcm limit theorems";

    py::class_<SeededRng>(m, "SeededRng")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream") = 0)
        .def("next_u64", &SeededRng::next_u64)
        .def("next_unit", &SeededRng::next_unit)
        .def_property_readonly("seed", &SeededRng::seed)
        .def_property_readonly("stream", &SeededRng::stream);

    py::class_<PrimePower>(m, "PrimePower")
        .def_readonly("prime", &PrimePower::prime)
        .def_readonly("exponent", &PrimePower::exponent)
        .def("__repr__", [](const PrimePower& pp) {
            return "PrimePower(" + std::to_string(pp.prime) + ", " +
                   std::to_string(pp.exponent) + ")";
        });

    py::class_<ExponentMap>(m, "ExponentMap")
        .def_property_readonly("entries", &ExponentMap::entries)
        .def("value", &ExponentMap::value)
        .def("log_value", &ExponentMap::log_value)
        .def("__len__", &ExponentMap::size);

    py::class_<FactorizationTable>(m, "FactorizationTable")
        .def(py::init<std::uint32_t>(), py::arg("n_max"))
        .def_property_readonly("n_max", &FactorizationTable::n_max)
        .def("smallest_prime_factor", &FactorizationTable::smallest_prime_factor)
        .def("is_prime", &FactorizationTable::is_prime)
        .def("factorize", &FactorizationTable::factorize)
        .def("primes_up_to",
             [](const FactorizationTable& t, std::uint32_t x) {
                 const auto primes = t.primes_up_to(x);
                 return std::vector<std::uint32_t>(primes.begin(), primes.end());
             })
        .def("mertens_log_sum", &FactorizationTable::mertens_log_sum, py::arg("x"),
             py::arg("power"));

    py::class_<CouponPath>(m, "CouponPath")
        .def_readonly("n", &CouponPath::n)
        .def_readonly("m", &CouponPath::m)
        .def_readonly("draws", &CouponPath::draws)
        .def_readonly("stop_times", &CouponPath::stop_times);

    py::class_<ProcessMeta>(m, "ProcessMeta")
        .def_readonly("n", &ProcessMeta::n)
        .def_readonly("m", &ProcessMeta::m)
        .def_readonly("label", &ProcessMeta::label)
        .def_readonly("seed", &ProcessMeta::seed)
        .def_readonly("stream", &ProcessMeta::stream);

    py::class_<ProcessSample>(m, "ProcessSample")
        .def_readonly("grid", &ProcessSample::grid)
        .def_readonly("values", &ProcessSample::values)
        .def_readonly("meta", &ProcessSample::meta);

    py::class_<MeanEstimate>(m, "MeanEstimate")
        .def_readonly("estimate", &MeanEstimate::estimate)
        .def_readonly("std_error", &MeanEstimate::std_error)
        .def_readonly("count", &MeanEstimate::count);

    // sampling
    m.def("sample_uniform", &sample_uniform, py::arg("n"), py::arg("rng"));
    m.def("sample_coupon_path", &sample_coupon_path, py::arg("n"), py::arg("m"),
          py::arg("rng"), py::arg("clamp") = false);
    m.def("sample_tau_coupon", &sample_tau_coupon, py::arg("n"), py::arg("m"),
          py::arg("rng"), py::arg("clamp") = false);
    m.def("sample_tau_geometric", &sample_tau_geometric, py::arg("n"), py::arg("m"),
          py::arg("rng"), py::arg("clamp") = false);
    m.def("sample_subset", &sample_subset, py::arg("n"), py::arg("m"), py::arg("rng"));
    m.def("sample_geometric", &sample_geometric, py::arg("p"), py::arg("rng"));
    m.def("sample_fixed_m_limit", &sample_fixed_m_limit, py::arg("m"), py::arg("p_max"),
          py::arg("rng"), py::arg("table"));

    // log-lcm functionals
    m.def("log_lcm",
          [](const std::vector<std::uint32_t>& values, const FactorizationTable& t) {
              return log_lcm(values, t);
          },
          py::arg("values"), py::arg("table"));
    m.def("log_u_tilde", &log_u_tilde, py::arg("k"), py::arg("m"), py::arg("table"));
    m.def("y_process",
          [](std::uint32_t n, std::uint32_t m, const std::vector<double>& grid,
             SeededRng& rng, const FactorizationTable& t) {
              return y_process(n, m, grid, rng, t);
          },
          py::arg("n"), py::arg("m"), py::arg("grid"), py::arg("rng"), py::arg("table"));
    m.def("z_process",
          [](std::uint32_t n, std::uint32_t m, const std::vector<double>& grid,
             SeededRng& rng, const FactorizationTable& t) {
              return z_process(n, m, grid, rng, t);
          },
          py::arg("n"), py::arg("m"), py::arg("grid"), py::arg("rng"), py::arg("table"));
    m.def("yz_process_paired",
          [](std::uint32_t n, std::uint32_t m, const std::vector<double>& grid,
             SeededRng& rng, const FactorizationTable& t) {
              const auto pair = yz_process_paired(n, m, grid, rng, t);
              return py::make_tuple(pair.first, pair.second);
          },
          py::arg("n"), py::arg("m"), py::arg("grid"), py::arg("rng"), py::arg("table"));
    m.def("subset_lcm_process",
          [](std::uint32_t n, std::uint32_t m, const std::vector<double>& grid,
             SeededRng& rng, const FactorizationTable& t) {
              return subset_lcm_process(n, m, grid, rng, t);
          },
          py::arg("n"), py::arg("m"), py::arg("grid"), py::arg("rng"), py::arg("table"));
    m.def("y_hat_process",
          [](std::uint32_t n, std::uint32_t m, const std::vector<double>& grid,
             SeededRng& rng, const FactorizationTable& t) {
              return y_hat_process(n, m, grid, rng, t);
          },
          py::arg("n"), py::arg("m"), py::arg("grid"), py::arg("rng"), py::arg("table"));
    m.def("reciprocal_gcd_mean", &reciprocal_gcd_mean, py::arg("n"), py::arg("replicas"),
          py::arg("rng"));

    // exact formulas
    py::enum_<RegimeLabel>(m, "RegimeLabel")
        .value("CaseA", RegimeLabel::CaseA)
        .value("CaseB", RegimeLabel::CaseB);
    m.def("classify_regime", &classify_regime, py::arg("n"), py::arg("m"));
    m.def("harmonic", &harmonic, py::arg("n"));
    m.def("harmonic2", &harmonic2, py::arg("n"));
    m.def("expected_tau", &expected_tau, py::arg("n"), py::arg("m"));
    m.def("variance_tau", &variance_tau, py::arg("n"), py::arg("m"));
    m.def("centering_c", &centering_c, py::arg("n"), py::arg("y"), py::arg("table"));
    m.def("centering_c_timechanged", &centering_c_timechanged, py::arg("n"), py::arg("m"),
          py::arg("t"), py::arg("table"));
    m.def("normalization_a",
          [](std::uint64_t n, std::uint64_t m) {
              const auto [value, regime] = normalization_a(n, m);
              return py::make_tuple(value, regime);
          },
          py::arg("n"), py::arg("m"));
    m.def("normalization_b", &normalization_b, py::arg("n"), py::arg("m"));
    m.def("multiplicity_tail", &multiplicity_tail, py::arg("n"), py::arg("p"), py::arg("j"));
    m.def("exact_mean_log_u_tilde", &exact_mean_log_u_tilde, py::arg("n"), py::arg("m"),
          py::arg("table"));
    m.def("exact_variance_log_u_tilde", &exact_variance_log_u_tilde, py::arg("n"),
          py::arg("m"), py::arg("table"));
    m.def("asymptotic_variance", &asymptotic_variance, py::arg("n"), py::arg("m"));
    m.def("binomial_plus_variance", &binomial_plus_variance, py::arg("m"), py::arg("theta"));

    // enumeration oracles
    py::enum_<ExactModel>(m, "ExactModel")
        .value("Iid", ExactModel::Iid)
        .value("Subset", ExactModel::Subset);
    py::class_<ExactSummary>(m, "ExactSummary")
        .def_readonly("model", &ExactSummary::model)
        .def_readonly("n", &ExactSummary::n)
        .def_readonly("m", &ExactSummary::m)
        .def_readonly("mean", &ExactSummary::mean)
        .def_readonly("variance", &ExactSummary::variance)
        .def_readonly("support_size", &ExactSummary::support_size);
    m.def("enumerate_iid", &enumerate_iid, py::arg("n"), py::arg("m"), py::arg("table"));
    m.def("enumerate_subsets", &enumerate_subsets, py::arg("n"), py::arg("m"),
          py::arg("table"));

    // statistics
    py::class_<MomentReport>(m, "MomentReport")
        .def_readonly("count", &MomentReport::count)
        .def_readonly("mean", &MomentReport::mean)
        .def_readonly("variance", &MomentReport::variance)
        .def_readonly("central3", &MomentReport::central3)
        .def_readonly("central4", &MomentReport::central4)
        .def_readonly("se_mean", &MomentReport::se_mean)
        .def_readonly("se_variance", &MomentReport::se_variance);
    m.def("moment_summary",
          [](const std::vector<double>& xs) { return moment_summary(xs); },
          py::arg("samples"));
    m.def("ks_normal", [](const std::vector<double>& xs) { return ks_normal(xs); },
          py::arg("samples"));
    m.def("ks_critical_value", &ks_critical_value, py::arg("count"), py::arg("alpha"));
    m.def("chi_square_uniform",
          [](const std::vector<std::uint64_t>& counts) {
              return chi_square_uniform(counts);
          },
          py::arg("counts"));
    m.def("chi_square_critical_value", &chi_square_critical_value, py::arg("degrees"),
          py::arg("alpha"));
    py::class_<CovarianceReport>(m, "CovarianceReport")
        .def_readonly("grid", &CovarianceReport::grid)
        .def_readonly("empirical", &CovarianceReport::empirical)
        .def_readonly("target", &CovarianceReport::target)
        .def_readonly("max_abs_deviation", &CovarianceReport::max_abs_deviation);
    m.def("covariance_check", &covariance_check, py::arg("replicas"),
          py::arg("normalization"));

    m.attr("CESARO_CONSTANT") = kCesaroConstant;
    m.attr("__version__") = "0.1.0";
}
