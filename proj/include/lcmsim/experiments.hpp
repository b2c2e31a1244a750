// Experiment runners behind the command-line tool: reproducible, replica-
// parallel verification runs with machine-readable reports. Replica r always
// draws from stream r of the configured seed and partial results are reduced
// in replica order, so reports are byte-identical across thread counts.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcmsim {

// Thrown for invalid configurations; the CLI maps it to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string subcommand;
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::vector<double> grid{1.0};   // --t
    std::uint64_t replicas = 10000;
    std::uint64_t seed = 42;
    int threads = 0;                 // 0: LCMSIM_THREADS env var, else hardware
    std::string out = "-";           // "-" = stdout
    std::string format = "json";     // json | csv
    std::string case_override = "auto";  // auto | A | B
    // subcommand-specific parameters
    std::string what;                // exact
    double y = 1.0;                  // exact c_n
    double theta = 0.5;              // exact binom_var
    std::uint64_t p_max = 100000;    // fixed-m prime cutoff
    bool sweep = false;              // oracle-check formula sweep
};

struct MetricResult {
    std::string name;
    std::string provenance;            // which mathematical fact is checked
    std::optional<double> t;           // grid time, when applicable
    double estimate = 0.0;
    std::optional<double> target;
    std::optional<double> tolerance;
    std::optional<double> std_error;
    std::string rule;                  // how pass was decided
    bool pass = true;
};

struct RunReport {
    ExperimentConfig config;
    std::string regime = "n/a";        // A | B | n/a
    std::string centering = "none";
    double normalization = 0.0;
    bool hypothesis_ok = true;         // large-m time change needs m = O(n / log n)
    std::vector<MetricResult> metrics;
    bool all_pass = true;
    double wall_ms = 0.0;
    std::string version;
};

// Executes the configured experiment. Throws UsageError on bad configs.
RunReport run_experiment(const ExperimentConfig& config);

// Deterministic serializations; wall_ms is the only field that varies
// between identical runs and sits on its own line in the JSON form.
std::string report_to_json(const RunReport& report);
std::string report_to_csv(const RunReport& report);

// Resolved worker count: explicit > 0, else LCMSIM_THREADS, else hardware.
int resolve_threads(int requested);

// Runs body(replica_index) for all indices in [0, replicas) on the resolved
// number of worker threads. Bodies must only write replica-indexed slots.
void parallel_replicas(std::uint64_t replicas, int threads,
                       const std::function<void(std::uint64_t)>& body);

constexpr const char* kLibraryVersion = "lcmsim 0.1.0";

// zeta(3) / zeta(2): the limit of E[1 / gcd(U1, U2)].
constexpr double kCesaroConstant = 0.7307629694014385;

}  // namespace lcmsim
