// Black-box contract tests for the command-line tool: exit codes, report
// determinism, thread invariance and the CSV format. Takes the binary path
// as its only argument.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::cout << "ok: " << what << "\n";
    } else {
        std::cout << "FAILED: " << what << "\n";
        ++failures;
    }
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& command) {
    const std::string wrapped = command + " 2>/dev/null";
    FILE* pipe = popen(wrapped.c_str(), "r");
    if (pipe == nullptr) return {-1, {}};
    std::string output;
    std::array<char, 4096> buffer{};
    std::size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        output.append(buffer.data(), got);
    }
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string strip_wall_time(std::string text) {
    return std::regex_replace(text, std::regex("\"wall_ms\": [0-9.e+-]+"),
                              "\"wall_ms\": 0");
}

std::string metrics_section(const std::string& text) {
    const std::size_t begin = text.find("\"metrics\"");
    const std::size_t end = text.find("\"all_pass\"");
    if (begin == std::string::npos || end == std::string::npos) return {};
    return text.substr(begin, end - begin);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: cli_contract <path-to-lcmsim>\n";
        return 2;
    }
    const std::string cli = argv[1];

    // hand-checkable value: c_n(10, 1) = sum_p log p floor(10/p)/10
    {
        const RunResult r = run(cli + " exact --what c_n --n 10 --y 1");
        check(r.exit_code == 0, "exact exits 0");
        check(r.output.find("1.19263587427275") != std::string::npos,
              "exact c_n(10, 1) value");
    }

    // passing experiment exits 0; byte-identical reruns modulo wall time
    {
        const std::string cmd = cli + " verify-tau --n 100 --m 20 --replicas 20000 --seed 7";
        const RunResult a = run(cmd);
        const RunResult b = run(cmd);
        check(a.exit_code == 0, "verify-tau exits 0 on pass");
        check(!a.output.empty(), "verify-tau writes a report");
        check(strip_wall_time(a.output) == strip_wall_time(b.output),
              "identical config gives byte-identical reports modulo wall time");
    }

    // thread-count invariance of the metrics section
    {
        const std::string base =
            cli + " gap --n 1000 --m 50 --replicas 3000 --seed 9 --threads ";
        const RunResult t1 = run(base + "1");
        const RunResult t4 = run(base + "4");
        const RunResult t8 = run(base + "8");
        check(!metrics_section(t1.output).empty(), "gap emits metrics");
        check(metrics_section(t1.output) == metrics_section(t4.output) &&
                  metrics_section(t1.output) == metrics_section(t8.output),
              "metrics invariant across --threads 1/4/8");
    }

    // the large marginal run is byte-stable too (the report carries regime,
    // centering and normalization alongside the metrics)
    {
        const std::string cmd =
            cli + " clt --case A --n 1000000 --m 1000 --t 1 --replicas 10000 --seed 7";
        const RunResult a = run(cmd);
        const RunResult b = run(cmd);
        check(strip_wall_time(a.output) == strip_wall_time(b.output),
              "clt reruns are byte-identical modulo wall time");
        check(a.output.find("\"regime\": \"A\"") != std::string::npos,
              "clt report embeds the regime label");
        check(a.output.find("\"centering\": \"c_n(floor(m t))\"") != std::string::npos,
              "clt report embeds the centering");
    }

    // usage errors exit 2
    {
        check(run(cli + " verify-tau --n 10 --m 20").exit_code == 2,
              "m > n is a usage error (exit 2)");
        check(run(cli + " no-such-subcommand").exit_code == 2,
              "unknown subcommand exits 2");
        check(run(cli + " verify-tau --m 20").exit_code == 2,
              "missing required --n exits 2");
    }

    // csv format: header plus one row per metric
    {
        const RunResult r =
            run(cli + " verify-tau --n 50 --m 5 --replicas 2000 --format csv");
        check(r.output.rfind("metric,t,estimate,target,tolerance,pass\n", 0) == 0,
              "csv header row");
        std::size_t rows = 0;
        for (const char c : r.output) rows += (c == '\n');
        check(rows == 7, "csv emits six metric rows");
    }

    // --out writes the report to a file and still uses the exit code
    {
        const std::string path = "/tmp/lcmsim_contract_report.json";
        std::remove(path.c_str());
        const RunResult r = run(cli + " exact --what tau_mean --n 4 --m 2 --out " + path);
        check(r.exit_code == 0, "exact with --out exits 0");
        FILE* f = std::fopen(path.c_str(), "r");
        check(f != nullptr, "--out creates the report file");
        if (f != nullptr) {
            std::array<char, 8192> buffer{};
            const std::size_t got = fread(buffer.data(), 1, buffer.size() - 1, f);
            std::fclose(f);
            const std::string content(buffer.data(), got);
            check(content.find("2.3333333333333") != std::string::npos,
                  "tau_mean(4,2) = 7/3 in the written report");
        }
        std::remove(path.c_str());
    }

    if (failures == 0) {
        std::cout << "all cli contract checks passed\n";
        return 0;
    }
    std::cout << failures << " cli contract checks failed\n";
    return 1;
}
