// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "observe/checks.hpp"

#ifndef OBSERVE_CLI_PATH
#error "OBSERVE_CLI_PATH must point at the observe executable"
#endif

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

observe::checks::CheckResult cli_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "observe_acceptance";
    fs::create_directories(dir);
    const fs::path a = dir / "run_a.csv";
    const fs::path b = dir / "run_b.csv";
    fs::remove(a);
    fs::remove(b);
    auto invoke = [](const fs::path& out) {
        const std::string cmd = std::string("\"") + OBSERVE_CLI_PATH +
                                "\" paper --case C1 --gamma 1e12 --out \"" + out.string() +
                                "\" 2>/dev/null";
        return std::system(cmd.c_str());
    };
    const int ra = invoke(a);
    const int rb = invoke(b);
    const std::string ca = slurp(a);
    const std::string cb = slurp(b);
    observe::checks::CheckResult c;
    c.name = "criterion 8: `observe paper --case C1 --gamma 1e12` twice gives byte-identical CSVs";
    c.passed = ra == 0 && rb == 0 && !ca.empty() && ca == cb;
    c.detail = "exit codes " + std::to_string(ra) + "/" + std::to_string(rb) + ", " +
               std::to_string(ca.size()) + " bytes";
    return c;
}

}  // namespace

int main() {
    using namespace observe;
    std::vector<checks::RunTrace> traces;
    for (DelayCase dc : {DelayCase::C1, DelayCase::C2, DelayCase::C3}) {
        for (double gamma : {1e10, 1e12}) traces.push_back(checks::trace_paper_run(dc, gamma));
    }

    std::vector<checks::CheckResult> results = checks::paper_checks(traces);
    results.insert(results.begin() + 3, checks::algebraic_check());
    results.push_back(cli_determinism());

    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << "\n       " << r.detail << '\n';
        all = all && r.passed;
    }
    std::cout << (all ? "acceptance: all criteria passed\n" : "acceptance: FAILED\n");
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
