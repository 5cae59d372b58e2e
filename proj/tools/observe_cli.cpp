// observe: command-line driver for the delayed-output adaptive observer.
//
//   observe run --config <path> [--case C1|C2|C3] [--gamma <float>] [--out <path>]
//   observe paper --case C1 --gamma 1e12 [--out <path>]
//   observe selftest
//   observe sweep --config <path> --gamma-list 1e10,1e12 [--out <path>]
//
// Exit codes: 0 success, 2 config error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "observe/checks.hpp"
#include "observe/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

using observe::ScenarioConfig;

void print_summary(std::ostream& os, const ScenarioConfig& config,
                   const observe::ConvergenceMetrics& m) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "case=%s gamma=%g lambda=%g mu=%g h=%g T=%g\n"
                  "  t_c=%s  int Delta^2=%.6e  rho=%.6e\n"
                  "  max |x-xhat| after t_c=%.3e  max |eta-etahat| after t_c=%.3e\n"
                  "  sup |x|=%.4g |xi|=%.4g |zeta|=%.4g |G|=%.4g |PhiA|=%.4g |Omega|=%.4g\n",
                  observe::to_string(config.delay_case).c_str(), config.gamma, config.lambda,
                  config.mu, config.h, config.T,
                  m.t_c ? std::to_string(*m.t_c).c_str() : "none (not interval exciting)",
                  m.excitation_integral, m.rho, m.max_state_error_after_tc,
                  m.max_eta_error_after_tc, m.bounds.x, m.bounds.xi, m.bounds.zeta, m.bounds.G,
                  m.bounds.PhiA, m.bounds.Omega);
    os << buf;
}

// Runs one scenario and writes its CSV to config.out_path, or stdout when empty.
void run_and_write(const ScenarioConfig& config) {
    const observe::SystemModel model = observe::model_for(config);
    const observe::RunResult result = observe::run_scenario(model, config);
    if (config.out_path.empty()) {
        observe::write_csv(std::cout, result.records);
    } else {
        std::ofstream out(config.out_path, std::ios::binary);
        if (!out) throw observe::ConfigError("cannot write '" + config.out_path + "'");
        observe::write_csv(out, result.records);
    }
    print_summary(std::cerr, config, observe::convergence_metrics(result, config));
}

std::string with_gamma_suffix(const std::string& path, double gamma) {
    std::filesystem::path p(path);
    char tag[32];
    std::snprintf(tag, sizeof tag, "_gamma%g", gamma);
    const std::string stem = p.stem().string() + tag + p.extension().string();
    return (p.parent_path() / stem).string();
}

std::vector<double> parse_gamma_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, end - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw observe::ConfigError("bad entry '" + item + "' in --gamma-list");
        }
        start = end + 1;
    }
    return out;
}

int selftest() {
    bool all = true;
    for (const auto& c : observe::checks::run_selftest()) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "\n       " << c.detail
                  << '\n';
        all = all && c.passed;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive state observer for affine systems with delayed output"};
    app.require_subcommand(1);

    std::string config_path;
    std::string case_name;
    std::optional<double> gamma;
    std::string out_path;
    std::string gamma_list;

    auto* run = app.add_subcommand("run", "Run a scenario from a JSON config");
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--case", case_name, "Delay case override (C1, C2, C3)");
    run->add_option("--gamma", gamma, "Adaptation gain override");
    run->add_option("--out", out_path, "CSV output path (stdout if omitted)");

    auto* paper = app.add_subcommand("paper", "Run the built-in example");
    paper->add_option("--case", case_name, "Delay case (C1, C2, C3)")->default_val("C1");
    paper->add_option("--gamma", gamma, "Adaptation gain");
    paper->add_option("--out", out_path, "CSV output path (stdout if omitted)");

    auto* self = app.add_subcommand("selftest", "Run the invariant suites");

    auto* sweep = app.add_subcommand("sweep", "Run one config for several gains in parallel");
    sweep->add_option("--config", config_path, "Config file")->required();
    sweep->add_option("--gamma-list", gamma_list, "Comma-separated gains")->required();
    sweep->add_option("--out", out_path, "Base CSV path; _gamma<g> is appended per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*self) return selftest();

        if (*paper) {
            ScenarioConfig config = observe::paper_example(observe::parse_delay_case(case_name)).second;
            if (gamma) config.gamma = *gamma;
            config.out_path = out_path;
            config.validate();
            run_and_write(config);
            return 0;
        }

        ScenarioConfig config = observe::load_config(config_path);
        if (!case_name.empty()) config.delay_case = observe::parse_delay_case(case_name);
        if (!out_path.empty()) config.out_path = out_path;

        if (*run) {
            if (gamma) config.gamma = *gamma;
            config.validate();
            run_and_write(config);
            return 0;
        }

        if (config.out_path.empty()) {
            throw observe::ConfigError("sweep needs --out or out_path in the config");
        }
        std::vector<ScenarioConfig> configs;
        for (double g : parse_gamma_list(gamma_list)) {
            ScenarioConfig c = config;
            c.gamma = g;
            c.out_path = with_gamma_suffix(config.out_path, g);
            c.validate();
            configs.push_back(std::move(c));
        }
        std::vector<std::future<void>> jobs;
        for (const auto& c : configs) {
            jobs.push_back(std::async(std::launch::async, [&c] {
                const observe::SystemModel model = observe::model_for(c);
                const observe::RunResult result = observe::run_scenario(model, c);
                std::ofstream out(c.out_path, std::ios::binary);
                if (!out) throw observe::ConfigError("cannot write '" + c.out_path + "'");
                observe::write_csv(out, result.records);
            }));
        }
        for (auto& j : jobs) j.get();
        for (const auto& c : configs) std::cerr << "wrote " << c.out_path << '\n';
        return 0;
    } catch (const observe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const observe::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const observe::OutOfRangeError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}
