#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "observe/drem_fct.hpp"
#include "observe/linalg.hpp"
#include "observe/pebo.hpp"
#include "observe/plant.hpp"

namespace observe {

enum class DelayCase { C1, C2, C3, Custom };

/// Parses "C1", "C2", "C3" or "custom". Throws ConfigError otherwise.
DelayCase parse_delay_case(std::string_view name);
std::string to_string(DelayCase c);

struct ScenarioConfig {
    std::string model_id = "paper";
    Matrix x0;
    Matrix xi0;
    double h = 1e-3;
    double T = 30.0;
    double lambda = 1.0;
    double gamma = 1e10;
    double mu = 0.01;
    DelayCase delay_case = DelayCase::C1;
    std::uint64_t seed = 0;  // reserved; runs are deterministic
    std::string out_path;

    // Observer initial conditions. Empty means zero. Not exposed in the JSON schema.
    Matrix zeta0;
    Matrix G0;
    Matrix theta_hat0;

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

/// Built-in example: n=2, m=p=1, q=2, k=3 with the requested delay profile.
std::pair<SystemModel, ScenarioConfig> paper_example(DelayCase delay_case);

/// Delay profile of a built-in case. Throws ConfigError for DelayCase::Custom.
DelayFunction paper_delay(DelayCase delay_case);

/**
 * Parses a flat JSON object. Keys: model_id, x0, xi0, h, T, lambda, gamma,
 * mu, delay_case, out_path, seed. Unknown keys, malformed JSON and invalid
 * values all raise ConfigError. Missing keys take the defaults above, and
 * x0/xi0 fall back to the built-in example's initial conditions.
 */
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::string& path);

/// Builds the model a config refers to. Only the built-in "paper" model can
/// be named from a config file; custom models are constructed in code.
SystemModel model_for(const ScenarioConfig& config);

struct EstimateRecord {
    double t = 0.0;
    Matrix x;
    Matrix x_hat;
    Matrix eta;
    Matrix eta_hat;
    Matrix theta_fct;
    Matrix theta_hat;
    double w = 1.0;
    double Delta = 0.0;
    bool converged = false;
};

/// Full internal state on a grid point, handed to an optional probe.
struct StepSnapshot {
    double t;
    const PlantState& plant;
    const PeboFilters& filters;
    const Matrix& y;
    const Regression& regression;
    const DremState& drem;
    const Mixed& mixed;
    const FctState& fct;
};

using StepProbe = std::function<void(const StepSnapshot&)>;

/// Largest norms seen during a run, a numerical stand-in for the uniform
/// bounds the observer's stability argument needs.
struct SignalBounds {
    double x = 0.0;
    double xi = 0.0;
    double zeta = 0.0;
    double G = 0.0;
    double PhiA = 0.0;
    double PhiGamma = 0.0;
    double Y = 0.0;
    double Omega = 0.0;
};

struct RunResult {
    std::vector<EstimateRecord> records;
    SignalBounds bounds;
    bool saturated = false;
};

/**
 * Co-simulates plant, PEBO filters, DREM and the gradient estimator on the
 * grid t_i = t0 + i h, i = 0..round(T/h), emitting one record per grid point.
 * Throws NumericFailure with the offending time if any signal blows up.
 */
RunResult run_scenario(const SystemModel& model, const ScenarioConfig& config,
                       const StepProbe& probe = {});

struct ConvergenceMetrics {
    std::optional<double> t_c;  ///< first grid time with w <= 1 - mu
    bool interval_exciting = false;
    double max_state_error_after_tc = 0.0;
    double max_eta_error_after_tc = 0.0;
    double excitation_integral = 0.0;  ///< trapezoidal integral of Delta^2 over the run
    double rho = 0.0;
    SignalBounds bounds;
};

ConvergenceMetrics convergence_metrics(const RunResult& run, const ScenarioConfig& config);

/// Header plus one row per record; floats with 17 significant digits.
void write_csv(std::ostream& os, const std::vector<EstimateRecord>& records);
std::string csv_header(std::size_t n, std::size_t q, std::size_t dim);

}  // namespace observe
