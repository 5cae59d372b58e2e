#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "observe/scenario.hpp"

namespace observe::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/**
 * @brief Everything measured along one built-in run.
 *
 * Reference values are computed from independent routes: closed-form
 * oscillator solution for PhiGamma, trapezoidal quadrature of tr A and of the
 * logged Delta^2, and the ground-truth theta built from the initial conditions.
 */
struct RunTrace {
    DelayCase delay_case = DelayCase::C1;
    double gamma = 0.0;
    ScenarioConfig config;
    RunResult run;
    ConvergenceMetrics metrics;
    Matrix theta;  ///< col(zeta(0) - x(0) + G(0) xi(0), xi(0))
    double seconds = 0.0;

    double max_lre_residual = 0.0;         ///< max |z - Psi theta|
    double max_estimator_identity = 0.0;   ///< max |(theta_hat - theta) - w (theta_hat0 - theta)|
    double max_w_vs_quadrature = 0.0;      ///< max |w - exp(-gamma int Delta^2)|
    double max_phigamma_error = 0.0;       ///< max |PhiGamma - closed form|
    double max_liouville_rel_error = 0.0;  ///< max |det PhiA - exp(int tr A)| / exp(int tr A)
    double max_error_propagation = 0.0;    ///< max |e(t) - PhiA(t) e(0)|
    double max_omega_asymmetry = 0.0;
    double max_mixing_residual = 0.0;      ///< max |calY - Delta theta| / (1 + |Y|)
    std::optional<double> t_ie;            ///< first grid time with trapezoidal int Delta^2 >= rho
    std::optional<double> theta_fct_error_after_tc;  ///< max componentwise, t >= t_c
};

/// Runs one built-in case with the given gain and collects the trace.
RunTrace trace_paper_run(DelayCase delay_case, double gamma);

/// Closed-form fundamental matrix of the built-in exosystem.
Matrix exosystem_fundamental(double t);

/// Criteria over the six built-in runs (three delay cases, gamma 1e10 and 1e12).
std::vector<CheckResult> paper_checks(const std::vector<RunTrace>& traces);

/// Additional properties: error propagation, Omega symmetry, mixing
/// identity, boundedness and delay-case independence of the limit.
std::vector<CheckResult> invariant_checks(const std::vector<RunTrace>& traces);

/// adj(M) M = det(M) I over random matrices, and the mixing identity for
/// regular and singular Omega.
CheckResult algebraic_check(std::uint32_t seed = 20240601, int samples = 1000);

/// Two in-process runs of C1 with gamma 1e12 must give identical CSV text.
CheckResult determinism_check();

/// The full invariant suite used by `observe selftest`.
std::vector<CheckResult> run_selftest();

}  // namespace observe::checks
