#pragma once

#include <array>

#include "observe/linalg.hpp"
#include "observe/pebo.hpp"
#include "observe/plant.hpp"

namespace observe {

/// Lower bound kept on w so it never underflows to zero.
inline constexpr double kWFloor = 1e-300;

/**
 * @brief Regressor extension filters.
 *
 *   Y'     = -lambda Y     + lambda Psi^T z
 *   Omega' = -lambda Omega + lambda Psi^T Psi
 */
struct DremState {
    Matrix Y;      ///< (n+k) x 1
    Matrix Omega;  ///< (n+k) x (n+k)
    double lambda = 1.0;
};

/// Zero-initialised filters for a regression with `dim` unknowns.
DremState make_drem_state(std::size_t dim, double lambda);

/// One RK4 step with the regression sampled at t, t+h/2 and t+h.
DremState drem_step(const DremState& d, const std::array<Regression, 3>& stages, double h);

/// One RK4 step with the regression frozen over the step.
DremState drem_step(const DremState& d, const Regression& reg, double h);

/// Scalar regressions calY = Delta * theta obtained by mixing.
struct Mixed {
    Matrix calY;  ///< adj(Omega) Y
    double Delta = 0.0;  ///< det(Omega)
};

Mixed mix(const DremState& d);

/// Gradient estimator state together with the decay factor w.
struct FctState {
    Matrix theta_hat;
    Matrix theta_hat0;
    double w = 1.0;
    double gamma = 1.0;
    double mu = 0.01;
    /// Set once an update overflowed and was replaced by its large-gain limit.
    bool saturated = false;
};

/// theta_hat starts at theta_hat0 (zero when empty) and w at 1.
/// Throws ConfigError unless gamma > 0 and mu in (0,1).
FctState make_fct_state(std::size_t dim, double gamma, double mu, Matrix theta_hat0 = {});

/**
 * Exponential-integrator step of
 *   theta_hat' = -gamma Delta (Delta theta_hat - calY),   w' = -gamma Delta^2 w
 * with Delta and calY frozen over the step. Exact for frozen inputs.
 */
FctState gradient_step(const FctState& f, const Matrix& calY, double Delta, double h);

/**
 * Same update with Delta^2 and Delta*calY averaged by the trapezoidal rule
 * between the step's endpoints. The decay exponent is then the trapezoidal
 * integral of gamma Delta^2, and since Delta calY = Delta^2 theta the error
 * theta_hat - theta still decays by exactly the same factor as w.
 */
FctState gradient_step(const FctState& f, const Mixed& start, const Mixed& end, double h);

/// w if w <= 1 - mu, otherwise 1 - mu. Throws ConfigError for mu outside (0,1).
double clip(double w, double mu);

/// (theta_hat - w_c theta_hat0) / (1 - w_c) with w_c = clip(w, mu).
Matrix theta_fct(const FctState& f);

/// rho = -ln(1 - mu) / gamma, the excitation energy at which w reaches 1 - mu.
double ie_threshold(double gamma, double mu);

struct StateEstimate {
    Matrix x_hat;    ///< n x 1
    Matrix eta_hat;  ///< q x 1
};

/**
 *   x_hat   = zeta - PhiA theta_e + G theta_Gamma
 *   eta_hat = H PhiGamma theta_Gamma
 * where theta = col(theta_e, theta_Gamma) is the supplied estimate.
 */
StateEstimate reconstruct(const PeboFilters& filters, const SystemModel& model,
                          const Matrix& theta, double t);

}  // namespace observe
