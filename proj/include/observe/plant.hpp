#pragma once

#include <cstddef>
#include <functional>

#include "observe/history.hpp"
#include "observe/linalg.hpp"

namespace observe {

/// Matrix-valued function of (input, measured output, time).
using SignalMap = std::function<Matrix(const Matrix& u, const Matrix& y, double t)>;
/// Matrix-valued function of time only.
using TimeMap = std::function<Matrix(double t)>;
/// Delayed output y(t) as seen by the plant and the observer.
using Measurement = std::function<Matrix(double t)>;

/// Output signal the coefficient maps A, B, D are evaluated on.
enum class CoefficientOutput {
    Instantaneous,  ///< y = C(t) x(t)
    Delayed,        ///< y = C(phi(t)) x(phi(t)), the measured output
};

/**
 * @brief Affine-in-the-states plant with exosystem-generated parameters.
 *
 *   x' = A(u,y,t) x + D(u,y,t) eta + B(u,y,t)
 *   y  = C(phi(t)) x(phi(t)),   phi(t) = max(t0, t - d(t))
 *   eta = H(t) xi,  xi' = Gamma(t) xi
 */
struct SystemModel {
    std::size_t n = 0;  ///< state
    std::size_t m = 0;  ///< input
    std::size_t p = 0;  ///< output
    std::size_t q = 0;  ///< parameter eta
    std::size_t k = 0;  ///< exosystem

    SignalMap matA;  ///< n x n
    SignalMap matB;  ///< n x 1
    SignalMap matD;  ///< n x q
    TimeMap matC;    ///< p x n
    TimeMap matH;    ///< q x k
    TimeMap matGamma;  ///< k x k
    TimeMap input;   ///< m x 1
    DelayFunction delay;
    CoefficientOutput coefficient_output = CoefficientOutput::Instantaneous;
    double t0 = 0.0;

    /// Throws ConfigError when a map is missing or returns the wrong shape at t0.
    void validate() const;
};

/// Coefficients of the LTV rewrite evaluated along a measured output.
struct LtvCoefficients {
    Matrix A;
    Matrix B;
    Matrix D;
};

/// A(t), B(t), D(t) for a given value of the coefficient output y.
LtvCoefficients ltv_at(const SystemModel& model, const Matrix& y, double t);

/// Value of the coefficient output at a stage time: C(t) x for
/// Instantaneous models, `measured(t)` for Delayed ones.
Matrix coefficient_output(const SystemModel& model, const Measurement& measured, double t,
                          const Matrix& x);

struct PlantState {
    Matrix x;   ///< n x 1
    Matrix xi;  ///< k x 1
};

PlantState operator+(const PlantState& a, const PlantState& b);
PlantState operator*(const PlantState& a, double s);
bool is_finite(const PlantState& s);

/// eta = H(t) xi.
Matrix eta_of(const SystemModel& model, double t, const Matrix& xi);

/// y(t) = C(phi+) x(phi+). Throws OutOfRangeError if the history does not cover phi+.
Matrix measure(const SystemModel& model, const SignalHistory& x_history, double t);

/**
 * Delayed output for RK4 stage times. Identical to `measure` whenever phi+(t)
 * is recorded; if phi+(t) lies past the newest sample (delay shorter than the
 * step) the newest sample is used.
 */
Measurement delayed_measurement(const SystemModel& model, const SignalHistory& x_history);

/// One RK4 step of (x, xi). `y` is the delayed measurement; it enters the
/// coefficients only for Delayed models.
PlantState plant_step(const SystemModel& model, const PlantState& state, const Measurement& y,
                      double t, double h);

/// Same, with y read from the recorded state trajectory.
PlantState plant_step(const SystemModel& model, const PlantState& state,
                      const SignalHistory& x_history, double t, double h);

}  // namespace observe
