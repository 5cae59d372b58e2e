#pragma once

#include <optional>

#include "observe/history.hpp"
#include "observe/linalg.hpp"
#include "observe/plant.hpp"

namespace observe {

/**
 * @brief Auxiliary PEBO filters.
 *
 *   zeta'     = A zeta + B
 *   G'        = A G + D H PhiGamma
 *   PhiA'     = A PhiA,          PhiA(t0) = I
 *   PhiGamma' = Gamma PhiGamma,  PhiGamma(t0) = I
 *
 * with A, B, D evaluated along the delayed measurement.
 */
struct PeboFilters {
    Matrix zeta;      ///< n x 1
    Matrix G;         ///< n x k
    Matrix PhiA;      ///< n x n
    Matrix PhiGamma;  ///< k x k
};

PeboFilters operator+(const PeboFilters& a, const PeboFilters& b);
PeboFilters operator*(const PeboFilters& a, double s);
bool is_finite(const PeboFilters& f);

/// Time derivative of the filters for given coefficients at time t.
PeboFilters filter_derivative(const SystemModel& model, const LtvCoefficients& c,
                              const PeboFilters& s, double t);

/// One RK4 step of all four filters, with A, B, D evaluated on `y_coef`
/// (the signal the model's coefficient maps read) at the stage times.
PeboFilters observer_step(const SystemModel& model, const PeboFilters& filters,
                          const Measurement& y_coef, double t, double h);

/// Plant and observer advanced together so that every RK4 stage uses the
/// same A, B, D in both.
struct CoupledState {
    PlantState plant;
    PeboFilters filters;
};

CoupledState operator+(const CoupledState& a, const CoupledState& b);
CoupledState operator*(const CoupledState& a, double s);
bool is_finite(const CoupledState& s);

/// `measured` is the delayed output; it enters the coefficients only for Delayed models.
CoupledState coupled_step(const SystemModel& model, const CoupledState& state,
                          const Measurement& measured, double t, double h);

/// Linear regression z = Psi theta, theta = col(theta_e, theta_Gamma).
struct Regression {
    Matrix Psi;  ///< p x (n+k)
    Matrix z;    ///< p x 1
};

/**
 * @brief PEBO filters plus the trajectories the delayed regressor reads.
 *
 * Owns the histories of zeta, G and PhiA on the integration grid.
 */
class PeboObserver {
   public:
    /// zeta0 (n x 1) and G0 (n x k) default to zero when left empty.
    PeboObserver(const SystemModel& model, Matrix zeta0 = {}, Matrix G0 = {});

    /// Advances the filters from t to t+h (coefficients on `y_coef`) and
    /// records the new sample at t_next, which defaults to t+h.
    void advance(const Measurement& y_coef, double t, double h,
                 std::optional<double> t_next = {});

    /// Records filters that were integrated elsewhere (see coupled_step).
    void commit(PeboFilters next, double t_next);

    /// Drops history older than needed to answer lookups at t_keep.
    void discard_before(double t_keep);

    const PeboFilters& filters() const { return filters_; }
    const PeboFilters& initial() const { return initial_; }
    double time() const { return time_; }

    const SignalHistory& zeta_history() const { return zeta_hist_; }
    const SignalHistory& G_history() const { return G_hist_; }
    const SignalHistory& PhiA_history() const { return PhiA_hist_; }

   private:
    const SystemModel* model_;
    PeboFilters filters_;
    PeboFilters initial_;
    double time_;
    SignalHistory zeta_hist_;
    SignalHistory G_hist_;
    SignalHistory PhiA_hist_;
};

/**
 * Psi(t) = C(phi) [PhiA(phi) | -G(phi)],  z(t) = C(phi) zeta(phi) - y,
 * with phi the clamped delayed time. A phi past the newest recorded sample
 * uses the newest sample, matching `delayed_measurement`.
 */
Regression regressor(const SystemModel& model, const PeboObserver& obs, const Matrix& y, double t);

}  // namespace observe
