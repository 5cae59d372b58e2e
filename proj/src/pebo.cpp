#include "observe/pebo.hpp"

#include <algorithm>

namespace observe {

PeboFilters operator+(const PeboFilters& a, const PeboFilters& b) {
    return {a.zeta + b.zeta, a.G + b.G, a.PhiA + b.PhiA, a.PhiGamma + b.PhiGamma};
}

PeboFilters operator*(const PeboFilters& a, double s) {
    return {a.zeta * s, a.G * s, a.PhiA * s, a.PhiGamma * s};
}

bool is_finite(const PeboFilters& f) {
    return f.zeta.all_finite() && f.G.all_finite() && f.PhiA.all_finite() &&
           f.PhiGamma.all_finite();
}

PeboFilters filter_derivative(const SystemModel& model, const LtvCoefficients& c,
                              const PeboFilters& s, double t) {
    const Matrix M = c.D * model.matH(t) * s.PhiGamma;
    return PeboFilters{c.A * s.zeta + c.B, c.A * s.G + M, c.A * s.PhiA,
                       model.matGamma(t) * s.PhiGamma};
}

PeboFilters observer_step(const SystemModel& model, const PeboFilters& filters,
                          const Measurement& y_coef, double t, double h) {
    auto field = [&](double tau, const PeboFilters& s) {
        return filter_derivative(model, ltv_at(model, y_coef(tau), tau), s, tau);
    };
    return rk4_step(field, t, filters, h);
}

CoupledState operator+(const CoupledState& a, const CoupledState& b) {
    return {a.plant + b.plant, a.filters + b.filters};
}

CoupledState operator*(const CoupledState& a, double s) {
    return {a.plant * s, a.filters * s};
}

bool is_finite(const CoupledState& s) { return is_finite(s.plant) && is_finite(s.filters); }

CoupledState coupled_step(const SystemModel& model, const CoupledState& state,
                          const Measurement& measured, double t, double h) {
    auto field = [&](double tau, const CoupledState& s) {
        const LtvCoefficients c =
            ltv_at(model, coefficient_output(model, measured, tau, s.plant.x), tau);
        const Matrix eta = model.matH(tau) * s.plant.xi;
        PlantState dp{c.A * s.plant.x + c.D * eta + c.B, model.matGamma(tau) * s.plant.xi};
        return CoupledState{std::move(dp), filter_derivative(model, c, s.filters, tau)};
    };
    return rk4_step(field, t, state, h);
}

PeboObserver::PeboObserver(const SystemModel& model, Matrix zeta0, Matrix G0)
    : model_(&model), time_(model.t0) {
    if (zeta0.empty()) zeta0 = Matrix::zeros(model.n, 1);
    if (G0.empty()) G0 = Matrix::zeros(model.n, model.k);
    if (zeta0.rows() != model.n || zeta0.cols() != 1) {
        throw DimensionError("PeboObserver: zeta0 must be n x 1");
    }
    if (G0.rows() != model.n || G0.cols() != model.k) {
        throw DimensionError("PeboObserver: G0 must be n x k");
    }
    filters_ = {std::move(zeta0), std::move(G0), Matrix::identity(model.n),
                Matrix::identity(model.k)};
    initial_ = filters_;
    zeta_hist_.append(time_, filters_.zeta);
    G_hist_.append(time_, filters_.G);
    PhiA_hist_.append(time_, filters_.PhiA);
}

void PeboObserver::advance(const Measurement& y_coef, double t, double h,
                           std::optional<double> t_next) {
    commit(observer_step(*model_, filters_, y_coef, t, h), t_next.value_or(t + h));
}

void PeboObserver::commit(PeboFilters next, double t_next) {
    filters_ = std::move(next);
    time_ = t_next;
    zeta_hist_.append(time_, filters_.zeta);
    G_hist_.append(time_, filters_.G);
    PhiA_hist_.append(time_, filters_.PhiA);
}

void PeboObserver::discard_before(double t_keep) {
    zeta_hist_.discard_before(t_keep);
    G_hist_.discard_before(t_keep);
    PhiA_hist_.discard_before(t_keep);
}

Regression regressor(const SystemModel& model, const PeboObserver& obs, const Matrix& y,
                     double t) {
    const double phi =
        std::min(delayed_time(t, model.delay, model.t0), obs.zeta_history().back_time());
    const Matrix C = model.matC(phi);
    Regression reg;
    reg.Psi = C * hcat(obs.PhiA_history().sample(phi), -obs.G_history().sample(phi));
    reg.z = C * obs.zeta_history().sample(phi) - y;
    return reg;
}

}  // namespace observe
