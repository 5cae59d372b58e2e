#include "observe/plant.hpp"

#include <algorithm>
#include <string>

namespace observe {

namespace {

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        throw ConfigError(std::string("SystemModel: ") + name + " is " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                          "x" + std::to_string(cols));
    }
}

}  // namespace

void SystemModel::validate() const {
    if (!matA || !matB || !matD || !matC || !matH || !matGamma || !input || !delay.d) {
        throw ConfigError("SystemModel: every matrix map, the input and the delay must be set");
    }
    if (n == 0 || p == 0 || k == 0) throw ConfigError("SystemModel: n, p and k must be positive");
    const Matrix u = input(t0);
    check_shape(u, m, 1, "input");
    const Matrix y(p, 1);
    check_shape(matA(u, y, t0), n, n, "A");
    check_shape(matB(u, y, t0), n, 1, "B");
    check_shape(matD(u, y, t0), n, q, "D");
    check_shape(matC(t0), p, n, "C");
    check_shape(matH(t0), q, k, "H");
    check_shape(matGamma(t0), k, k, "Gamma");
    const double d0 = delay(t0);
    if (!(d0 >= 0.0) || d0 > delay.d_max) {
        throw ConfigError("SystemModel: delay at t0 outside [0, d_max]");
    }
}

LtvCoefficients ltv_at(const SystemModel& model, const Matrix& y, double t) {
    const Matrix u = model.input(t);
    return {model.matA(u, y, t), model.matB(u, y, t), model.matD(u, y, t)};
}

Matrix coefficient_output(const SystemModel& model, const Measurement& measured, double t,
                          const Matrix& x) {
    if (model.coefficient_output == CoefficientOutput::Delayed) return measured(t);
    return model.matC(t) * x;
}

PlantState operator+(const PlantState& a, const PlantState& b) {
    return {a.x + b.x, a.xi + b.xi};
}

PlantState operator*(const PlantState& a, double s) { return {a.x * s, a.xi * s}; }

bool is_finite(const PlantState& s) { return s.x.all_finite() && s.xi.all_finite(); }

Matrix eta_of(const SystemModel& model, double t, const Matrix& xi) {
    const Matrix H = model.matH(t);
    if (xi.rows() != H.cols() || xi.cols() != 1) {
        throw DimensionError("eta_of: xi must be " + std::to_string(H.cols()) + "x1");
    }
    return H * xi;
}

Matrix measure(const SystemModel& model, const SignalHistory& x_history, double t) {
    const double phi = delayed_time(t, model.delay, model.t0);
    return model.matC(phi) * x_history.sample(phi);
}

Measurement delayed_measurement(const SystemModel& model, const SignalHistory& x_history) {
    return [&model, &x_history](double t) {
        double phi = delayed_time(t, model.delay, model.t0);
        if (!x_history.empty()) phi = std::min(phi, x_history.back_time());
        return model.matC(phi) * x_history.sample(phi);
    };
}

PlantState plant_step(const SystemModel& model, const PlantState& state, const Measurement& y,
                      double t, double h) {
    auto field = [&](double tau, const PlantState& s) {
        const LtvCoefficients c = ltv_at(model, coefficient_output(model, y, tau, s.x), tau);
        const Matrix eta = model.matH(tau) * s.xi;
        return PlantState{c.A * s.x + c.D * eta + c.B, model.matGamma(tau) * s.xi};
    };
    return rk4_step(field, t, state, h);
}

PlantState plant_step(const SystemModel& model, const PlantState& state,
                      const SignalHistory& x_history, double t, double h) {
    return plant_step(model, state, delayed_measurement(model, x_history), t, h);
}

}  // namespace observe
