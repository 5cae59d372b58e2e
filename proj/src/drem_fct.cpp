#include "observe/drem_fct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace observe {

namespace {

void check_gains(double gamma, double mu) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("gamma must be positive and finite");
    }
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("mu must be in (0,1)");
}

// (1 - e^{-a}) / a, continuous at a = 0.
double phi1(double a) { return a == 0.0 ? 1.0 : -std::expm1(-a) / a; }

// Shared update for a frozen or averaged pair (Delta^2, Delta*calY).
FctState exponential_update(const FctState& f, double delta_sq, const Matrix& delta_caly,
                            double h) {
    FctState next = f;
    if (delta_sq == 0.0) return next;
    const double a = f.gamma * delta_sq * h;
    if (!std::isfinite(a)) {
        // a -> infinity: theta_hat jumps onto the regression solution, w onto its floor.
        next.theta_hat = delta_caly * (1.0 / delta_sq);
        next.w = kWFloor;
        next.saturated = true;
        return next;
    }
    const double decay = std::exp(-a);
    next.theta_hat = f.theta_hat * decay + delta_caly * (f.gamma * h * phi1(a));
    next.w = std::max(f.w * decay, kWFloor);
    return next;
}

}  // namespace

DremState make_drem_state(std::size_t dim, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    return {Matrix::zeros(dim, 1), Matrix::zeros(dim, dim), lambda};
}

DremState drem_step(const DremState& d, const std::array<Regression, 3>& stages, double h) {
    const std::size_t dim = d.Y.rows();
    // Y and Omega share the same lag, so integrate [Y | Omega] as one matrix.
    auto field = [&](double tau, const Matrix& s) {
        const Regression& r = tau == 0.0 ? stages[0] : (tau < h ? stages[1] : stages[2]);
        if (r.Psi.cols() != dim) throw DimensionError("drem_step: Psi has wrong column count");
        const Matrix PsiT = r.Psi.transpose();
        return (PsiT * hcat(r.z, r.Psi) - s) * d.lambda;
    };
    const Matrix packed = rk4_step(field, 0.0, hcat(d.Y, d.Omega), h);
    return {packed.block(0, 0, dim, 1), packed.block(0, 1, dim, dim), d.lambda};
}

DremState drem_step(const DremState& d, const Regression& reg, double h) {
    return drem_step(d, {reg, reg, reg}, h);
}

Mixed mix(const DremState& d) { return {adjugate(d.Omega) * d.Y, determinant(d.Omega)}; }

FctState make_fct_state(std::size_t dim, double gamma, double mu, Matrix theta_hat0) {
    check_gains(gamma, mu);
    if (theta_hat0.empty()) theta_hat0 = Matrix::zeros(dim, 1);
    if (theta_hat0.rows() != dim || theta_hat0.cols() != 1) {
        throw DimensionError("make_fct_state: theta_hat0 must be " + std::to_string(dim) + "x1");
    }
    FctState f;
    f.theta_hat = theta_hat0;
    f.theta_hat0 = std::move(theta_hat0);
    f.gamma = gamma;
    f.mu = mu;
    return f;
}

FctState gradient_step(const FctState& f, const Matrix& calY, double Delta, double h) {
    return exponential_update(f, Delta * Delta, calY * Delta, h);
}

FctState gradient_step(const FctState& f, const Mixed& start, const Mixed& end, double h) {
    const double delta_sq = 0.5 * (start.Delta * start.Delta + end.Delta * end.Delta);
    const Matrix delta_caly = (start.calY * start.Delta + end.calY * end.Delta) * 0.5;
    return exponential_update(f, delta_sq, delta_caly, h);
}

double clip(double w, double mu) {
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("mu must be in (0,1)");
    return w <= 1.0 - mu ? w : 1.0 - mu;
}

Matrix theta_fct(const FctState& f) {
    const double wc = clip(f.w, f.mu);
    return (f.theta_hat - f.theta_hat0 * wc) * (1.0 / (1.0 - wc));
}

double ie_threshold(double gamma, double mu) {
    check_gains(gamma, mu);
    return -std::log1p(-mu) / gamma;
}

StateEstimate reconstruct(const PeboFilters& filters, const SystemModel& model,
                          const Matrix& theta, double t) {
    const std::size_t n = model.n;
    const std::size_t k = model.k;
    if (theta.rows() != n + k || theta.cols() != 1) {
        throw DimensionError("reconstruct: theta must be (n+k) x 1");
    }
    const Matrix theta_e = theta.block(0, 0, n, 1);
    const Matrix theta_gamma = theta.block(n, 0, k, 1);
    return {filters.zeta - filters.PhiA * theta_e + filters.G * theta_gamma,
            model.matH(t) * filters.PhiGamma * theta_gamma};
}

}  // namespace observe
