#include <cmath>
#include <random>

#include "doctest.h"
#include "observe/drem_fct.hpp"
#include "observe/scenario.hpp"

using observe::DremState;
using observe::FctState;
using observe::Matrix;
using observe::Regression;

TEST_CASE("drem_step: constant regression gives a first-order lag") {
    const Regression reg{Matrix{{1.0, 2.0, 0.5}}, Matrix::column({0.3})};
    DremState d = observe::make_drem_state(3, 2.0);
    const double h = 1e-2;
    for (int i = 0; i < 100; ++i) d = observe::drem_step(d, reg, h);
    // Global RK4 error for lambda h = 0.02 over t = 1 is about t (lambda h)^4 / 120 relative.
    const Matrix expected = reg.Psi.transpose() * reg.z * (1.0 - std::exp(-2.0));
    CHECK((d.Y - expected).max_abs() < 1e-8);
    const Matrix gram = reg.Psi.transpose() * reg.Psi * (1.0 - std::exp(-2.0));
    CHECK((d.Omega - gram).max_abs() < 1e-8);
}

TEST_CASE("drem_step: zero regressor decays Omega") {
    DremState d = observe::make_drem_state(2, 1.5);
    d.Omega = Matrix{{2.0, 1.0}, {1.0, 3.0}};
    const Regression reg{Matrix::zeros(1, 2), Matrix::column({0.0})};
    const double h = 1e-3;
    for (int i = 0; i < 1000; ++i) d = observe::drem_step(d, reg, h);
    CHECK((d.Omega - Matrix{{2.0, 1.0}, {1.0, 3.0}} * std::exp(-1.5)).max_abs() < 1e-12);
}

TEST_CASE("drem_step keeps Y = Omega theta when z = Psi theta") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix Psi(2, 3);
    for (double& v : Psi.data()) v = dist(rng);
    const Matrix theta = Matrix::column({0.4, -1.2, 2.0});
    DremState d = observe::make_drem_state(3, 1.0);
    d.Omega = Matrix{{2, 0.1, 0}, {0.1, 1, 0.3}, {0, 0.3, 1.5}};
    d.Y = d.Omega * theta;
    const Matrix Omega0 = d.Omega;
    const Regression reg{Psi, Psi * theta};
    const double h = 1e-3;
    for (int i = 1; i <= 2000; ++i) {
        d = observe::drem_step(d, reg, h);
        CHECK((d.Y - d.Omega * theta).max_abs() < 1e-12);
    }
    const double decay = std::exp(-2.0);
    const Matrix closed = Omega0 * decay + Psi.transpose() * Psi * (1.0 - decay);
    CHECK((d.Omega - closed).max_abs() < 1e-12);
}

TEST_CASE("mix") {
    DremState scalar;
    scalar.Omega = Matrix{{0.25}};
    scalar.Y = Matrix::column({3.0});
    const observe::Mixed m1 = observe::mix(scalar);
    CHECK(m1.calY[0] == 3.0);
    CHECK(m1.Delta == 0.25);

    // Rank one with power-of-two entries: exact zeros.
    const Matrix v = Matrix::column({1, 2, 4, 8, 16});
    DremState singular;
    singular.Omega = v * v.transpose();
    singular.Y = singular.Omega * Matrix::column({1, -1, 2, 0.5, 3});
    const observe::Mixed m2 = observe::mix(singular);
    CHECK(m2.Delta == 0.0);
    CHECK(m2.calY.max_abs() == 0.0);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        DremState d;
        d.Omega = Matrix(5, 5);
        for (double& x : d.Omega.data()) x = dist(rng);
        Matrix theta(5, 1);
        for (double& x : theta.data()) x = dist(rng);
        d.Y = d.Omega * theta;
        const observe::Mixed m = observe::mix(d);
        const double scale = observe::adjugate(d.Omega).norm() * d.Omega.norm() * theta.norm();
        CHECK((m.calY - theta * m.Delta).max_abs() <= 1e-9 * scale);
    }
}

TEST_CASE("gradient_step closed forms") {
    FctState f = observe::make_fct_state(2, 3.0, 0.01, Matrix::column({0.5, -0.5}));
    CHECK(observe::gradient_step(f, Matrix::column({9.0, 9.0}), 0.0, 0.1).theta_hat == f.theta_hat);
    CHECK(observe::gradient_step(f, Matrix::column({9.0, 9.0}), 0.0, 0.1).w == 1.0);

    const Matrix theta = Matrix::column({2.0, -1.0});
    const double delta = 0.7;
    const double h = 0.01;
    for (int i = 1; i <= 300; ++i) {
        f = observe::gradient_step(f, theta * delta, delta, h);
        const double decay = std::exp(-3.0 * delta * delta * i * h);
        CHECK(f.w == doctest::Approx(decay).epsilon(1e-12));
        CHECK(((f.theta_hat - theta) - (f.theta_hat0 - theta) * decay).max_abs() < 1e-12);
    }
}

TEST_CASE("trapezoidal gradient_step keeps theta_hat - theta = w (theta_hat0 - theta)") {
    const Matrix theta = Matrix::column({1.0, 0.3, -2.0});
    FctState f = observe::make_fct_state(3, 1e6, 0.01);
    const double h = 1e-3;
    double energy = 0.0;
    auto sample = [&](double t) {
        const double delta = 1e-3 * t * std::sin(5.0 * t);
        return observe::Mixed{theta * delta, delta};
    };
    for (int i = 0; i < 2000; ++i) {
        const auto a = sample(i * h);
        const auto b = sample((i + 1) * h);
        f = observe::gradient_step(f, a, b, h);
        energy += 0.5 * h * (a.Delta * a.Delta + b.Delta * b.Delta);
        CHECK(f.w == doctest::Approx(std::exp(-1e6 * energy)).epsilon(1e-12));
        CHECK(((f.theta_hat - theta) - (f.theta_hat0 - theta) * f.w).max_abs() < 1e-12);
    }
    CHECK(f.w < 0.99);
}

TEST_CASE("gradient_step saturates on overflow") {
    FctState f = observe::make_fct_state(1, 1e300, 0.5);
    const FctState next = observe::gradient_step(f, Matrix::column({4e10}), 1e10, 1.0);
    CHECK(next.saturated);
    CHECK(next.w == observe::kWFloor);
    CHECK(next.theta_hat[0] == doctest::Approx(4.0));
}

TEST_CASE("clip") {
    CHECK(observe::clip(0.5, 0.01) == 0.5);
    CHECK(observe::clip(0.999, 0.01) == 0.99);
    CHECK(observe::clip(1.0 - 0.01, 0.01) == 1.0 - 0.01);
    CHECK_THROWS_AS(observe::clip(0.5, 0.0), observe::ConfigError);
    CHECK_THROWS_AS(observe::clip(0.5, 1.0), observe::ConfigError);
}

TEST_CASE("theta_fct") {
    FctState f = observe::make_fct_state(2, 1.0, 0.01, Matrix::column({1.0, 1.0}));
    CHECK(observe::theta_fct(f) == f.theta_hat0);
    f.theta_hat = Matrix::column({3.0, -4.0});
    f.w = observe::kWFloor;
    CHECK((observe::theta_fct(f) - f.theta_hat).max_abs() < 1e-15);

    // Known theta: after w <= 1 - mu the estimate is exact.
    const Matrix theta = Matrix::column({-1.0, 2.5});
    FctState g = observe::make_fct_state(2, 10.0, 0.01, Matrix::column({0.3, 0.3}));
    for (int i = 0; i < 100; ++i) {
        g = observe::gradient_step(g, theta * 0.2, 0.2, 0.01);
        if (g.w <= 0.99) CHECK((observe::theta_fct(g) - theta).max_abs() < 1e-6);
    }
    CHECK(g.w <= 0.99);
}

TEST_CASE("ie_threshold") {
    CHECK(observe::ie_threshold(1e12, 0.01) ==
          doctest::Approx(1.005033585350145e-14).epsilon(1e-12));
    CHECK(observe::ie_threshold(1.0, 1e-12) < 1.1e-12);
    CHECK(observe::ie_threshold(1.0, 1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(observe::ie_threshold(0.0, 0.5), observe::ConfigError);
    CHECK_THROWS_AS(observe::ie_threshold(1.0, 1.5), observe::ConfigError);
}

TEST_CASE("reconstruct with the true theta returns the true state") {
    auto [model, config] = observe::paper_example(observe::DelayCase::C2);
    config.T = 4.0;
    const Matrix theta = observe::vcat(config.x0 * -1.0, config.xi0);
    double worst_x = 0.0;
    double worst_eta = 0.0;
    observe::run_scenario(model, config, [&](const observe::StepSnapshot& s) {
        const auto est = observe::reconstruct(s.filters, model, theta, s.t);
        worst_x = std::max(worst_x, (est.x_hat - s.plant.x).max_abs());
        worst_eta = std::max(worst_eta, (est.eta_hat - observe::eta_of(model, s.t, s.plant.xi)).max_abs());
    });
    CHECK(worst_x < 1e-9);
    CHECK(worst_eta < 1e-9);
}

TEST_CASE("theta_fct does not depend on theta_hat0 after convergence") {
    auto [model, config] = observe::paper_example(observe::DelayCase::C1);
    config.gamma = 1e12;
    config.T = 8.0;
    const auto a = observe::run_scenario(model, config);
    config.theta_hat0 = Matrix::column({5.0, -3.0, 1.0, 2.0, -7.0});
    const auto b = observe::run_scenario(model, config);
    REQUIRE(a.records.size() == b.records.size());
    int compared = 0;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        if (!a.records[i].converged || !b.records[i].converged) continue;
        CHECK((a.records[i].theta_fct - b.records[i].theta_fct).max_abs() < 1e-6);
        ++compared;
    }
    CHECK(compared > 1000);
}
