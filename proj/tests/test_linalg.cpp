#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "observe/linalg.hpp"

using observe::Matrix;

namespace {

Matrix random_square(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Matrix m(n, n);
    for (double& v : m.data()) v = dist(rng);
    return m;
}

}  // namespace

TEST_CASE("determinant closed forms and elimination") {
    CHECK(observe::determinant(Matrix{{5.0}}) == 5.0);
    CHECK(observe::determinant(Matrix::identity(3)) == 1.0);
    CHECK(observe::determinant(Matrix{{1.0, 2.0}, {2.0, 4.0}}) == 0.0);
    // 4x4 goes through elimination; a permutation matrix has det -1.
    const Matrix perm{{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    CHECK(observe::determinant(perm) == -1.0);
    // Zero column: best pivot is zero, determinant exactly zero.
    const Matrix zero_col{{0, 1, 2, 3}, {0, 4, 5, 6}, {0, 7, 8, 9}, {0, 1, 1, 1}};
    CHECK(observe::determinant(zero_col) == 0.0);
}

TEST_CASE("determinant and adjugate reject non-square input") {
    CHECK_THROWS_AS(observe::determinant(Matrix(2, 3)), observe::DimensionError);
    CHECK_THROWS_AS(observe::adjugate(Matrix(3, 2)), observe::DimensionError);
}

TEST_CASE("adjugate examples") {
    CHECK(observe::adjugate(Matrix{{7.0}}) == Matrix{{1.0}});
    CHECK(observe::adjugate(Matrix{{1.0, 2.0}, {3.0, 4.0}}) == Matrix{{4.0, -2.0}, {-3.0, 1.0}});
    const Matrix singular{{1.0, 2.0}, {2.0, 4.0}};
    CHECK((observe::adjugate(singular) * singular).max_abs() == 0.0);
}

TEST_CASE("adj(M) M = det(M) I and determinant symmetries on random matrices") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const Matrix m = random_square(rng, n);
        const Matrix adj = observe::adjugate(m);
        const double det = observe::determinant(m);
        const double scale = std::max(1.0, adj.norm() * m.norm());
        CHECK((adj * m - Matrix::identity(n) * det).max_abs() <= 1e-10 * scale);
        CHECK((m * adj - Matrix::identity(n) * det).max_abs() <= 1e-10 * scale);

        CHECK(observe::determinant(m.transpose()) ==
              doctest::Approx(det).epsilon(1e-10).scale(1.0));
        const double c = -1.7;
        CHECK(observe::determinant(m * c) ==
              doctest::Approx(std::pow(c, static_cast<double>(n)) * det).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("adjugate of a rank-deficient 5x5 still satisfies the identity") {
    std::mt19937 rng(11);
    Matrix m = random_square(rng, 5);
    for (std::size_t c = 0; c < 5; ++c) m(4, c) = m(0, c) + 2.0 * m(1, c);
    const Matrix adj = observe::adjugate(m);
    CHECK(std::abs(observe::determinant(m)) < 1e-12);
    CHECK((adj * m).max_abs() < 1e-12 * std::max(1.0, adj.norm() * m.norm()));
    CHECK(adj.max_abs() > 1e-3);  // rank 4: adjugate is rank one, not zero
}

TEST_CASE("matrix arithmetic shape checks") {
    CHECK_THROWS_AS(Matrix(2, 2) + Matrix(2, 3), observe::DimensionError);
    CHECK_THROWS_AS(Matrix(2, 2) * Matrix(3, 1), observe::DimensionError);
    CHECK_THROWS_AS((Matrix{{1.0, 2.0}, {3.0}}), observe::DimensionError);
    const Matrix a{{1, 2}, {3, 4}};
    CHECK(observe::hcat(a, Matrix::column({5, 6})) == Matrix{{1, 2, 5}, {3, 4, 6}});
    CHECK(observe::vcat(Matrix::column({1}), Matrix::column({2, 3})) == Matrix::column({1, 2, 3}));
    CHECK(a.block(1, 0, 1, 2) == Matrix{{3, 4}});
    CHECK(a.trace() == 5.0);
}

TEST_CASE("rk4_step examples") {
    auto zero = [](double, const Matrix& s) { return Matrix::zeros(s.rows(), 1); };
    const Matrix s = Matrix::column({1.5, -2.0});
    CHECK(observe::rk4_step(zero, 0.0, s, 0.1) == s);

    auto decay = [](double, const Matrix& x) { return x * -1.0; };
    const Matrix x1 = observe::rk4_step(decay, 0.0, Matrix::column({1.0}), 0.1);
    CHECK(x1[0] == doctest::Approx(0.9048375).epsilon(1e-14));
    CHECK(std::abs(x1[0] - std::exp(-0.1)) < 1e-7);

    auto unit = [](double, const Matrix&) { return Matrix::column({1.0}); };
    CHECK(observe::rk4_step(unit, 0.0, Matrix::column({0.0}), 0.5)[0] == 0.5);
}

TEST_CASE("rk4_step global convergence order is about four") {
    const double lambda = -1.3;
    auto field = [lambda](double, const Matrix& x) { return x * lambda; };
    auto global_error = [&](int steps) {
        const double h = 2.0 / steps;
        Matrix x = Matrix::column({1.0});
        for (int i = 0; i < steps; ++i) x = observe::rk4_step(field, i * h, x, h);
        return std::abs(x[0] - std::exp(lambda * 2.0));
    };
    const double order = std::log2(global_error(20) / global_error(40));
    CHECK(order == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("rk4_step reports non-finite derivatives with the stage time") {
    auto blow = [](double t, const Matrix&) {
        return Matrix::column({t > 0.01 ? std::numeric_limits<double>::infinity() : 0.0});
    };
    try {
        observe::rk4_step(blow, 0.0, Matrix::column({0.0}), 0.1);
        FAIL("expected NumericFailure");
    } catch (const observe::NumericFailure& e) {
        CHECK(e.time() == doctest::Approx(0.05));
    }
}
