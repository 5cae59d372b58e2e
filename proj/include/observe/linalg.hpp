#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "observe/errors.hpp"

namespace observe {

/**
 * @brief Small dense row-major matrix.
 *
 * Every signal in the observer (state vectors, transition matrices, Gram
 * accumulators) is stored as a Matrix. Column vectors are n x 1 matrices.
 * Dimensions in this project stay below ten, so there is no blocking or
 * expression templates; operations allocate and return by value.
 */
class Matrix {
   public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Nested-list construction, one inner list per row.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    /// Column vector from a list of entries.
    static Matrix column(std::initializer_list<double> entries);
    static Matrix column(std::span<const double> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    bool is_square() const { return rows_ == cols_; }
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    /// Flat access, handy for column vectors.
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    Matrix transpose() const;
    /// Copy of the block starting at (r0, c0) with the given extent.
    Matrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;
    double trace() const;
    /// Frobenius norm; the Euclidean norm for vectors.
    double norm() const;
    double max_abs() const;
    bool all_finite() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    friend bool operator==(const Matrix&, const Matrix&) = default;

    std::string to_string() const;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix m);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);

/// Horizontal concatenation [lhs | rhs].
Matrix hcat(const Matrix& lhs, const Matrix& rhs);
/// Vertical concatenation col(top; bottom).
Matrix vcat(const Matrix& top, const Matrix& bottom);

/**
 * Determinant of a square matrix.
 *
 * Sizes 1-3 use the closed forms. Larger sizes use Gaussian elimination with
 * partial pivoting; a column whose best pivot is exactly zero makes the
 * determinant exactly zero.
 */
double determinant(const Matrix& m);

/**
 * Adjugate (transpose of the cofactor matrix), computed from cofactors so
 * that adj(M) M = det(M) I holds for singular M too. adj of any 1x1 is [[1]].
 */
Matrix adjugate(const Matrix& m);

// ---------------------------------------------------------------------------
// Fixed-step RK4.

/// Anything that behaves like an element of a real vector space and can be
/// checked for NaN/Inf.
template <typename S>
concept IntegrableState = requires(S a, const S& b, double h) {
    { a + b } -> std::convertible_to<S>;
    { b * h } -> std::convertible_to<S>;
    { is_finite(b) } -> std::convertible_to<bool>;
};

inline bool is_finite(const Matrix& m) { return m.all_finite(); }

/**
 * One classical Runge-Kutta step of ds/dt = f(t, s).
 *
 * Throws NumericFailure naming the stage time when any stage derivative is
 * not finite.
 */
template <IntegrableState S, typename F>
    requires std::invocable<F&, double, const S&>
S rk4_step(F&& f, double t, const S& s, double h) {
    auto eval = [&](double tau, const S& arg) {
        S k = f(tau, arg);
        if (!is_finite(k)) throw NumericFailure("non-finite derivative in rk4_step", tau);
        return k;
    };
    const double half = 0.5 * h;
    const S k1 = eval(t, s);
    const S k2 = eval(t + half, s + k1 * half);
    const S k3 = eval(t + half, s + k2 * half);
    const S k4 = eval(t + h, s + k3 * h);
    return s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

}  // namespace observe
