#include "observe/linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <utility>

namespace observe {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

void require_square(const Matrix& m, const char* op) {
    if (!m.is_square() || m.rows() == 0) {
        throw DimensionError(std::string(op) + ": expected a non-empty square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

// Elimination with partial pivoting on a scratch copy.
double determinant_elimination(Matrix a) {
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (a(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            det = -det;
        }
        const double p = a(col, col);
        det *= p;
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / p;
            if (factor == 0.0) continue;
            for (std::size_t c = col + 1; c < n; ++c) a(r, c) -= factor * a(col, c);
        }
    }
    return det;
}

// Matrix with row `skip_r` and column `skip_c` removed.
Matrix minor_of(const Matrix& m, std::size_t skip_r, std::size_t skip_c) {
    const std::size_t n = m.rows();
    Matrix out(n - 1, n - 1);
    for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == skip_r) continue;
        for (std::size_t c = 0, cc = 0; c < n; ++c) {
            if (c == skip_c) continue;
            out(rr, cc++) = m(r, c);
        }
        ++rr;
    }
    return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw DimensionError("Matrix: ragged initializer list");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column(std::initializer_list<double> entries) {
    return column(std::span<const double>(entries.begin(), entries.size()));
}

Matrix Matrix::column(std::span<const double> entries) {
    Matrix m(entries.size(), 1);
    std::copy(entries.begin(), entries.end(), m.data_.begin());
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const {
    if (r0 + rows > rows_ || c0 + cols > cols_) {
        throw DimensionError("block: requested extent exceeds matrix bounds");
    }
    Matrix b(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
    return b;
}

double Matrix::trace() const {
    require_square(*this, "trace");
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
}

double Matrix::norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

std::string Matrix::to_string() const {
    std::ostringstream os;
    os.precision(10);
    os << '[';
    for (std::size_t r = 0; r < rows_; ++r) {
        os << (r ? "; " : "");
        for (std::size_t c = 0; c < cols_; ++c) os << (c ? ", " : "") << (*this)(r, c);
    }
    os << ']';
    return os.str();
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator-(Matrix m) { return m *= -1.0; }
Matrix operator*(Matrix m, double s) { return m *= s; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols() != rhs.rows()) {
        throw DimensionError("operator*: inner dimensions " + std::to_string(lhs.cols()) +
                             " and " + std::to_string(rhs.rows()) + " differ");
    }
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t r = 0; r < lhs.rows(); ++r) {
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(r, k);
            if (a == 0.0) continue;
            for (std::size_t c = 0; c < rhs.cols(); ++c) out(r, c) += a * rhs(k, c);
        }
    }
    return out;
}

Matrix hcat(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows() != rhs.rows()) throw DimensionError("hcat: row counts differ");
    Matrix out(lhs.rows(), lhs.cols() + rhs.cols());
    for (std::size_t r = 0; r < lhs.rows(); ++r) {
        for (std::size_t c = 0; c < lhs.cols(); ++c) out(r, c) = lhs(r, c);
        for (std::size_t c = 0; c < rhs.cols(); ++c) out(r, lhs.cols() + c) = rhs(r, c);
    }
    return out;
}

Matrix vcat(const Matrix& top, const Matrix& bottom) {
    if (top.cols() != bottom.cols()) throw DimensionError("vcat: column counts differ");
    Matrix out(top.rows() + bottom.rows(), top.cols());
    auto dst = out.data();
    std::copy(top.data().begin(), top.data().end(), dst.begin());
    std::copy(bottom.data().begin(), bottom.data().end(), dst.begin() + top.size());
    return out;
}

double determinant(const Matrix& m) {
    require_square(m, "determinant");
    switch (m.rows()) {
        case 1:
            return m(0, 0);
        case 2:
            return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        case 3:
            return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                   m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        default:
            return determinant_elimination(m);
    }
}

Matrix adjugate(const Matrix& m) {
    require_square(m, "adjugate");
    const std::size_t n = m.rows();
    if (n == 1) return Matrix{{1.0}};
    Matrix adj(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
            // adj = cofactor^T
            adj(c, r) = sign * determinant(minor_of(m, r, c));
        }
    }
    return adj;
}

}  // namespace observe
