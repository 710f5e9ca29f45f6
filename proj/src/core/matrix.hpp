#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace ratnet {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Small dense row-major matrix over any scalar type.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows * cols) throw ShapeError("Matrix: data size does not match shape");
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) throw ShapeError("Matrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ShapeError("Matrix product: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<T> apply(std::span<const T> x) const {
        if (x.size() != cols_) throw ShapeError("Matrix-vector product: size mismatch");
        std::vector<T> y(rows_, T(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    template <class U, class F>
    Matrix<U> map(F&& f) const {
        std::vector<U> out;
        out.reserve(data_.size());
        for (const T& v : data_) out.push_back(f(v));
        return Matrix<U>(rows_, cols_, std::move(out));
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// 2x2 inverse; throws std::domain_error when singular.
template <class T>
Matrix<T> inverse2(const Matrix<T>& m, double singular_tol = 0.0) {
    if (m.rows() != 2 || m.cols() != 2) throw ShapeError("inverse2 expects a 2x2 matrix");
    T det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    using std::abs;
    if (abs(det) <= singular_tol) throw std::domain_error("inverse2: singular matrix");
    T inv = T(1) / det;
    return Matrix<T>{{m(1, 1) * inv, -m(0, 1) * inv}, {-m(1, 0) * inv, m(0, 0) * inv}};
}

}  // namespace ratnet
