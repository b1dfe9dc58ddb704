#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "evogo/common.hpp"

namespace evogo {

using Vector = std::vector<double>;

// Dense row-major matrix with explicit dimensions. Entries are checked for
// finiteness at construction-from-data in checked builds (EVOGO_CHECKED).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
        std::size_t i = 0;
        for (const auto& r : rows) {
            if (r.size() != m.cols_) throw DimensionMismatch("ragged initializer");
            std::size_t j = 0;
            for (double v : r) m(i, j++) = v;
            ++i;
        }
        m.check_finite();
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Vector row_copy(std::size_t i) const {
        return Vector(row(i), row(i) + cols_);
    }

    void set_row(std::size_t i, const Vector& v) {
        if (v.size() != cols_) throw DimensionMismatch("set_row width");
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    void check_finite() const {
#ifdef EVOGO_CHECKED
        for (double v : data_)
            if (!std::isfinite(v)) throw InvalidArgument("non-finite matrix entry");
#endif
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vector data_;
};

inline void check_finite(const Vector& v) {
#ifdef EVOGO_CHECKED
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument("non-finite vector entry");
#else
    (void)v;
#endif
}

}  // namespace evogo
