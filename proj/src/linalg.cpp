#include "evogo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "evogo/kernels.hpp"

namespace evogo::linalg {

namespace {

// Left-looking Cholesky. Within a column the remaining rows are independent,
// so they can be computed in parallel without changing any row's arithmetic.
bool try_cholesky(const Matrix& a, double jitter, Matrix& l) {
    const std::size_t n = a.rows();
    l = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) + jitter;
        const double* lj = l.row(j);
        for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        const double inv = 1.0 / ljj;
        kernels::parallel_rows(n - j - 1, [&](std::size_t r) {
            const std::size_t i = j + 1 + r;
            const double* li = l.row(i);
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            l(i, j) = s * inv;
        });
    }
    return true;
}

}  // namespace

CholeskyResult cholesky_factor(const Matrix& a, double jitter) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw DimensionMismatch("cholesky_factor: matrix not square");
    double max_abs = 0.0, max_asym = 0.0, mean_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_diag += a(i, i);
        for (std::size_t j = 0; j <= i; ++j) {
            max_abs = std::max(max_abs, std::abs(a(i, j)));
            max_asym = std::max(max_asym, std::abs(a(i, j) - a(j, i)));
        }
    }
    mean_diag = n ? mean_diag / static_cast<double>(n) : 0.0;
    if (max_asym > 1e-10 * std::max(1.0, max_abs))
        throw InvalidArgument("cholesky_factor: matrix not symmetric");

    Matrix l;
    if (try_cholesky(a, jitter, l)) return {std::move(l), jitter};

    const double base = 1e-10 * std::max(mean_diag, 1e-300);
    const double cap = 1e-2 * std::max(1.0, mean_diag);
    for (double j = std::max(jitter, base); j <= cap; j *= 10.0) {
        if (try_cholesky(a, j, l)) return {std::move(l), j};
    }
    throw NotPositiveDefinite("cholesky_factor: jitter escalation cap exceeded");
}

void solve_lower_inplace(const Matrix& l, Matrix& b) {
    const std::size_t n = l.rows();
    if (b.rows() != n) throw DimensionMismatch("solve_lower: row count");
    const std::size_t m = b.cols();
    kernels::parallel_rows(m, [&](std::size_t c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = b(i, c);
            const double* li = l.row(i);
            for (std::size_t k = 0; k < i; ++k) s -= li[k] * b(k, c);
            b(i, c) = s / li[i];
        }
    });
}

void solve_lower_transpose_inplace(const Matrix& l, Matrix& b) {
    const std::size_t n = l.rows();
    if (b.rows() != n) throw DimensionMismatch("solve_lower_transpose: row count");
    const std::size_t m = b.cols();
    kernels::parallel_rows(m, [&](std::size_t c) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = b(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b(k, c);
            b(ii, c) = s / l(ii, ii);
        }
    });
}

Vector solve_spd(const Matrix& l, const Vector& y) {
    const std::size_t n = l.rows();
    if (y.size() != n) throw DimensionMismatch("solve_spd: vector length");
    Matrix b(n, 1);
    for (std::size_t i = 0; i < n; ++i) b(i, 0) = y[i];
    solve_lower_inplace(l, b);
    solve_lower_transpose_inplace(l, b);
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b(i, 0);
    return x;
}

void symmetric_eigen(const Matrix& a, Matrix& eigvecs, Vector& eigvals) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw DimensionMismatch("symmetric_eigen: matrix not square");
    Matrix m = a;
    eigvecs = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = eigvecs(k, p), vkq = eigvecs(k, q);
                    eigvecs(k, p) = c * vkp - s * vkq;
                    eigvecs(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    eigvals.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) eigvals[i] = m(i, i);
}

}  // namespace evogo::linalg
