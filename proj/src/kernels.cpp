#include "evogo/kernels.hpp"

#include <algorithm>
#include <atomic>

namespace evogo::kernels {

namespace {
std::atomic<bool> g_parallel{true};
thread_local int t_serial_depth = 0;
}  // namespace

void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

SerialSection::SerialSection() { ++t_serial_depth; }
SerialSection::~SerialSection() { --t_serial_depth; }

namespace detail {
bool use_parallel_now() { return t_serial_depth == 0 && parallel_enabled(); }
}  // namespace detail

namespace {

// One row of C = A * B, accumulated in ikj order; the inner j loop
// vectorizes to FMA and carries no dependency across lanes.
inline void row_nn(const double* __restrict a_row, const double* __restrict b, double* __restrict c_row,
                   std::size_t k_dim, std::size_t n) {
    std::fill(c_row, c_row + n, 0.0);
    for (std::size_t k = 0; k < k_dim; ++k) {
        const double aik = a_row[k];
        const double* __restrict b_row = b + k * n;
        for (std::size_t j = 0; j < n; ++j) c_row[j] += aik * b_row[j];
    }
}

// ikj accumulation with the row kernel above needs the right operand in
// row-major k x n layout; the transposed layouts are handled by an explicit
// transpose into thread-local scratch, which keeps every output element on
// the same arithmetic path as the nn kernel (and is far kinder to the cache
// than strided dot products).
inline void row_nn_acc(const double* __restrict a_row, const double* __restrict b,
                       double* __restrict c_row, std::size_t k_dim, std::size_t n) {
    for (std::size_t k = 0; k < k_dim; ++k) {
        const double aik = a_row[k];
        const double* __restrict b_row = b + k * n;
        for (std::size_t j = 0; j < n; ++j) c_row[j] += aik * b_row[j];
    }
}

thread_local std::vector<double> t_scratch;

// scratch <- transpose of X (r x c)
const double* transposed(const double* x, std::size_t r, std::size_t c) {
    t_scratch.resize(r * c);
    double* out = t_scratch.data();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[j * r + i] = x[i * c + j];
    return out;
}

}  // namespace

namespace {

void gemm_nn_dispatch(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                      std::size_t n, bool allow_parallel) {
#ifdef _OPENMP
    if (allow_parallel && detail::use_parallel_now() && m > 1) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(m); ++i)
            row_nn(a + static_cast<std::size_t>(i) * k, b, c + static_cast<std::size_t>(i) * n, k, n);
        return;
    }
#endif
    for (std::size_t i = 0; i < m; ++i) row_nn(a + i * k, b, c + i * n, k, n);
}

void gemm_nn_acc_dispatch(const double* a, const double* b, double* c, std::size_t m,
                          std::size_t k, std::size_t n, bool allow_parallel) {
#ifdef _OPENMP
    if (allow_parallel && detail::use_parallel_now() && m > 1) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(m); ++i)
            row_nn_acc(a + static_cast<std::size_t>(i) * k, b, c + static_cast<std::size_t>(i) * n,
                       k, n);
        return;
    }
#endif
    for (std::size_t i = 0; i < m; ++i) row_nn_acc(a + i * k, b, c + i * n, k, n);
}

}  // namespace

namespace serial {

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_dispatch(a, b, c, m, k, n, false);
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_dispatch(a, transposed(b, n, k), c, m, k, n, false);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_dispatch(transposed(a, k, m), b, c, m, k, n, false);
}

void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_acc_dispatch(transposed(a, k, m), b, c, m, k, n, false);
}

}  // namespace serial

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_dispatch(a, b, c, m, k, n, true);
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_dispatch(a, transposed(b, n, k), c, m, k, n, true);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_dispatch(transposed(a, k, m), b, c, m, k, n, true);
}

void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    gemm_nn_acc_dispatch(transposed(a, k, m), b, c, m, k, n, true);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DimensionMismatch("matmul_nt: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    gemm_nt(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("matmul_tn: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    gemm_tn(a.data(), b.data(), c.data(), a.cols(), a.rows(), b.cols());
    return c;
}

}  // namespace evogo::kernels
