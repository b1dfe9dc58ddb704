#pragma once

#include <cstddef>

#include "evogo/matrix.hpp"

// Data-parallel compute kernels. Every kernel has a serial reference
// implementation (namespace kernels::serial) and an OpenMP version that
// partitions work so each output element is produced by exactly one thread
// with the same instruction sequence as the serial path. Results are
// therefore bitwise identical between the two, which the test suite checks
// and the bench target times.
namespace evogo::kernels {

// Global switch plus a thread-local override so a scheduler running many
// runs side by side can pin its workers to the serial path.
void set_parallel(bool on);
bool parallel_enabled();

class SerialSection {
public:
    SerialSection();
    ~SerialSection();
    SerialSection(const SerialSection&) = delete;
    SerialSection& operator=(const SerialSection&) = delete;
};

namespace serial {
// C = A(m x k) * B(k x n)
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
// C = A(m x k) * B(n x k)^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
// C = A(k x m)^T * B(k x n)
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
// C += A(k x m)^T * B(k x n)
void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
}  // namespace serial

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);

// Matrix wrappers (dimension-checked).
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// Row-parallel map over a matrix: fn(row_index) must touch only its row.
template <typename Fn>
void parallel_rows(std::size_t n_rows, Fn&& fn);

namespace detail {
bool use_parallel_now();
}

}  // namespace evogo::kernels

#ifdef _OPENMP
#include <omp.h>
#endif

namespace evogo::kernels {

template <typename Fn>
void parallel_rows(std::size_t n_rows, Fn&& fn) {
#ifdef _OPENMP
    if (detail::use_parallel_now() && n_rows > 1) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n_rows); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n_rows; ++i) fn(i);
}

}  // namespace evogo::kernels
