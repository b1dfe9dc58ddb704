// Serial vs OpenMP timings for the hot kernels: GEMM in the three layouts
// used by MLP training, Gram matrix construction, and batch benchmark
// evaluation.

#include <benchmark/benchmark.h>

#include "evogo/benchmarks.hpp"
#include "evogo/gp.hpp"
#include "evogo/kernels.hpp"
#include "evogo/rng.hpp"

using namespace evogo;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform() - 0.5;
    return m;
}

void bench_gemm_nn(benchmark::State& state, bool parallel) {
    const std::size_t m = state.range(0), k = state.range(1), n = state.range(2);
    Rng rng(7);
    Matrix a = random_matrix(m, k, rng), b = random_matrix(k, n, rng), c(m, n);
    kernels::set_parallel(parallel);
    for (auto _ : state) {
        kernels::gemm_nn(a.data(), b.data(), c.data(), m, k, n);
        benchmark::DoNotOptimize(c.data());
        benchmark::ClobberMemory();
    }
    kernels::set_parallel(true);
    state.SetItemsProcessed(state.iterations() * 2 * m * k * n);
}

void bench_gram(benchmark::State& state, bool parallel) {
    const std::size_t n = state.range(0);
    Rng rng(11);
    Matrix x = random_matrix(n, 10, rng);
    gp::KernelParams params;
    kernels::set_parallel(parallel);
    for (auto _ : state) {
        Matrix k = gp::gram(params, x);
        benchmark::DoNotOptimize(k.data());
    }
    kernels::set_parallel(true);
}

void bench_eval(benchmark::State& state, bool parallel) {
    const std::size_t n = state.range(0);
    Rng rng(13);
    auto spec = benchmarks::make_spec_unshifted(benchmarks::Kind::Levy, 10);
    Matrix x = random_matrix(n, 10, rng);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += 0.5;
    kernels::set_parallel(parallel);
    for (auto _ : state) {
        Vector f = benchmarks::evaluate(spec, x);
        benchmark::DoNotOptimize(f.data());
    }
    kernels::set_parallel(true);
}

}  // namespace

BENCHMARK_CAPTURE(bench_gemm_nn, serial, false)->Args({100, 256, 256});
BENCHMARK_CAPTURE(bench_gemm_nn, openmp, true)->Args({100, 256, 256});
BENCHMARK_CAPTURE(bench_gemm_nn, serial, false)->Args({1000, 800, 800});
BENCHMARK_CAPTURE(bench_gemm_nn, openmp, true)->Args({1000, 800, 800});
BENCHMARK_CAPTURE(bench_gram, serial, false)->Arg(200);
BENCHMARK_CAPTURE(bench_gram, openmp, true)->Arg(200);
BENCHMARK_CAPTURE(bench_eval, serial, false)->Arg(10000);
BENCHMARK_CAPTURE(bench_eval, openmp, true)->Arg(10000);

BENCHMARK_MAIN();
