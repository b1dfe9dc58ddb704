#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "evogo/adam.hpp"
#include "evogo/kernels.hpp"
#include "evogo/linalg.hpp"
#include "evogo/sampling.hpp"
#include "support.hpp"

using namespace evogo;
using test_support::random_matrix;

TEST_SUITE("numkit") {

TEST_CASE("cholesky of the identity is the identity") {
    const Matrix i3 = Matrix::identity(3);
    auto res = linalg::cholesky_factor(i3, 0.0);
    CHECK(res.jitter == 0.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(res.L(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-15));
}

TEST_CASE("cholesky of [[4,2],[2,3]]") {
    const Matrix a = Matrix::from_rows({{4, 2}, {2, 3}});
    auto res = linalg::cholesky_factor(a, 0.0);
    CHECK(res.L(0, 0) == doctest::Approx(2.0));
    CHECK(res.L(1, 0) == doctest::Approx(1.0));
    CHECK(res.L(0, 1) == 0.0);
    CHECK(res.L(1, 1) == doctest::Approx(std::sqrt(2.0)));
    // reconstruction to 1e-12
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 2; ++k) s += res.L(i, k) * res.L(j, k);
            CHECK(std::abs(s - a(i, j)) < 1e-12);
        }
}

TEST_CASE("indefinite matrix exhausts the jitter escalation") {
    const Matrix a = Matrix::from_rows({{1, 2}, {2, 1}});  // eigenvalues -1, 3
    CHECK_THROWS_AS(linalg::cholesky_factor(a, 0.0), NotPositiveDefinite);
}

TEST_CASE("non-square input is rejected") {
    Matrix a(2, 3);
    CHECK_THROWS_AS(linalg::cholesky_factor(a, 0.0), DimensionMismatch);
}

TEST_CASE("cholesky round trip on random SPD matrices") {
    Rng rng(101);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix b = random_matrix(8, 8, rng, -1.0, 1.0);
        Matrix a(8, 8);
        // A = B^T B + I
        kernels::gemm_tn(b.data(), b.data(), a.data(), 8, 8, 8);
        for (std::size_t i = 0; i < 8; ++i) a(i, i) += 1.0;
        auto res = linalg::cholesky_factor(a, 0.0);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < 8; ++k) s += res.L(i, k) * res.L(j, k);
                num += (s - a(i, j)) * (s - a(i, j));
                den += a(i, j) * a(i, j);
            }
        CHECK(std::sqrt(num / den) < 1e-10);
    }
}

TEST_CASE("triangular solves reproduce A w = y") {
    Rng rng(55);
    const Matrix b = random_matrix(10, 10, rng, -1.0, 1.0);
    Matrix a(10, 10);
    kernels::gemm_tn(b.data(), b.data(), a.data(), 10, 10, 10);
    for (std::size_t i = 0; i < 10; ++i) a(i, i) += 1.0;
    auto res = linalg::cholesky_factor(a, 0.0);
    Vector y(10);
    for (auto& v : y) v = rng.uniform() - 0.5;
    const Vector w = linalg::solve_spd(res.L, y);
    for (std::size_t i = 0; i < 10; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 10; ++j) s += a(i, j) * w[j];
        CHECK(test_support::rel_err(s, y[i]) < 1e-8);
    }
}

TEST_CASE("latin hypercube stratification holds for every (n, d) in range") {
    Rng rng(9);
    for (std::size_t n = 1; n <= 50; ++n) {
        for (std::size_t d = 1; d <= 20; ++d) {
            Rng local = rng.substream(Stream::Test, n, d);
            const Matrix x = latin_hypercube(n, d, local);
            for (std::size_t j = 0; j < d; ++j) {
                std::vector<bool> seen(n, false);
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = x(i, j);
                    REQUIRE(v >= 0.0);
                    REQUIRE(v < 1.0);
                    const auto stratum = static_cast<std::size_t>(v * static_cast<double>(n));
                    REQUIRE_FALSE(seen[stratum]);
                    seen[stratum] = true;
                }
            }
        }
    }
}

TEST_CASE("latin hypercube single point") {
    Rng rng(1);
    const Matrix x = latin_hypercube(1, 3, rng);
    CHECK(x.rows() == 1);
    CHECK(x.cols() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(x(0, j) >= 0.0);
        CHECK(x(0, j) < 1.0);
    }
}

TEST_CASE("latin hypercube column means concentrate around one half") {
    Rng rng(2024);
    const Matrix x = latin_hypercube(100, 5, rng);
    for (std::size_t j = 0; j < 5; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < 100; ++i) m += x(i, j);
        m /= 100.0;
        CHECK(std::abs(m - 0.5) < 0.06);
    }
}

TEST_CASE("same seed gives a bitwise identical sample") {
    Rng a(77), b(77);
    const Matrix xa = latin_hypercube(32, 4, a);
    const Matrix xb = latin_hypercube(32, 4, b);
    CHECK(xa == xb);
}

TEST_CASE("adam leaves parameters alone under zero gradient") {
    Vector params = {1.0, -2.0, 3.0};
    Vector grads(3, 0.0);
    AdamState st(3, 0.1);
    adam_step(params, grads, st);
    CHECK(st.t == 1);
    CHECK(params[0] == 1.0);
    CHECK(params[1] == -2.0);
    CHECK(params[2] == 3.0);
}

TEST_CASE("adam first step matches the hand-expanded update") {
    Vector params = {0.0};
    Vector grads = {2.0};
    AdamState st(1, 0.1);
    adam_step(params, grads, st);
    // t=1: m_hat = g, v_hat = g^2 -> delta = -lr * g / (|g| + eps)
    const double want = -0.1 * 2.0 / (2.0 + 1e-8);
    CHECK(std::abs(params[0] - want) < 1e-12);
}

TEST_CASE("adam steps are bounded by the learning rate") {
    Vector params = {0.0};
    AdamState st(1, 0.05);
    double prev = params[0];
    for (int i = 0; i < 2; ++i) {
        Vector grads = {3.7};
        adam_step(params, grads, st);
        CHECK(std::abs(params[0] - prev) <= 0.05 * (1.0 + 1e-6));
        prev = params[0];
    }
}

TEST_CASE("adam rejects mismatched lengths") {
    Vector params = {1.0, 2.0};
    Vector grads = {1.0};
    AdamState st(2, 0.1);
    CHECK_THROWS_AS(adam_step(params, grads, st), DimensionMismatch);
}

TEST_CASE("jacobi eigendecomposition solves small symmetric systems") {
    Rng rng(5);
    const Matrix b = random_matrix(5, 5, rng, -1.0, 1.0);
    Matrix a(5, 5);
    kernels::gemm_tn(b.data(), b.data(), a.data(), 5, 5, 5);
    Matrix vecs;
    Vector vals;
    linalg::symmetric_eigen(a, vecs, vals);
    for (std::size_t c = 0; c < 5; ++c) {
        for (std::size_t i = 0; i < 5; ++i) {
            double av = 0.0;
            for (std::size_t j = 0; j < 5; ++j) av += a(i, j) * vecs(j, c);
            CHECK(std::abs(av - vals[c] * vecs(i, c)) < 1e-10);
        }
    }
}

}  // TEST_SUITE
