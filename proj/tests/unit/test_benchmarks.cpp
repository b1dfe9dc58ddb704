#include <doctest.h>

#include <cmath>

#include "evogo/benchmarks.hpp"
#include "support.hpp"

using namespace evogo;
using namespace evogo::benchmarks;
using test_support::central_diff;

TEST_SUITE("benchmarks") {

TEST_CASE("every function is zero at its optimum") {
    Rng rng(31);
    for (Kind kind : {Kind::Ackley, Kind::Rosenbrock, Kind::Rastrigin, Kind::Levy}) {
        Rng local = rng.substream(Stream::Test, static_cast<std::uint64_t>(kind));
        const BenchmarkSpec spec = make_spec(kind, 5, local);
        const Vector x = optimum_location(spec);
        for (double v : x) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
        CHECK(std::abs(evaluate_one(spec, x)) < 1e-12);
    }
}

TEST_CASE("rastrigin without shift is zero at the center") {
    const BenchmarkSpec spec = make_spec_unshifted(Kind::Rastrigin, 4);
    const Vector x(4, 0.5);
    CHECK(std::abs(evaluate_one(spec, x)) < 1e-12);
}

TEST_CASE("ackley at w = (1,1) matches the frozen oracle value") {
    const BenchmarkSpec spec = make_spec_unshifted(Kind::Ackley, 2);
    // w = 40x - 20 = (1,1) at x = 21/40
    const Vector x(2, 21.0 / 40.0);
    CHECK(std::abs(evaluate_one(spec, x) - 3.6253849384403627) < 1e-12);
}

TEST_CASE("gradient vanishes at the rastrigin optimum") {
    Rng rng(32);
    const BenchmarkSpec spec = make_spec(Kind::Rastrigin, 3, rng);
    const Vector g = gradient(spec, optimum_location(spec));
    for (double v : g) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("rosenbrock gradient at w = 0 is (-40, 0)") {
    const BenchmarkSpec spec = make_spec_unshifted(Kind::Rosenbrock, 2);
    const Vector g = gradient(spec, Vector(2, 0.5));  // w = 0
    CHECK(g[0] == doctest::Approx(-40.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences at random points") {
    Rng rng(33);
    int checked = 0;
    while (checked < 200) {
        const auto kind = static_cast<Kind>(rng.below(4));
        Rng srng = rng.substream(Stream::Test, static_cast<std::uint64_t>(checked));
        const BenchmarkSpec spec = make_spec(kind, 2 + rng.below(6), srng);
        Vector x(spec.dim);
        for (auto& v : x) v = 0.05 + 0.9 * rng.uniform();
        const Vector g = gradient(spec, x);
        auto f = [&](const Vector& p) { return evaluate_raw(spec, p.data()); };
        for (std::size_t i = 0; i < spec.dim; ++i) {
            const double fd = test_support::central_diff_rich(f, x, i, 1e-5);
            CHECK(test_support::grad_err(g[i], fd, 1e-3) < 1e-5);
        }
        ++checked;
    }
}

TEST_CASE("all four functions are nonnegative on the box") {
    Rng rng(34);
    for (int rep = 0; rep < 200; ++rep) {
        const auto kind = static_cast<Kind>(rep % 4);
        Rng srng = rng.substream(Stream::Test, static_cast<std::uint64_t>(rep));
        const BenchmarkSpec spec = make_spec(kind, 2 + rng.below(8), srng);
        Vector x(spec.dim);
        for (auto& v : x) v = rng.uniform();
        CHECK(evaluate_one(spec, x) >= 0.0);
    }
}

TEST_CASE("shift covariance: shifted at x equals unshifted at x - s/scale") {
    // shifts and points on a dyadic grid make x - s/scale exact in floating
    // point, so the translation identity can be checked at full precision
    Rng rng(35);
    for (Kind kind : {Kind::Ackley, Kind::Rosenbrock, Kind::Rastrigin, Kind::Levy}) {
        const double scale = inner_scale(kind);
        BenchmarkSpec shifted = make_spec_unshifted(kind, 4);
        std::vector<long> m(4);
        for (std::size_t j = 0; j < 4; ++j) {
            m[j] = static_cast<long>(rng.below(129)) - 64;  // s in [-scale/4, scale/4]
            shifted.shift[j] = scale * static_cast<double>(m[j]) / 256.0;
        }
        const BenchmarkSpec plain = make_spec_unshifted(kind, 4);
        for (int rep = 0; rep < 20; ++rep) {
            Vector x(4), x2(4);
            bool inside = true;
            for (std::size_t j = 0; j < 4; ++j) {
                const long i = static_cast<long>(rng.below(257));
                x[j] = static_cast<double>(i) / 256.0;
                x2[j] = static_cast<double>(i - m[j]) / 256.0;
                if (x2[j] < 0.0 || x2[j] > 1.0) inside = false;
            }
            if (!inside) continue;
            CHECK(std::abs(evaluate_one(shifted, x) - evaluate_one(plain, x2)) < 1e-12);
        }
    }
}

TEST_CASE("domain handling: tiny violations clamp, real ones throw") {
    const BenchmarkSpec spec = make_spec_unshifted(Kind::Ackley, 2);
    Matrix x(1, 2);
    x(0, 0) = -5e-10;
    x(0, 1) = 1.0 + 5e-10;
    CHECK_NOTHROW(evaluate(spec, x));
    x(0, 0) = -1e-6;
    CHECK_THROWS_AS(evaluate(spec, x), DomainError);
    CHECK_THROWS_AS(gradient(spec, Vector{0.0, 0.5}), DomainError);
}

}  // TEST_SUITE
