#pragma once

#include <string>

#include "evogo/matrix.hpp"
#include "evogo/rng.hpp"

namespace evogo::benchmarks {

enum class Kind { Ackley, Rosenbrock, Rastrigin, Levy };

Kind kind_from_name(const std::string& name);
std::string kind_name(Kind kind);

// A shifted test function over the normalized cube [0,1]^d. The affine map
// w(x) and the shift range are fixed per function:
//   Ackley     w = 40x - 20 - s     s in [-10, 10]^d
//   Rosenbrock w = 20x - 10 - s     s in [-5, 5]^d
//   Rastrigin  w = 64x - 32 - s     s in [-16, 16]^d
//   Levy       w = 1 + (20x-10-s)/4 s in [-5, 5]^d
// The shift is drawn uniformly from a quarter of the pre-shift range so the
// optimum stays strictly inside [0,1]^d.
struct BenchmarkSpec {
    Kind kind = Kind::Ackley;
    std::size_t dim = 2;
    Vector shift;             // length dim; zero when unshifted
    std::uint64_t shift_seed = 0;
};

BenchmarkSpec make_spec(Kind kind, std::size_t dim, Rng& shift_rng);
BenchmarkSpec make_spec_unshifted(Kind kind, std::size_t dim);

// Inner affine scale (dw_inner/dx): 40, 20, 64, 20. For Levy the gradient
// chain factor is scale/4 = 5 because of the extra division in its map.
double inner_scale(Kind kind);

// Location of the global optimum in [0,1]^d.
Vector optimum_location(const BenchmarkSpec& spec);

/// Batch evaluation over rows of X. Entries may stray outside [0,1] by at
/// most 1e-9 (they are clamped); anything further throws DomainError.
Vector evaluate(const BenchmarkSpec& spec, const Matrix& x);
double evaluate_one(const BenchmarkSpec& spec, const Vector& x);

/// Analytic gradient d f / d x at an interior point of [0,1]^d.
Vector gradient(const BenchmarkSpec& spec, const Vector& x);

// Unchecked variants used where candidates may live slightly outside the
// box (the formulas are defined everywhere).
double evaluate_raw(const BenchmarkSpec& spec, const double* x);
void gradient_raw(const BenchmarkSpec& spec, const double* x, double* grad_out);

}  // namespace evogo::benchmarks
