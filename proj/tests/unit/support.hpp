#pragma once

#include <cmath>
#include <functional>

#include "evogo/matrix.hpp"
#include "evogo/rng.hpp"

namespace test_support {

inline evogo::Matrix random_matrix(std::size_t r, std::size_t c, evogo::Rng& rng, double lo = 0.0,
                                   double hi = 1.0) {
    evogo::Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
    return m;
}

// Central finite difference of a scalar function along one coordinate.
inline double central_diff(const std::function<double(const evogo::Vector&)>& f,
                           const evogo::Vector& x, std::size_t i, double h) {
    evogo::Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    return (f(a) - f(b)) / (2.0 * h);
}

// Richardson-extrapolated central difference: cancels the h^2 truncation
// term, which matters for the steeply scaled benchmark maps.
inline double central_diff_rich(const std::function<double(const evogo::Vector&)>& f,
                                const evogo::Vector& x, std::size_t i, double h) {
    const double d1 = central_diff(f, x, i, h);
    const double d2 = central_diff(f, x, i, 2.0 * h);
    return (4.0 * d1 - d2) / 3.0;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-12, std::abs(want));
}

// relative error with an absolute floor, for derivatives that pass near zero
inline double grad_err(double got, double want, double floor_val = 1e-6) {
    return std::abs(got - want) / std::max(floor_val, std::abs(want));
}

}  // namespace test_support
