#pragma once

#include "evogo/matrix.hpp"
#include "evogo/rng.hpp"

namespace evogo {

/// Latin hypercube sample of n points in [0,1]^d: per column, one point in
/// each of the n equal strata, with a uniform offset inside its stratum.
Matrix latin_hypercube(std::size_t n, std::size_t d, Rng& rng);

}  // namespace evogo
