#include "evogo/sampling.hpp"

#include <numeric>

namespace evogo {

Matrix latin_hypercube(std::size_t n, std::size_t d, Rng& rng) {
    if (n < 1 || d < 1) throw InvalidArgument("latin_hypercube: n and d must be >= 1");
    Matrix x(n, d);
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i-- > 1;) {
            const std::size_t k = rng.below(i + 1);
            std::swap(perm[i], perm[k]);
        }
        for (std::size_t i = 0; i < n; ++i)
            x(i, j) = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
    }
    return x;
}

}  // namespace evogo
