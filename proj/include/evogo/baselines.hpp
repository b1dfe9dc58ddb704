#pragma once

#include <string>

#include "evogo/benchmarks.hpp"
#include "evogo/driver.hpp"

namespace evogo::baselines {

enum class Algo { CmaEs, Pso, Random };

Algo algo_from_name(const std::string& name);

struct BaselineConfig {
    Algo algo = Algo::Random;
    std::size_t population = 0;  // 0: CMA-ES uses 4 + floor(3 ln d); others default to 100
    std::size_t fe_budget = 1000;
    std::uint64_t seed = 1;
    double cma_sigma0 = 0.3;
    double pso_inertia = 0.729;
    double pso_cognitive = 1.49445;
    double pso_social = 1.49445;
    bool record_snapshots = false;

    void validate(std::size_t dim) const;
    std::size_t effective_population(std::size_t dim) const;
};

/// Run one baseline under the exact FE budget; produces the same history
/// schema as the main driver.
driver::RunHistory run_baseline(const BaselineConfig& config, const benchmarks::BenchmarkSpec& spec);

}  // namespace evogo::baselines
