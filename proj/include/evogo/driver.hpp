#pragma once

#include <optional>
#include <vector>

#include "evogo/benchmarks.hpp"
#include "evogo/dataprep.hpp"
#include "evogo/genpair.hpp"

namespace evogo::driver {

// Every knob of the generational loop. Epoch counts are caps; the plateau
// rules below them stop training once the loss stalls.
struct EvoGoConfig {
    benchmarks::Kind kind = benchmarks::Kind::Ackley;
    std::size_t dim = 2;
    std::size_t population = 100;
    std::size_t generations = 10;
    double eta = 0.1;
    double eps_window = 0.3;
    genpair::LossWeights weights{};
    std::size_t gp_epochs = 1000;
    std::size_t gen_epochs = 200;
    genpair::Variant variant = genpair::Variant::Kg;
    genpair::Ablation ablation = genpair::Ablation::None;
    std::size_t aug_threshold = 64;
    double aug_rho = 1.0;
    std::uint64_t seed = 1;
    std::optional<std::size_t> fe_budget;  // must equal population * generations when set
    bool warm_start = true;                // reuse generator parameters across generations
    bool record_snapshots = true;

    bool gp_early_stop = true;
    std::size_t gp_patience = 25;
    double gp_min_improvement = 2e-3;
    bool gp_warm_start = true;  // seed hyperparameters from the previous generation's fit

    // Training schedule boost: the reference schedules are gp_epochs at
    // n/6e4 and gen_epochs at 0.015/|D_SM|. A boost of b runs epochs/b at b
    // times the rate, preserving each schedule's total step budget; 1
    // recovers the reference schedules, the default keeps desk-scale runs
    // fast. Loss-plateau stopping stays off for the generator: its epoch
    // loss flattens long before the paired maps stop co-moving.
    double gen_schedule_boost = 12.5;
    bool gen_early_stop = false;
    std::size_t gen_patience = 6;
    double gen_min_rel_improvement = 1e-4;

    void validate() const;
};

struct GenerationRecord {
    std::size_t generation = 0;
    std::size_t fe_count = 0;  // cumulative
    double gen_best = 0.0;
    double best_so_far = 0.0;
    Matrix input_population;   // rows fed to the generator (empty when snapshots off)
    Matrix output_population;  // generated rows after clamping (empty for generation 1)
    std::vector<double> gen_loss_trace;
    std::vector<double> gp_mll_trace;
};

struct RunHistory {
    std::size_t dim = 0;
    std::vector<GenerationRecord> generations;
    Vector best_x;
    double best_f = 0.0;
    std::size_t total_fes = 0;
};

/// Apply the trained forward map to every solution of the current
/// population and clamp the outputs into [0,1]^d.
Matrix generate_population(const genpair::GenerativePair& pair, const dataprep::Dataset& current);

/// One full optimization run: LHS initialization, then per generation
/// prepare -> GP fit -> pair training -> generation -> evaluation -> merge.
RunHistory run(const EvoGoConfig& config);

}  // namespace evogo::driver
