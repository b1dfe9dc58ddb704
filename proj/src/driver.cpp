#include "evogo/driver.hpp"

#include <algorithm>
#include <cmath>

#ifdef EVOGO_TIMING
#include <chrono>
#include <cstdio>
#endif

#include "evogo/sampling.hpp"

namespace evogo::driver {

void EvoGoConfig::validate() const {
    if (population < 2) throw InvalidArgument("config: population must be >= 2");
    if (generations < 1) throw InvalidArgument("config: generations must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("config: eta must lie in (0,1)");
    if (eps_window < 0.0) throw InvalidArgument("config: eps_window must be >= 0");
    if (fe_budget && *fe_budget != population * generations)
        throw InvalidArgument("config: fe_budget must equal population * generations");
}

Matrix generate_population(const genpair::GenerativePair& pair, const dataprep::Dataset& current) {
    Matrix out = genpair::apply_forward_map(pair, current.x);
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            out(i, j) = std::clamp(out(i, j), 0.0, 1.0);
    return out;
}

namespace {

struct CountingEvaluator {
    const benchmarks::BenchmarkSpec& spec;
    std::size_t count = 0;

    Vector operator()(const Matrix& x) {
        count += x.rows();
        return benchmarks::evaluate(spec, x);
    }
};

void record_generation(RunHistory& history, std::size_t generation, std::size_t fes,
                       const Vector& gen_y, bool snapshots, Matrix in_pop, Matrix out_pop) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.fe_count = fes;
    rec.gen_best = *std::min_element(gen_y.begin(), gen_y.end());
    const double prev = history.generations.empty()
                            ? rec.gen_best
                            : history.generations.back().best_so_far;
    rec.best_so_far = std::min(prev, rec.gen_best);
    if (snapshots) {
        rec.input_population = std::move(in_pop);
        rec.output_population = std::move(out_pop);
    }
    history.generations.push_back(std::move(rec));
}

}  // namespace

RunHistory run(const EvoGoConfig& config) {
    config.validate();
    const std::size_t n_pop = config.population;
    const std::size_t d = config.dim;
    Rng root(config.seed);

    Rng shift_rng = root.substream(Stream::Shift);
    const benchmarks::BenchmarkSpec spec = benchmarks::make_spec(config.kind, d, shift_rng);
    CountingEvaluator evaluate{spec};

    RunHistory history;
    history.dim = d;

    // generation 1: Latin hypercube sample, evaluated
    Rng lhs_rng = root.substream(Stream::Lhs);
    Matrix x0 = latin_hypercube(n_pop, d, lhs_rng);
    Vector y0 = evaluate(x0);
    dataprep::Dataset population(x0, y0, 1);
    dataprep::Dataset archive = population;
    record_generation(history, 1, evaluate.count, y0, config.record_snapshots, x0, Matrix());

    Rng init_rng = root.substream(Stream::MlpInit, 1);
    genpair::GenerativePair pair = genpair::make_pair(d, config.weights, config.variant,
                                                      config.ablation, init_rng);

    std::optional<gp::KernelParams> warm_params;
#ifdef EVOGO_TIMING
    double t_prep = 0, t_fit = 0, t_train = 0, t_rest = 0;
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
#endif
    for (std::size_t t = 2; t <= config.generations; ++t) {
        // data preparation (Alg. 1); augmentation fits its own surrogate on
        // the evaluated rows of D_SM, which we then reuse for this generation
        const double boost = std::max(1.0, config.gen_schedule_boost);
        dataprep::AugmentSpec aug;
        aug.threshold = config.aug_threshold;
        aug.rho = config.aug_rho;
        // the epoch cap shrinks with the boost, but the MLL keeps its fine
        // step size: the fit is near its optimum well inside the cap, unlike
        // the generator whose movement budget must be preserved
        aug.surrogate_fit.epochs = static_cast<std::size_t>(
            std::ceil(static_cast<double>(config.gp_epochs) / boost));
        aug.surrogate_fit.early_stop = config.gp_early_stop;
        aug.surrogate_fit.patience = config.gp_patience;
        aug.surrogate_fit.min_improvement = config.gp_min_improvement;
        if (warm_params && config.gp_warm_start) aug.surrogate_fit.init = &*warm_params;

        // surrogate fit on true evaluations only; one retry with a doubled
        // jitter cap before the run aborts
#ifdef EVOGO_TIMING
        auto tp0 = now();
#endif
        dataprep::PrepareResult prep;
        gp::GpModel model;
        for (int attempt = 0;; ++attempt) {
            aug.surrogate_fit.min_jitter = attempt == 0 ? 0.0 : 2e-2;
            Rng aug_rng = root.substream(Stream::Augment, t);
            try {
                prep = dataprep::prepare(archive, n_pop, config.eta, config.eps_window, aug,
                                         nullptr, aug_rng);
                if (prep.surrogate) {
                    model = std::move(*prep.surrogate);
                } else {
                    dataprep::Dataset fit_rows = prep.sm.evaluated_only();
                    model = gp::fit(fit_rows.x, fit_rows.y, aug.surrogate_fit);
                }
                break;
            } catch (const NotPositiveDefinite&) {
                if (attempt > 0) throw;
            }
        }
        if (config.gp_warm_start) warm_params = model.params;
#ifdef EVOGO_TIMING
        auto tp1 = now();
        t_fit += secs(tp0, tp1);
#endif

        // generator training on the frozen surrogate
        if (!config.warm_start) {
            Rng reinit = root.substream(Stream::MlpInit, t);
            pair = genpair::make_pair(d, config.weights, config.variant, config.ablation, reinit);
        }
        genpair::Surrogate surrogate;
        if (config.variant == genpair::Variant::RealEval)
            surrogate.truth = &spec;
        else
            surrogate.model = &model;
        genpair::TrainOptions topts;
        topts.epochs = static_cast<std::size_t>(
            std::ceil(static_cast<double>(config.gen_epochs) / boost));
        topts.batch_size = population.size();
        topts.lr = 0.015 * boost / static_cast<double>(prep.sm.size());
        topts.early_stop = config.gen_early_stop;
        topts.patience = config.gen_patience;
        topts.min_rel_improvement = config.gen_min_rel_improvement;
        Rng shuffle_rng = root.substream(Stream::TrainShuffle, t);
        genpair::TrainReport report =
            genpair::train_pair(pair, surrogate, prep.gm, topts, shuffle_rng);
#ifdef EVOGO_TIMING
        auto tp2 = now();
        t_train += secs(tp1, tp2);
        std::printf("  gen %zu: |sm|=%zu pairs=%zu gp_epochs=%zu gen_epochs=%zu fit=%.2fs train=%.2fs\n",
                    t, prep.sm.size(), prep.gm.size(), model.epochs_run, report.epochs_run,
                    secs(tp0, tp1), secs(tp1, tp2));
#endif

        // population generation and survivor selection
        Matrix offspring_x = generate_population(pair, population);
        Vector offspring_y = evaluate(offspring_x);
        dataprep::Dataset offspring(offspring_x, offspring_y, static_cast<int>(t));
        archive.append(offspring);
        record_generation(history, t, evaluate.count, offspring_y, config.record_snapshots,
                          population.x, offspring_x);
        history.generations.back().gen_loss_trace = std::move(report.epoch_loss);
        history.generations.back().gp_mll_trace = std::move(model.mll_trace);
        population = dataprep::median_merge(population, offspring);
    }

    const std::size_t best = archive.best_index();
    history.best_x = archive.x.row_copy(best);
    history.best_f = archive.y[best];
    history.total_fes = evaluate.count;
    return history;
}

}  // namespace evogo::driver
