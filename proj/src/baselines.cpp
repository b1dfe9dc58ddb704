#include "evogo/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "evogo/linalg.hpp"

namespace evogo::baselines {

namespace {

struct Recorder {
    driver::RunHistory history;
    std::size_t fes = 0;

    void add_generation(const Vector& gen_y, const Matrix* population) {
        driver::GenerationRecord rec;
        rec.generation = history.generations.size() + 1;
        fes += gen_y.size();
        rec.fe_count = fes;
        rec.gen_best = *std::min_element(gen_y.begin(), gen_y.end());
        rec.best_so_far = history.generations.empty()
                              ? rec.gen_best
                              : std::min(history.generations.back().best_so_far, rec.gen_best);
        if (population) rec.input_population = *population;
        history.generations.push_back(std::move(rec));
    }
};

void track_best(const Matrix& x, const Vector& y, Vector& best_x, double& best_f) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < best_f) {
            best_f = y[i];
            best_x = x.row_copy(i);
        }
    }
}

driver::RunHistory run_random(const BaselineConfig& config, const benchmarks::BenchmarkSpec& spec,
                              Rng& rng) {
    const std::size_t pop = config.effective_population(spec.dim);
    const std::size_t gens = config.fe_budget / pop;
    Recorder rec;
    rec.history.dim = spec.dim;
    Vector best_x;
    double best_f = 1e300;
    for (std::size_t g = 0; g < gens; ++g) {
        Matrix x(pop, spec.dim);
        for (std::size_t i = 0; i < pop; ++i)
            for (std::size_t j = 0; j < spec.dim; ++j) x(i, j) = rng.uniform();
        Vector y = benchmarks::evaluate(spec, x);
        track_best(x, y, best_x, best_f);
        rec.add_generation(y, config.record_snapshots ? &x : nullptr);
    }
    rec.history.best_x = best_x;
    rec.history.best_f = best_f;
    rec.history.total_fes = rec.fes;
    return rec.history;
}

driver::RunHistory run_pso(const BaselineConfig& config, const benchmarks::BenchmarkSpec& spec,
                           Rng& rng) {
    const std::size_t pop = config.effective_population(spec.dim);
    const std::size_t d = spec.dim;
    const std::size_t iters = config.fe_budget / pop;

    Matrix x(pop, d), vel(pop, d), pbest_x(pop, d);
    Vector pbest_y(pop, 1e300);
    for (std::size_t i = 0; i < pop; ++i)
        for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.uniform();

    Recorder rec;
    rec.history.dim = d;
    Vector gbest_x;
    double gbest_y = 1e300;

    for (std::size_t it = 0; it < iters; ++it) {
        if (it > 0) {
            for (std::size_t i = 0; i < pop; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    const double r1 = rng.uniform();
                    const double r2 = rng.uniform();
                    vel(i, j) = config.pso_inertia * vel(i, j) +
                                config.pso_cognitive * r1 * (pbest_x(i, j) - x(i, j)) +
                                config.pso_social * r2 * (gbest_x[j] - x(i, j));
                    x(i, j) = std::clamp(x(i, j) + vel(i, j), 0.0, 1.0);
                }
            }
        }
        Vector y = benchmarks::evaluate(spec, x);
        for (std::size_t i = 0; i < pop; ++i) {
            if (y[i] < pbest_y[i]) {
                pbest_y[i] = y[i];
                for (std::size_t j = 0; j < d; ++j) pbest_x(i, j) = x(i, j);
            }
        }
        track_best(x, y, gbest_x, gbest_y);
        rec.add_generation(y, config.record_snapshots ? &x : nullptr);
    }
    rec.history.best_x = gbest_x;
    rec.history.best_f = gbest_y;
    rec.history.total_fes = rec.fes;
    return rec.history;
}

// CMA-ES with rank-one and rank-mu covariance updates (Hansen's reference
// parameterization); candidates are clamped into the box for evaluation.
driver::RunHistory run_cmaes(const BaselineConfig& config, const benchmarks::BenchmarkSpec& spec,
                             Rng& rng) {
    const std::size_t d = spec.dim;
    const double nd = static_cast<double>(d);
    const std::size_t lambda = config.effective_population(d);
    const std::size_t mu = lambda / 2;

    Vector weights(mu);
    double wsum = 0.0;
    for (std::size_t i = 0; i < mu; ++i) {
        weights[i] = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
        wsum += weights[i];
    }
    double w2 = 0.0;
    for (double& w : weights) {
        w /= wsum;
        w2 += w * w;
    }
    const double mueff = 1.0 / w2;
    const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
    const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
    const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) /
                                              ((nd + 2.0) * (nd + 2.0) + mueff));
    const double damps =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

    Vector xmean(d, 0.5);
    double sigma = config.cma_sigma0;
    Vector pc(d, 0.0), ps(d, 0.0);
    Matrix b = Matrix::identity(d);
    Vector diag_d(d, 1.0);
    Matrix c = Matrix::identity(d);
    Matrix inv_sqrt_c = Matrix::identity(d);
    std::size_t eigen_eval = 0;

    Recorder rec;
    rec.history.dim = d;
    Vector best_x;
    double best_f = 1e300;
    std::size_t fes = 0;

    Matrix cand(lambda, d), cand_clamped(lambda, d), zs(lambda, d);
    while (fes + lambda <= config.fe_budget) {
        for (std::size_t i = 0; i < lambda; ++i) {
            for (std::size_t j = 0; j < d; ++j) zs(i, j) = rng.gaussian();
            for (std::size_t j = 0; j < d; ++j) {
                double step = 0.0;
                for (std::size_t k = 0; k < d; ++k) step += b(j, k) * diag_d[k] * zs(i, k);
                cand(i, j) = xmean[j] + sigma * step;
                cand_clamped(i, j) = std::clamp(cand(i, j), 0.0, 1.0);
            }
        }
        Vector y = benchmarks::evaluate(spec, cand_clamped);
        fes += lambda;
        track_best(cand_clamped, y, best_x, best_f);
        rec.add_generation(y, config.record_snapshots ? &cand_clamped : nullptr);

        std::vector<std::size_t> order(lambda);
        for (std::size_t i = 0; i < lambda; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a2, std::size_t b2) { return y[a2] < y[b2]; });

        Vector xold = xmean;
        std::fill(xmean.begin(), xmean.end(), 0.0);
        for (std::size_t r = 0; r < mu; ++r)
            for (std::size_t j = 0; j < d; ++j) xmean[j] += weights[r] * cand(order[r], j);

        Vector delta(d);
        for (std::size_t j = 0; j < d; ++j) delta[j] = (xmean[j] - xold[j]) / sigma;
        Vector cdelta(d, 0.0);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) cdelta[j] += inv_sqrt_c(j, k) * delta[k];
        const double csn = std::sqrt(cs * (2.0 - cs) * mueff);
        double ps_norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            ps[j] = (1.0 - cs) * ps[j] + csn * cdelta[j];
            ps_norm2 += ps[j] * ps[j];
        }
        const double gen_count = static_cast<double>(fes) / static_cast<double>(lambda);
        const double hsig_denom = std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen_count));
        const bool hsig = std::sqrt(ps_norm2) / hsig_denom / chi_n < 1.4 + 2.0 / (nd + 1.0);
        const double ccn = std::sqrt(cc * (2.0 - cc) * mueff);
        for (std::size_t j = 0; j < d; ++j)
            pc[j] = (1.0 - cc) * pc[j] + (hsig ? ccn * delta[j] : 0.0);

        // C <- (1-c1-cmu) C + c1 (pc pc^T + (1-hsig) cc (2-cc) C) + cmu sum w_r y_r y_r^T
        const double hfix = (1.0 - (hsig ? 1.0 : 0.0)) * cc * (2.0 - cc);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                c(j, k) = (1.0 - c1 - cmu + c1 * hfix) * c(j, k) + c1 * pc[j] * pc[k];
        for (std::size_t r = 0; r < mu; ++r) {
            const std::size_t i = order[r];
            for (std::size_t j = 0; j < d; ++j) {
                const double yj = (cand(i, j) - xold[j]) / sigma;
                for (std::size_t k = 0; k < d; ++k)
                    c(j, k) += cmu * weights[r] * yj * (cand(i, k) - xold[k]) / sigma;
            }
        }

        sigma *= std::exp((cs / damps) * (std::sqrt(ps_norm2) / chi_n - 1.0));

        if (static_cast<double>(fes - eigen_eval) >
            static_cast<double>(lambda) / (c1 + cmu) / nd / 10.0) {
            eigen_eval = fes;
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = j + 1; k < d; ++k) {
                    const double avg = 0.5 * (c(j, k) + c(k, j));
                    c(j, k) = c(k, j) = avg;
                }
            Vector evals;
            linalg::symmetric_eigen(c, b, evals);
            for (std::size_t j = 0; j < d; ++j) diag_d[j] = std::sqrt(std::max(evals[j], 1e-20));
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k) {
                    double s = 0.0;
                    for (std::size_t r = 0; r < d; ++r) s += b(j, r) / diag_d[r] * b(k, r);
                    inv_sqrt_c(j, k) = s;
                }
        }
    }
    rec.history.best_x = best_x;
    rec.history.best_f = best_f;
    rec.history.total_fes = fes;
    return rec.history;
}

}  // namespace

Algo algo_from_name(const std::string& name) {
    if (name == "cmaes") return Algo::CmaEs;
    if (name == "pso") return Algo::Pso;
    if (name == "random") return Algo::Random;
    throw InvalidArgument("unknown baseline: " + name);
}

std::size_t BaselineConfig::effective_population(std::size_t dim) const {
    if (population > 0) return population;
    if (algo == Algo::CmaEs)
        return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dim))));
    return 100;
}

void BaselineConfig::validate(std::size_t dim) const {
    const std::size_t pop = effective_population(dim);
    if (pop < 2) throw InvalidArgument("baseline: population must be >= 2");
    if (fe_budget < pop) throw InvalidArgument("baseline: budget below one generation");
    // an explicit population must tile the budget exactly; the CMA-ES
    // default rule instead runs as many full generations as fit
    if (population > 0 && fe_budget % population != 0)
        throw InvalidArgument("baseline: budget not divisible by population size");
}

driver::RunHistory run_baseline(const BaselineConfig& config, const benchmarks::BenchmarkSpec& spec) {
    config.validate(spec.dim);
    Rng root(config.seed);
    Rng rng = root.substream(Stream::Baseline);
    switch (config.algo) {
        case Algo::Random: return run_random(config, spec, rng);
        case Algo::Pso: return run_pso(config, spec, rng);
        case Algo::CmaEs: return run_cmaes(config, spec, rng);
    }
    throw InvalidArgument("baseline: unknown algorithm");
}

}  // namespace evogo::baselines
