#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "evogo/harness.hpp"

using namespace evogo;

int main(int argc, char** argv) {
    CLI::App app{"EvoGO optimizer and experiment harness"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute an experiment plan");
    std::string config_path, algo, benchmark, variant, ablation, out_dir = "results";
    std::size_t dim = 0, seeds = 0, pop = 0, gens = 0, workers = 0;
    run->add_option("--config", config_path, "plan file (key = value with [cell] sections)");
    run->add_option("--algo", algo, "evogo|cmaes|pso|random");
    run->add_option("--benchmark", benchmark, "ackley|rosenbrock|rastrigin|levy");
    run->add_option("--dim", dim, "benchmark dimension");
    run->add_option("--seeds", seeds, "number of seeds per cell");
    run->add_option("--pop", pop, "population size");
    run->add_option("--gens", gens, "generations");
    run->add_option("--variant", variant, "kg|lcb|realeval");
    run->add_option("--ablation", ablation, "none|singlenet");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--workers", workers, "concurrent runs (default: EVOGO_WORKERS env)");

    // vectors
    auto* vectors = app.add_subcommand("vectors", "dump transport vectors of one generation");
    std::string run_dir, run_id;
    std::size_t generation = 0;
    vectors->add_option("--run", run_dir, "run CSV directory")->required();
    vectors->add_option("--generation", generation, "generation index")->required();
    vectors->add_option("--run-id", run_id, "run id (required when the directory holds several)");

    // summarize
    auto* summarize = app.add_subcommand("summarize", "rebuild summary.csv from run CSVs");
    std::string sum_dir;
    summarize->add_option("--out", sum_dir, "run CSV directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            harness::ExperimentPlan plan;
            if (!config_path.empty()) {
                plan.cells = harness::parse_config_file(config_path);
            } else {
                plan.cells.emplace_back();
            }
            // CLI flags override file values in every cell
            for (auto& cell : plan.cells) {
                if (!algo.empty()) cell.algo = algo;
                if (!benchmark.empty()) cell.benchmark = benchmark;
                if (dim) cell.dim = dim;
                if (seeds) cell.seeds = seeds;
                if (pop) cell.options["pop"] = std::to_string(pop);
                if (gens) cell.options["gens"] = std::to_string(gens);
                if (!variant.empty()) cell.options["variant"] = variant;
                if (!ablation.empty()) cell.options["ablation"] = ablation;
            }
            plan.out_dir = out_dir;
            plan.workers = workers;
            return harness::run_plan(plan);
        }
        if (vectors->parsed()) return harness::dump_vectors_from_dir(run_dir, run_id, generation);
        if (summarize->parsed()) return harness::summarize_directory(sum_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
