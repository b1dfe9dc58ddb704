#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "evogo/baselines.hpp"
#include "evogo/driver.hpp"

namespace evogo::harness {

// One experiment cell: an algorithm/benchmark/dimension triple plus config
// overrides, run over `seeds` consecutive seeds starting at `base_seed`.
struct CellConfig {
    std::string label;
    std::string algo = "evogo";
    std::string benchmark = "ackley";
    std::size_t dim = 2;
    std::size_t seeds = 1;
    std::uint64_t base_seed = 1;
    std::map<std::string, std::string> options;  // raw key/value overrides

    std::string effective_label() const;
};

struct ExperimentPlan {
    std::vector<CellConfig> cells;
    std::string out_dir;
    std::size_t workers = 0;  // 0: EVOGO_WORKERS env var, else hardware concurrency

    void validate() const;
};

// Materialized per-run configuration.
driver::EvoGoConfig build_evogo_config(const CellConfig& cell, std::uint64_t seed);
baselines::BaselineConfig build_baseline_config(const CellConfig& cell, std::uint64_t seed);

struct RunOutcome {
    std::string run_id;
    std::uint64_t seed = 0;
    std::string algo, benchmark;
    std::size_t dim = 0;
    bool ok = false;
    std::string error;
    driver::RunHistory history;
};

/// Execute one cell for one seed (shared by the plan runner and tests).
RunOutcome run_single(const CellConfig& cell, std::uint64_t seed);

/// Execute every run of the plan (concurrently across runs up to the worker
/// count), write one convergence CSV per run plus snapshot files, a run
/// manifest with per-run status, and the aggregate summary. Returns 0 when
/// every run succeeded.
int run_plan(const ExperimentPlan& plan);

/// Recompute summary.csv from the run CSVs found in a directory.
int summarize_directory(const std::string& dir);

// Fixed convergence CSV schema.
extern const char* const kRunCsvHeader;
void write_run_csv(std::ostream& os, const RunOutcome& outcome);

/// Transport vectors of one recorded generation: input coordinates, output
/// coordinates, displacement norm, one row per individual. Throws
/// SnapshotMissing when that generation has no recorded populations.
void dump_vectors(const driver::RunHistory& history, std::size_t generation, std::ostream& os);

/// CLI `vectors` entry: read `<run_id>_snapshots.csv` from a run directory
/// and write `vectors_<run_id>_gen<g>.csv` next to it.
int dump_vectors_from_dir(const std::string& dir, const std::string& run_id, std::size_t generation);

// Flat key=value config file with one [section] per cell; keys before the
// first section act as defaults for every cell.
std::vector<CellConfig> parse_config_file(const std::string& path);

// Deterministic shortest round-trip double formatting used for all CSVs.
std::string format_double(double v);

}  // namespace evogo::harness
