#include "evogo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "evogo/kernels.hpp"

namespace fs = std::filesystem;

namespace evogo::harness {

const char* const kRunCsvHeader =
    "run_id,seed,algorithm,benchmark,dim,generation,fe_count,gen_best,best_so_far";

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

const std::string* find_opt(const CellConfig& cell, const std::string& key) {
    auto it = cell.options.find(key);
    return it == cell.options.end() ? nullptr : &it->second;
}

double opt_double(const CellConfig& cell, const std::string& key, double fallback) {
    const std::string* v = find_opt(cell, key);
    return v ? std::stod(*v) : fallback;
}

std::size_t opt_size(const CellConfig& cell, const std::string& key, std::size_t fallback) {
    const std::string* v = find_opt(cell, key);
    return v ? static_cast<std::size_t>(std::stoull(*v)) : fallback;
}

bool opt_bool(const CellConfig& cell, const std::string& key, bool fallback) {
    const std::string* v = find_opt(cell, key);
    if (!v) return fallback;
    return *v == "1" || *v == "true" || *v == "yes" || *v == "on";
}

std::string run_id_for(const CellConfig& cell, std::uint64_t seed) {
    return cell.effective_label() + "_s" + std::to_string(seed);
}

void write_snapshots_csv(std::ostream& os, const driver::RunHistory& history) {
    const std::size_t d = history.dim;
    os << "generation,row";
    for (std::size_t j = 1; j <= d; ++j) os << ",x" << j;
    for (std::size_t j = 1; j <= d; ++j) os << ",x" << j << "_out";
    os << "\n";
    for (const auto& rec : history.generations) {
        if (rec.output_population.empty() || rec.input_population.empty()) continue;
        for (std::size_t i = 0; i < rec.input_population.rows(); ++i) {
            os << rec.generation << "," << i;
            for (std::size_t j = 0; j < d; ++j)
                os << "," << format_double(rec.input_population(i, j));
            for (std::size_t j = 0; j < d; ++j)
                os << "," << format_double(rec.output_population(i, j));
            os << "\n";
        }
    }
}

struct SummaryRow {
    std::string label;
    std::string algorithm, benchmark;
    std::size_t dim = 0;
    std::size_t generation = 0;
    std::size_t fe_count = 0;
    std::vector<double> best_so_far;  // across seeds
};

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return (m % 2 == 1) ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

void write_summary(std::ostream& os, std::vector<SummaryRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        if (a.label != b.label) return a.label < b.label;
        return a.generation < b.generation;
    });
    os << "label,algorithm,benchmark,dim,generation,fe_count,median_best,mean_best,std_best,runs\n";
    for (const auto& r : rows) {
        double mean = 0.0;
        for (double v : r.best_so_far) mean += v;
        mean /= static_cast<double>(r.best_so_far.size());
        double var = 0.0;
        for (double v : r.best_so_far) var += (v - mean) * (v - mean);
        var /= static_cast<double>(r.best_so_far.size());
        os << r.label << "," << r.algorithm << "," << r.benchmark << "," << r.dim << ","
           << r.generation << "," << r.fe_count << "," << format_double(median_of(r.best_so_far))
           << "," << format_double(mean) << "," << format_double(std::sqrt(var)) << ","
           << r.best_so_far.size() << "\n";
    }
}

void accumulate_summary(std::vector<SummaryRow>& rows, const std::string& label,
                        const std::string& algo, const std::string& benchmark, std::size_t dim,
                        std::size_t generation, std::size_t fe_count, double best_so_far) {
    for (auto& r : rows) {
        if (r.label == label && r.generation == generation) {
            r.best_so_far.push_back(best_so_far);
            return;
        }
    }
    SummaryRow r;
    r.label = label;
    r.algorithm = algo;
    r.benchmark = benchmark;
    r.dim = dim;
    r.generation = generation;
    r.fe_count = fe_count;
    r.best_so_far.push_back(best_so_far);
    rows.push_back(std::move(r));
}

}  // namespace

std::string CellConfig::effective_label() const {
    if (!label.empty()) return label;
    return algo + "_" + benchmark + std::to_string(dim) + "d";
}

void ExperimentPlan::validate() const {
    if (cells.empty()) throw InvalidArgument("plan: no cells");
    if (out_dir.empty()) throw InvalidArgument("plan: output directory required");
    for (const auto& cell : cells) {
        if (cell.seeds == 0) throw InvalidArgument("plan: cell with zero seeds");
        benchmarks::kind_from_name(cell.benchmark);
        if (cell.algo != "evogo") baselines::algo_from_name(cell.algo);
    }
}

driver::EvoGoConfig build_evogo_config(const CellConfig& cell, std::uint64_t seed) {
    driver::EvoGoConfig cfg;
    cfg.kind = benchmarks::kind_from_name(cell.benchmark);
    cfg.dim = cell.dim;
    cfg.seed = seed;
    cfg.population = opt_size(cell, "pop", cfg.population);
    cfg.generations = opt_size(cell, "gens", cfg.generations);
    cfg.eta = opt_double(cell, "eta", cfg.eta);
    cfg.eps_window = opt_double(cell, "eps_window", cfg.eps_window);
    cfg.weights.lambda = opt_double(cell, "lambda", cfg.weights.lambda);
    cfg.weights.lambda1 = opt_double(cell, "lambda1", cfg.weights.lambda1);
    cfg.weights.lambda2 = opt_double(cell, "lambda2", cfg.weights.lambda2);
    cfg.weights.corr_sign = opt_double(cell, "corr_sign", cfg.weights.corr_sign);
    cfg.gp_epochs = opt_size(cell, "gp_epochs", cfg.gp_epochs);
    cfg.gen_epochs = opt_size(cell, "gen_epochs", cfg.gen_epochs);
    if (const std::string* v = find_opt(cell, "variant"))
        cfg.variant = genpair::variant_from_name(*v);
    if (const std::string* v = find_opt(cell, "ablation"))
        cfg.ablation = genpair::ablation_from_name(*v);
    cfg.aug_threshold = opt_size(cell, "aug_threshold", cfg.aug_threshold);
    cfg.aug_rho = opt_double(cell, "aug_rho", cfg.aug_rho);
    if (const std::string* v = find_opt(cell, "fe_budget"))
        cfg.fe_budget = static_cast<std::size_t>(std::stoull(*v));
    cfg.warm_start = opt_bool(cell, "warm_start", cfg.warm_start);
    cfg.record_snapshots = opt_bool(cell, "snapshots", cfg.record_snapshots);
    cfg.gp_early_stop = opt_bool(cell, "gp_early_stop", cfg.gp_early_stop);
    cfg.gp_patience = opt_size(cell, "gp_patience", cfg.gp_patience);
    cfg.gp_min_improvement = opt_double(cell, "gp_min_improvement", cfg.gp_min_improvement);
    cfg.gp_warm_start = opt_bool(cell, "gp_warm_start", cfg.gp_warm_start);
    cfg.gen_schedule_boost = opt_double(cell, "gen_boost", cfg.gen_schedule_boost);
    cfg.gen_early_stop = opt_bool(cell, "gen_early_stop", cfg.gen_early_stop);
    cfg.gen_patience = opt_size(cell, "gen_patience", cfg.gen_patience);
    cfg.gen_min_rel_improvement =
        opt_double(cell, "gen_min_rel_improvement", cfg.gen_min_rel_improvement);
    return cfg;
}

baselines::BaselineConfig build_baseline_config(const CellConfig& cell, std::uint64_t seed) {
    baselines::BaselineConfig cfg;
    cfg.algo = baselines::algo_from_name(cell.algo);
    cfg.seed = seed;
    cfg.population = opt_size(cell, "pop", cfg.algo == baselines::Algo::CmaEs ? 0 : 100);
    const std::size_t gens = opt_size(cell, "gens", 10);
    cfg.fe_budget = opt_size(cell, "fe_budget",
                             cfg.population > 0 ? cfg.population * gens : 1000);
    cfg.cma_sigma0 = opt_double(cell, "cma_sigma0", cfg.cma_sigma0);
    cfg.pso_inertia = opt_double(cell, "pso_inertia", cfg.pso_inertia);
    cfg.pso_cognitive = opt_double(cell, "pso_cognitive", cfg.pso_cognitive);
    cfg.pso_social = opt_double(cell, "pso_social", cfg.pso_social);
    cfg.record_snapshots = opt_bool(cell, "snapshots", cfg.record_snapshots);
    return cfg;
}

RunOutcome run_single(const CellConfig& cell, std::uint64_t seed) {
    RunOutcome out;
    out.run_id = run_id_for(cell, seed);
    out.seed = seed;
    out.algo = cell.algo;
    out.benchmark = cell.benchmark;
    out.dim = cell.dim;
    try {
        if (cell.algo == "evogo") {
            out.history = driver::run(build_evogo_config(cell, seed));
        } else {
            baselines::BaselineConfig cfg = build_baseline_config(cell, seed);
            Rng shift_rng = Rng(seed).substream(Stream::Shift);
            const benchmarks::BenchmarkSpec spec =
                benchmarks::make_spec(benchmarks::kind_from_name(cell.benchmark), cell.dim,
                                      shift_rng);
            out.history = baselines::run_baseline(cfg, spec);
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

void write_run_csv(std::ostream& os, const RunOutcome& outcome) {
    os << kRunCsvHeader << "\n";
    for (const auto& rec : outcome.history.generations) {
        os << outcome.run_id << "," << outcome.seed << "," << outcome.algo << ","
           << outcome.benchmark << "," << outcome.dim << "," << rec.generation << ","
           << rec.fe_count << "," << format_double(rec.gen_best) << ","
           << format_double(rec.best_so_far) << "\n";
    }
}

int run_plan(const ExperimentPlan& plan) {
    plan.validate();
    fs::create_directories(plan.out_dir);

    struct Task {
        const CellConfig* cell;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& cell : plan.cells)
        for (std::size_t s = 0; s < cell.seeds; ++s)
            tasks.push_back({&cell, cell.base_seed + s});

    std::size_t workers = plan.workers;
    if (workers == 0) {
        if (const char* env = std::getenv("EVOGO_WORKERS")) workers = std::strtoull(env, nullptr, 10);
        if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, tasks.size());

    std::vector<RunOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&](bool pin_serial) {
        // worker threads run their kernels serially so concurrent runs do
        // not oversubscribe the machine
        std::optional<kernels::SerialSection> guard;
        if (pin_serial) guard.emplace();
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            outcomes[i] = run_single(*tasks[i].cell, tasks[i].seed);
        }
    };
    if (workers <= 1) {
        work(false);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, true);
        for (auto& t : pool) t.join();
    }

    // per-run artifacts
    for (const auto& out : outcomes) {
        if (!out.ok) continue;
        std::ofstream run_os(fs::path(plan.out_dir) / (out.run_id + ".csv"), std::ios::binary);
        write_run_csv(run_os, out);
        bool has_snapshots = false;
        for (const auto& rec : out.history.generations)
            if (!rec.output_population.empty()) has_snapshots = true;
        if (has_snapshots) {
            std::ofstream snap_os(fs::path(plan.out_dir) / (out.run_id + "_snapshots.csv"),
                                  std::ios::binary);
            write_snapshots_csv(snap_os, out.history);
        }
    }

    // manifest with per-run status
    {
        std::ofstream os(fs::path(plan.out_dir) / "runs.csv", std::ios::binary);
        os << "run_id,seed,algorithm,benchmark,dim,status\n";
        for (const auto& out : outcomes)
            os << out.run_id << "," << out.seed << "," << out.algo << "," << out.benchmark << ","
               << out.dim << "," << (out.ok ? "ok" : "failed: " + out.error) << "\n";
    }

    // aggregate summary over successful runs
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!outcomes[i].ok) continue;
        const std::string label = tasks[i].cell->effective_label();
        for (const auto& rec : outcomes[i].history.generations)
            accumulate_summary(rows, label, outcomes[i].algo, outcomes[i].benchmark,
                               outcomes[i].dim, rec.generation, rec.fe_count, rec.best_so_far);
    }
    {
        std::ofstream os(fs::path(plan.out_dir) / "summary.csv", std::ios::binary);
        write_summary(os, rows);
    }

    for (const auto& out : outcomes)
        if (!out.ok) return 1;
    return 0;
}

int summarize_directory(const std::string& dir) {
    std::vector<SummaryRow> rows;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".csv") continue;
        if (name == "summary.csv" || name == "runs.csv") continue;
        if (name.find("_snapshots") != std::string::npos) continue;
        if (name.rfind("vectors_", 0) == 0) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream is(path);
        std::string line;
        if (!std::getline(is, line)) continue;
        if (trim(line) != kRunCsvHeader) continue;
        while (std::getline(is, line)) {
            if (trim(line).empty()) continue;
            const std::vector<std::string> f = split_csv(line);
            if (f.size() != 9) continue;
            const std::string& run_id = f[0];
            const std::size_t cut = run_id.rfind("_s");
            const std::string label = cut == std::string::npos ? run_id : run_id.substr(0, cut);
            accumulate_summary(rows, label, f[2], f[3], std::stoull(f[4]), std::stoull(f[5]),
                               std::stoull(f[6]), std::stod(f[8]));
        }
    }
    if (rows.empty()) {
        return 1;
    }
    std::ofstream os(fs::path(dir) / "summary.csv", std::ios::binary);
    write_summary(os, rows);
    return 0;
}

void dump_vectors(const driver::RunHistory& history, std::size_t generation, std::ostream& os) {
    const driver::GenerationRecord* rec = nullptr;
    for (const auto& r : history.generations)
        if (r.generation == generation) rec = &r;
    if (!rec || rec->input_population.empty() || rec->output_population.empty())
        throw SnapshotMissing("dump_vectors: no recorded populations for generation " +
                              std::to_string(generation));
    const std::size_t d = history.dim;
    for (std::size_t j = 1; j <= d; ++j) os << (j > 1 ? "," : "") << "x" << j;
    for (std::size_t j = 1; j <= d; ++j) os << ",x" << j << "_out";
    os << ",norm\n";
    for (std::size_t i = 0; i < rec->input_population.rows(); ++i) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double t = rec->output_population(i, j) - rec->input_population(i, j);
            norm2 += t * t;
        }
        for (std::size_t j = 0; j < d; ++j)
            os << (j > 0 ? "," : "") << format_double(rec->input_population(i, j));
        for (std::size_t j = 0; j < d; ++j) os << "," << format_double(rec->output_population(i, j));
        os << "," << format_double(std::sqrt(norm2)) << "\n";
    }
}

int dump_vectors_from_dir(const std::string& dir, const std::string& run_id_arg,
                          std::size_t generation) {
    std::string run_id = run_id_arg;
    if (run_id.empty()) {
        std::vector<std::string> candidates;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            const std::size_t pos = name.find("_snapshots.csv");
            if (pos != std::string::npos) candidates.push_back(name.substr(0, pos));
        }
        if (candidates.size() != 1)
            throw InvalidArgument("vectors: --run-id required (found " +
                                  std::to_string(candidates.size()) + " snapshot files)");
        run_id = candidates[0];
    }
    const fs::path snap_path = fs::path(dir) / (run_id + "_snapshots.csv");
    std::ifstream is(snap_path);
    if (!is) throw SnapshotMissing("vectors: missing " + snap_path.string());

    std::string line;
    if (!std::getline(is, line)) throw SnapshotMissing("vectors: empty snapshot file");
    const std::size_t d = (split_csv(trim(line)).size() - 2) / 2;

    std::ostringstream body;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (std::stoull(f[0]) != generation) continue;
        double norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double in = std::stod(f[2 + j]);
            const double out = std::stod(f[2 + d + j]);
            norm2 += (out - in) * (out - in);
        }
        for (std::size_t j = 0; j < d; ++j) body << (j > 0 ? "," : "") << f[2 + j];
        for (std::size_t j = 0; j < d; ++j) body << "," << f[2 + d + j];
        body << "," << format_double(std::sqrt(norm2)) << "\n";
        ++rows;
    }
    if (rows == 0)
        throw SnapshotMissing("vectors: no snapshot rows for generation " +
                              std::to_string(generation));

    std::ofstream os(fs::path(dir) / ("vectors_" + run_id + "_gen" + std::to_string(generation) +
                                      ".csv"),
                     std::ios::binary);
    for (std::size_t j = 1; j <= d; ++j) os << (j > 1 ? "," : "") << "x" << j;
    for (std::size_t j = 1; j <= d; ++j) os << ",x" << j << "_out";
    os << ",norm\n" << body.str();
    return 0;
}

std::vector<CellConfig> parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("config: cannot open " + path);
    std::vector<CellConfig> cells;
    std::map<std::string, std::string> defaults;
    CellConfig* current = nullptr;

    auto apply = [](CellConfig& cell, const std::string& key, const std::string& value) {
        if (key == "algo") cell.algo = value;
        else if (key == "benchmark") cell.benchmark = value;
        else if (key == "dim") cell.dim = std::stoull(value);
        else if (key == "seeds") cell.seeds = std::stoull(value);
        else if (key == "seed") cell.base_seed = std::stoull(value);
        else cell.options[key] = value;
    };

    std::string line;
    while (std::getline(is, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            CellConfig cell;
            cell.label = trim(line.substr(1, line.size() - 2));
            for (const auto& [k, v] : defaults) apply(cell, k, v);
            cells.push_back(std::move(cell));
            current = &cells.back();
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("config: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (current) {
            apply(*current, key, value);
        } else {
            defaults[key] = value;
        }
    }
    if (cells.empty()) {
        // a sectionless file describes a single cell
        CellConfig cell;
        for (const auto& [k, v] : defaults) apply(cell, k, v);
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace evogo::harness
