#include "evogo/dataprep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evogo::dataprep {

namespace {

// stable ascending-fitness order (ties resolved by row index)
std::vector<std::size_t> fitness_order(const Vector& y) {
    std::vector<std::size_t> idx(y.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    return idx;
}

double population_std(const Vector& v) {
    if (v.empty()) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

Dataset::Dataset(Matrix xs, Vector ys, int gen, Provenance p)
    : x(std::move(xs)), y(std::move(ys)) {
    if (x.rows() != y.size()) throw DimensionMismatch("Dataset: rows / fitness length");
    generation.assign(y.size(), gen);
    provenance.assign(y.size(), p);
}

void Dataset::append_row(const double* xr, std::size_t d, double yv, int gen, Provenance p) {
    if (x.empty()) {
        x = Matrix(0, d);
    }
    if (d != x.cols()) throw DimensionMismatch("Dataset::append_row: width");
    Matrix nx(x.rows() + 1, d);
    std::copy(x.data(), x.data() + x.size(), nx.data());
    std::copy(xr, xr + d, nx.row(x.rows()));
    x = std::move(nx);
    y.push_back(yv);
    generation.push_back(gen);
    provenance.push_back(p);
}

void Dataset::append(const Dataset& other) {
    if (other.size() == 0) return;
    if (size() == 0) {
        *this = other;
        return;
    }
    if (other.dim() != dim()) throw DimensionMismatch("Dataset::append: width");
    Matrix nx(x.rows() + other.x.rows(), dim());
    std::copy(x.data(), x.data() + x.size(), nx.data());
    std::copy(other.x.data(), other.x.data() + other.x.size(), nx.data() + x.size());
    x = std::move(nx);
    y.insert(y.end(), other.y.begin(), other.y.end());
    generation.insert(generation.end(), other.generation.begin(), other.generation.end());
    provenance.insert(provenance.end(), other.provenance.begin(), other.provenance.end());
}

Dataset Dataset::evaluated_only() const {
    Dataset out;
    for (std::size_t i = 0; i < size(); ++i)
        if (provenance[i] == Provenance::Evaluated)
            out.append_row(x.row(i), dim(), y[i], generation[i], Provenance::Evaluated);
    return out;
}

std::size_t Dataset::best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < size(); ++i)
        if (y[i] < y[best]) best = i;
    return best;
}

PrepareResult prepare(const Dataset& history, std::size_t init_size, double eta, double eps_window,
                      const std::optional<AugmentSpec>& augment, const gp::GpModel* surrogate_hint,
                      Rng& rng) {
    if (history.size() == 0) throw EmptyData("prepare: empty history");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("prepare: eta must lie in (0,1)");
    if (eps_window < 0.0) throw InvalidArgument("prepare: eps_window must be >= 0");
    const std::size_t n = history.size();
    const std::size_t d = history.dim();

    // elite selection: best init_size rows of the whole archive
    const std::vector<std::size_t> order = fitness_order(history.y);
    const std::size_t n_elite = std::min(init_size, n);
    std::vector<std::size_t> elite(order.begin(), order.begin() + n_elite);
    std::vector<char> in_elite(n, 0);
    for (std::size_t i : elite) in_elite[i] = 1;

    // sliding window over the previous generation, thresholded against the
    // current generation's fitness spread
    int cur_gen = history.generation[0];
    for (int g : history.generation) cur_gen = std::max(cur_gen, g);
    Vector cur_y;
    for (std::size_t i = 0; i < n; ++i)
        if (history.generation[i] == cur_gen && history.provenance[i] == Provenance::Evaluated)
            cur_y.push_back(history.y[i]);
    std::vector<std::size_t> window;
    if (!cur_y.empty()) {
        const double cutoff =
            *std::max_element(cur_y.begin(), cur_y.end()) + eps_window * population_std(cur_y);
        for (std::size_t i = 0; i < n; ++i)
            if (history.generation[i] == cur_gen - 1 && !in_elite[i] && history.y[i] <= cutoff)
                window.push_back(i);
    }

    // sm_elite_idx maps each D_SM row to its row in D' (npos for window rows)
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    Dataset sm;
    Dataset elite_set;
    std::vector<std::size_t> sm_elite_idx;
    for (std::size_t i : elite)
        elite_set.append_row(history.x.row(i), d, history.y[i], history.generation[i],
                             history.provenance[i]);
    sm = elite_set;
    for (std::size_t i = 0; i < elite_set.size(); ++i) sm_elite_idx.push_back(i);
    for (std::size_t i : window) {
        sm.append_row(history.x.row(i), d, history.y[i], history.generation[i],
                      history.provenance[i]);
        sm_elite_idx.push_back(npos);
    }

    // optional augmentation: moment-matched diagonal Gaussian around the
    // elites, scored by the surrogate posterior mean
    PrepareResult result;
    if (augment && elite_set.size() < augment->threshold) {
        const std::size_t n_aug =
            static_cast<std::size_t>(std::llround(augment->rho * static_cast<double>(elite_set.size())));
        if (n_aug > 0) {
            const gp::GpModel* scorer = surrogate_hint;
            if (!scorer) {
                Dataset fit_rows = sm.evaluated_only();
                result.surrogate = gp::fit(fit_rows.x, fit_rows.y, augment->surrogate_fit);
                scorer = &*result.surrogate;
            }
            Vector mean(d, 0.0), var(d, 0.0);
            const std::size_t ne = elite_set.size();
            for (std::size_t i = 0; i < ne; ++i)
                for (std::size_t j = 0; j < d; ++j) mean[j] += elite_set.x(i, j);
            for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(ne);
            for (std::size_t i = 0; i < ne; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    const double t = elite_set.x(i, j) - mean[j];
                    var[j] += t * t;
                }
            for (std::size_t j = 0; j < d; ++j) var[j] = var[j] / static_cast<double>(ne) + 1e-12;

            Matrix synth(n_aug, d);
            for (std::size_t i = 0; i < n_aug; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    double v = mean[j] + std::sqrt(var[j]) * rng.gaussian();
                    synth(i, j) = std::clamp(v, 0.0, 1.0);
                }
            Vector score, score_var;
            gp::posterior_mean_var(*scorer, synth, score, score_var);
            for (std::size_t i = 0; i < n_aug; ++i) {
                sm_elite_idx.push_back(elite_set.size());
                elite_set.append_row(synth.row(i), d, score[i], cur_gen, Provenance::Augmented);
                sm.append_row(synth.row(i), d, score[i], cur_gen, Provenance::Augmented);
            }
        }
    }

    // eta-quantile split of the elites; the remainder of D_SM is inferior
    const std::size_t n_plus = static_cast<std::size_t>(
        std::ceil(eta * static_cast<double>(elite_set.size())));
    const std::vector<std::size_t> elite_order = fitness_order(elite_set.y);
    std::vector<char> is_sup(elite_set.size(), 0);
    for (std::size_t r = 0; r < n_plus; ++r) is_sup[elite_order[r]] = 1;

    PairedDataset gm;
    gm.superior_x = Matrix(n_plus, d);
    gm.superior_y.resize(n_plus);
    for (std::size_t r = 0; r < n_plus; ++r) {
        const std::size_t i = elite_order[r];
        std::copy(elite_set.x.row(i), elite_set.x.row(i) + d, gm.superior_x.row(r));
        gm.superior_y[r] = elite_set.y[i];
    }
    // D_GM^- = D_SM minus the superior rows
    auto row_is_superior = [&](std::size_t sm_row) {
        const std::size_t e = sm_elite_idx[sm_row];
        return e != npos && is_sup[e];
    };
    std::size_t n_minus = 0;
    for (std::size_t i = 0; i < sm.size(); ++i)
        if (!row_is_superior(i)) ++n_minus;
    if (n_plus == 0 || n_minus == 0) throw EmptySplit("prepare: one side of the split is empty");
    gm.inferior_x = Matrix(n_minus, d);
    gm.inferior_y.resize(n_minus);
    std::size_t r = 0;
    for (std::size_t i = 0; i < sm.size(); ++i) {
        if (row_is_superior(i)) continue;
        std::copy(sm.x.row(i), sm.x.row(i) + d, gm.inferior_x.row(r));
        gm.inferior_y[r] = sm.y[i];
        ++r;
    }
    gm.pairs.reserve(n_minus * n_plus);
    for (std::uint32_t i = 0; i < n_minus; ++i)
        for (std::uint32_t j = 0; j < n_plus; ++j) gm.pairs.emplace_back(i, j);

    result.sm = std::move(sm);
    result.gm = std::move(gm);
    return result;
}

Dataset median_merge(const Dataset& current, const Dataset& offspring) {
    if (current.size() && offspring.size() && current.dim() != offspring.dim())
        throw DimensionMismatch("median_merge: dimension mismatch");
    Dataset pooled = current;
    pooled.append(offspring);
    if (pooled.size() == 0) return pooled;

    Vector sorted = pooled.y;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = (m % 2 == 1) ? sorted[m / 2]
                                       : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

    Dataset out;
    for (std::size_t i = 0; i < pooled.size(); ++i)
        if (pooled.y[i] < median)
            out.append_row(pooled.x.row(i), pooled.dim(), pooled.y[i], pooled.generation[i],
                           pooled.provenance[i]);
    if (out.size() == 0) {
        const std::size_t b = pooled.best_index();
        out.append_row(pooled.x.row(b), pooled.dim(), pooled.y[b], pooled.generation[b],
                       pooled.provenance[b]);
    }
    return out;
}

}  // namespace evogo::dataprep
