#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "evogo/gp.hpp"
#include "evogo/matrix.hpp"
#include "evogo/rng.hpp"

namespace evogo::dataprep {

enum class Provenance : std::uint8_t { Evaluated, Augmented };

// Archive of solutions with aligned fitness values, generation tags and a
// provenance flag per row. Augmented rows carry surrogate scores, never
// true evaluations, and are filtered out of surrogate training.
struct Dataset {
    Matrix x;
    Vector y;
    std::vector<int> generation;
    std::vector<Provenance> provenance;

    Dataset() = default;
    Dataset(Matrix xs, Vector ys, int gen, Provenance p = Provenance::Evaluated);

    std::size_t size() const { return y.size(); }
    std::size_t dim() const { return x.cols(); }

    void append_row(const double* xr, std::size_t d, double yv, int gen, Provenance p);
    void append(const Dataset& other);

    Dataset evaluated_only() const;
    std::size_t best_index() const;  // smallest fitness, first on ties
};

// Cartesian pairing of the inferior set against the superior set. Rows are
// stored once; `pairs` holds (inferior index, superior index).
struct PairedDataset {
    Matrix inferior_x;
    Vector inferior_y;
    Matrix superior_x;
    Vector superior_y;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

    std::size_t size() const { return pairs.size(); }
    std::size_t dim() const { return inferior_x.cols(); }
};

struct AugmentSpec {
    std::size_t threshold = 64;  // augment only when |D'| < threshold
    double rho = 1.0;            // number of synthetic rows as a fraction of |D'|
    gp::FitOptions surrogate_fit{};  // used when no surrogate hint is supplied
};

struct PrepareResult {
    Dataset sm;        // surrogate training set (elites + sliding window [+ augmented])
    PairedDataset gm;  // generative training pairs
    std::optional<gp::GpModel> surrogate;  // the model fitted for augmentation scoring, if any
};

/// Elite selection with sliding window, optional distribution-based
/// augmentation, eta-quantile split and Cartesian pairing.
PrepareResult prepare(const Dataset& history, std::size_t init_size, double eta, double eps_window,
                      const std::optional<AugmentSpec>& augment, const gp::GpModel* surrogate_hint,
                      Rng& rng);

/// Survivor rule: keep pooled rows with fitness strictly below the pooled
/// median; if that empties the pool, keep the single best row.
Dataset median_merge(const Dataset& current, const Dataset& offspring);

}  // namespace evogo::dataprep
