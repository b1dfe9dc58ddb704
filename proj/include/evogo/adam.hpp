#pragma once

#include <cstdint>

#include "evogo/matrix.hpp"

namespace evogo {

// Bias-corrected Adam. One state covers one parameter vector; the GP and
// MLP trainers share this implementation.
struct AdamState {
    Vector m, v;
    std::int64_t t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t n = 0, double learning_rate = 1e-3)
        : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

/// In-place Adam update of `params` with gradient `grads`; increments the
/// step counter. Throws DimensionMismatch if lengths disagree.
void adam_step(Vector& params, const Vector& grads, AdamState& state);

// Slice interface used when one logical parameter vector is stored as
// several tensors: call begin_step once, then update each slice at its
// offset into the state.
void adam_begin_step(AdamState& state);
void adam_update_slice(double* params, const double* grads, std::size_t len, std::size_t offset,
                       AdamState& state);

}  // namespace evogo
