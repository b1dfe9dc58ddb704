#include "evogo/adam.hpp"

#include <cmath>

namespace evogo {

void adam_begin_step(AdamState& state) { ++state.t; }

void adam_update_slice(double* params, const double* grads, std::size_t len, std::size_t offset,
                       AdamState& state) {
    if (offset + len > state.m.size()) throw DimensionMismatch("adam_update_slice: state too small");
    const double b1 = state.beta1, b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    double* m = state.m.data() + offset;
    double* v = state.v.data() + offset;
    for (std::size_t i = 0; i < len; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * grads[i];
        v[i] = b2 * v[i] + (1.0 - b2) * grads[i] * grads[i];
        const double mh = m[i] / bc1;
        const double vh = v[i] / bc2;
        params[i] -= state.lr * mh / (std::sqrt(vh) + state.eps);
    }
}

void adam_step(Vector& params, const Vector& grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw DimensionMismatch("adam_step: length mismatch");
    adam_begin_step(state);
    adam_update_slice(params.data(), grads.data(), params.size(), 0, state);
}

}  // namespace evogo
