#pragma once

#include <vector>

#include "evogo/matrix.hpp"
#include "evogo/rng.hpp"

namespace evogo::mlp {

struct LayerShape {
    std::size_t in = 0, out = 0;
    std::size_t w_off = 0, b_off = 0;  // offsets into the flat parameter vector
};

// Fully connected net with tanh hidden layers and an affine output layer.
// Parameters live in one flat vector so the optimizer and the gradient
// checks can treat the whole net as a single parameter vector.
struct Mlp {
    std::size_t dim = 0;  // input and output width
    std::vector<LayerShape> layers;
    Vector data;

    std::size_t param_count() const { return data.size(); }
    const double* w(std::size_t l) const { return data.data() + layers[l].w_off; }
    const double* b(std::size_t l) const { return data.data() + layers[l].b_off; }
};

// Hidden widths from the input dimension d:
// [max(2d,128), max(4d,256), max(4d,256), max(4d,256), max(2d,128)].
std::vector<std::size_t> default_hidden_widths(std::size_t d);

/// Glorot-uniform weights, zero biases; the output layer is scaled by 0.01
/// so a fresh net is a small perturbation of a constant map. Passing
/// `hidden` overrides the default width rule (used by small test nets).
Mlp init(std::size_t d, Rng& rng, const std::vector<std::size_t>& hidden = {});

// Forward intermediates for one batch; consumed by the matching backward.
struct Tape {
    const Mlp* net = nullptr;
    std::vector<Matrix> acts;  // acts[0] = input, acts[l+1] = output of layer l
};

/// Batch forward pass. When `tape` is given, activations are recorded.
Matrix forward(const Mlp& net, const Matrix& x, Tape* tape = nullptr);

/// Reverse-mode pass for the recorded forward: accumulates parameter
/// gradients into `grad` (same layout as net.data) and returns d loss / d x.
Matrix backward(const Mlp& net, const Tape& tape, const Matrix& dy, Vector& grad);

}  // namespace evogo::mlp
