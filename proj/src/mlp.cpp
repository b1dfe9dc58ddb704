#include "evogo/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "evogo/kernels.hpp"

namespace evogo::mlp {

std::vector<std::size_t> default_hidden_widths(std::size_t d) {
    const std::size_t narrow = std::max<std::size_t>(2 * d, 128);
    const std::size_t wide = std::max<std::size_t>(4 * d, 256);
    return {narrow, wide, wide, wide, narrow};
}

Mlp init(std::size_t d, Rng& rng, const std::vector<std::size_t>& hidden) {
    if (d < 1) throw InvalidArgument("mlp::init: dimension must be >= 1");
    const std::vector<std::size_t> widths = hidden.empty() ? default_hidden_widths(d) : hidden;

    Mlp net;
    net.dim = d;
    std::vector<std::size_t> sizes;
    sizes.push_back(d);
    sizes.insert(sizes.end(), widths.begin(), widths.end());
    sizes.push_back(d);

    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        LayerShape shape;
        shape.in = sizes[l];
        shape.out = sizes[l + 1];
        shape.w_off = total;
        total += shape.in * shape.out;
        shape.b_off = total;
        total += shape.out;
        net.layers.push_back(shape);
    }
    net.data.assign(total, 0.0);

    const std::size_t last = net.layers.size() - 1;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerShape& s = net.layers[l];
        const double limit = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
        const double scale = (l == last) ? 0.01 : 1.0;
        double* w = net.data.data() + s.w_off;
        for (std::size_t i = 0; i < s.in * s.out; ++i)
            w[i] = scale * limit * (2.0 * rng.uniform() - 1.0);
        // biases stay zero
    }
    return net;
}

Matrix forward(const Mlp& net, const Matrix& x, Tape* tape) {
    if (x.cols() != net.dim) throw DimensionMismatch("mlp::forward: input width");
    const std::size_t n = x.rows();
    if (tape) {
        tape->net = &net;
        tape->acts.clear();
        tape->acts.reserve(net.layers.size() + 1);
        tape->acts.push_back(x);
    }
    Matrix a = x;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerShape& s = net.layers[l];
        Matrix h(n, s.out);
        kernels::gemm_nn(a.data(), net.w(l), h.data(), n, s.in, s.out);
        const double* bias = net.b(l);
        const bool is_hidden = l + 1 < net.layers.size();
        kernels::parallel_rows(n, [&](std::size_t i) {
            double* hr = h.row(i);
            for (std::size_t j = 0; j < s.out; ++j) {
                hr[j] += bias[j];
                if (is_hidden) hr[j] = std::tanh(hr[j]);
            }
        });
        a = std::move(h);
        if (tape) tape->acts.push_back(a);
    }
    return a;
}

Matrix backward(const Mlp& net, const Tape& tape, const Matrix& dy, Vector& grad) {
    if (tape.net != &net || tape.acts.size() != net.layers.size() + 1)
        throw TapeMismatch("mlp::backward: tape does not match this net");
    if (grad.size() != net.data.size()) grad.assign(net.data.size(), 0.0);
    const std::size_t n = dy.rows();
    if (dy.rows() != tape.acts.back().rows() || dy.cols() != net.dim)
        throw DimensionMismatch("mlp::backward: upstream gradient shape");

    Matrix g = dy;  // gradient w.r.t. the current layer's output
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const LayerShape& s = net.layers[li];
        const bool is_hidden = li + 1 < net.layers.size();
        if (is_hidden) {
            // tanh'(h) expressed through the recorded activation
            const Matrix& act = tape.acts[li + 1];
            kernels::parallel_rows(n, [&](std::size_t i) {
                double* gr = g.row(i);
                const double* ar = act.row(i);
                for (std::size_t j = 0; j < s.out; ++j) gr[j] *= 1.0 - ar[j] * ar[j];
            });
        }
        const Matrix& input = tape.acts[li];
        kernels::gemm_tn_acc(input.data(), g.data(), grad.data() + s.w_off, s.in, n, s.out);
        double* db = grad.data() + s.b_off;
        for (std::size_t i = 0; i < n; ++i) {
            const double* gr = g.row(i);
            for (std::size_t j = 0; j < s.out; ++j) db[j] += gr[j];
        }
        Matrix gprev(n, s.in);
        kernels::gemm_nt(g.data(), net.w(li), gprev.data(), n, s.out, s.in);
        g = std::move(gprev);
    }
    return g;
}

}  // namespace evogo::mlp
