#include <doctest.h>

#include <cmath>

#include "evogo/mlp.hpp"
#include "support.hpp"

using namespace evogo;
using test_support::random_matrix;

TEST_SUITE("mlp") {

TEST_CASE("hidden widths follow the dimension rule") {
    const auto w2 = mlp::default_hidden_widths(2);
    CHECK(w2 == std::vector<std::size_t>{128, 256, 256, 256, 128});
    const auto w200 = mlp::default_hidden_widths(200);
    CHECK(w200 == std::vector<std::size_t>{400, 800, 800, 800, 400});
    Rng rng(1);
    const mlp::Mlp net = mlp::init(2, rng);
    CHECK(net.layers.front().in == 2);
    CHECK(net.layers.back().out == 2);
}

TEST_CASE("same seed gives identical parameters") {
    Rng a(99), b(99);
    const mlp::Mlp na = mlp::init(3, a);
    const mlp::Mlp nb = mlp::init(3, b);
    CHECK(na.data == nb.data);
}

TEST_CASE("zero parameters map everything to zero") {
    Rng rng(2);
    mlp::Mlp net = mlp::init(2, rng, {4, 4});
    std::fill(net.data.begin(), net.data.end(), 0.0);
    const Matrix y = mlp::forward(net, random_matrix(5, 2, rng));
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.data()[i] == 0.0);
}

TEST_CASE("zero weights with an output bias replicate the bias") {
    Rng rng(3);
    mlp::Mlp net = mlp::init(2, rng, {4, 4});
    std::fill(net.data.begin(), net.data.end(), 0.0);
    const auto& last = net.layers.back();
    net.data[last.b_off] = 0.25;
    net.data[last.b_off + 1] = -1.5;
    const Matrix y = mlp::forward(net, random_matrix(6, 2, rng));
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(y(i, 0) == 0.25);
        CHECK(y(i, 1) == -1.5);
    }
}

TEST_CASE("forward is row-wise (permutation equivariant)") {
    Rng rng(4);
    const mlp::Mlp net = mlp::init(3, rng, {8, 8});
    const Matrix x = random_matrix(7, 3, rng, -1.0, 1.0);
    const Matrix y = mlp::forward(net, x);
    Matrix flipped(7, 3);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 3; ++j) flipped(i, j) = x(6 - i, j);
    const Matrix y2 = mlp::forward(net, flipped);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(y2(i, j) == y(6 - i, j));
}

TEST_CASE("zero upstream gradient produces zero gradients") {
    Rng rng(5);
    const mlp::Mlp net = mlp::init(2, rng, {6, 6});
    mlp::Tape tape;
    const Matrix x = random_matrix(4, 2, rng);
    mlp::forward(net, x, &tape);
    Vector grad(net.param_count(), 0.0);
    const Matrix dx = mlp::backward(net, tape, Matrix(4, 2), grad);
    for (double v : grad) CHECK(v == 0.0);
    for (std::size_t i = 0; i < dx.size(); ++i) CHECK(dx.data()[i] == 0.0);
}

TEST_CASE("parameter gradients of half the squared output norm match finite differences") {
    Rng rng(6);
    mlp::Mlp net = mlp::init(2, rng, {8, 6});
    const Matrix x = random_matrix(5, 2, rng, -1.0, 1.0);

    auto loss_at = [&](const Vector& params) {
        mlp::Mlp probe = net;
        probe.data = params;
        const Matrix y = mlp::forward(probe, x);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += y.data()[i] * y.data()[i];
        return 0.5 * s;
    };

    mlp::Tape tape;
    const Matrix y = mlp::forward(net, x, &tape);
    Vector grad(net.param_count(), 0.0);
    mlp::backward(net, tape, y, grad);  // d(0.5 |Y|^2)/dY = Y

    Rng pick(7);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t c = pick.below(net.param_count());
        const double fd = test_support::central_diff(loss_at, net.data, c, 1e-4);
        CHECK(test_support::grad_err(grad[c], fd, 1e-6) < 1e-5);
    }
}

TEST_CASE("input gradients through a composed pair match finite differences") {
    Rng rng(8);
    const mlp::Mlp f = mlp::init(2, rng, {8, 8});
    Rng rng2(9);
    const mlp::Mlp g = mlp::init(2, rng2, {8, 8});
    Matrix x = random_matrix(3, 2, rng, -0.5, 0.5);

    // scalar loss 0.5 |g(f(x))|^2
    auto loss_at_x = [&](const Vector& flat) {
        Matrix xx(3, 2);
        std::copy(flat.begin(), flat.end(), xx.data());
        const Matrix out = mlp::forward(g, mlp::forward(f, xx));
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += out.data()[i] * out.data()[i];
        return 0.5 * s;
    };

    mlp::Tape tf, tg;
    const Matrix mid = mlp::forward(f, x, &tf);
    const Matrix out = mlp::forward(g, mid, &tg);
    Vector grad_g(g.param_count(), 0.0), grad_f(f.param_count(), 0.0);
    const Matrix dmid = mlp::backward(g, tg, out, grad_g);
    const Matrix dx = mlp::backward(f, tf, dmid, grad_f);

    Vector flat(x.data(), x.data() + x.size());
    for (std::size_t c = 0; c < flat.size(); ++c) {
        const double fd = test_support::central_diff(loss_at_x, flat, c, 1e-5);
        CHECK(test_support::grad_err(dx.data()[c], fd, 1e-6) < 1e-4);
    }
}

TEST_CASE("backward is linear in the upstream gradient") {
    Rng rng(10);
    const mlp::Mlp net = mlp::init(2, rng, {6, 6});
    mlp::Tape tape;
    const Matrix x = random_matrix(4, 2, rng);
    mlp::forward(net, x, &tape);
    const Matrix d1 = random_matrix(4, 2, rng, -1.0, 1.0);
    const Matrix d2 = random_matrix(4, 2, rng, -1.0, 1.0);
    const double a = 0.7, b = -1.3;

    Vector g1(net.param_count(), 0.0), g2(net.param_count(), 0.0), gc(net.param_count(), 0.0);
    const Matrix dx1 = mlp::backward(net, tape, d1, g1);
    const Matrix dx2 = mlp::backward(net, tape, d2, g2);
    Matrix combo(4, 2);
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo.data()[i] = a * d1.data()[i] + b * d2.data()[i];
    const Matrix dxc = mlp::backward(net, tape, combo, gc);

    for (std::size_t i = 0; i < gc.size(); ++i)
        CHECK(std::abs(gc[i] - (a * g1[i] + b * g2[i])) < 1e-12);
    for (std::size_t i = 0; i < dxc.size(); ++i)
        CHECK(std::abs(dxc.data()[i] - (a * dx1.data()[i] + b * dx2.data()[i])) < 1e-12);
}

TEST_CASE("tape from another net is rejected") {
    Rng rng(11);
    const mlp::Mlp a = mlp::init(2, rng, {4});
    const mlp::Mlp b = mlp::init(2, rng, {4});
    mlp::Tape tape;
    const Matrix x = random_matrix(3, 2, rng);
    mlp::forward(a, x, &tape);
    Vector grad;
    CHECK_THROWS_AS(mlp::backward(b, tape, Matrix(3, 2), grad), TapeMismatch);
}

TEST_CASE("pair instances do not alias") {
    Rng a(12), b(12);
    mlp::Mlp na = mlp::init(2, a, {4});
    const mlp::Mlp nb = mlp::init(2, b, {4});
    const double before = nb.data[0];
    na.data[0] += 5.0;
    CHECK(nb.data[0] == before);
}

}  // TEST_SUITE
