#include <doctest.h>

#include <cmath>

#include "evogo/genpair.hpp"
#include "support.hpp"

using namespace evogo;
using namespace evogo::genpair;
using test_support::random_matrix;

namespace {

dataprep::PairedDataset toy_pairs(Rng& rng, std::size_t n_inf = 6, std::size_t n_sup = 3,
                                  std::size_t d = 2) {
    dataprep::PairedDataset data;
    data.inferior_x = random_matrix(n_inf, d, rng, 0.1, 0.9);
    data.superior_x = random_matrix(n_sup, d, rng, 0.1, 0.9);
    data.inferior_y.resize(n_inf);
    data.superior_y.resize(n_sup);
    for (auto& v : data.superior_y) v = rng.uniform();          // better
    for (auto& v : data.inferior_y) v = 1.0 + rng.uniform();    // worse
    for (std::uint32_t i = 0; i < n_inf; ++i)
        for (std::uint32_t j = 0; j < n_sup; ++j) data.pairs.emplace_back(i, j);
    return data;
}

gp::GpModel toy_gp(Rng& rng, std::size_t n = 10, std::size_t d = 2) {
    const Matrix x = random_matrix(n, d, rng);
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = std::sin(4.0 * x(i, 0)) + x(i, d - 1) * x(i, d - 1);
    gp::KernelParams params;
    params.log_length = std::log(0.35);
    params.log_noise = std::log(1e-3);
    return gp::make_model(x, y, params);
}

std::vector<std::uint32_t> all_pairs(const dataprep::PairedDataset& data) {
    std::vector<std::uint32_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    return idx;
}

}  // namespace

TEST_SUITE("genpair") {

TEST_CASE("identity maps: zero reconstruction, doubled similarity") {
    Rng rng(1);
    const Matrix p = random_matrix(5, 2, rng);
    const Matrix q = random_matrix(5, 2, rng);
    LossWeights w;
    // identity maps: g(p) = p, g'(q) = q, both reconstructions exact
    const LossTerms t = loss_terms_from_outputs(w, false, p, q, p, q, p, q);
    CHECK(t.rec == 0.0);
    double want = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double diff = p(i, j) - q(i, j);
            want += 2.0 * diff * diff;
        }
    want /= 5.0;
    CHECK(t.sim == doctest::Approx(want).epsilon(1e-12));
    CHECK(t.gen == doctest::Approx(want).epsilon(1e-12));

    // end to end: zeroed residual nets are exactly the identity
    Rng prng(2);
    GenerativePair pair = make_pair(2, w, Variant::RealEval, Ablation::None, prng, {8, 8});
    std::fill(pair.forward_net.data.begin(), pair.forward_net.data.end(), 0.0);
    std::fill(pair.inverse_net.data.begin(), pair.inverse_net.data.end(), 0.0);
    const Matrix out = apply_forward_map(pair, p);
    CHECK(out == p);
}

TEST_CASE("lambda zero reduces the loss to the generative part") {
    Rng rng(3);
    dataprep::PairedDataset data = toy_pairs(rng);
    gp::GpModel model = toy_gp(rng);
    LossWeights w;
    w.lambda = 0.0;
    Rng prng(4);
    GenerativePair kg = make_pair(2, w, Variant::Kg, Ablation::None, prng, {8, 8});
    GenerativePair lcb = kg;
    lcb.variant = Variant::Lcb;

    Surrogate s;
    s.model = &model;
    const auto idx = all_pairs(data);
    const LossResult res_kg = pair_loss(kg, s, data, idx);
    const LossResult res_lcb = pair_loss(lcb, s, data, idx);
    CHECK(res_kg.terms.total == doctest::Approx(res_kg.terms.gen).epsilon(1e-12));
    // with no optimization weight the variants agree exactly
    for (std::size_t i = 0; i < res_kg.grad_forward.size(); ++i)
        CHECK(res_kg.grad_forward[i] == doctest::Approx(res_lcb.grad_forward[i]).epsilon(1e-12));
}

TEST_CASE("full-graph gradients match finite differences for every variant") {
    Rng rng(5);
    dataprep::PairedDataset data = toy_pairs(rng);
    gp::GpModel model = toy_gp(rng);
    const auto spec = benchmarks::make_spec_unshifted(benchmarks::Kind::Ackley, 2);

    struct Config {
        Variant variant;
        Ablation ablation;
        const char* name;
    };
    const Config configs[] = {
        {Variant::Kg, Ablation::None, "kg"},
        {Variant::Lcb, Ablation::None, "lcb"},
        {Variant::RealEval, Ablation::None, "realeval"},
        {Variant::Kg, Ablation::SingleNet, "singlenet"},
    };

    for (const Config& cfg : configs) {
        CAPTURE(cfg.name);
        LossWeights w;
        w.lambda2 = 2.0;  // keep the sigma/rho scale comparable to the rest
        Rng prng(6);
        GenerativePair pair = make_pair(2, w, cfg.variant, cfg.ablation, prng, {6, 6});
        // a nudge away from the identity so correlations are not at their cap
        Rng nrng(7);
        for (auto& v : pair.forward_net.data) v += 0.05 * (nrng.uniform() - 0.5);
        for (auto& v : pair.inverse_net.data) v += 0.05 * (nrng.uniform() - 0.5);

        Surrogate s;
        if (cfg.variant == Variant::RealEval)
            s.truth = &spec;
        else
            s.model = &model;
        const auto idx = all_pairs(data);
        const LossResult res = pair_loss(pair, s, data, idx);

        auto loss_with_forward = [&](const Vector& params) {
            GenerativePair probe = pair;
            probe.forward_net.data = params;
            return pair_loss(probe, s, data, idx).terms.total;
        };
        auto loss_with_inverse = [&](const Vector& params) {
            GenerativePair probe = pair;
            probe.inverse_net.data = params;
            return pair_loss(probe, s, data, idx).terms.total;
        };

        Rng pick(8);
        for (int rep = 0; rep < 30; ++rep) {
            const std::size_t c = pick.below(pair.forward_net.param_count());
            const double fd =
                test_support::central_diff(loss_with_forward, pair.forward_net.data, c, 1e-4);
            CHECK(test_support::grad_err(res.grad_forward[c], fd, 1e-5) < 1e-3);
        }
        if (cfg.ablation != Ablation::SingleNet) {
            for (int rep = 0; rep < 30; ++rep) {
                const std::size_t c = pick.below(pair.inverse_net.param_count());
                const double fd =
                    test_support::central_diff(loss_with_inverse, pair.inverse_net.data, c, 1e-4);
                CHECK(test_support::grad_err(res.grad_inverse[c], fd, 1e-5) < 1e-3);
            }
        }
    }
}

TEST_CASE("loss decomposition: total equals gen plus lambda times opt") {
    Rng rng(9);
    dataprep::PairedDataset data = toy_pairs(rng);
    gp::GpModel model = toy_gp(rng);
    Rng prng(10);
    GenerativePair pair = make_pair(2, LossWeights{}, Variant::Kg, Ablation::None, prng, {8, 8});
    Surrogate s;
    s.model = &model;
    const LossResult res = pair_loss(pair, s, data, all_pairs(data));
    CHECK(std::abs(res.terms.total - (res.terms.gen + pair.weights.lambda * res.terms.opt)) <
          1e-10);
    CHECK(std::abs(res.terms.gen -
                   (res.terms.sim + pair.weights.lambda1 * res.terms.rec)) < 1e-10);
}

TEST_CASE("missing surrogate is rejected") {
    Rng rng(11);
    dataprep::PairedDataset data = toy_pairs(rng);
    Rng prng(12);
    GenerativePair pair = make_pair(2, LossWeights{}, Variant::Kg, Ablation::None, prng, {4});
    Surrogate empty;
    CHECK_THROWS_AS(pair_loss(pair, empty, data, all_pairs(data)), FrozenModelMissing);
}

TEST_CASE("zero epochs change nothing") {
    Rng rng(13);
    dataprep::PairedDataset data = toy_pairs(rng);
    gp::GpModel model = toy_gp(rng);
    Rng prng(14);
    GenerativePair pair = make_pair(2, LossWeights{}, Variant::Kg, Ablation::None, prng, {8, 8});
    const Vector before = pair.forward_net.data;
    Surrogate s;
    s.model = &model;
    TrainOptions opts;
    opts.epochs = 0;
    Rng trng(15);
    const TrainReport report = train_pair(pair, s, data, opts, trng);
    CHECK(report.epoch_loss.empty());
    CHECK(pair.forward_net.data == before);
}

TEST_CASE("training is deterministic under a fixed seed") {
    Rng rng(16);
    dataprep::PairedDataset data = toy_pairs(rng);
    gp::GpModel model = toy_gp(rng);
    Surrogate s;
    s.model = &model;
    TrainOptions opts;
    opts.epochs = 5;
    opts.batch_size = 6;
    opts.lr = 1e-3;

    Rng prng_a(17), prng_b(17);
    GenerativePair a = make_pair(2, LossWeights{}, Variant::Kg, Ablation::None, prng_a, {8, 8});
    GenerativePair b = make_pair(2, LossWeights{}, Variant::Kg, Ablation::None, prng_b, {8, 8});
    Rng ta(18), tb(18);
    train_pair(a, s, data, opts, ta);
    train_pair(b, s, data, opts, tb);
    CHECK(a.forward_net.data == b.forward_net.data);
    CHECK(a.inverse_net.data == b.inverse_net.data);
}

TEST_CASE("the surrogate is bitwise frozen across training") {
    Rng rng(19);
    dataprep::PairedDataset data = toy_pairs(rng);
    gp::GpModel model = toy_gp(rng);
    const gp::KernelParams params_before = model.params;
    const Vector alpha_before = model.alpha;
    Surrogate s;
    s.model = &model;
    TrainOptions opts;
    opts.epochs = 3;
    opts.batch_size = 9;
    opts.lr = 1e-3;
    Rng prng(20), trng(21);
    GenerativePair pair = make_pair(2, LossWeights{}, Variant::Kg, Ablation::None, prng, {8, 8});
    train_pair(pair, s, data, opts, trng);
    CHECK(model.params.log_scale == params_before.log_scale);
    CHECK(model.params.log_length == params_before.log_length);
    CHECK(model.params.log_noise == params_before.log_noise);
    CHECK(model.alpha == alpha_before);
}

TEST_CASE("a dominating reconstruction weight drives the round trip down") {
    Rng rng(22);
    dataprep::PairedDataset data = toy_pairs(rng, 8, 4, 2);
    const auto spec = benchmarks::make_spec_unshifted(benchmarks::Kind::Ackley, 2);
    LossWeights w;
    w.lambda = 0.0;
    w.lambda1 = 1e6;
    Rng prng(23);
    GenerativePair pair = make_pair(2, w, Variant::RealEval, Ablation::None, prng, {8, 8});
    // push the pair away from the identity so there is a round trip to fix
    Rng nrng(24);
    for (auto& v : pair.forward_net.data) v += 0.3 * (nrng.uniform() - 0.5);
    for (auto& v : pair.inverse_net.data) v += 0.3 * (nrng.uniform() - 0.5);

    auto round_trip_error = [&]() {
        const Matrix u = apply_forward_map(pair, data.inferior_x);
        const Matrix back = apply_inverse_map(pair, u);
        double s = 0.0;
        for (std::size_t i = 0; i < back.rows(); ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                const double t = back(i, j) - data.inferior_x(i, j);
                s += t * t;
            }
        return std::sqrt(s / static_cast<double>(back.rows()));
    };

    const double before = round_trip_error();
    Surrogate s;
    s.truth = &spec;
    TrainOptions opts;
    opts.epochs = 500;
    opts.batch_size = data.size();
    opts.lr = 2e-3;
    opts.early_stop = false;
    Rng trng(25);
    train_pair(pair, s, data, opts, trng);
    const double after = round_trip_error();
    CHECK(after * 10.0 <= before);
}

TEST_CASE("training loss falls on first-generation benchmark data") {
    // Ackley 5D, generation-one archive, production defaults with the
    // plateau rule active
    Rng rng(26);
    const auto spec = benchmarks::make_spec_unshifted(benchmarks::Kind::Ackley, 5);
    Matrix x = random_matrix(100, 5, rng);
    const Vector y = benchmarks::evaluate(spec, x);
    dataprep::Dataset history(x, y, 1);
    Rng prep_rng(27);
    auto prep = dataprep::prepare(history, 100, 0.1, 0.3, std::nullopt, nullptr, prep_rng);

    gp::FitOptions gopts;
    const dataprep::Dataset fit_rows = prep.sm.evaluated_only();
    const gp::GpModel model = gp::fit(fit_rows.x, fit_rows.y, gopts);

    Rng prng(28);
    GenerativePair pair = make_pair(5, LossWeights{}, Variant::Kg, Ablation::None, prng);
    Surrogate s;
    s.model = &model;
    TrainOptions opts;  // the driver's default schedule: 200 epochs at boost 10
    opts.epochs = 20;
    opts.batch_size = 100;
    opts.lr = 0.15 / static_cast<double>(prep.sm.size());
    Rng trng(29);
    const TrainReport report = train_pair(pair, s, prep.gm, opts, trng);
    REQUIRE(report.epoch_loss.size() >= 2);
    CHECK(report.epoch_loss.back() <= 0.5 * report.epoch_loss.front());
}

}  // TEST_SUITE
