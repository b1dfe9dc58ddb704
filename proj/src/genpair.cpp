#include "evogo/genpair.hpp"

#include <algorithm>
#include <cmath>

namespace evogo::genpair {

namespace {

constexpr double kVarFloor = 1e-12;

// gather rows of `src` listed in `ids`
Matrix gather(const Matrix& src, const std::vector<std::uint32_t>& ids) {
    Matrix out(ids.size(), src.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
        std::copy(src.row(ids[i]), src.row(ids[i]) + src.cols(), out.row(i));
    return out;
}

void add_into(Matrix& dst, const Matrix& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

// the generative maps are residual, g(x) = x + net(x), so a fresh pair is a
// small perturbation of the identity and zeroed nets are the identity itself
Matrix residual_forward(const mlp::Mlp& net, const Matrix& x, mlp::Tape* tape) {
    Matrix y = mlp::forward(net, x, tape);
    add_into(y, x);
    return y;
}

// d(x + net(x))/dx applied to an upstream gradient: identity branch plus the
// net's input gradient
Matrix residual_backward(const mlp::Mlp& net, const mlp::Tape& tape, const Matrix& dy,
                         Vector& grad) {
    Matrix dx = mlp::backward(net, tape, dy, grad);
    add_into(dx, dy);
    return dx;
}

double sq_norm_diff(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

// Per-moving-row quantities shared by every correlation term that row takes
// part in: the kernel Jacobian J (n x d, d kappa(a, X)/da) and J^T K^{-1} k_a.
struct RowJacobian {
    Matrix j;       // n x d
    Vector jt_wa;   // d
};

RowJacobian row_jacobian(const gp::GpModel& model, const double* a, const gp::Probe& pa,
                         std::size_t ca) {
    const std::size_t d = model.dim();
    const std::size_t n = model.size();
    RowJacobian out;
    out.j = Matrix(n, d);
    out.jt_wa.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        gp::kernel_input_grad(model.params, a, model.x.row(i), d, out.j.row(i));
        const double wa = pa.w(i, ca);
        for (std::size_t jj = 0; jj < d; ++jj) out.jt_wa[jj] += out.j(i, jj) * wa;
    }
    return out;
}

// rho(a, b) for a moving point a (probe column ca, cached Jacobian ja)
// against a fixed dataset point b (probe column cb); emits d rho / d a.
double correlation_term(const gp::GpModel& model, const double* a, const gp::Probe& pa,
                        std::size_t ca, const RowJacobian& ja, const double* b,
                        const gp::Probe& pb, std::size_t cb, double* grad) {
    const std::size_t d = model.dim();
    const std::size_t n = model.size();
    const double var_a = pa.var_std[ca];
    const double var_b = pb.var_std[cb];
    std::fill(grad, grad + d, 0.0);
    if (var_a < kVarFloor || var_b < kVarFloor) return 0.0;

    double cross = gp::kernel_cross(model.params, a, b, d);
    for (std::size_t i = 0; i < n; ++i) cross -= pa.v(i, ca) * pb.v(i, cb);
    const double denom = std::sqrt(var_a * var_b);
    const double rho = cross / denom;

    // d rho/da = [d kappa(a,b)/da - J^T K^{-1} k_b] / denom
    //            - rho/(2 var_a) * d var_a/da,  d var_a/da = -2 J^T w_a
    gp::kernel_input_grad(model.params, a, b, d, grad);
    for (std::size_t i = 0; i < n; ++i) {
        const double wb = pb.w(i, cb);
        if (wb == 0.0) continue;
        const double* jr = ja.j.row(i);
        for (std::size_t jj = 0; jj < d; ++jj) grad[jj] -= jr[jj] * wb;
    }
    for (std::size_t jj = 0; jj < d; ++jj)
        grad[jj] = grad[jj] / denom + rho * ja.jt_wa[jj] / var_a;
    return std::clamp(rho, -1.0, 1.0);
}

}  // namespace

Variant variant_from_name(const std::string& name) {
    if (name == "kg") return Variant::Kg;
    if (name == "lcb") return Variant::Lcb;
    if (name == "realeval") return Variant::RealEval;
    throw InvalidArgument("unknown variant: " + name);
}

Ablation ablation_from_name(const std::string& name) {
    if (name == "none") return Ablation::None;
    if (name == "singlenet") return Ablation::SingleNet;
    throw InvalidArgument("unknown ablation: " + name);
}

Matrix apply_forward_map(const GenerativePair& pair, const Matrix& x) {
    return residual_forward(pair.forward_net, x, nullptr);
}

Matrix apply_inverse_map(const GenerativePair& pair, const Matrix& x) {
    if (pair.single_net()) throw InvalidArgument("apply_inverse_map: SingleNet has no inverse");
    return residual_forward(pair.inverse_net, x, nullptr);
}

GenerativePair make_pair(std::size_t d, const LossWeights& weights, Variant variant,
                         Ablation ablation, Rng& rng, const std::vector<std::size_t>& hidden) {
    GenerativePair pair;
    pair.weights = weights;
    pair.variant = variant;
    pair.ablation = ablation;
    Rng fwd_rng = rng.substream(Stream::MlpInit, 1);
    Rng inv_rng = rng.substream(Stream::MlpInit, 2);
    pair.forward_net = mlp::init(d, fwd_rng, hidden);
    if (ablation != Ablation::SingleNet) pair.inverse_net = mlp::init(d, inv_rng, hidden);
    pair.opt_forward = AdamState(pair.forward_net.param_count());
    pair.opt_inverse = AdamState(pair.inverse_net.param_count());
    return pair;
}

LossTerms loss_terms_from_outputs(const LossWeights& w, bool single_net, const Matrix& p,
                                  const Matrix& q, const Matrix& gp_out, const Matrix& inv_out,
                                  const Matrix& rec_p, const Matrix& rec_q) {
    const std::size_t b = p.rows();
    const std::size_t d = p.cols();
    LossTerms t;
    for (std::size_t i = 0; i < b; ++i) {
        t.sim += sq_norm_diff(gp_out.row(i), q.row(i), d);
        if (!single_net) {
            t.sim += sq_norm_diff(inv_out.row(i), p.row(i), d);
            t.rec += sq_norm_diff(rec_p.row(i), p.row(i), d);
            t.rec += sq_norm_diff(rec_q.row(i), q.row(i), d);
        }
    }
    t.sim /= static_cast<double>(b);
    t.rec /= static_cast<double>(b);
    t.gen = t.sim + (single_net ? 0.0 : w.lambda1 * t.rec);
    return t;
}

LossResult pair_loss(const GenerativePair& pair, const Surrogate& surrogate,
                     const dataprep::PairedDataset& data,
                     std::span<const std::uint32_t> pair_indices, LossScratch* scratch) {
    if (pair_indices.empty()) throw EmptyData("pair_loss: empty batch");
    const bool single = pair.single_net();
    const bool needs_gp = pair.variant != Variant::RealEval;
    if (needs_gp && surrogate.model == nullptr)
        throw FrozenModelMissing("pair_loss: variant requires a fitted surrogate");
    if (!needs_gp && surrogate.truth == nullptr)
        throw FrozenModelMissing("pair_loss: RealEval requires the benchmark handle");

    const std::size_t b = pair_indices.size();
    const std::size_t d = pair.dim();
    const LossWeights& w = pair.weights;

    // dedupe batch rows; q values repeat heavily (few superior rows)
    std::vector<std::uint32_t> p_local(data.inferior_x.rows(), UINT32_MAX);
    std::vector<std::uint32_t> q_local(data.superior_x.rows(), UINT32_MAX);
    std::vector<std::uint32_t> p_ids, q_ids;          // distinct dataset rows, batch order
    std::vector<std::uint32_t> pi_of(b), qi_of(b);    // batch pair -> local row
    for (std::size_t i = 0; i < b; ++i) {
        const auto [pd, qd] = data.pairs[pair_indices[i]];
        if (p_local[pd] == UINT32_MAX) {
            p_local[pd] = static_cast<std::uint32_t>(p_ids.size());
            p_ids.push_back(pd);
        }
        if (q_local[qd] == UINT32_MAX) {
            q_local[qd] = static_cast<std::uint32_t>(q_ids.size());
            q_ids.push_back(qd);
        }
        pi_of[i] = p_local[pd];
        qi_of[i] = q_local[qd];
    }
    const Matrix pd_rows = gather(data.inferior_x, p_ids);
    const Matrix qd_rows = gather(data.superior_x, q_ids);
    const std::size_t bp = p_ids.size(), bq = q_ids.size();

    // forward passes: u = g(p), w = g'(u), v = g'(q), z = g(v)
    mlp::Tape tape_u, tape_v, tape_w, tape_z;
    const Matrix u = residual_forward(pair.forward_net, pd_rows, &tape_u);
    Matrix v, wv, z;
    if (!single) {
        v = residual_forward(pair.inverse_net, qd_rows, &tape_v);
        wv = residual_forward(pair.inverse_net, u, &tape_w);
        z = residual_forward(pair.forward_net, v, &tape_z);
    }

    // GP probes for the moving points, one stacked solve for [u; w; z];
    // constant-row probes live in scratch
    const gp::GpModel* model = surrogate.model;
    gp::Probe probe_m;
    const bool needs_corr = needs_gp && pair.variant == Variant::Kg && !single;
    const std::size_t off_u = 0, off_w = bp, off_z = 2 * bp;
    if (needs_gp) {
        Matrix moving(needs_corr ? 2 * bp + bq : bp, d);
        std::copy(u.data(), u.data() + u.size(), moving.row(off_u));
        if (needs_corr) {
            std::copy(wv.data(), wv.data() + wv.size(), moving.row(off_w));
            std::copy(z.data(), z.data() + z.size(), moving.row(off_z));
        }
        probe_m = gp::probe(*model, moving);
    }
    LossScratch local_scratch;
    LossScratch* sc = scratch ? scratch : &local_scratch;
    if (needs_corr && !model->degenerate) {
        if (!sc->ready || sc->model != model || sc->data != &data) {
            sc->inferior = gp::probe(*model, data.inferior_x);
            sc->superior = gp::probe(*model, data.superior_x);
            sc->model = model;
            sc->data = &data;
            sc->ready = true;
        }
    }

    // per-distinct-row mu/sigma gradients at u, plus cached Jacobians for
    // the correlation heads at w and z
    const double inv_b = 1.0 / static_cast<double>(b);
    Matrix dmu_u, dsd_u;
    Vector mu_u(bp, 0.0), sd_u(bp, 0.0);
    Vector f_u(bp, 0.0);
    Matrix df_u;
    std::vector<RowJacobian> jac_w, jac_z;
    if (needs_gp) {
        const double ys = model->y_std;
        dmu_u = Matrix(bp, d);
        dsd_u = Matrix(bp, d);
        const std::size_t n = model->size();
        Vector g(d);
        for (std::size_t r = 0; r < bp && !model->degenerate; ++r) {
            mu_u[r] = model->y_mean + ys * probe_m.mean_std[off_u + r];
            const double sd_std = std::sqrt(probe_m.var_std[off_u + r]);
            sd_u[r] = ys * sd_std;
            double* dm = dmu_u.row(r);
            double* dsd = dsd_u.row(r);
            for (std::size_t i = 0; i < n; ++i) {
                gp::kernel_input_grad(model->params, u.row(r), model->x.row(i), d, g.data());
                const double ai = model->alpha[i];
                const double wi = probe_m.w(i, off_u + r);
                for (std::size_t j = 0; j < d; ++j) {
                    dm[j] += g[j] * ai;
                    dsd[j] += g[j] * wi;
                }
            }
            for (std::size_t j = 0; j < d; ++j) {
                dm[j] *= ys;
                dsd[j] = sd_std < kVarFloor ? 0.0 : -ys * dsd[j] / sd_std;
            }
        }
        if (model->degenerate) {
            for (std::size_t r = 0; r < bp; ++r) mu_u[r] = model->y_mean;
        }
        if (needs_corr && !model->degenerate) {
            jac_w.reserve(bp);
            jac_z.reserve(bq);
            for (std::size_t r = 0; r < bp; ++r)
                jac_w.push_back(row_jacobian(*model, wv.row(r), probe_m, off_w + r));
            for (std::size_t r = 0; r < bq; ++r)
                jac_z.push_back(row_jacobian(*model, z.row(r), probe_m, off_z + r));
        }
    } else {
        df_u = Matrix(bp, d);
        for (std::size_t r = 0; r < bp; ++r) {
            f_u[r] = benchmarks::evaluate_raw(*surrogate.truth, u.row(r));
            benchmarks::gradient_raw(*surrogate.truth, u.row(r), df_u.row(r));
        }
    }

    // assemble upstream gradients and loss terms pair by pair
    Matrix du(bp, d), dv, dw, dz;
    if (!single) {
        dv = Matrix(bq, d);
        dw = Matrix(bp, d);
        dz = Matrix(bq, d);
    }
    LossTerms terms;
    Vector corr_grad(d);
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t pl = pi_of[i], ql = qi_of[i];
        const auto [pd_id, qd_id] = data.pairs[pair_indices[i]];
        const double* p_row = pd_rows.row(pl);
        const double* q_row = qd_rows.row(ql);
        const double y_p = data.inferior_y[pd_id];

        // similarity: |g(p) - q|^2 (+ |g'(q) - p|^2)
        terms.sim += sq_norm_diff(u.row(pl), q_row, d);
        for (std::size_t j = 0; j < d; ++j)
            du(pl, j) += 2.0 * (u(pl, j) - q_row[j]) * inv_b;
        if (!single) {
            terms.sim += sq_norm_diff(v.row(ql), p_row, d);
            for (std::size_t j = 0; j < d; ++j)
                dv(ql, j) += 2.0 * (v(ql, j) - p_row[j]) * inv_b;
            // reconstruction: |g'(g(p)) - p|^2 + |g(g'(q)) - q|^2
            terms.rec += sq_norm_diff(wv.row(pl), p_row, d);
            terms.rec += sq_norm_diff(z.row(ql), q_row, d);
            for (std::size_t j = 0; j < d; ++j) {
                dw(pl, j) += w.lambda1 * 2.0 * (wv(pl, j) - p_row[j]) * inv_b;
                dz(ql, j) += w.lambda1 * 2.0 * (z(ql, j) - q_row[j]) * inv_b;
            }
        }

        // optimization loss
        double opt_i = 0.0;
        if (needs_gp) {
            opt_i = mu_u[pl] - y_p;
            if (!single) {
                opt_i += w.lambda2 * sd_u[pl];
                for (std::size_t j = 0; j < d; ++j)
                    du(pl, j) += w.lambda * (dmu_u(pl, j) + w.lambda2 * dsd_u(pl, j)) * inv_b;
            } else {
                for (std::size_t j = 0; j < d; ++j)
                    du(pl, j) += w.lambda * dmu_u(pl, j) * inv_b;
            }
            if (needs_corr && !model->degenerate) {
                const double rho_wq = correlation_term(*model, wv.row(pl), probe_m, off_w + pl,
                                                       jac_w[pl], data.superior_x.row(qd_id),
                                                       sc->superior, qd_id, corr_grad.data());
                opt_i += w.corr_sign * w.lambda2 * rho_wq;
                for (std::size_t j = 0; j < d; ++j)
                    dw(pl, j) += w.lambda * w.corr_sign * w.lambda2 * corr_grad[j] * inv_b;
                const double rho_zp = correlation_term(*model, z.row(ql), probe_m, off_z + ql,
                                                       jac_z[ql], data.inferior_x.row(pd_id),
                                                       sc->inferior, pd_id, corr_grad.data());
                opt_i += w.corr_sign * w.lambda2 * rho_zp;
                for (std::size_t j = 0; j < d; ++j)
                    dz(ql, j) += w.lambda * w.corr_sign * w.lambda2 * corr_grad[j] * inv_b;
            }
        } else {
            opt_i = f_u[pl] - y_p;
            for (std::size_t j = 0; j < d; ++j)
                du(pl, j) += w.lambda * df_u(pl, j) * inv_b;
        }
        terms.opt += opt_i;
    }
    terms.sim *= inv_b;
    terms.rec *= inv_b;
    terms.opt *= inv_b;
    terms.gen = terms.sim + (single ? 0.0 : w.lambda1 * terms.rec);
    terms.total = terms.gen + w.lambda * terms.opt;

    // reverse passes; gradient flows from the reconstruction/correlation
    // heads back into the primary tapes
    LossResult res;
    res.terms = terms;
    res.grad_forward.assign(pair.forward_net.param_count(), 0.0);
    res.grad_inverse.assign(pair.inverse_net.param_count(), 0.0);
    if (!single) {
        const Matrix du_extra = residual_backward(pair.inverse_net, tape_w, dw, res.grad_inverse);
        add_into(du, du_extra);
        const Matrix dv_extra = residual_backward(pair.forward_net, tape_z, dz, res.grad_forward);
        add_into(dv, dv_extra);
    }
    mlp::backward(pair.forward_net, tape_u, du, res.grad_forward);
    if (!single) mlp::backward(pair.inverse_net, tape_v, dv, res.grad_inverse);
    return res;
}

TrainReport train_pair(GenerativePair& pair, const Surrogate& surrogate,
                       const dataprep::PairedDataset& data, const TrainOptions& opts, Rng& rng) {
    if (data.size() == 0) throw EmptyData("train_pair: empty paired dataset");
    if (opts.epochs > 0 && (opts.batch_size == 0 || opts.lr <= 0.0))
        throw InvalidArgument("train_pair: batch_size and lr are required");

    TrainReport report;
    if (opts.epochs == 0) return report;

    pair.opt_forward = AdamState(pair.forward_net.param_count(), opts.lr);
    pair.opt_inverse = AdamState(pair.inverse_net.param_count(), opts.lr);

    // Every epoch sweeps the full pair list once, in minibatches of the
    // requested size. Pairs are emitted grouped by inferior row (with both
    // row orders reshuffled each epoch), so a minibatch carries few distinct
    // rows and the batch deduplication in pair_loss pays off.
    const std::size_t n_inf = data.inferior_x.rows();
    const std::size_t n_sup = data.superior_x.rows();
    std::vector<std::vector<std::uint32_t>> by_p(n_inf);
    for (std::size_t i = 0; i < data.pairs.size(); ++i)
        by_p[data.pairs[i].first].push_back(static_cast<std::uint32_t>(i));

    std::vector<std::uint32_t> p_order(n_inf), q_order(n_sup);
    std::vector<std::uint32_t> order;
    order.reserve(data.size());
    for (std::size_t i = 0; i < n_inf; ++i) p_order[i] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < n_sup; ++j) q_order[j] = static_cast<std::uint32_t>(j);

    LossScratch scratch;
    double best = 1e300;
    std::size_t best_epoch = 0;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        for (std::size_t i = n_inf; i-- > 1;) {
            const std::size_t k = rng.below(i + 1);
            std::swap(p_order[i], p_order[k]);
        }
        for (std::size_t i = n_sup; i-- > 1;) {
            const std::size_t k = rng.below(i + 1);
            std::swap(q_order[i], q_order[k]);
        }
        order.clear();
        for (std::uint32_t p : p_order) {
            const auto& bucket = by_p[p];
            if (bucket.size() == n_sup) {
                for (std::uint32_t q : q_order) order.push_back(bucket[q]);
            } else {
                order.insert(order.end(), bucket.begin(), bucket.end());
            }
        }
        double epoch_sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t off = 0; off < order.size(); off += opts.batch_size) {
            const std::size_t len = std::min(opts.batch_size, order.size() - off);
            LossResult res = pair_loss(pair, surrogate, data,
                                       std::span<const std::uint32_t>(order.data() + off, len),
                                       &scratch);
            adam_step(pair.forward_net.data, res.grad_forward, pair.opt_forward);
            if (!pair.single_net())
                adam_step(pair.inverse_net.data, res.grad_inverse, pair.opt_inverse);
            epoch_sum += res.terms.total;
            ++steps;
        }
        const double epoch_mean = epoch_sum / static_cast<double>(steps);
        report.epoch_loss.push_back(epoch_mean);
        report.epochs_run = epoch + 1;

        if (epoch_mean < best - opts.min_rel_improvement * (1.0 + std::abs(best))) {
            best = epoch_mean;
            best_epoch = epoch;
        } else if (opts.early_stop && epoch - best_epoch >= opts.patience) {
            break;
        }
    }
    return report;
}

}  // namespace evogo::genpair
