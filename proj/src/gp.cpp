#include "evogo/gp.hpp"

#include <algorithm>
#include <cmath>

#include "evogo/adam.hpp"
#include "evogo/kernels.hpp"
#include "evogo/linalg.hpp"

namespace evogo::gp {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964091736687747;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kVarFloor = 1e-12;

inline double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

// Matern-5/2 radial profile m(s) = (1 + s + s^2/3) exp(-s), s = sqrt(5) r / l.
inline double matern(double s) { return (1.0 + s + s * s / 3.0) * std::exp(-s); }

struct Standardized {
    Vector z;
    double mean = 0.0, stddev = 1.0;
    bool degenerate = false;
};

Standardized standardize(const Vector& y) {
    Standardized out;
    const std::size_t n = y.size();
    double m = 0.0;
    for (double v : y) m += v;
    m /= static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - m) * (v - m);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    out.mean = m;
    if (sd < 1e-12) {
        out.degenerate = true;
        out.stddev = 1.0;
        out.z.assign(n, 0.0);
        return out;
    }
    out.stddev = sd;
    out.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.z[i] = (y[i] - m) / sd;
    return out;
}

void refresh_factorization(GpModel& model, double min_jitter) {
    Matrix k = gram(model.params, model.x);
    auto chol = linalg::cholesky_factor(k, min_jitter);
    model.chol = std::move(chol.L);
    model.jitter = chol.jitter;
    model.alpha = linalg::solve_spd(model.chol, model.z);
}

}  // namespace

double kernel_cross(const KernelParams& p, const double* a, const double* b, std::size_t d) {
    const double r2 = sq_dist(a, b, d);
    const double base = p.scale() * matern(kSqrt5 * std::sqrt(r2) / p.length());
    // coincident points describe the same noisy observation
    return r2 == 0.0 ? base + p.noise() : base;
}

void kernel_input_grad(const KernelParams& p, const double* a, const double* b, std::size_t d,
                       double* g) {
    const double len = p.length();
    const double s = kSqrt5 * std::sqrt(sq_dist(a, b, d)) / len;
    // d kappa / d a = -sigma^2 e^{-s} (1+s) * 5/(3 l^2) * (a - b); smooth at a = b
    const double coef = -p.scale() * std::exp(-s) * (1.0 + s) * 5.0 / (3.0 * len * len);
    for (std::size_t i = 0; i < d; ++i) g[i] = coef * (a[i] - b[i]);
}

Matrix gram(const KernelParams& p, const Matrix& x) {
    const std::size_t n = x.rows();
    const double s2 = p.scale(), len = p.length(), eps = p.noise();
    Matrix k(n, n);
    kernels::parallel_rows(n, [&](std::size_t i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double r = std::sqrt(sq_dist(x.row(i), x.row(j), x.cols()));
            k(i, j) = s2 * matern(kSqrt5 * r / len);
        }
        k(i, i) += eps;
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) k(i, j) = k(j, i);
    return k;
}

GpModel make_model(const Matrix& x, const Vector& y, const KernelParams& params, bool standardize_y) {
    if (x.rows() != y.size()) throw DimensionMismatch("gp::make_model: rows / targets");
    if (x.rows() == 0) throw EmptyData("gp::make_model: empty training set");
    GpModel model;
    model.x = x;
    model.params = params;
    if (standardize_y) {
        Standardized st = standardize(y);
        model.y_mean = st.mean;
        model.y_std = st.stddev;
        model.degenerate = st.degenerate;
        model.z = std::move(st.z);
    } else {
        model.y_mean = 0.0;
        model.y_std = 1.0;
        model.z = y;
    }
    if (!model.degenerate) refresh_factorization(model, 0.0);
    return model;
}

GpModel fit(const Matrix& x, const Vector& y, const FitOptions& opts) {
    const std::size_t n = x.rows();
    if (n < 2) throw InvalidArgument("gp::fit: needs at least two points");
    if (y.size() != n) throw DimensionMismatch("gp::fit: rows / targets");

    GpModel model;
    model.x = x;
    Standardized st = standardize(y);
    model.y_mean = st.mean;
    model.y_std = st.stddev;
    model.degenerate = st.degenerate;
    model.z = std::move(st.z);
    model.params = opts.init ? *opts.init : KernelParams{};
    if (model.degenerate) return model;  // constant predictor, nothing to train

    const std::size_t d = x.cols();
    const double lr = opts.lr > 0.0 ? opts.lr : opts.lr_scale * static_cast<double>(n) / 6e4;

    // pairwise distances are fixed across epochs
    Matrix dist(n, n);
    kernels::parallel_rows(n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j)
            dist(i, j) = std::sqrt(sq_dist(x.row(i), x.row(j), d));
    });

    Vector theta = {model.params.log_scale, model.params.log_length, model.params.log_noise};
    AdamState adam(3, lr);
    Matrix k(n, n), kinv(n, n), m5(n, n), dlen(n, n);
    double best = -1e300;
    std::size_t best_epoch = 0;
    const double tol = opts.min_improvement * static_cast<double>(n);

    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        const double s2 = std::exp(theta[0]);
        const double len = std::exp(theta[1]);
        const double eps = std::exp(theta[2]);

        kernels::parallel_rows(n, [&](std::size_t i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double s = kSqrt5 * dist(i, j) / len;
                const double e = std::exp(-s);
                m5(i, j) = s2 * (1.0 + s + s * s / 3.0) * e;
                dlen(i, j) = s2 * s * s * (1.0 + s) * e / 3.0;
                k(i, j) = m5(i, j) + (i == j ? eps : 0.0);
            }
        });

        linalg::CholeskyResult chol;
        try {
            chol = linalg::cholesky_factor(k, opts.min_jitter);
        } catch (const NotPositiveDefinite&) {
            break;  // keep the best parameters seen so far
        }
        Vector alpha = linalg::solve_spd(chol.L, model.z);

        double quad = 0.0, logdet = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            quad += model.z[i] * alpha[i];
            logdet += std::log(chol.L(i, i));
        }
        const double mll_val = -0.5 * quad - logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
        model.mll_trace.push_back(mll_val);

        if (mll_val > best + tol) {
            best = mll_val;
            best_epoch = epoch;
        } else if (opts.early_stop && epoch - best_epoch >= opts.patience) {
            model.epochs_run = epoch + 1;
            break;
        }

        // K^{-1} via triangular solves on the identity
        kinv = Matrix::identity(n);
        linalg::solve_lower_inplace(chol.L, kinv);
        linalg::solve_lower_transpose_inplace(chol.L, kinv);

        // d MLL / d theta_k = 0.5 tr((alpha alpha^T - K^{-1}) dK/dtheta_k)
        double g_scale = 0.0, g_len = 0.0, g_noise = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double gij = alpha[i] * alpha[j] - kinv(i, j);
                g_scale += gij * m5(i, j);
                g_len += gij * dlen(i, j);
            }
            g_noise += (alpha[i] * alpha[i] - kinv(i, i)) * eps;
        }
        Vector grad = {-0.5 * g_scale, -0.5 * g_len, -0.5 * g_noise};  // minimize -MLL
        adam_step(theta, grad, adam);
        model.epochs_run = epoch + 1;
    }

    model.params.log_scale = theta[0];
    model.params.log_length = theta[1];
    model.params.log_noise = theta[2];
    refresh_factorization(model, opts.min_jitter);
    return model;
}

Probe probe(const GpModel& model, const Matrix& q) {
    const std::size_t m = q.rows();
    Probe pr;
    pr.mean_std.assign(m, 0.0);
    pr.var_std.assign(m, 0.0);
    if (model.degenerate) {
        const double prior = model.params.scale() + model.params.noise();
        pr.var_std.assign(m, prior);
        return pr;
    }
    const std::size_t n = model.size(), d = model.dim();
    if (q.cols() != d) throw DimensionMismatch("gp::probe: query width");
    pr.k = Matrix(n, m);
    kernels::parallel_rows(n, [&](std::size_t i) {
        for (std::size_t c = 0; c < m; ++c) {
            const double r = std::sqrt(sq_dist(model.x.row(i), q.row(c), d));
            pr.k(i, c) = model.params.scale() * matern(kSqrt5 * r / model.params.length());
        }
    });
    pr.v = pr.k;
    linalg::solve_lower_inplace(model.chol, pr.v);
    pr.w = pr.v;
    linalg::solve_lower_transpose_inplace(model.chol, pr.w);
    const double prior = model.params.scale() + model.params.noise();
    for (std::size_t c = 0; c < m; ++c) {
        double mean = 0.0, vv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += pr.k(i, c) * model.alpha[i];
            vv += pr.v(i, c) * pr.v(i, c);
        }
        pr.mean_std[c] = mean;
        pr.var_std[c] = std::max(0.0, prior - vv);
    }
    return pr;
}

void posterior_mean_var(const GpModel& model, const Matrix& q, Vector& mean, Vector& var) {
    Probe pr = probe(model, q);
    const std::size_t m = q.rows();
    mean.resize(m);
    var.resize(m);
    const double ys2 = model.y_std * model.y_std;
    for (std::size_t c = 0; c < m; ++c) {
        mean[c] = model.y_mean + model.y_std * pr.mean_std[c];
        var[c] = ys2 * pr.var_std[c];
    }
}

void posterior(const GpModel& model, const Matrix& q, Vector& mean, Matrix& cov) {
    const std::size_t m = q.rows();
    if (model.degenerate) {
        mean.assign(m, model.y_mean);
        cov = Matrix(m, m);
        const double prior = model.params.scale() + model.params.noise();
        for (std::size_t i = 0; i < m; ++i) cov(i, i) = prior;
        return;
    }
    Probe pr = probe(model, q);
    mean.resize(m);
    for (std::size_t c = 0; c < m; ++c) mean[c] = model.y_mean + model.y_std * pr.mean_std[c];

    // kappa(Q, Q): the noise term applies only to coincident points
    const std::size_t d = model.dim();
    cov = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            cov(i, j) = kernel_cross(model.params, q.row(i), q.row(j), d);
    // subtract V^T V
    const std::size_t n = model.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += pr.v(r, i) * pr.v(r, j);
            cov(i, j) -= s;
        }
    }
    const double ys2 = model.y_std * model.y_std;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cov(i, j) *= ys2;
            cov(j, i) = cov(i, j);
        }
        cov(i, i) = std::max(0.0, cov(i, i));
    }
}

double correlation(const GpModel& model, const Vector& x1, const Vector& x2) {
    if (model.degenerate) return 0.0;
    const std::size_t d = model.dim();
    if (x1.size() != d || x2.size() != d) throw DimensionMismatch("gp::correlation: width");
    Matrix q(2, d);
    q.set_row(0, x1);
    q.set_row(1, x2);
    Probe pr = probe(model, q);
    if (pr.var_std[0] < kVarFloor || pr.var_std[1] < kVarFloor) return 0.0;
    double cross = kernel_cross(model.params, x1.data(), x2.data(), d);
    for (std::size_t i = 0; i < model.size(); ++i) cross -= pr.v(i, 0) * pr.v(i, 1);
    const double rho = cross / std::sqrt(pr.var_std[0] * pr.var_std[1]);
    return std::clamp(rho, -1.0, 1.0);
}

void posterior_grads(const GpModel& model, const Vector& q, Vector& dmean, Vector& dstd) {
    const std::size_t d = model.dim();
    dmean.assign(d, 0.0);
    dstd.assign(d, 0.0);
    if (model.degenerate) return;
    if (q.size() != d) throw DimensionMismatch("gp::posterior_grads: width");
    Matrix qm(1, d);
    qm.set_row(0, q);
    Probe pr = probe(model, qm);
    const std::size_t n = model.size();
    Vector g(d);
    for (std::size_t i = 0; i < n; ++i) {
        kernel_input_grad(model.params, q.data(), model.x.row(i), d, g.data());
        for (std::size_t j = 0; j < d; ++j) {
            dmean[j] += g[j] * model.alpha[i];
            dstd[j] += g[j] * pr.w(i, 0);  // accumulates d var / d q up to the -2 factor
        }
    }
    const double sd = std::sqrt(pr.var_std[0]);
    if (sd < kVarFloor) {
        dstd.assign(d, 0.0);
    } else {
        // d sigma / d q = (d var / d q) / (2 sigma), d var / d q = -2 J^T w
        for (std::size_t j = 0; j < d; ++j) dstd[j] = -dstd[j] / sd;
    }
    for (std::size_t j = 0; j < d; ++j) {
        dmean[j] *= model.y_std;
        dstd[j] *= model.y_std;
    }
}

double mll(const GpModel& model) {
    if (model.degenerate) return 0.0;
    const std::size_t n = model.size();
    double quad = 0.0, logdet = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        quad += model.z[i] * model.alpha[i];
        logdet += std::log(model.chol(i, i));
    }
    return -0.5 * quad - logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
}

}  // namespace evogo::gp
