#pragma once

#include <cmath>
#include <vector>

#include "evogo/matrix.hpp"

namespace evogo::gp {

// Noisy Matern-5/2 kernel in log parameterization. The smoothness is fixed;
// distances are divided by a single isotropic lengthscale.
struct KernelParams {
    double log_scale = 0.0;               // log sigma^2
    double log_length = -0.6931471805599453;  // log 0.5
    double log_noise = -9.210340371976182;    // log 1e-4

    double scale() const { return std::exp(log_scale); }
    double length() const { return std::exp(log_length); }
    double noise() const { return std::exp(log_noise); }
};

struct FitOptions {
    std::size_t epochs = 1000;
    double lr = 0.0;            // 0 -> lr_scale * n / 6e4
    double lr_scale = 1.0;
    double min_jitter = 0.0;    // floor for the Cholesky jitter
    bool early_stop = true;
    std::size_t patience = 25;
    // stop once the MLL stops improving by min_improvement * n within the
    // patience window; 2e-3 cuts the long drift tail after convergence
    double min_improvement = 2e-3;
    const KernelParams* init = nullptr;  // warm-start hyperparameters
};

// Fitted surrogate. Targets are standardized internally; every public
// output is de-standardized. A model with ~zero target spread degrades to
// a constant predictor with the prior variance.
struct GpModel {
    Matrix x;                 // n x d training inputs, normalized
    Vector z;                 // standardized targets
    double y_mean = 0.0;
    double y_std = 1.0;
    KernelParams params;
    Matrix chol;              // L with L L^T = kappa(X,X) + jitter I
    double jitter = 0.0;
    Vector alpha;             // K^{-1} z
    bool degenerate = false;
    std::vector<double> mll_trace;
    std::size_t epochs_run = 0;

    std::size_t size() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }
};

/// Maximize the marginal log likelihood over (log sigma^2, log l, log eps)
/// with Adam at learning rate n/6e4 for up to opts.epochs epochs.
GpModel fit(const Matrix& x, const Vector& y, const FitOptions& opts = {});

/// Build a model at fixed hyperparameters (no training). When `standardize`
/// is false the targets are used as-is with y_mean = 0, y_std = 1.
GpModel make_model(const Matrix& x, const Vector& y, const KernelParams& params,
                   bool standardize = true);

/// Posterior mean vector and full covariance at query rows Q;
/// de-standardized, diagonal clamped at zero, exactly symmetric.
void posterior(const GpModel& model, const Matrix& q, Vector& mean, Matrix& cov);

/// Diagonal-only posterior (mean and variance per query row).
void posterior_mean_var(const GpModel& model, const Matrix& q, Vector& mean, Vector& var);

/// GP correlation coefficient rho(x1, x2); 0 when either posterior variance
/// is degenerate.
double correlation(const GpModel& model, const Vector& x1, const Vector& x2);

/// Analytic gradients of the posterior mean and posterior standard
/// deviation with respect to the query point.
void posterior_grads(const GpModel& model, const Vector& q, Vector& dmean, Vector& dstd);

double mll(const GpModel& model);

// Batched per-column solves reused by the composite training loss. All
// quantities are in standardized units.
struct Probe {
    Matrix k;         // n x m cross covariances kappa(X, Q)
    Matrix v;         // L^{-1} k
    Matrix w;         // K^{-1} k
    Vector mean_std;  // m
    Vector var_std;   // m, clamped at 0
};
Probe probe(const GpModel& model, const Matrix& q);

// Kernel primitives (exposed for the loss assembly and tests).
double kernel_cross(const KernelParams& p, const double* a, const double* b, std::size_t d);
// d kappa(a, b) / d a
void kernel_input_grad(const KernelParams& p, const double* a, const double* b, std::size_t d,
                       double* g);
// Gram matrix with the noise term on the diagonal (index rule).
Matrix gram(const KernelParams& p, const Matrix& x);

}  // namespace evogo::gp
