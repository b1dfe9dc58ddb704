#include "evogo/benchmarks.hpp"

#include <cmath>

#include "evogo/kernels.hpp"

namespace evogo::benchmarks {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.141592653589793238462643383279;

double offset_of(Kind kind) {
    switch (kind) {
        case Kind::Ackley: return 20.0;
        case Kind::Rosenbrock: return 10.0;
        case Kind::Rastrigin: return 32.0;
        case Kind::Levy: return 10.0;
    }
    return 0.0;
}

// w_inner = scale*x - offset - s; Levy additionally applies w = 1 + w_inner/4.
void map_to_w(const BenchmarkSpec& spec, const double* x, double* w) {
    const double scale = inner_scale(spec.kind);
    const double off = offset_of(spec.kind);
    for (std::size_t i = 0; i < spec.dim; ++i) {
        double wi = scale * x[i] - off - (spec.shift.empty() ? 0.0 : spec.shift[i]);
        if (spec.kind == Kind::Levy) wi = 1.0 + wi / 4.0;
        w[i] = wi;
    }
}

double ackley_w(const double* w, std::size_t d) {
    const double a = 20.0, b = 0.2;
    double sq = 0.0, cs = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        sq += w[i] * w[i];
        cs += std::cos(kTwoPi * w[i]);
    }
    const double dd = static_cast<double>(d);
    return -a * std::exp(-b * std::sqrt(sq / dd)) - std::exp(cs / dd) + a + std::exp(1.0);
}

double rosenbrock_w(const double* w, std::size_t d) {
    double f = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const double t = w[i + 1] - w[i] * w[i];
        const double u = w[i] - 1.0;
        f += 100.0 * t * t + u * u;
    }
    return f;
}

double rastrigin_w(const double* w, std::size_t d) {
    double f = 10.0 * static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i)
        f += w[i] * w[i] - 10.0 * std::cos(kTwoPi * w[i]);
    return f;
}

double levy_w(const double* w, std::size_t d) {
    const double s1 = std::sin(kPi * w[0]);
    double f = s1 * s1;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const double u = w[i] - 1.0;
        const double s = std::sin(kPi * w[i] + 1.0);
        f += u * u * (1.0 + 10.0 * s * s);
    }
    const double ud = w[d - 1] - 1.0;
    const double sd = std::sin(kTwoPi * w[d - 1]);
    f += ud * ud * (1.0 + sd * sd);
    return f;
}

void ackley_grad_w(const double* w, std::size_t d, double* g) {
    const double a = 20.0, b = 0.2;
    const double dd = static_cast<double>(d);
    double sq = 0.0, cs = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        sq += w[i] * w[i];
        cs += std::cos(kTwoPi * w[i]);
    }
    const double r = std::sqrt(sq / dd);
    const double ec = std::exp(cs / dd);
    if (r < 1e-12) {
        // the radial term has a kink at the optimum; zero is the correct
        // subgradient there
        for (std::size_t i = 0; i < d; ++i) g[i] = 0.0;
        return;
    }
    const double radial = a * b * std::exp(-b * r) / (dd * r);
    for (std::size_t i = 0; i < d; ++i)
        g[i] = radial * w[i] + ec * kTwoPi * std::sin(kTwoPi * w[i]) / dd;
}

void rosenbrock_grad_w(const double* w, std::size_t d, double* g) {
    for (std::size_t i = 0; i < d; ++i) g[i] = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const double t = w[i + 1] - w[i] * w[i];
        g[i] += -400.0 * w[i] * t + 2.0 * (w[i] - 1.0);
        g[i + 1] += 200.0 * t;
    }
}

void rastrigin_grad_w(const double* w, std::size_t d, double* g) {
    for (std::size_t i = 0; i < d; ++i)
        g[i] = 2.0 * w[i] + 10.0 * kTwoPi * std::sin(kTwoPi * w[i]);
}

void levy_grad_w(const double* w, std::size_t d, double* g) {
    for (std::size_t i = 0; i < d; ++i) g[i] = 0.0;
    g[0] += 2.0 * kPi * std::sin(kPi * w[0]) * std::cos(kPi * w[0]);
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const double u = w[i] - 1.0;
        const double s = std::sin(kPi * w[i] + 1.0);
        const double c = std::cos(kPi * w[i] + 1.0);
        g[i] += 2.0 * u * (1.0 + 10.0 * s * s) + u * u * 20.0 * s * c * kPi;
    }
    const double ud = w[d - 1] - 1.0;
    const double sd = std::sin(kTwoPi * w[d - 1]);
    const double cd = std::cos(kTwoPi * w[d - 1]);
    g[d - 1] += 2.0 * ud * (1.0 + sd * sd) + ud * ud * 2.0 * sd * cd * kTwoPi;
}

}  // namespace

Kind kind_from_name(const std::string& name) {
    if (name == "ackley") return Kind::Ackley;
    if (name == "rosenbrock") return Kind::Rosenbrock;
    if (name == "rastrigin") return Kind::Rastrigin;
    if (name == "levy") return Kind::Levy;
    throw InvalidArgument("unknown benchmark: " + name);
}

std::string kind_name(Kind kind) {
    switch (kind) {
        case Kind::Ackley: return "ackley";
        case Kind::Rosenbrock: return "rosenbrock";
        case Kind::Rastrigin: return "rastrigin";
        case Kind::Levy: return "levy";
    }
    return "?";
}

double inner_scale(Kind kind) {
    switch (kind) {
        case Kind::Ackley: return 40.0;
        case Kind::Rosenbrock: return 20.0;
        case Kind::Rastrigin: return 64.0;
        case Kind::Levy: return 20.0;
    }
    return 0.0;
}

BenchmarkSpec make_spec(Kind kind, std::size_t dim, Rng& shift_rng) {
    if (dim < 2) throw InvalidArgument("benchmark dimension must be >= 2");
    BenchmarkSpec spec;
    spec.kind = kind;
    spec.dim = dim;
    spec.shift_seed = shift_rng.root_seed();
    spec.shift.resize(dim);
    const double half = inner_scale(kind) / 4.0;
    for (std::size_t i = 0; i < dim; ++i)
        spec.shift[i] = (2.0 * shift_rng.uniform() - 1.0) * half;
    return spec;
}

BenchmarkSpec make_spec_unshifted(Kind kind, std::size_t dim) {
    if (dim < 2) throw InvalidArgument("benchmark dimension must be >= 2");
    BenchmarkSpec spec;
    spec.kind = kind;
    spec.dim = dim;
    spec.shift.assign(dim, 0.0);
    return spec;
}

Vector optimum_location(const BenchmarkSpec& spec) {
    // w* = 0 for Ackley/Rastrigin, w* = 1 for Rosenbrock/Levy
    Vector x(spec.dim);
    const double scale = inner_scale(spec.kind);
    const double off = offset_of(spec.kind);
    for (std::size_t i = 0; i < spec.dim; ++i) {
        const double s = spec.shift.empty() ? 0.0 : spec.shift[i];
        double w_inner = 0.0;
        switch (spec.kind) {
            case Kind::Ackley:
            case Kind::Rastrigin: w_inner = 0.0; break;
            case Kind::Rosenbrock: w_inner = 1.0; break;
            case Kind::Levy: w_inner = 0.0; break;  // w = 1 + w_inner/4 = 1
        }
        x[i] = (w_inner + off + s) / scale;
    }
    return x;
}

double evaluate_raw(const BenchmarkSpec& spec, const double* x) {
    const std::size_t d = spec.dim;
    double w_stack[64];
    std::vector<double> w_heap;
    double* w = d <= 64 ? w_stack : (w_heap.resize(d), w_heap.data());
    map_to_w(spec, x, w);
    switch (spec.kind) {
        case Kind::Ackley: return ackley_w(w, d);
        case Kind::Rosenbrock: return rosenbrock_w(w, d);
        case Kind::Rastrigin: return rastrigin_w(w, d);
        case Kind::Levy: return levy_w(w, d);
    }
    return 0.0;
}

void gradient_raw(const BenchmarkSpec& spec, const double* x, double* grad_out) {
    const std::size_t d = spec.dim;
    std::vector<double> w(d);
    map_to_w(spec, x, w.data());
    switch (spec.kind) {
        case Kind::Ackley: ackley_grad_w(w.data(), d, grad_out); break;
        case Kind::Rosenbrock: rosenbrock_grad_w(w.data(), d, grad_out); break;
        case Kind::Rastrigin: rastrigin_grad_w(w.data(), d, grad_out); break;
        case Kind::Levy: levy_grad_w(w.data(), d, grad_out); break;
    }
    const double chain = spec.kind == Kind::Levy ? inner_scale(spec.kind) / 4.0
                                                 : inner_scale(spec.kind);
    for (std::size_t i = 0; i < d; ++i) grad_out[i] *= chain;
}

Vector evaluate(const BenchmarkSpec& spec, const Matrix& x) {
    if (x.cols() != spec.dim) throw DimensionMismatch("evaluate: dimension mismatch");
    const std::size_t n = x.rows();
    Matrix clamped(n, spec.dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < spec.dim; ++j) {
            double v = x(i, j);
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw DomainError("evaluate: input outside [0,1] beyond tolerance");
            clamped(i, j) = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        }
    }
    Vector f(n);
    kernels::parallel_rows(n, [&](std::size_t i) { f[i] = evaluate_raw(spec, clamped.row(i)); });
    return f;
}

double evaluate_one(const BenchmarkSpec& spec, const Vector& x) {
    Matrix m(1, spec.dim);
    if (x.size() != spec.dim) throw DimensionMismatch("evaluate_one: dimension mismatch");
    m.set_row(0, x);
    return evaluate(spec, m)[0];
}

Vector gradient(const BenchmarkSpec& spec, const Vector& x) {
    if (x.size() != spec.dim) throw DimensionMismatch("gradient: dimension mismatch");
    for (double v : x)
        if (v <= 0.0 || v >= 1.0) throw DomainError("gradient: point must be interior to [0,1]^d");
    Vector g(spec.dim);
    gradient_raw(spec, x.data(), g.data());
    return g;
}

}  // namespace evogo::benchmarks
