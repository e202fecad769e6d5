#pragma once

#include <cmath>
#include <vector>

#include "tdrc/common.hpp"
#include "tdrc/jet.hpp"

namespace tdrc {

enum class KernelType { MackeyGlass, Ikeda };

/// Parameters of the nonlinear feedback kernel f(x, I, theta).
///
/// MackeyGlass: f = eta*(x + gamma*I) / (1 + (x + gamma*I)^p)
/// Ikeda:       f = eta * sin^2(x + gamma*I + phi)
struct KernelParams {
    KernelType type = KernelType::MackeyGlass;
    double eta = 0.0;
    double gamma = 0.0;
    double p = 2.0;    // Mackey-Glass exponent
    double phi = 0.0;  // Ikeda phase offset

    static KernelParams mackey_glass(double eta, double gamma, double p = 2.0) {
        KernelParams k;
        k.type = KernelType::MackeyGlass;
        k.eta = eta;
        k.gamma = gamma;
        k.p = p;
        return k;
    }
    static KernelParams ikeda(double eta, double gamma, double phi) {
        KernelParams k;
        k.type = KernelType::Ikeda;
        k.eta = eta;
        k.gamma = gamma;
        k.phi = phi;
        return k;
    }
};

enum class StabilityCertificate {
    CertifiedAsymptoticallyStable,  // |f'(x0)| <  1
    CertifiedStable,                // |f'(x0)| == 1 within tolerance
    NotCertified                    // sufficient condition fails; says nothing about instability
};

struct Equilibrium {
    double x0 = 0.0;          // root of f(x, 0, theta) = x
    double derivative = 0.0;  // d/dx f at (x0, 0)
    StabilityCertificate certificate = StabilityCertificate::NotCertified;
};

namespace detail {

template <typename T>
T constant_like(const T&, double v) {
    return T(v);
}
template <typename S>
PowerSeries<S> constant_like(const PowerSeries<S>& proto, double v) {
    return PowerSeries<S>(proto.order(), S(v));
}

inline bool is_nonnegative_integer(double p) {
    return p >= 0.0 && p == std::floor(p) && p < 1e9;
}

template <typename T>
T pow_any(const T& u, double p) {
    using std::pow;
    if (is_nonnegative_integer(p)) {
        T r(1);
        T base = u;
        for (long e = static_cast<long>(p); e > 0; e >>= 1) {
            if (e & 1) r = r * base;
            if (e > 1) base = base * base;
        }
        return r;
    }
    if (!(u > T(0))) throw DomainError("Mackey-Glass: non-integer exponent with non-positive base");
    return pow(u, T(p));
}
template <typename S>
PowerSeries<S> pow_any(const PowerSeries<S>& u, double p) {
    if (is_nonnegative_integer(p)) return powi(u, static_cast<long>(p));
    return pow(u, p);
}

}  // namespace detail

/// Generic kernel evaluation; T may be a scalar or a PowerSeries.
template <typename T>
T eval_kernel_t(const KernelParams& k, const T& x, const T& I) {
    using detail::constant_like;
    using std::sin;
    switch (k.type) {
        case KernelType::MackeyGlass: {
            T u = x + constant_like(x, k.gamma) * I;
            T denom = constant_like(x, 1.0) + detail::pow_any(u, k.p);
            return constant_like(x, k.eta) * u / denom;
        }
        case KernelType::Ikeda: {
            T arg = x + constant_like(x, k.gamma) * I + constant_like(x, k.phi);
            T s = sin(arg);
            return constant_like(x, k.eta) * s * s;
        }
    }
    throw Error("unreachable kernel type");
}

/// f(x, I, theta). Throws DomainError / NonFiniteError.
double eval_kernel(const KernelParams& k, double x, double I);

/// Exact analytic d/dx f(x, I, theta).
double kernel_x_derivative(const KernelParams& k, double x, double I);

/// (d^i/dI^i f)(x0, 0, theta) for i = 1..order, by jet propagation.
std::vector<double> kernel_input_derivatives(const KernelParams& k, double x0, int order);

/// Same propagation with a caller-chosen scalar type (used by high-precision test oracles).
template <typename T>
std::vector<T> kernel_input_derivatives_t(const KernelParams& k, T x0, int order) {
    if (order < 1) throw Error("kernel_input_derivatives: order must be >= 1");
    PowerSeries<T> x(order, x0);
    PowerSeries<T> input = PowerSeries<T>::variable(order, T(0), T(1));
    PowerSeries<T> f = eval_kernel_t(k, x, input);
    std::vector<T> out(static_cast<size_t>(order));
    T factorial(1);
    for (int i = 1; i <= order; ++i) {
        factorial *= T(i);
        out[static_cast<size_t>(i - 1)] = f[i] * factorial;
    }
    return out;
}

/// All roots of f(x, 0, theta) = x in [lo, hi], sorted ascending, each with
/// its derivative and stability certificate. Sign-change scan on a uniform
/// grid (points_per_unit per unit length) refined by bisection.
std::vector<Equilibrium> find_equilibria(const KernelParams& k, double lo, double hi,
                                         int points_per_unit = 10000);

/// Certificate for a point already known to be an equilibrium.
/// Throws NotAnEquilibriumError if |f(x0,0) - x0| > root_tol.
Equilibrium certify_stability(const KernelParams& k, double x0, double root_tol = 1e-8);

}  // namespace tdrc
