#include "tdrc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace tdrc {

double eval_kernel(const KernelParams& k, double x, double I) {
    double v = eval_kernel_t<double>(k, x, I);
    if (!std::isfinite(v)) throw NonFiniteError("kernel evaluation overflowed");
    return v;
}

double kernel_x_derivative(const KernelParams& k, double x, double I) {
    switch (k.type) {
        case KernelType::MackeyGlass: {
            const double u = x + k.gamma * I;
            const double up = detail::pow_any(u, k.p);
            const double denom = (1.0 + up) * (1.0 + up);
            const double v = k.eta * (1.0 + (1.0 - k.p) * up) / denom;
            if (!std::isfinite(v)) throw NonFiniteError("kernel derivative overflowed");
            return v;
        }
        case KernelType::Ikeda:
            return k.eta * std::sin(2.0 * (x + k.gamma * I + k.phi));
    }
    throw Error("unreachable kernel type");
}

std::vector<double> kernel_input_derivatives(const KernelParams& k, double x0, int order) {
    auto out = kernel_input_derivatives_t<double>(k, x0, order);
    for (double v : out)
        if (!std::isfinite(v)) throw NonFiniteError("kernel input derivative overflowed");
    return out;
}

namespace {

// f(x, 0) - x, or nullopt where the kernel is undefined.
std::optional<double> equilibrium_gap(const KernelParams& k, double x) {
    try {
        return eval_kernel(k, x, 0.0) - x;
    } catch (const DomainError&) {
        return std::nullopt;
    } catch (const NonFiniteError&) {
        return std::nullopt;
    }
}

double bisect_root(const KernelParams& k, double a, double b, double ga) {
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        const auto gm = equilibrium_gap(k, m);
        if (!gm) break;  // domain edge inside the bracket; keep the midpoint
        if (*gm == 0.0) return m;
        if ((ga < 0.0) == (*gm < 0.0)) {
            a = m;
            ga = *gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<Equilibrium> find_equilibria(const KernelParams& k, double lo, double hi,
                                         int points_per_unit) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw Error("find_equilibria: invalid search interval");
    if (points_per_unit <= 0) throw Error("find_equilibria: grid resolution must be positive");

    const long n = std::max<long>(100, std::lround((hi - lo) * points_per_unit));
    std::vector<double> roots;

    std::optional<double> gprev = equilibrium_gap(k, lo);
    double xprev = lo;
    for (long i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const auto g = equilibrium_gap(k, x);
        if (gprev && g) {
            if (*gprev == 0.0) {
                roots.push_back(xprev);
            } else if ((*gprev < 0.0) != (*g < 0.0)) {
                roots.push_back(bisect_root(k, xprev, x, *gprev));
            }
        }
        xprev = x;
        gprev = g;
    }
    if (gprev && *gprev == 0.0) roots.push_back(xprev);

    std::sort(roots.begin(), roots.end());
    std::vector<Equilibrium> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(r - out.back().x0) < 1e-8) continue;
        out.push_back(certify_stability(k, r, 1e-7));
    }
    return out;
}

Equilibrium certify_stability(const KernelParams& k, double x0, double root_tol) {
    const double residual = std::abs(eval_kernel(k, x0, 0.0) - x0);
    if (residual > root_tol)
        throw NotAnEquilibriumError("certify_stability: residual " + std::to_string(residual) +
                                    " exceeds tolerance");
    Equilibrium e;
    e.x0 = x0;
    e.derivative = kernel_x_derivative(k, x0, 0.0);
    const double mag = std::abs(e.derivative);
    if (mag < 1.0 - 1e-9)
        e.certificate = StabilityCertificate::CertifiedAsymptoticallyStable;
    else if (mag <= 1.0 + 1e-9)
        e.certificate = StabilityCertificate::CertifiedStable;
    else
        e.certificate = StabilityCertificate::NotCertified;
    return e;
}

}  // namespace tdrc
