#pragma once

// Quadruple-precision oracles shared by the test suites. The Taylor-tail
// residuals asserted against the one-step reservoir map sit far below double
// rounding noise (z^9 ~ 1e-27 at z = 1e-3), so the reference side of those
// checks must run in extended precision.

#include <boost/multiprecision/float128.hpp>
#include <utility>
#include <vector>

#include "tdrc/kernels.hpp"
#include "tdrc/reservoir.hpp"

namespace tdrc_test {

using quad = boost::multiprecision::float128;

// Newton refinement of an equilibrium to quad precision; derivative from a
// first-order jet in x.
inline quad refine_equilibrium_quad(const tdrc::KernelParams& k, double x0_seed) {
    quad x(x0_seed);
    for (int it = 0; it < 6; ++it) {
        auto xs = tdrc::PowerSeries<quad>::variable(1, x, quad(1));
        tdrc::PowerSeries<quad> Is(1, quad(0));
        auto f = tdrc::eval_kernel_t(k, xs, Is);
        x -= (f[0] - x) / (f[1] - 1);
    }
    return x;
}

// One-step deviation of the reservoir map from the fixed point, F(x0*1, c z)
// - x0*1, and its order-R noise expansion, both in quad arithmetic.
inline std::pair<std::vector<quad>, std::vector<quad>> quad_deviation_and_noise(
    const tdrc::ReservoirConfig& cfg, const tdrc::KernelParams& k, double x0,
    const tdrc::Vec& mask, int order, double z) {
    using boost::multiprecision::exp;
    const quad qx0 = refine_equilibrium_quad(k, x0);
    const quad decay = exp(quad(-cfg.xi));
    const quad gain = 1 - decay;
    const auto derivs = tdrc::kernel_input_derivatives_t<quad>(k, qx0, order);

    std::vector<quad> dev(static_cast<size_t>(cfg.N)), eps(static_cast<size_t>(cfg.N));
    quad dev_acc(0), eps_acc(0);
    for (int i = 0; i < cfg.N; ++i) {
        const quad input = quad(mask[i]) * quad(z);
        const quad fval = tdrc::eval_kernel_t<quad>(k, qx0, input);
        quad series(0), powI(1), factorial(1);
        for (int m = 1; m <= order; ++m) {
            powI *= input;
            factorial *= m;
            series += derivs[static_cast<size_t>(m - 1)] * powI / factorial;
        }
        dev_acc = decay * dev_acc + gain * (fval - qx0);
        eps_acc = decay * eps_acc + gain * series;
        dev[static_cast<size_t>(i)] = dev_acc;
        eps[static_cast<size_t>(i)] = eps_acc;
    }
    return {dev, eps};
}

// Sup-norm of the Taylor tail deviation - expansion at one input value.
inline double quad_tail_norm(const tdrc::ReservoirConfig& cfg, const tdrc::KernelParams& k,
                             double x0, const tdrc::Vec& mask, int order, double z) {
    auto [dev, eps] = quad_deviation_and_noise(cfg, k, x0, mask, order, z);
    quad worst(0);
    for (size_t i = 0; i < dev.size(); ++i)
        worst = std::max(worst, boost::multiprecision::abs(dev[i] - eps[i]));
    return static_cast<double>(worst);
}

// Least-squares slope of log(tail) against log(z) over a log-spaced grid.
inline double tail_loglog_slope(const tdrc::ReservoirConfig& cfg, const tdrc::KernelParams& k,
                                double x0, const tdrc::Vec& mask, int order, double z_lo,
                                double z_hi, int points) {
    std::vector<double> xs, ys;
    for (int p = 0; p < points; ++p) {
        const double z =
            z_lo * std::pow(z_hi / z_lo, static_cast<double>(p) / (points - 1));
        const double tail = quad_tail_norm(cfg, k, x0, mask, order, z);
        xs.push_back(std::log(z));
        ys.push_back(std::log(tail));
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double num = 0, den = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

}  // namespace tdrc_test
