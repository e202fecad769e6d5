#pragma once

#include <cmath>
#include <iosfwd>
#include <vector>

#include "tdrc/common.hpp"
#include "tdrc/kernels.hpp"

namespace tdrc {

/// Geometry of the virtual-neuron layout: N neurons separated by d over one
/// delay period tau = N*d, with mixing weight xi = log(1 + d).
struct ReservoirConfig {
    int N = 1;
    double d = 0.5;
    double tau = 0.5;
    double xi = 0.0;

    ReservoirConfig() : ReservoirConfig(1, 0.5) {}
    ReservoirConfig(int neurons, double separation)
        : N(neurons), d(separation), tau(neurons * separation), xi(std::log1p(separation)) {
        if (N < 1) throw Error("ReservoirConfig: N must be >= 1");
        if (!(d > 0.0) || !std::isfinite(d)) throw Error("ReservoirConfig: d must be positive");
    }
};

/// I = c * z: the scalar input multiplexed across the delay period.
Vec multiplex(const Vec& mask, double z);

/// One layer-to-layer step of the discrete reservoir map:
///   x_i(t) = e^{-xi} x_{i-1}(t) + (1 - e^{-xi}) f(x_i(t-1), I_i(t)),  x_0(t) = x_N(t-1).
Vec step_discrete(const ReservoirConfig& cfg, const KernelParams& k, const Vec& prev,
                  const Vec& input);

/// Iterate the reservoir map over a scalar signal; row t of the result is layer t+1.
/// Layer t is driven by mask * signal[t].
Mat run_discrete(const ReservoirConfig& cfg, const KernelParams& k, const Vec& mask,
                 const std::vector<double>& signal, const Vec& init);

/// Integrate the delay equation x'(t) = -x(t) + f(x(t - tau), I(t)) with RK4
/// at fixed step d/5, starting from the constant history x = init_value on
/// [-tau, 0]. The input is held constant on each neuron sub-interval
/// (zero-order hold) at mask[i] * signal[t]; delayed values are read from the
/// solution buffer with linear interpolation. Row t holds the layer samples
/// x_i = x(t*tau - (N-i)*d).
Mat run_continuous(const ReservoirConfig& cfg, const KernelParams& k, const Vec& mask,
                   const std::vector<double>& signal, double init_value);

/// CSV export: header "t,x_1,...,x_N", one row per layer, 17 significant digits.
void write_layers_csv(std::ostream& os, const Mat& layers);

}  // namespace tdrc
