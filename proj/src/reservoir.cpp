#include "tdrc/reservoir.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace tdrc {

Vec multiplex(const Vec& mask, double z) { return mask * z; }

Vec step_discrete(const ReservoirConfig& cfg, const KernelParams& k, const Vec& prev,
                  const Vec& input) {
    if (prev.size() != cfg.N || input.size() != cfg.N)
        throw DimensionError("step_discrete: layer/input length must equal N");
    const double decay = std::exp(-cfg.xi);
    const double gain = 1.0 - decay;
    Vec cur(cfg.N);
    double carry = prev[cfg.N - 1];  // x_0(t) = x_N(t-1)
    for (int i = 0; i < cfg.N; ++i) {
        carry = decay * carry + gain * eval_kernel(k, prev[i], input[i]);
        cur[i] = carry;
    }
    return cur;
}

Mat run_discrete(const ReservoirConfig& cfg, const KernelParams& k, const Vec& mask,
                 const std::vector<double>& signal, const Vec& init) {
    if (mask.size() != cfg.N) throw DimensionError("run_discrete: mask length must equal N");
    if (signal.empty()) throw Error("run_discrete: signal must have at least one step");
    Mat layers(static_cast<Eigen::Index>(signal.size()), cfg.N);
    Vec state = init;
    for (size_t t = 0; t < signal.size(); ++t) {
        state = step_discrete(cfg, k, state, multiplex(mask, signal[t]));
        layers.row(static_cast<Eigen::Index>(t)) = state.transpose();
    }
    return layers;
}

Mat run_continuous(const ReservoirConfig& cfg, const KernelParams& k, const Vec& mask,
                   const std::vector<double>& signal, double init_value) {
    if (mask.size() != cfg.N) throw DimensionError("run_continuous: mask length must equal N");
    if (signal.empty()) throw Error("run_continuous: signal must have at least one step");

    constexpr int substeps = 5;  // integration step h = d / 5
    const double h = cfg.d / substeps;
    const long steps_per_layer = static_cast<long>(substeps) * cfg.N;
    const long total_steps = steps_per_layer * static_cast<long>(signal.size());

    // History of x at the step grid; index s holds x(s*h). The delay tau is
    // exactly steps_per_layer steps, so delayed lookups at stage times fall on
    // grid points or half-way between two of them.
    std::vector<double> hist(static_cast<size_t>(total_steps) + 1, init_value);

    auto delayed = [&](long s, double frac) {
        const long base = s - steps_per_layer;
        const double x0 = base < 0 ? init_value : hist[static_cast<size_t>(base)];
        if (frac == 0.0) return x0;
        const long nxt = base + 1;
        const double x1 = nxt < 0 ? init_value : hist[static_cast<size_t>(nxt)];
        return x0 + frac * (x1 - x0);
    };

    Mat layers(static_cast<Eigen::Index>(signal.size()), cfg.N);
    for (long s = 0; s < total_steps; ++s) {
        const long interval = s / substeps;        // global neuron sub-interval
        const int neuron = static_cast<int>(interval % cfg.N);
        const size_t layer = static_cast<size_t>(interval / cfg.N);
        const double input = mask[neuron] * signal[layer];

        const double x = hist[static_cast<size_t>(s)];
        const double xd0 = delayed(s, 0.0);
        const double xdh = delayed(s, 0.5);
        const double xd1 = delayed(s + 1, 0.0);

        const double k1 = -x + eval_kernel(k, xd0, input);
        const double k2 = -(x + 0.5 * h * k1) + eval_kernel(k, xdh, input);
        const double k3 = -(x + 0.5 * h * k2) + eval_kernel(k, xdh, input);
        const double k4 = -(x + h * k3) + eval_kernel(k, xd1, input);
        const double xn = x + h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        if (!std::isfinite(xn)) throw NonFiniteError("run_continuous: trajectory blew up");
        hist[static_cast<size_t>(s) + 1] = xn;

        if ((s + 1) % substeps == 0) {
            // just completed sub-interval `interval`: this is neuron sample
            // x(t*tau - (N-i)*d) with i = neuron+1, t = layer+1.
            layers(static_cast<Eigen::Index>(layer), neuron) = xn;
        }
    }
    return layers;
}

void write_layers_csv(std::ostream& os, const Mat& layers) {
    os << "t";
    for (Eigen::Index j = 0; j < layers.cols(); ++j) os << ",x_" << (j + 1);
    os << "\n";
    char buf[64];
    for (Eigen::Index t = 0; t < layers.rows(); ++t) {
        os << (t + 1);
        for (Eigen::Index j = 0; j < layers.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", layers(t, j));
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace tdrc
