#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "tdrc/common.hpp"
#include "tdrc/tasks.hpp"
#include "tdrc/varmodel.hpp"

namespace tdrc {

/// Closed-form capacity of the optimal ridge readout on the VAR(1) surrogate.
struct CapacityReport {
    double capacity = 0.0;          // in [0, 1]
    double nmse_theoretical = 1.0;  // 1 - capacity
    Vec w_out;
    double a_out = 0.0;
    double lambda = 0.0;
};

/// capacity = cov^T (G+lI)^{-1} (G+2lI) (G+lI)^{-1} cov / var_y via two SPD
/// solves; W_out = (G+lI)^{-1} cov, a_out = mean_y - W_out . mu_x.
CapacityReport capacity(const VarApprox& var, const Vec& cov_yx, double var_y, double mean_y,
                        double lambda);

/// Full analytic chain: task moments -> covariance -> capacity.
CapacityReport theoretical_capacity(const VarApprox& var, const MemoryTask& task, double lambda);

/// Ridge regression on sample moments (population 1/T convention):
/// W = (S_xx + lambda I)^{-1} s_xy on centered data, a = mean(y) - W . mean(x).
std::pair<Vec, double> ridge_fit(const Mat& X, const Vec& y, double lambda);

/// Mean square error divided by the population variance of the target.
double nmse(const Vec& pred, const Vec& target);

enum class McModel { Discrete, Continuous, LinearizedVar };

/// Approximate stability-basin interval around an operating equilibrium:
/// bounded by the adjacent equilibria from the kernel's equilibrium list.
struct BasinBounds {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};
BasinBounds basin_bounds(const std::vector<Equilibrium>& equilibria, double x_op);

struct McOptions {
    McModel model = McModel::Discrete;
    double sigma_z = 0.01;
    double lambda = 1e-15;
    long t_train = 40000;
    long t_test = 10000;
    long washout = 200;
    uint64_t seed = 1;
    int taylor_order = 8;  // noise expansion order of the linearized model
    /// DC offset added to the input stream; the task is always evaluated on
    /// the centered part of the signal.
    double input_mean = 0.0;
    /// When set, flag trajectories that leave this interval.
    std::optional<BasinBounds> basin;
};

struct McResult {
    double nmse = 0.0;
    bool basin_crossed = false;
    long first_crossing_layer = -1;  // 0-based index past washout, -1 if never
};

/// Simulate the chosen model driven by IID N(input_mean, sigma_z^2) input,
/// discard the washout, ridge-train on the next t_train layers and report the
/// out-of-sample NMSE on the following t_test layers. Deterministic per seed.
McResult monte_carlo_nmse(const ReservoirConfig& cfg, const KernelParams& k, const Vec& mask,
                          const MemoryTask& task, double x0, const McOptions& opts);

}  // namespace tdrc
