#pragma once

#include <vector>

#include "tdrc/common.hpp"
#include "tdrc/varmodel.hpp"

namespace tdrc {

/// h-lag memory task y(t) = H(z(t), z(t-1), ..., z(t-h)).
/// Linear: H(w) = L . w; Quadratic: H(w) = w^T Q w with symmetric Q.
struct MemoryTask {
    enum class Type { Linear, Quadratic };
    Type type = Type::Linear;
    int h = 0;
    Vec L;  // length h+1
    Mat Q;  // (h+1) x (h+1), symmetric

    static MemoryTask linear(const Vec& weights);
    static MemoryTask quadratic(const Mat& Q);
    static MemoryTask quadratic_diag(const Vec& diag);
};

/// H applied to one window (z(t), z(t-1), ..., z(t-h)).
double eval_task(const MemoryTask& task, const Vec& window);

/// E[y(t)] under IID centered input: 0 for linear, sigma_z^2 tr(Q) for quadratic.
double task_mean(const MemoryTask& task, double sigma_z);

/// var(y(t)) under IID centered input with the given raw moments:
/// linear sigma_z^2 ||L||^2; quadratic (m4 - sigma^4) sum Q_ii^2 + 4 sigma^4 sum_{j>i} Q_ij^2.
double task_variance(const MemoryTask& task, double sigma_z,
                     const std::vector<double>& raw_moments);

/// Cov(y(t), x_i(t)) of the task against the VAR(1) surrogate state, from the
/// MA(infinity) representation. Only lags j = 1..h+1 contribute; the q
/// polynomial enters with moment shift 0, 1 (linear task) or 2 (quadratic).
Vec task_state_covariance(const MemoryTask& task, const VarApprox& var);

}  // namespace tdrc
