#include "tdrc/tasks.hpp"

#include <cmath>

namespace tdrc {

MemoryTask MemoryTask::linear(const Vec& weights) {
    if (weights.size() < 1) throw DimensionError("linear task: weight vector must be non-empty");
    MemoryTask t;
    t.type = Type::Linear;
    t.h = static_cast<int>(weights.size()) - 1;
    t.L = weights;
    return t;
}

MemoryTask MemoryTask::quadratic(const Mat& Q) {
    if (Q.rows() != Q.cols() || Q.rows() < 1)
        throw DimensionError("quadratic task: Q must be square and non-empty");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw DimensionError("quadratic task: Q must be symmetric");
    MemoryTask t;
    t.type = Type::Quadratic;
    t.h = static_cast<int>(Q.rows()) - 1;
    t.Q = 0.5 * (Q + Q.transpose());
    return t;
}

MemoryTask MemoryTask::quadratic_diag(const Vec& diag) {
    return quadratic(Mat(diag.asDiagonal()));
}

double eval_task(const MemoryTask& task, const Vec& window) {
    if (window.size() != task.h + 1)
        throw DimensionError("eval_task: window length must be h+1");
    if (task.type == MemoryTask::Type::Linear) return task.L.dot(window);
    return window.dot(task.Q * window);
}

double task_mean(const MemoryTask& task, double sigma_z) {
    if (task.type == MemoryTask::Type::Linear) return 0.0;
    return sigma_z * sigma_z * task.Q.trace();
}

double task_variance(const MemoryTask& task, double sigma_z,
                     const std::vector<double>& raw_moments) {
    const double var_z = sigma_z * sigma_z;
    if (task.type == MemoryTask::Type::Linear) return var_z * task.L.squaredNorm();
    if (raw_moments.size() < 5)
        throw MomentLengthError("task_variance: quadratic task needs moments up to order 4");
    const double m4 = raw_moments[4];
    double diag_sq = 0.0, off_sq = 0.0;
    for (int i = 0; i <= task.h; ++i) {
        diag_sq += task.Q(i, i) * task.Q(i, i);
        for (int j = i + 1; j <= task.h; ++j) off_sq += task.Q(i, j) * task.Q(i, j);
    }
    return (m4 - var_z * var_z) * diag_sq + 4.0 * var_z * var_z * off_sq;
}

Vec task_state_covariance(const MemoryTask& task, const VarApprox& var) {
    if (!var.stable) throw UnstableError("task_state_covariance: surrogate is unstable");
    const double gain = 1.0 - std::exp(-var.cfg.xi);
    const double var_z = var.sigma_z * var.sigma_z;

    // Per-neuron moment evaluations of the shifted polynomials.
    Vec kernel_vec;
    if (task.type == MemoryTask::Type::Linear) {
        kernel_vec = q_moment_eval(var.qpoly, var.raw_moments, 1);
    } else {
        kernel_vec = q_moment_eval(var.qpoly, var.raw_moments, 2) -
                     var_z * q_moment_eval(var.qpoly, var.raw_moments, 0);
    }

    Vec cov = Vec::Zero(var.cfg.N);
    Vec w = kernel_vec;  // A^{j-1} applied incrementally
    for (int j = 1; j <= task.h + 1; ++j) {
        const double weight =
            task.type == MemoryTask::Type::Linear ? task.L[j - 1] : task.Q(j - 1, j - 1);
        if (weight != 0.0) cov += weight * w;
        if (j <= task.h) w = var.A * w;
    }
    return gain * cov;
}

}  // namespace tdrc
