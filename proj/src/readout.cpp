#include "tdrc/readout.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "tdrc/rng.hpp"

namespace tdrc {

CapacityReport capacity(const VarApprox& var, const Vec& cov_yx, double var_y, double mean_y,
                        double lambda) {
    if (!(var_y > 0.0)) throw NonPositiveVarianceError("capacity: task variance must be positive");
    if (lambda < 0.0) throw Error("capacity: lambda must be >= 0");
    const int N = static_cast<int>(var.Gamma0.rows());
    const Mat reg = var.Gamma0 + lambda * Mat::Identity(N, N);
    Eigen::LDLT<Mat> ldlt(reg);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularError("capacity: Gamma0 + lambda I is not positive definite");
    Vec w = ldlt.solve(cov_yx);
    if (!w.allFinite()) throw SingularError("capacity: solve produced non-finite readout");

    double cap = w.dot((var.Gamma0 + 2.0 * lambda * Mat::Identity(N, N)) * w) / var_y;
    if (cap < -1e-9 || cap > 1.0 + 1e-9)
        throw Error("capacity: value " + std::to_string(cap) + " outside [0,1] beyond tolerance");
    cap = std::min(1.0, std::max(0.0, cap));

    CapacityReport rep;
    rep.capacity = cap;
    rep.nmse_theoretical = 1.0 - cap;
    rep.w_out = std::move(w);
    rep.a_out = mean_y - rep.w_out.dot(var.mu_x);
    rep.lambda = lambda;
    return rep;
}

CapacityReport theoretical_capacity(const VarApprox& var, const MemoryTask& task, double lambda) {
    const Vec cov = task_state_covariance(task, var);
    const double vy = task_variance(task, var.sigma_z, var.raw_moments);
    const double my = task_mean(task, var.sigma_z);
    return capacity(var, cov, vy, my, lambda);
}

std::pair<Vec, double> ridge_fit(const Mat& X, const Vec& y, double lambda) {
    if (X.rows() != y.size()) throw DimensionError("ridge_fit: X and y row counts differ");
    if (X.rows() < 2) throw Error("ridge_fit: need at least two samples");
    if (lambda < 0.0) throw Error("ridge_fit: lambda must be >= 0");
    const double T = static_cast<double>(X.rows());
    const Vec xbar = X.colwise().mean();
    const double ybar = y.mean();
    const Mat Xc = X.rowwise() - xbar.transpose();
    const Vec yc = y.array() - ybar;
    const Mat S = Xc.transpose() * Xc / T + lambda * Mat::Identity(X.cols(), X.cols());
    const Vec sxy = Xc.transpose() * yc / T;
    Eigen::LDLT<Mat> ldlt(S);
    Vec w = ldlt.solve(sxy);
    if (ldlt.info() != Eigen::Success || !w.allFinite() ||
        (S * w - sxy).norm() > 1e-8 * (sxy.norm() + 1.0))
        throw SingularError("ridge_fit: sample moment matrix is rank deficient");
    return {std::move(w), ybar - w.dot(xbar)};
}

double nmse(const Vec& pred, const Vec& target) {
    if (pred.size() != target.size()) throw DimensionError("nmse: length mismatch");
    const double T = static_cast<double>(target.size());
    const double mean = target.mean();
    const double var = (target.array() - mean).square().sum() / T;
    if (!(var > 0.0)) throw NonPositiveVarianceError("nmse: target variance must be positive");
    return (pred - target).squaredNorm() / T / var;
}

BasinBounds basin_bounds(const std::vector<Equilibrium>& equilibria, double x_op) {
    BasinBounds b;
    for (const auto& e : equilibria) {
        if (e.x0 < x_op - 1e-9) b.lower = std::max(b.lower, e.x0);
        if (e.x0 > x_op + 1e-9) b.upper = std::min(b.upper, e.x0);
    }
    return b;
}

namespace {

Mat simulate_linearized_var(const ReservoirConfig& cfg, const KernelParams& k, const Vec& mask,
                            double x0, int taylor_order, const std::vector<double>& z) {
    const Mat A = connectivity(cfg, k, x0);
    const QPolynomial q = build_q_polynomial(cfg, k, x0, mask, taylor_order);
    const double gain = 1.0 - std::exp(-cfg.xi);
    const Vec fp = Vec::Constant(cfg.N, x0);

    Mat layers(static_cast<Eigen::Index>(z.size()), cfg.N);
    Vec dev = Vec::Zero(cfg.N);  // x(t) - x0*1
    Vec eps(cfg.N);
    for (size_t t = 0; t < z.size(); ++t) {
        for (int r = 0; r < cfg.N; ++r) {
            double acc = 0.0;
            for (int i = taylor_order; i >= 1; --i) acc = (acc + q.a(i - 1, r)) * z[t];
            eps[r] = gain * acc;
        }
        dev = A * dev + eps;
        layers.row(static_cast<Eigen::Index>(t)) = (fp + dev).transpose();
    }
    return layers;
}

}  // namespace

McResult monte_carlo_nmse(const ReservoirConfig& cfg, const KernelParams& k, const Vec& mask,
                          const MemoryTask& task, double x0, const McOptions& opts) {
    if (opts.t_train < 10 * cfg.N || opts.t_test < 10 * cfg.N)
        throw Error("monte_carlo_nmse: t_train and t_test must be at least 10 N");
    if (opts.washout < 0) throw Error("monte_carlo_nmse: washout must be >= 0");

    const long total = opts.washout + task.h + opts.t_train + opts.t_test;
    Rng rng(opts.seed);
    std::vector<double> z(static_cast<size_t>(total));
    for (auto& v : z) v = opts.input_mean + opts.sigma_z * rng.gaussian();

    Mat states;  // row t holds the layer driven by z[t]
    switch (opts.model) {
        case McModel::Discrete:
            states = run_discrete(cfg, k, mask, z, Vec::Constant(cfg.N, x0));
            break;
        case McModel::Continuous:
            states = run_continuous(cfg, k, mask, z, x0);
            break;
        case McModel::LinearizedVar:
            states = simulate_linearized_var(cfg, k, mask, x0, opts.taylor_order, z);
            break;
    }
    if (!states.allFinite()) throw NonFiniteError("monte_carlo_nmse: trajectory escaped");

    McResult res;
    if (opts.basin) {
        for (long t = opts.washout; t < total && !res.basin_crossed; ++t) {
            for (int i = 0; i < cfg.N; ++i) {
                const double v = states(t, i);
                if (v < opts.basin->lower || v > opts.basin->upper) {
                    res.basin_crossed = true;
                    res.first_crossing_layer = t - opts.washout;
                    break;
                }
            }
        }
    }

    // Targets on the centered part of the signal; window (z(t), ..., z(t-h)).
    auto target_at = [&](long t) {
        Vec window(task.h + 1);
        for (int j = 0; j <= task.h; ++j) window[j] = z[static_cast<size_t>(t - j)] - opts.input_mean;
        return eval_task(task, window);
    };

    const long train_begin = opts.washout + task.h;
    const long test_begin = train_begin + opts.t_train;
    Mat X_train = states.middleRows(train_begin, opts.t_train);
    Vec y_train(opts.t_train);
    for (long t = 0; t < opts.t_train; ++t) y_train[t] = target_at(train_begin + t);

    auto [w, a] = ridge_fit(X_train, y_train, opts.lambda);

    Vec y_test(opts.t_test), pred(opts.t_test);
    for (long t = 0; t < opts.t_test; ++t) {
        y_test[t] = target_at(test_begin + t);
        pred[t] = states.row(test_begin + t).dot(w) + a;
    }
    res.nmse = nmse(pred, y_test);
    return res;
}

}  // namespace tdrc
