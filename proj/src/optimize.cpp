#include "tdrc/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "tdrc/rng.hpp"

namespace tdrc {

namespace {

void run_parallel(long n_items, int threads, const std::function<void(long)>& work) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (long i = 0; i < n_items; ++i) work(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (long i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) work(i);
        });
    for (auto& th : pool) th.join();
}

double quantile(std::vector<double> sorted, double q) {
    // linear interpolation between order statistics
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(sorted.size() - 1, lo + 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double operating_point(const Experiment& ex) {
    switch (ex.policy) {
        case OperatingPolicy::PositiveBranch: {
            auto eqs = find_equilibria(ex.kernel, ex.equilibrium_search_lo,
                                       ex.equilibrium_search_hi);
            if (eqs.empty()) throw NotAnEquilibriumError("operating_point: no equilibria found");
            return eqs.back().x0;
        }
        case OperatingPolicy::UniqueNontrivial: {
            auto eqs = find_equilibria(ex.kernel, ex.equilibrium_search_lo,
                                       ex.equilibrium_search_hi);
            for (const auto& e : eqs)
                if (std::abs(e.x0) > 1e-9) return e.x0;
            throw NotAnEquilibriumError("operating_point: no nontrivial equilibrium found");
        }
        case OperatingPolicy::FixedValue: {
            auto eqs = find_equilibria(ex.kernel, ex.op_value - 0.25, ex.op_value + 0.25);
            const Equilibrium* best = nullptr;
            for (const auto& e : eqs)
                if (!best || std::abs(e.x0 - ex.op_value) < std::abs(best->x0 - ex.op_value))
                    best = &e;
            if (!best)
                throw NotAnEquilibriumError("operating_point: no equilibrium near configured value");
            return best->x0;
        }
    }
    throw Error("unreachable operating policy");
}

CapacityReport analytic_report(const Experiment& ex) {
    const double x0 = operating_point(ex);
    const VarApprox var = build_var_approx(ex.cfg, ex.kernel, x0, ex.mask, ex.taylor_order,
                                           ex.sigma_z);
    return theoretical_capacity(var, ex.task, ex.lambda);
}

std::string to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::UnstableSurrogate: return "unstable_surrogate";
        case CellStatus::TrajectoryEscape: return "trajectory_escape";
        case CellStatus::DomainFault: return "domain_error";
    }
    return "unknown";
}

void apply_axis(Experiment& ex, const std::string& name, double value) {
    if (name == "d") {
        ex.cfg = ReservoirConfig(ex.cfg.N, value);
    } else if (name == "eta") {
        ex.kernel.eta = value;
    } else if (name == "gamma") {
        ex.kernel.gamma = value;
    } else if (name == "phi") {
        ex.kernel.phi = value;
    } else if (name == "mask_mean") {
        const double cur = ex.mask.mean();
        ex.mask = ex.mask.array() + (value - cur);
    } else if (name == "mask_variance") {
        if (value < 0.0) throw Error("apply_axis: mask_variance must be >= 0");
        const double cur_mean = ex.mask.mean();
        Vec centered = ex.mask.array() - cur_mean;
        const double cur_var = centered.squaredNorm() / static_cast<double>(ex.mask.size());
        if (cur_var <= 0.0) throw Error("apply_axis: base mask has zero variance");
        ex.mask = cur_mean + std::sqrt(value / cur_var) * centered.array();
    } else if (name == "input_mean") {
        ex.mc.input_mean = value;
    } else {
        throw Error("apply_axis: unknown axis '" + name + "'");
    }
}

std::vector<ScanCell> surface_scan(const Experiment& base, const ScanAxis& axis1,
                                   const ScanAxis& axis2, const ScanModels& models, int threads) {
    if (axis1.steps < 2 || axis2.steps < 2) throw Error("surface_scan: each axis needs >= 2 steps");
    if (axis1.name == axis2.name) throw Error("surface_scan: axes must name distinct parameters");

    const long n = static_cast<long>(axis1.steps) * axis2.steps;
    std::vector<ScanCell> cells(static_cast<size_t>(n));

    run_parallel(n, threads, [&](long idx) {
        ScanCell& cell = cells[static_cast<size_t>(idx)];
        cell.i = static_cast<int>(idx / axis2.steps);
        cell.j = static_cast<int>(idx % axis2.steps);
        cell.v1 = axis1.lo + (axis1.hi - axis1.lo) * cell.i / (axis1.steps - 1);
        cell.v2 = axis2.lo + (axis2.hi - axis2.lo) * cell.j / (axis2.steps - 1);
        Experiment ex = base;
        try {
            apply_axis(ex, axis1.name, cell.v1);
            apply_axis(ex, axis2.name, cell.v2);
            const double x0 = operating_point(ex);
            if (models.theoretical) {
                const VarApprox var = build_var_approx(ex.cfg, ex.kernel, x0, ex.mask,
                                                       ex.taylor_order, ex.sigma_z);
                cell.nmse_theory = theoretical_capacity(var, ex.task, ex.lambda).nmse_theoretical;
            }
            McOptions mc = ex.mc;
            mc.sigma_z = ex.sigma_z;
            mc.lambda = ex.lambda;
            mc.taylor_order = ex.taylor_order;
            if (models.discrete_mc) {
                mc.model = McModel::Discrete;
                auto r = monte_carlo_nmse(ex.cfg, ex.kernel, ex.mask, ex.task, x0, mc);
                cell.nmse_discrete = r.nmse;
                cell.basin_crossed = cell.basin_crossed || r.basin_crossed;
            }
            if (models.continuous_mc) {
                mc.model = McModel::Continuous;
                auto r = monte_carlo_nmse(ex.cfg, ex.kernel, ex.mask, ex.task, x0, mc);
                cell.nmse_continuous = r.nmse;
                cell.basin_crossed = cell.basin_crossed || r.basin_crossed;
            }
        } catch (const UnstableError&) {
            cell.status = CellStatus::UnstableSurrogate;
        } catch (const NonFiniteError&) {
            cell.status = CellStatus::TrajectoryEscape;
        } catch (const DomainError&) {
            cell.status = CellStatus::DomainFault;
        } catch (const NotAnEquilibriumError&) {
            cell.status = CellStatus::DomainFault;
        }
    });
    return cells;
}

namespace {

struct ParamSpace {
    std::vector<FreeParam> kinds;  // one entry per coordinate (Mask expands to N)
    Vec lo, hi;
};

ParamSpace make_space(const Experiment& base, const OptimizeSpec& spec) {
    ParamSpace ps;
    std::vector<double> lo, hi;
    for (FreeParam p : spec.free) {
        auto it = spec.bounds.find(p);
        if (it == spec.bounds.end()) throw Error("maximize_capacity: missing bounds for a free parameter");
        const int reps = p == FreeParam::Mask ? base.cfg.N : 1;
        for (int r = 0; r < reps; ++r) {
            ps.kinds.push_back(p);
            lo.push_back(it->second.first);
            hi.push_back(it->second.second);
        }
    }
    ps.lo = Eigen::Map<Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    ps.hi = Eigen::Map<Vec>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    return ps;
}

void apply_point(Experiment& ex, const ParamSpace& ps, const Vec& x) {
    int mask_idx = 0;
    for (int i = 0; i < x.size(); ++i) {
        switch (ps.kinds[static_cast<size_t>(i)]) {
            case FreeParam::Eta: ex.kernel.eta = x[i]; break;
            case FreeParam::Gamma: ex.kernel.gamma = x[i]; break;
            case FreeParam::Phi: ex.kernel.phi = x[i]; break;
            case FreeParam::D: ex.cfg = ReservoirConfig(ex.cfg.N, x[i]); break;
            case FreeParam::Mask: ex.mask[mask_idx++] = x[i]; break;
        }
    }
}

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

}  // namespace

OptimizationResult maximize_capacity(const Experiment& base, const OptimizeSpec& spec) {
    const ParamSpace ps = make_space(base, spec);
    const int dim = static_cast<int>(ps.kinds.size());
    if (dim == 0) throw Error("maximize_capacity: no free parameters");

    OptimizationResult result;
    result.capacity_opt = kInfeasible;

    auto objective = [&](const Vec& x) -> double {
        Experiment ex = base;
        apply_point(ex, ps, x);
        try {
            const double x0 = operating_point(ex);
            const VarApprox var = build_var_approx(ex.cfg, ex.kernel, x0, ex.mask,
                                                   ex.taylor_order, ex.sigma_z);
            if (spec.stability_guard && !var.stable) return kInfeasible;
            return theoretical_capacity(var, ex.task, ex.lambda).capacity;
        } catch (const Error&) {
            return kInfeasible;
        }
    };

    auto clip = [&](Vec x) {
        for (int i = 0; i < x.size(); ++i) x[i] = std::min(ps.hi[i], std::max(ps.lo[i], x[i]));
        return x;
    };

    auto consider = [&](const Vec& x, double fx) {
        if (fx > result.capacity_opt) {
            result.capacity_opt = fx;
            result.trace.emplace_back(x, fx);
        }
    };

    Rng rng(Rng::derive_seed(spec.seed, 0));
    for (int restart = 0; restart < std::max(1, spec.restarts); ++restart) {
        Vec start(dim);
        for (int i = 0; i < dim; ++i) start[i] = rng.uniform(ps.lo[i], ps.hi[i]);
        const double f_start = objective(start);
        ++result.evaluations;
        consider(start, f_start);
        if (spec.budget <= 0 || f_start == kInfeasible) continue;

        // Nelder-Mead on -capacity with box projection.
        std::vector<Vec> simplex{start};
        std::vector<double> fval{f_start};
        for (int i = 0; i < dim; ++i) {
            Vec v = start;
            const double step = 0.1 * (ps.hi[i] - ps.lo[i]);
            v[i] = v[i] + step <= ps.hi[i] ? v[i] + step : v[i] - step;
            simplex.push_back(clip(v));
            fval.push_back(objective(simplex.back()));
            ++result.evaluations;
            consider(simplex.back(), fval.back());
        }

        long evals = 0;
        while (evals < spec.budget) {
            // order ascending by objective (worst first for maximization)
            std::vector<int> order(simplex.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
            std::sort(order.begin(), order.end(), [&](int a, int b) { return fval[a] < fval[b]; });
            const int worst = order[0], second_worst = order[1], best = order.back();

            Vec centroid = Vec::Zero(dim);
            for (size_t i = 0; i < simplex.size(); ++i)
                if (static_cast<int>(i) != worst) centroid += simplex[i];
            centroid /= static_cast<double>(dim);

            auto eval_at = [&](double coef) {
                Vec x = clip(centroid + coef * (centroid - simplex[static_cast<size_t>(worst)]));
                double f = objective(x);
                ++evals;
                ++result.evaluations;
                consider(x, f);
                return std::make_pair(x, f);
            };

            auto [xr, fr] = eval_at(1.0);  // reflection
            if (fr > fval[static_cast<size_t>(best)]) {
                auto [xe, fe] = eval_at(2.0);  // expansion
                if (fe > fr) {
                    simplex[static_cast<size_t>(worst)] = xe;
                    fval[static_cast<size_t>(worst)] = fe;
                } else {
                    simplex[static_cast<size_t>(worst)] = xr;
                    fval[static_cast<size_t>(worst)] = fr;
                }
            } else if (fr > fval[static_cast<size_t>(second_worst)]) {
                simplex[static_cast<size_t>(worst)] = xr;
                fval[static_cast<size_t>(worst)] = fr;
            } else {
                auto [xc, fc] = eval_at(-0.5);  // contraction
                if (fc > fval[static_cast<size_t>(worst)]) {
                    simplex[static_cast<size_t>(worst)] = xc;
                    fval[static_cast<size_t>(worst)] = fc;
                } else {
                    for (size_t i = 0; i < simplex.size(); ++i) {  // shrink toward best
                        if (static_cast<int>(i) == best) continue;
                        simplex[i] = clip(simplex[static_cast<size_t>(best)] +
                                          0.5 * (simplex[i] - simplex[static_cast<size_t>(best)]));
                        fval[i] = objective(simplex[i]);
                        ++evals;
                        ++result.evaluations;
                        consider(simplex[i], fval[i]);
                    }
                }
            }

            double spread = 0.0;
            for (double f : fval)
                if (std::isfinite(f)) spread = std::max(spread, std::abs(f - fval[static_cast<size_t>(best)]));
            if (spread < 1e-12) break;
        }
    }

    if (result.capacity_opt == kInfeasible)
        throw NoFeasiblePointError("maximize_capacity: every start point was infeasible");

    const Vec best_x = result.trace.back().first;
    Experiment ex = base;
    apply_point(ex, ps, best_x);
    result.theta_opt = ex.kernel;
    result.c_opt = ex.mask;
    return result;
}

MaskStudy random_mask_study(const Experiment& base, int n_masks, double lo, double hi,
                            uint64_t seed, int threads) {
    if (n_masks < 1) throw Error("random_mask_study: n_masks must be >= 1");
    // Draw all masks up front so the draw order is independent of scheduling.
    std::vector<Vec> masks(static_cast<size_t>(n_masks));
    Rng rng(Rng::derive_seed(seed, 0x6d61736bULL));
    for (auto& m : masks) {
        m.resize(base.cfg.N);
        for (int i = 0; i < base.cfg.N; ++i) m[i] = rng.uniform(lo, hi);
    }

    MaskStudy study;
    study.nmse.assign(static_cast<size_t>(n_masks), std::numeric_limits<double>::quiet_NaN());
    run_parallel(n_masks, threads, [&](long idx) {
        Experiment ex = base;
        ex.mask = masks[static_cast<size_t>(idx)];
        try {
            study.nmse[static_cast<size_t>(idx)] = analytic_report(ex).nmse_theoretical;
        } catch (const Error&) {
            study.nmse[static_cast<size_t>(idx)] = 1.0;  // degenerate masks carry no capacity
        }
    });

    std::vector<double> sorted = study.nmse;
    std::sort(sorted.begin(), sorted.end());
    study.median = quantile(sorted, 0.5);
    study.q1 = quantile(sorted, 0.25);
    study.q3 = quantile(sorted, 0.75);
    const double iqr = study.q3 - study.q1;
    study.whisker_lo = study.q1 - 1.5 * iqr;
    study.whisker_hi = study.q3 + 1.5 * iqr;
    study.mean = 0.0;
    for (double v : study.nmse) study.mean += v;
    study.mean /= static_cast<double>(n_masks);
    for (int i = 0; i < n_masks; ++i)
        if (study.nmse[static_cast<size_t>(i)] < study.whisker_lo ||
            study.nmse[static_cast<size_t>(i)] > study.whisker_hi)
            study.outliers.push_back(i);
    return study;
}

}  // namespace tdrc
