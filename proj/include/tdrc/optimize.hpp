#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tdrc/common.hpp"
#include "tdrc/readout.hpp"

namespace tdrc {

/// How the operating equilibrium is chosen when parameters change during a
/// scan or an optimization.
enum class OperatingPolicy {
    PositiveBranch,    // largest equilibrium (Mackey-Glass eta-scans work on +sqrt(eta-1))
    UniqueNontrivial,  // smallest nontrivial equilibrium (Ikeda with eta in [0,1])
    FixedValue         // refine the configured value against the current kernel
};

/// A fully resolved experiment: everything needed to evaluate one
/// configuration analytically or by Monte Carlo.
struct Experiment {
    KernelParams kernel;
    ReservoirConfig cfg;
    Vec mask;
    MemoryTask task;
    double sigma_z = 0.01;
    double lambda = 1e-15;
    int taylor_order = 8;
    McOptions mc;
    OperatingPolicy policy = OperatingPolicy::FixedValue;
    double op_value = 0.0;  // for FixedValue
    double equilibrium_search_lo = -3.0;
    double equilibrium_search_hi = 3.0;
};

/// Resolve the operating equilibrium for the experiment's current parameters.
double operating_point(const Experiment& ex);

/// Analytic surrogate + capacity for the experiment at its operating point.
CapacityReport analytic_report(const Experiment& ex);

enum class CellStatus { Ok, UnstableSurrogate, TrajectoryEscape, DomainFault };
std::string to_string(CellStatus s);

struct ScanAxis {
    std::string name;  // d | eta | gamma | phi | mask_mean | mask_variance | input_mean
    double lo = 0.0;
    double hi = 1.0;
    int steps = 2;
};

struct ScanModels {
    bool theoretical = true;
    bool discrete_mc = false;
    bool continuous_mc = false;
};

struct ScanCell {
    int i = 0, j = 0;
    double v1 = 0.0, v2 = 0.0;
    CellStatus status = CellStatus::Ok;
    double nmse_theory = std::numeric_limits<double>::quiet_NaN();
    double nmse_discrete = std::numeric_limits<double>::quiet_NaN();
    double nmse_continuous = std::numeric_limits<double>::quiet_NaN();
    bool basin_crossed = false;
};

/// Apply one named axis value to an experiment (kernel parameter, geometry,
/// mask statistics, or input mean).
void apply_axis(Experiment& ex, const std::string& name, double value);

/// Evaluate the requested models on a 2-D grid; rows ordered by (i, j),
/// failures carried as status codes. Cells are independent and may be
/// evaluated on `threads` workers; the output order does not depend on
/// scheduling.
std::vector<ScanCell> surface_scan(const Experiment& base, const ScanAxis& axis1,
                                   const ScanAxis& axis2, const ScanModels& models,
                                   int threads = 1);

enum class FreeParam { Eta, Gamma, Phi, D, Mask };

struct OptimizeSpec {
    std::vector<FreeParam> free;
    std::map<FreeParam, std::pair<double, double>> bounds;
    int restarts = 8;
    long budget = 2000;  // objective evaluations per restart (0: score start points only)
    uint64_t seed = 0;
    bool stability_guard = true;  // infeasible (unstable) iterates score -inf
};

struct OptimizationResult {
    KernelParams theta_opt;
    Vec c_opt;
    double capacity_opt = 0.0;
    std::vector<std::pair<Vec, double>> trace;  // improving iterates (point, objective)
    long evaluations = 0;
};

/// Derivative-free maximization of the analytic capacity over the free
/// parameters (Nelder-Mead with seeded random restarts, box bounds by
/// projection). Throws NoFeasiblePointError if no start point is feasible.
OptimizationResult maximize_capacity(const Experiment& base, const OptimizeSpec& spec);

struct MaskStudy {
    std::vector<double> nmse;  // one per sampled mask, in draw order
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_lo = 0.0;  // q1 - 1.5 (q3 - q1)
    double whisker_hi = 0.0;  // q3 + 1.5 (q3 - q1)
    std::vector<int> outliers;
};

/// Theoretical NMSE distribution over n random masks with entries uniform on
/// [lo, hi]; deterministic per seed.
MaskStudy random_mask_study(const Experiment& base, int n_masks, double lo, double hi,
                            uint64_t seed, int threads = 1);

}  // namespace tdrc
