#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "tdrc/optimize.hpp"

namespace tdrc {

using json = nlohmann::json;

struct ScanFragment {
    ScanAxis axis1, axis2;
    ScanModels models;
};

struct MaskStudyFragment {
    int n_masks = 1000;
    double lo = -3.0, hi = 3.0;
    uint64_t seed = 0;
    std::vector<int> n_list;  // reservoir sizes to sweep; empty = just the base N
};

struct SimulateFragment {
    long t = 100;
    bool gaussian = false;  // false: autonomous (zero signal)
    McModel model = McModel::Discrete;
};

/// A parsed experiment plus the optional per-command fragments.
struct ExperimentBundle {
    Experiment ex;
    bool mask_optimized = false;  // mask: {"optimized": true}
    std::optional<ScanFragment> scan;
    std::optional<OptimizeSpec> optimize;
    std::optional<MaskStudyFragment> mask_study;
    std::optional<SimulateFragment> simulate;
};

/// Parse and cross-validate a config document. Throws ConfigError with a
/// diagnostic on any schema violation (unknown kernel type, mask length vs N,
/// Q dimension vs h, ...).
ExperimentBundle parse_experiment(const json& doc);

/// Bundled experiment presets: fig2, fig3, fig4, fig5, figE1, figE2.
json preset_config(const std::string& name);

/// Load a config from a file path, or fall back to a preset name.
json load_config(const std::string& path_or_preset);

// ---- report emission ----------------------------------------------------

json equilibria_to_json(const std::vector<Equilibrium>& eqs);
json capacity_report_to_json(const CapacityReport& rep, double x0, double rho);
json var_approx_to_json(const VarApprox& var);  // matrices row-major
json optimization_result_to_json(const OptimizationResult& r);
json mask_study_to_json(const MaskStudy& s);

/// Scan table CSV: versioned header comment, then
/// axis1,axis2,status,nmse_theory,nmse_discrete,nmse_continuous.
std::string scan_to_csv(const std::vector<ScanCell>& cells);

/// Monte Carlo CSV rows: seed,model,nmse.
std::string mc_to_csv(uint64_t seed, McModel model, double value);

std::string format_double(double v);  // 17 significant digits

}  // namespace tdrc
