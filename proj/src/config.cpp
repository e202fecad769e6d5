#include "tdrc/config.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "tdrc/rng.hpp"

namespace tdrc {

namespace {

constexpr const char* kCsvHeader = "# tdrc 1.0\n";

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("config: missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError("config: field '" + key + "' must be numeric");
    return j[key].get<double>();
}

Vec parse_vector(const json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError("config: '" + what + "' must be an array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError("config: '" + what + "' must hold numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

KernelParams parse_kernel(const json& j) {
    if (!j.is_object()) throw ConfigError("config: 'kernel' must be an object");
    const std::string type = j.value("type", "");
    if (type == "mackey_glass")
        return KernelParams::mackey_glass(require_number(j, "eta"), require_number(j, "gamma"),
                                          number_or(j, "p", 2.0));
    if (type == "ikeda")
        return KernelParams::ikeda(require_number(j, "eta"), require_number(j, "gamma"),
                                   require_number(j, "phi"));
    throw ConfigError("config: kernel type must be 'mackey_glass' or 'ikeda'");
}

MemoryTask parse_task(const json& j) {
    if (!j.is_object()) throw ConfigError("config: 'task' must be an object");
    const std::string type = j.value("type", "");
    const int h = static_cast<int>(number_or(j, "h", -1));
    if (h < 0) throw ConfigError("config: task needs a nonnegative lag count 'h'");
    if (type == "linear") {
        if (!j.contains("L")) throw ConfigError("config: linear task needs 'L'");
        Vec L = parse_vector(j["L"], "task.L");
        if (L.size() != h + 1) throw ConfigError("config: task.L length must be h+1");
        return MemoryTask::linear(L);
    }
    if (type == "quadratic") {
        if (j.contains("Q_diag")) {
            Vec diag = parse_vector(j["Q_diag"], "task.Q_diag");
            if (diag.size() != h + 1) throw ConfigError("config: task.Q_diag length must be h+1");
            return MemoryTask::quadratic_diag(diag);
        }
        if (j.contains("Q")) {
            const json& rows = j["Q"];
            if (!rows.is_array() || rows.size() != static_cast<size_t>(h + 1))
                throw ConfigError("config: task.Q must be an (h+1)x(h+1) array");
            Mat Q(h + 1, h + 1);
            for (int r = 0; r <= h; ++r) {
                Vec row = parse_vector(rows[static_cast<size_t>(r)], "task.Q row");
                if (row.size() != h + 1) throw ConfigError("config: task.Q must be square");
                Q.row(r) = row.transpose();
            }
            return MemoryTask::quadratic(Q);
        }
        throw ConfigError("config: quadratic task needs 'Q_diag' or 'Q'");
    }
    throw ConfigError("config: task type must be 'linear' or 'quadratic'");
}

McModel parse_model(const std::string& s) {
    if (s == "discrete") return McModel::Discrete;
    if (s == "continuous") return McModel::Continuous;
    if (s == "linearized") return McModel::LinearizedVar;
    throw ConfigError("config: model must be 'discrete', 'continuous' or 'linearized'");
}

ScanAxis parse_axis(const json& j, const std::string& which) {
    if (!j.is_object()) throw ConfigError("config: scan axis '" + which + "' must be an object");
    ScanAxis a;
    a.name = j.value("name", "");
    static const std::vector<std::string> known{"d",         "eta",          "gamma",     "phi",
                                                "mask_mean", "mask_variance", "input_mean"};
    if (std::find(known.begin(), known.end(), a.name) == known.end())
        throw ConfigError("config: unknown scan axis '" + a.name + "'");
    a.lo = require_number(j, "min");
    a.hi = require_number(j, "max");
    a.steps = static_cast<int>(require_number(j, "steps"));
    if (a.steps < 2) throw ConfigError("config: scan axis needs steps >= 2");
    return a;
}

FreeParam parse_free_param(const std::string& s) {
    if (s == "eta") return FreeParam::Eta;
    if (s == "gamma") return FreeParam::Gamma;
    if (s == "phi") return FreeParam::Phi;
    if (s == "d") return FreeParam::D;
    if (s == "mask") return FreeParam::Mask;
    throw ConfigError("config: unknown free parameter '" + s + "'");
}

}  // namespace

ExperimentBundle parse_experiment(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
    ExperimentBundle b;
    Experiment& ex = b.ex;

    if (!doc.contains("kernel")) throw ConfigError("config: missing 'kernel'");
    ex.kernel = parse_kernel(doc["kernel"]);

    if (!doc.contains("reservoir")) throw ConfigError("config: missing 'reservoir'");
    const json& res = doc["reservoir"];
    const int N = static_cast<int>(require_number(res, "N"));
    const double d = require_number(res, "d");
    if (N < 1) throw ConfigError("config: reservoir.N must be >= 1");
    if (!(d > 0)) throw ConfigError("config: reservoir.d must be positive");
    ex.cfg = ReservoirConfig(N, d);

    if (!doc.contains("mask")) throw ConfigError("config: missing 'mask'");
    const json& mask = doc["mask"];
    if (mask.contains("values")) {
        ex.mask = parse_vector(mask["values"], "mask.values");
        if (ex.mask.size() != N) throw ConfigError("config: mask length must equal reservoir.N");
    } else if (mask.contains("random")) {
        const json& r = mask["random"];
        const double lo = number_or(r, "low", -1.0);
        const double hi = number_or(r, "high", 1.0);
        Rng rng(static_cast<uint64_t>(number_or(r, "seed", 1.0)));
        ex.mask.resize(N);
        for (int i = 0; i < N; ++i) ex.mask[i] = rng.uniform(lo, hi);
    } else if (mask.value("optimized", false)) {
        b.mask_optimized = true;
        ex.mask = Vec::Ones(N);  // replaced by the optimizer before use
    } else {
        throw ConfigError("config: mask needs 'values', 'random' or 'optimized'");
    }

    if (doc.contains("input")) {
        const json& in = doc["input"];
        const std::string dist = in.value("distribution", "gaussian");
        if (dist != "gaussian") throw ConfigError("config: input.distribution must be 'gaussian'");
        ex.sigma_z = number_or(in, "sigma_z", 0.01);
        ex.mc.input_mean = number_or(in, "mean", 0.0);
    }
    if (!(ex.sigma_z > 0)) throw ConfigError("config: input.sigma_z must be positive");

    if (!doc.contains("task")) throw ConfigError("config: missing 'task'");
    ex.task = parse_task(doc["task"]);

    ex.lambda = number_or(doc, "lambda", 1e-15);
    if (ex.lambda < 0) throw ConfigError("config: lambda must be >= 0");
    ex.taylor_order = static_cast<int>(number_or(doc, "taylor_order", 8));
    if (ex.taylor_order < 1) throw ConfigError("config: taylor_order must be >= 1");

    if (doc.contains("operating_point")) {
        const json& op = doc["operating_point"];
        const std::string policy = op.value("policy", "value");
        if (policy == "positive_branch")
            ex.policy = OperatingPolicy::PositiveBranch;
        else if (policy == "unique_nontrivial")
            ex.policy = OperatingPolicy::UniqueNontrivial;
        else if (policy == "value") {
            ex.policy = OperatingPolicy::FixedValue;
            ex.op_value = require_number(op, "value");
        } else
            throw ConfigError("config: unknown operating_point.policy '" + policy + "'");
        if (op.contains("search")) {
            const json& s = op["search"];
            if (!s.is_array() || s.size() != 2)
                throw ConfigError("config: operating_point.search must be [lo, hi]");
            ex.equilibrium_search_lo = s[0].get<double>();
            ex.equilibrium_search_hi = s[1].get<double>();
        }
    }

    if (doc.contains("mc")) {
        const json& mc = doc["mc"];
        ex.mc.t_train = static_cast<long>(number_or(mc, "t_train", 40000));
        ex.mc.t_test = static_cast<long>(number_or(mc, "t_test", 10000));
        ex.mc.washout = static_cast<long>(number_or(mc, "washout", 200));
        ex.mc.seed = static_cast<uint64_t>(number_or(mc, "seed", 1));
        ex.mc.model = parse_model(mc.value("model", "discrete"));
    }
    ex.mc.sigma_z = ex.sigma_z;
    ex.mc.lambda = ex.lambda;
    ex.mc.taylor_order = ex.taylor_order;

    if (doc.contains("scan")) {
        const json& sc = doc["scan"];
        ScanFragment frag;
        if (!sc.contains("axis1") || !sc.contains("axis2"))
            throw ConfigError("config: scan needs 'axis1' and 'axis2'");
        frag.axis1 = parse_axis(sc["axis1"], "axis1");
        frag.axis2 = parse_axis(sc["axis2"], "axis2");
        if (frag.axis1.name == frag.axis2.name)
            throw ConfigError("config: scan axes must name distinct parameters");
        frag.models = ScanModels{false, false, false};
        if (!sc.contains("models")) {
            frag.models.theoretical = true;
        } else {
            for (const auto& m : sc["models"]) {
                const std::string s = m.get<std::string>();
                if (s == "theoretical")
                    frag.models.theoretical = true;
                else if (s == "discrete_mc")
                    frag.models.discrete_mc = true;
                else if (s == "continuous_mc")
                    frag.models.continuous_mc = true;
                else
                    throw ConfigError("config: unknown scan model '" + s + "'");
            }
        }
        b.scan = frag;
    }

    if (doc.contains("optimize")) {
        const json& op = doc["optimize"];
        OptimizeSpec spec;
        if (!op.contains("free") || !op["free"].is_array() || op["free"].empty())
            throw ConfigError("config: optimize.free must list at least one parameter");
        for (const auto& f : op["free"]) spec.free.push_back(parse_free_param(f.get<std::string>()));
        if (!op.contains("bounds") || !op["bounds"].is_object())
            throw ConfigError("config: optimize.bounds must map parameters to [lo, hi]");
        for (auto it = op["bounds"].begin(); it != op["bounds"].end(); ++it) {
            const json& bound = it.value();
            if (!bound.is_array() || bound.size() != 2)
                throw ConfigError("config: optimize bound for '" + it.key() + "' must be [lo, hi]");
            spec.bounds[parse_free_param(it.key())] = {bound[0].get<double>(),
                                                       bound[1].get<double>()};
        }
        for (FreeParam p : spec.free)
            if (!spec.bounds.count(p))
                throw ConfigError("config: optimize.bounds missing an entry for a free parameter");
        spec.restarts = static_cast<int>(number_or(op, "restarts", 8));
        spec.budget = static_cast<long>(number_or(op, "budget", 2000));
        spec.seed = static_cast<uint64_t>(number_or(op, "seed", 0));
        spec.stability_guard = op.value("stability_guard", true);
        b.optimize = spec;
    }

    if (doc.contains("mask_study")) {
        const json& ms = doc["mask_study"];
        MaskStudyFragment frag;
        frag.n_masks = static_cast<int>(number_or(ms, "n_masks", 1000));
        frag.lo = number_or(ms, "low", -3.0);
        frag.hi = number_or(ms, "high", 3.0);
        frag.seed = static_cast<uint64_t>(number_or(ms, "seed", 0));
        if (ms.contains("n_list"))
            for (const auto& n : ms["n_list"]) frag.n_list.push_back(n.get<int>());
        if (frag.n_masks < 1) throw ConfigError("config: mask_study.n_masks must be >= 1");
        b.mask_study = frag;
    }

    if (doc.contains("simulate")) {
        const json& sim = doc["simulate"];
        SimulateFragment frag;
        frag.t = static_cast<long>(number_or(sim, "t", 100));
        const std::string sig = sim.value("signal", "zeros");
        if (sig == "gaussian")
            frag.gaussian = true;
        else if (sig != "zeros")
            throw ConfigError("config: simulate.signal must be 'zeros' or 'gaussian'");
        frag.model = parse_model(sim.value("model", "discrete"));
        if (frag.t < 1) throw ConfigError("config: simulate.t must be >= 1");
        b.simulate = frag;
    }

    return b;
}

json preset_config(const std::string& name) {
    // Parameter values follow the experiment registry of the study this
    // artifact reproduces; desk-scale grid sizes.
    if (name == "fig2")
        return json::parse(R"({
  "kernel": {"type": "ikeda", "eta": 1.2443, "gamma": 1.4762, "phi": 0.1161},
  "reservoir": {"N": 20, "d": 0.2581},
  "mask": {"random": {"seed": 101, "low": -1.0, "high": 1.0}},
  "input": {"sigma_z": 0.01, "distribution": "gaussian"},
  "task": {"type": "quadratic", "h": 3, "Q_diag": [0, 1, 1, 1]},
  "lambda": 1e-15,
  "taylor_order": 8,
  "operating_point": {"policy": "value", "value": 0.0244, "search": [-1.0, 3.0]},
  "mc": {"t_train": 40000, "t_test": 10000, "washout": 200, "seed": 2026, "model": "discrete"},
  "scan": {"axis1": {"name": "input_mean", "min": 0.0, "max": 0.6, "steps": 13},
           "axis2": {"name": "mask_variance", "min": 0.2, "max": 1.2, "steps": 6},
           "models": ["discrete_mc"]}
})");
    if (name == "fig3")
        return json::parse(R"({
  "kernel": {"type": "mackey_glass", "eta": 2.0, "gamma": 0.796, "p": 2},
  "reservoir": {"N": 20, "d": 0.5},
  "mask": {"random": {"seed": 202, "low": -1.0, "high": 1.0}},
  "input": {"sigma_z": 0.01, "distribution": "gaussian"},
  "task": {"type": "quadratic", "h": 6, "Q_diag": [0, 1, 1, 1, 1, 1, 1]},
  "lambda": 1e-15,
  "taylor_order": 8,
  "operating_point": {"policy": "positive_branch", "search": [-2.0, 2.0]},
  "mc": {"t_train": 16000, "t_test": 4000, "washout": 200, "seed": 2026, "model": "discrete"},
  "scan": {"axis1": {"name": "d", "min": 0.1, "max": 1.0, "steps": 10},
           "axis2": {"name": "eta", "min": 1.1, "max": 2.9, "steps": 10},
           "models": ["theoretical", "discrete_mc"]}
})");
    if (name == "fig4")
        return json::parse(R"({
  "kernel": {"type": "mackey_glass", "eta": 1.0781, "gamma": 0.796, "p": 2},
  "reservoir": {"N": 20, "d": 0.5},
  "mask": {"random": {"seed": 303, "low": -1.0, "high": 1.0}},
  "input": {"sigma_z": 0.01, "distribution": "gaussian"},
  "task": {"type": "quadratic", "h": 3, "Q_diag": [0, 1, 1, 1]},
  "lambda": 1e-15,
  "taylor_order": 8,
  "operating_point": {"policy": "positive_branch", "search": [-2.0, 2.0]},
  "mc": {"t_train": 16000, "t_test": 4000, "washout": 200, "seed": 2026, "model": "discrete"},
  "scan": {"axis1": {"name": "d", "min": 0.1, "max": 1.0, "steps": 10},
           "axis2": {"name": "gamma", "min": 0.2, "max": 2.0, "steps": 10},
           "models": ["theoretical", "discrete_mc"]}
})");
    if (name == "fig5")
        return json::parse(R"({
  "kernel": {"type": "mackey_glass", "eta": 1.0781, "gamma": 0.796, "p": 2},
  "reservoir": {"N": 20, "d": 0.3},
  "mask": {"random": {"seed": 404, "low": -1.0, "high": 1.0}},
  "input": {"sigma_z": 0.01, "distribution": "gaussian"},
  "task": {"type": "quadratic", "h": 3, "Q_diag": [0, 1, 1, 1]},
  "lambda": 1e-15,
  "taylor_order": 8,
  "operating_point": {"policy": "positive_branch", "search": [-2.0, 2.0]},
  "optimize": {"free": ["mask"], "bounds": {"mask": [-3.0, 3.0]},
               "restarts": 8, "budget": 3000, "seed": 505},
  "mask_study": {"n_masks": 1000, "low": -3.0, "high": 3.0, "seed": 606, "n_list": [5, 10, 20]}
})");
    if (name == "figE1")
        return json::parse(R"({
  "kernel": {"type": "mackey_glass", "eta": 1.3541, "gamma": 4.7901, "p": 2},
  "reservoir": {"N": 20, "d": 0.943},
  "mask": {"random": {"seed": 707, "low": -1.0, "high": 1.0}},
  "input": {"sigma_z": 0.01, "distribution": "gaussian"},
  "task": {"type": "quadratic", "h": 3, "Q_diag": [0, 1, 1, 1]},
  "lambda": 1e-15,
  "taylor_order": 8,
  "operating_point": {"policy": "value", "value": -0.5951, "search": [-2.0, 2.0]},
  "mc": {"t_train": 40000, "t_test": 10000, "washout": 200, "seed": 2026, "model": "discrete"},
  "scan": {"axis1": {"name": "input_mean", "min": 0.0, "max": 0.6, "steps": 13},
           "axis2": {"name": "mask_variance", "min": 0.2, "max": 1.2, "steps": 6},
           "models": ["discrete_mc"]}
})");
    if (name == "figE2")
        return json::parse(R"({
  "kernel": {"type": "ikeda", "eta": 0.6, "gamma": 0.523, "phi": 0.3106},
  "reservoir": {"N": 20, "d": 0.5},
  "mask": {"random": {"seed": 808, "low": -1.0, "high": 1.0}},
  "input": {"sigma_z": 0.01, "distribution": "gaussian"},
  "task": {"type": "quadratic", "h": 3, "Q_diag": [0, 1, 1, 1]},
  "lambda": 1e-15,
  "taylor_order": 8,
  "operating_point": {"policy": "unique_nontrivial", "search": [-1.0, 2.0]},
  "mc": {"t_train": 16000, "t_test": 4000, "washout": 200, "seed": 2026, "model": "discrete"},
  "scan": {"axis1": {"name": "d", "min": 0.1, "max": 1.0, "steps": 10},
           "axis2": {"name": "eta", "min": 0.05, "max": 1.0, "steps": 10},
           "models": ["theoretical", "discrete_mc"]}
})");
    throw ConfigError("unknown preset '" + name + "'");
}

json load_config(const std::string& path_or_preset) {
    std::ifstream in(path_or_preset);
    if (in.good()) {
        json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
        }
        return doc;
    }
    return preset_config(path_or_preset);
}

// ---- emission -------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json vec_to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json mat_to_json(const Mat& m) {  // row-major nested arrays
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

std::string certificate_name(StabilityCertificate c) {
    switch (c) {
        case StabilityCertificate::CertifiedAsymptoticallyStable:
            return "certified_asymptotically_stable";
        case StabilityCertificate::CertifiedStable: return "certified_stable";
        case StabilityCertificate::NotCertified: return "not_certified";
    }
    return "unknown";
}

}  // namespace

json equilibria_to_json(const std::vector<Equilibrium>& eqs) {
    json arr = json::array();
    for (const auto& e : eqs)
        arr.push_back({{"x0", e.x0},
                       {"derivative", e.derivative},
                       {"certificate", certificate_name(e.certificate)}});
    return json{{"equilibria", arr}};
}

json capacity_report_to_json(const CapacityReport& rep, double x0, double rho) {
    return json{{"capacity", rep.capacity},
                {"nmse_theoretical", rep.nmse_theoretical},
                {"lambda", rep.lambda},
                {"w_out", vec_to_json(rep.w_out)},
                {"a_out", rep.a_out},
                {"operating_point", x0},
                {"spectral_radius", rho}};
}

json var_approx_to_json(const VarApprox& var) {
    return json{{"N", var.cfg.N},
                {"d", var.cfg.d},
                {"x0", var.x0},
                {"taylor_order", var.taylor_order},
                {"sigma_z", var.sigma_z},
                {"spectral_radius", var.rho},
                {"stable", var.stable},
                {"A", mat_to_json(var.A)},
                {"mu_eps", vec_to_json(var.mu_eps)},
                {"Sigma_eps", mat_to_json(var.Sigma_eps)},
                {"mu_x", vec_to_json(var.mu_x)},
                {"Gamma0", mat_to_json(var.Gamma0)}};
}

json optimization_result_to_json(const OptimizationResult& r) {
    json theta{{"eta", r.theta_opt.eta}, {"gamma", r.theta_opt.gamma}};
    if (r.theta_opt.type == KernelType::MackeyGlass)
        theta["p"] = r.theta_opt.p;
    else
        theta["phi"] = r.theta_opt.phi;
    json trace = json::array();
    for (const auto& [x, f] : r.trace) trace.push_back({{"objective", f}});
    return json{{"theta_opt", theta},
                {"c_opt", vec_to_json(r.c_opt)},
                {"capacity_opt", r.capacity_opt},
                {"nmse_opt", 1.0 - r.capacity_opt},
                {"evaluations", r.evaluations},
                {"trace", trace}};
}

json mask_study_to_json(const MaskStudy& s) {
    return json{{"mean", s.mean},
                {"median", s.median},
                {"q1", s.q1},
                {"q3", s.q3},
                {"whisker_lo", s.whisker_lo},
                {"whisker_hi", s.whisker_hi},
                {"n_outliers", s.outliers.size()},
                {"nmse", s.nmse}};
}

std::string scan_to_csv(const std::vector<ScanCell>& cells) {
    std::string out = kCsvHeader;
    out += "axis1,axis2,status,nmse_theory,nmse_discrete,nmse_continuous\n";
    for (const auto& c : cells) {
        out += format_double(c.v1) + "," + format_double(c.v2) + "," + to_string(c.status) + "," +
               format_double(c.nmse_theory) + "," + format_double(c.nmse_discrete) + "," +
               format_double(c.nmse_continuous) + "\n";
    }
    return out;
}

std::string mc_to_csv(uint64_t seed, McModel model, double value) {
    std::string name = model == McModel::Discrete     ? "discrete"
                       : model == McModel::Continuous ? "continuous"
                                                      : "linearized";
    return std::string(kCsvHeader) + "seed,model,nmse\n" + std::to_string(seed) + "," + name +
           "," + format_double(value) + "\n";
}

}  // namespace tdrc
