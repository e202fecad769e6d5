// Batch frontend: config-driven experiments emitting CSV/JSON for plotting.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tdrc/config.hpp"
#include "tdrc/rng.hpp"

namespace {

using tdrc::json;

struct CommonArgs {
    std::string config;
    std::string out;
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "config file path or preset name")->required();
    cmd->add_option("--out", args.out, "output path (default: stdout)");
    cmd->add_option("--seed", args.seed, "override the config seed")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--threads", args.threads, "worker threads (default: TDR_THREADS or 1)");
}

int resolve_threads(const CommonArgs& args) {
    if (args.threads > 0) return args.threads;
    if (const char* env = std::getenv("TDR_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void write_output(const CommonArgs& args, const std::string& payload) {
    if (args.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw tdrc::ConfigError("cannot open output file '" + args.out + "'");
    out << payload;
}

tdrc::ExperimentBundle load_bundle(const CommonArgs& args) {
    auto bundle = tdrc::parse_experiment(tdrc::load_config(args.config));
    if (args.seed_set) {
        bundle.ex.mc.seed = args.seed;
        if (bundle.optimize) bundle.optimize->seed = args.seed;
        if (bundle.mask_study) bundle.mask_study->seed = args.seed;
    }
    return bundle;
}

void resolve_optimized_mask(tdrc::ExperimentBundle& bundle) {
    if (!bundle.mask_optimized) return;
    tdrc::OptimizeSpec spec;
    if (bundle.optimize) {
        spec = *bundle.optimize;
    } else {
        spec.free = {tdrc::FreeParam::Mask};
        spec.bounds[tdrc::FreeParam::Mask] = {-3.0, 3.0};
    }
    bundle.ex.mask = tdrc::maximize_capacity(bundle.ex, spec).c_opt;
}

int cmd_equilibria(const CommonArgs& args) {
    auto bundle = load_bundle(args);
    const auto eqs = tdrc::find_equilibria(bundle.ex.kernel, bundle.ex.equilibrium_search_lo,
                                           bundle.ex.equilibrium_search_hi);
    write_output(args, tdrc::equilibria_to_json(eqs).dump(2) + "\n");
    return 0;
}

int cmd_stability(const CommonArgs& args) {
    auto bundle = load_bundle(args);
    const double x0 = tdrc::operating_point(bundle.ex);
    const auto eq = tdrc::certify_stability(bundle.ex.kernel, x0);
    const bool norm_ok =
        tdrc::norm_bound_stable(bundle.ex.cfg, bundle.ex.kernel, x0);
    json report = tdrc::equilibria_to_json({eq});
    report["norm_bound_stable"] = norm_ok;
    write_output(args, report.dump(2) + "\n");
    return 0;
}

int cmd_capacity(const CommonArgs& args) {
    auto bundle = load_bundle(args);
    resolve_optimized_mask(bundle);
    const auto& ex = bundle.ex;
    const double x0 = tdrc::operating_point(ex);
    const auto var = tdrc::build_var_approx(ex.cfg, ex.kernel, x0, ex.mask, ex.taylor_order,
                                            ex.sigma_z);
    const auto rep = tdrc::theoretical_capacity(var, ex.task, ex.lambda);
    write_output(args, tdrc::capacity_report_to_json(rep, x0, var.rho).dump(2) + "\n");
    return 0;
}

int cmd_surface(const CommonArgs& args) {
    auto bundle = load_bundle(args);
    if (!bundle.scan) throw tdrc::ConfigError("surface: config has no 'scan' section");
    resolve_optimized_mask(bundle);
    const auto cells = tdrc::surface_scan(bundle.ex, bundle.scan->axis1, bundle.scan->axis2,
                                          bundle.scan->models, resolve_threads(args));
    write_output(args, tdrc::scan_to_csv(cells));
    return 0;
}

int cmd_optimize(const CommonArgs& args) {
    auto bundle = load_bundle(args);
    if (!bundle.optimize) throw tdrc::ConfigError("optimize: config has no 'optimize' section");
    const auto result = tdrc::maximize_capacity(bundle.ex, *bundle.optimize);
    write_output(args, tdrc::optimization_result_to_json(result).dump(2) + "\n");
    return 0;
}

int cmd_mc(const CommonArgs& args) {
    auto bundle = load_bundle(args);
    resolve_optimized_mask(bundle);
    const auto& ex = bundle.ex;
    const double x0 = tdrc::operating_point(ex);
    const auto res = tdrc::monte_carlo_nmse(ex.cfg, ex.kernel, ex.mask, ex.task, x0, ex.mc);
    write_output(args, tdrc::mc_to_csv(ex.mc.seed, ex.mc.model, res.nmse));
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    auto bundle = load_bundle(args);
    if (!bundle.simulate) throw tdrc::ConfigError("simulate: config has no 'simulate' section");
    const auto& ex = bundle.ex;
    const auto& sim = *bundle.simulate;
    const double x0 = tdrc::operating_point(ex);

    std::vector<double> signal(static_cast<size_t>(sim.t), 0.0);
    if (sim.gaussian) {
        tdrc::Rng rng(ex.mc.seed);
        for (auto& v : signal) v = ex.mc.input_mean + ex.sigma_z * rng.gaussian();
    }
    tdrc::Mat layers;
    if (sim.model == tdrc::McModel::Continuous)
        layers = tdrc::run_continuous(ex.cfg, ex.kernel, ex.mask, signal, x0);
    else
        layers = tdrc::run_discrete(ex.cfg, ex.kernel, ex.mask, signal,
                                    tdrc::Vec::Constant(ex.cfg.N, x0));
    std::ostringstream os;
    os << "# tdrc 1.0\n";
    tdrc::write_layers_csv(os, layers);
    write_output(args, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-delay reservoir computing toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;

    struct SubCmd {
        const char* name;
        const char* help;
        int (*fn)(const CommonArgs&);
    };
    const SubCmd subs[] = {
        {"equilibria", "find and certify kernel equilibria", cmd_equilibria},
        {"stability", "certify the configured operating point", cmd_stability},
        {"simulate", "emit reservoir layer trajectories as CSV", cmd_simulate},
        {"capacity", "closed-form capacity report as JSON", cmd_capacity},
        {"surface", "2-D parameter scan as CSV", cmd_surface},
        {"optimize", "maximize analytic capacity over free parameters", cmd_optimize},
        {"mc", "Monte Carlo NMSE as CSV", cmd_mc},
    };
    for (const auto& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, args);
        cmd->callback([&handler, &s] { handler = s.fn; });
    }

    CLI11_PARSE(app, argc, argv);
    try {
        return handler(args);
    } catch (const tdrc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tdrc::Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
