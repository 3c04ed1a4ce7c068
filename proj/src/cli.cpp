#include "cwseed/cli.hpp"

#include "cwseed/config.hpp"
#include "cwseed/errors.hpp"
#include "cwseed/export.hpp"
#include "cwseed/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace cwseed {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 1;
constexpr int kExitConfig = 2;

struct SolveOptions {
    std::string config;
    std::string out_dir;
    int sections = 0;
    int seed_steps_per_rev = 0;
};

struct PropagateOptions {
    std::string config;
    std::string controls;
    double max_step = 20.0;
};

struct ValidateOptions {
    int cases = 1000;
};

void write_outputs(const ScenarioConfig& cfg, const TrajectorySolution& sol, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    export_control_history(sol, dir / "controls.csv", cfg.output.control_samples_per_segment);
    export_trajectory_samples(sol, dir / "trajectory.csv", cfg.output.trajectory_min_rows,
                              cfg.output.trajectory_rows_per_rev);
    export_seed(cfg.scenario, sol, cfg.output.seed_steps_per_rev, dir / "seed.json");
    std::ofstream(dir / "summary.json") << format_summary(cfg.scenario, sol);
}

int run_solve(const SolveOptions& opt) {
    ScenarioConfig cfg = load_scenario_config(opt.config);
    if (!opt.out_dir.empty()) cfg.output.dir = opt.out_dir;
    if (opt.sections > 0) cfg.scenario.sections = opt.sections;
    if (opt.seed_steps_per_rev > 0) cfg.output.seed_steps_per_rev = opt.seed_steps_per_rev;

    TrajectorySolution sol;
    int code = kExitOk;
    try {
        sol = solve_sectioned(cfg.scenario, cfg.solver);
    } catch (const NoConvergence& e) {
        std::cerr << "cwseed: no convergence: " << e.what() << '\n';
        sol = e.best();
        code = kExitNoConvergence;
    }
    std::cerr << "cwseed: " << cfg.scenario.name << ": residual " << sol.residual_norm << " after "
              << sol.iterations << " iterations, outputs in " << cfg.output.dir << '\n';
    write_outputs(cfg, sol, cfg.output.dir);
    std::cout << format_summary(cfg.scenario, sol);
    return code;
}

int run_propagate(const PropagateOptions& opt) {
    const Scenario scenario = load_scenario(opt.config);
    const std::vector<ControlSample> controls = read_control_history(opt.controls);
    const Repropagation result = repropagate(scenario, controls, opt.max_step);
    std::cout << format_repropagation(scenario, result);
    return kExitOk;
}

int run_validate(const ValidateOptions& opt) {
    PropertySuiteSettings settings;
    settings.cases = opt.cases;
    const PropertySuiteReport r = run_property_suite(settings);
    const bool pass = r.max_scaled_error <= 1e-8 && r.max_zero_thrust_error <= 1e-12 &&
                      r.max_frame_error <= 1e-9 && r.max_kepler_residual <= 1e-12;
    nlohmann::ordered_json doc;
    doc["cases"] = r.cases;
    doc["max_scaled_error"] = r.max_scaled_error;
    doc["max_zero_thrust_error"] = r.max_zero_thrust_error;
    doc["max_frame_error"] = r.max_frame_error;
    doc["max_kepler_residual"] = r.max_kepler_residual;
    doc["pass"] = pass;
    std::cout << doc.dump(2) << '\n';
    if (!pass) std::cerr << "cwseed: property suite exceeded its tolerances\n";
    return pass ? kExitOk : kExitNoConvergence;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Low-thrust initial guesses from piecewise closed-form relative motion", "cwseed"};
    app.require_subcommand(1);

    SolveOptions solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a scenario and write result files");
    solve_cmd->add_option("config", solve.config, "Scenario configuration (JSON)")->required();
    solve_cmd->add_option("--out-dir", solve.out_dir, "Output directory (overrides the config)");
    solve_cmd->add_option("--sections", solve.sections, "Number of sections")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--seed-steps-per-rev", solve.seed_steps_per_rev, "Seed control steps per revolution")
        ->check(CLI::PositiveNumber);

    PropagateOptions prop;
    CLI::App* prop_cmd = app.add_subcommand("propagate", "Re-propagate a control history with the two-body integrator");
    prop_cmd->add_option("config", prop.config, "Scenario configuration (JSON)")->required();
    prop_cmd->add_option("--controls", prop.controls, "Control history CSV")->required();
    prop_cmd->add_option("--max-step", prop.max_step, "Largest integration step in seconds")
        ->check(CLI::PositiveNumber);

    ValidateOptions val;
    CLI::App* val_cmd = app.add_subcommand("validate", "Check the closed-form propagator against RK4");
    val_cmd->add_option("--cases", val.cases, "Number of random cases")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, std::cerr, std::cerr);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*solve_cmd) return run_solve(solve);
        if (*prop_cmd) return run_propagate(prop);
        return run_validate(val);
    } catch (const ParseError& e) {
        std::cerr << "cwseed: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "cwseed: invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "cwseed: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace cwseed
