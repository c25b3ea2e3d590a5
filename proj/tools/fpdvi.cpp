// Command-line front end: problem ingestion, hypothesis checking, solving,
// and result emission.
//
// Exit codes (exhaustive):
//   0  solver converged
//   1  I/O, parse, validation, or usage error
//   2  outer iteration budget exhausted without convergence
//   3  hypothesis hard-fail under --strict
//   4  numeric failure inside the solver stack
//
// Every error path writes one machine-parsable JSON line to stderr.
//
// Determinism contract: trajectory.csv, trajectory.json, report.json, and
// hypotheses.json are byte-identical across runs with the same inputs and
// seed.  Wall-clock timings therefore go to stdout (and to the sweep
// summary's runtime column) and never into report.json.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fpdvi/fpdvi.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
    std::string out = "results";
    double tol = -1.0;      // <0: use the problem file / defaults
    int max_outer = -1;     // <0: use the problem file / defaults
    double damping = -1.0;  // <0: use the problem file / defaults
    long long seed = -1;    // <0: use the problem file / defaults
    std::string grid;       // empty: use the problem file
    bool skip_hypotheses = false;
    bool strict = false;
};

void emit_error(const std::string& kind, int code, const std::string& message) {
    json record{{"error", kind}, {"exit", code}, {"message", message}};
    std::fprintf(stderr, "%s\n", record.dump().c_str());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fpdvi::Error("cannot write '" + path.string() + "'");
    out << text;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Apply command-line overrides onto the file's configuration.
void apply_flags(fpdvi::LoadedProblem& loaded, const Flags& flags) {
    if (flags.tol >= 0.0) loaded.solver.tol = flags.tol;
    if (flags.max_outer >= 0) loaded.solver.max_outer = flags.max_outer;
    if (flags.damping >= 0.0) loaded.solver.damping = flags.damping;
    if (flags.seed >= 0)
        loaded.solver.seed = static_cast<std::uint64_t>(flags.seed);
    if (!flags.grid.empty()) {
        // N or N:graded:GAMMA
        fpdvi::GridConfig cfg;
        const auto first = flags.grid.find(':');
        try {
            cfg.N = std::stoi(flags.grid.substr(0, first));
        } catch (const std::exception&) {
            throw fpdvi::ValidationError("--grid", "expected N[:graded:GAMMA]");
        }
        if (first != std::string::npos) {
            const auto second = flags.grid.find(':', first + 1);
            if (flags.grid.substr(first + 1, second - first - 1) != "graded" ||
                second == std::string::npos)
                throw fpdvi::ValidationError("--grid",
                                             "expected N[:graded:GAMMA]");
            cfg.graded = true;
            try {
                cfg.gamma = std::stod(flags.grid.substr(second + 1));
            } catch (const std::exception&) {
                throw fpdvi::ValidationError("--grid", "malformed gamma");
            }
        }
        if (cfg.N < 2 || (cfg.graded && !(cfg.gamma >= 1.0)))
            throw fpdvi::ValidationError("--grid",
                                         "need N >= 2 and gamma >= 1");
        loaded.grid = cfg;
    }
}

std::string trajectory_csv(const fpdvi::Trajectory& traj) {
    const int n = static_cast<int>(traj.theta.front().size());
    const int m = static_cast<int>(traj.u.front().size());
    std::string out = "xi";
    for (int j = 1; j <= n; ++j) out += ",theta_" + std::to_string(j);
    for (int j = 1; j <= m; ++j) out += ",u_" + std::to_string(j);
    out += "\n";
    for (std::size_t i = 0; i < traj.grid.nodes.size(); ++i) {
        out += fmt17(traj.grid.nodes[i]);
        for (int j = 0; j < n; ++j) out += "," + fmt17(traj.theta[i](j));
        for (int j = 0; j < m; ++j) out += "," + fmt17(traj.u[i](j));
        out += "\n";
    }
    return out;
}

json trajectory_json(const fpdvi::Trajectory& traj) {
    json j;
    j["xi"] = traj.grid.nodes;
    j["kind"] = traj.grid.kind == fpdvi::TimeGrid::Kind::graded ? "graded"
                                                                : "uniform";
    auto pack = [](const std::vector<Eigen::VectorXd>& rows) {
        json out = json::array();
        for (const auto& r : rows) {
            json row = json::array();
            for (Eigen::Index k = 0; k < r.size(); ++k) row.push_back(r(k));
            out.push_back(std::move(row));
        }
        return out;
    };
    j["theta"] = pack(traj.theta);
    j["u"] = pack(traj.u);
    return j;
}

/// Run the hypothesis suite.  Returns the report plus a hard-fail flag
/// (sampled monotonicity, coercivity, or the existence inequality failing).
std::pair<json, bool> run_hypotheses(const fpdvi::LoadedProblem& loaded) {
    const auto& p = loaded.problem;
    const auto& cfg = loaded.hypotheses;
    const std::uint64_t seed = loaded.solver.seed;
    json out;
    out["skipped"] = false;
    out["seed"] = seed;

    auto growth = fpdvi::estimate_growth(p, cfg.probe_radius, cfg.sample_count,
                                         seed);
    if (cfg.delta > 0.0) {
        growth.delta_reg = cfg.delta;
        growth.Theta_A = fpdvi::estimate_theta_A(
            p.alpha, p.A, p.T, p.alpha < 1.0 ? cfg.delta : p.T / 2.0, 200);
    }
    out["growth"] = {{"rho_B_l2", growth.rho_B_l2},
                     {"rho_f_l2", growth.rho_f_l2},
                     {"Theta_g", growth.Theta_g},
                     {"Theta_A_regularized", growth.Theta_A},
                     {"Theta_A_integrated",
                      fpdvi::theta_A_integrated(p.alpha, p.A, p.T)},
                     {"delta_reg", growth.delta_reg},
                     {"empirical", growth.empirical}};

    const auto mono = fpdvi::probe_p1_monotone(p.G, p.K, cfg.pair_count,
                                               seed + 101);
    out["monotonicity"] = {{"pass", mono.pass}, {"worst_pairing", mono.worst}};

    const auto coercive = fpdvi::probe_p3_coercive(
        p.G, p.phi, p.K, cfg.radii, std::nullopt, 200, seed + 202);
    out["coercivity"] = {{"pass", coercive.pass},
                         {"vacuous", coercive.vacuous},
                         {"trend", coercive.trend}};

    const auto existence =
        fpdvi::check_condition_43(growth, p.T, cfg.k_sequence);
    out["existence_inequality"] = {{"pass", existence.pass},
                                   {"lhs_trend", existence.lhs_trend},
                                   {"rhs", existence.rhs},
                                   {"margin", existence.margin},
                                   {"caveat", existence.caveat}};

    try {
        const auto weight = fpdvi::select_weight_L(
            p.alpha, p.T, growth.Theta_A, growth.grid, growth.rho_B,
            growth.rho_f, growth.Theta_g, 0.01);
        out["contraction_weight"] = {{"feasible", true},
                                     {"L", weight.L},
                                     {"certificate", weight.certificate}};
    } catch (const fpdvi::NoFeasibleL& e) {
        out["contraction_weight"] = {{"feasible", false},
                                     {"note", e.what()}};
    }

    const bool hard_fail = !mono.pass || !coercive.pass || !existence.pass;
    out["hard_fail"] = hard_fail;
    return {out, hard_fail};
}

json build_report(const fpdvi::LoadedProblem& loaded,
                  const fpdvi::Trajectory& traj,
                  const fpdvi::SolveReport& solve, double residual,
                  const json& hypotheses, int exit_code) {
    json report;
    report["name"] = loaded.name;
    report["converged"] = solve.converged;
    report["exit_code"] = exit_code;
    report["outer_iterations"] = solve.outer_iterations;
    report["final_change"] = solve.final_change;
    report["change_history"] = solve.change_history;
    report["damping_final"] = solve.damping_final;
    report["max_vi_residual"] = solve.max_vi_residual;
    report["fpdvi_residual"] = residual;
    report["grid"] = {{"N", loaded.grid.N},
                      {"kind", loaded.grid.graded ? "graded" : "uniform"}};
    if (loaded.grid.graded) report["grid"]["gamma"] = loaded.grid.gamma;
    report["solver"] = {{"tol", loaded.solver.tol},
                        {"max_outer", loaded.solver.max_outer},
                        {"damping", loaded.solver.damping},
                        {"seed", loaded.solver.seed},
                        {"vi_tol", loaded.solver.vi_tol},
                        {"vi_max_iter", loaded.solver.vi_max_iter}};
    report["hypotheses"] = hypotheses.contains("hard_fail")
                               ? json{{"skipped", false},
                                      {"hard_fail", hypotheses["hard_fail"]}}
                               : json{{"skipped", true}};

    // Increment-regularity diagnostic of the solved state path, at window
    // widths the grid can resolve.
    fpdvi::SampledPath state = traj.state_path();
    std::vector<double> deltas;
    for (const double frac : {0.25, 0.125, 0.0625}) {
        const double d = loaded.problem.T * frac;
        if (d >= state.grid.min_spacing()) deltas.push_back(d);
    }
    if (!deltas.empty()) {
        const auto chi = fpdvi::chi_diagnostic({state}, deltas);
        report["chi"] = {{"deltas", deltas}, {"values", chi}};
    }

    // Full provenance: the problem document exactly as loaded.
    report["configuration"] = loaded.document;
    return report;
}

/// Solve one loaded problem and write the output file set.  Returns the
/// documented exit code.
int execute(fpdvi::LoadedProblem& loaded, const Flags& flags,
            const fs::path& out_dir, double* runtime_out = nullptr,
            fpdvi::SolveReport* solve_out = nullptr) {
    fs::create_directories(out_dir);

    json hypotheses{{"skipped", true}};
    bool hard_fail = false;
    if (!flags.skip_hypotheses) {
        std::tie(hypotheses, hard_fail) = run_hypotheses(loaded);
    }
    write_text(out_dir / "hypotheses.json", hypotheses.dump(2) + "\n");
    if (hard_fail && flags.strict) {
        emit_error("HypothesisHardFail", 3,
                   "hypothesis suite failed under --strict; see " +
                       (out_dir / "hypotheses.json").string());
        return 3;
    }

    const auto grid = loaded.grid.build(loaded.problem.T);
    const auto t0 = std::chrono::steady_clock::now();
    auto [traj, solve] = fpdvi::solve_fpdvi(
        loaded.problem, grid, loaded.solver.tol, loaded.solver.max_outer,
        loaded.solver.damping, loaded.solver.vi_tol, loaded.solver.vi_max_iter);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (runtime_out) *runtime_out = seconds;
    if (solve_out) *solve_out = solve;

    const double residual = fpdvi_residual(loaded.problem, traj);
    const int code = solve.converged ? 0 : 2;

    write_text(out_dir / "trajectory.csv", trajectory_csv(traj));
    write_text(out_dir / "trajectory.json",
               trajectory_json(traj).dump(2) + "\n");
    write_text(out_dir / "report.json",
               build_report(loaded, traj, solve, residual, hypotheses, code)
                       .dump(2) +
                   "\n");

    std::printf("%s: %s in %d outer iteration%s, final change %.3e, "
                "discrete residual %.3e, %.3f s\n",
                loaded.name.c_str(),
                solve.converged ? "converged" : "did NOT converge",
                solve.outer_iterations, solve.outer_iterations == 1 ? "" : "s",
                solve.final_change, residual, seconds);
    if (!solve.converged)
        emit_error("MaxOuterExceeded", 2,
                   loaded.name + ": outer budget exhausted at change " +
                       fmt17(solve.final_change));
    return code;
}

int command_run(const std::vector<std::string>& paths, const Flags& flags) {
    for (const auto& path : paths) {
        fpdvi::LoadedProblem loaded = fpdvi::load_problem(path);
        apply_flags(loaded, flags);
        const fs::path out_dir =
            paths.size() == 1 ? fs::path(flags.out)
                              : fs::path(flags.out) / fs::path(path).stem();
        const int code = execute(loaded, flags, out_dir);
        if (code != 0) return code;
    }
    return 0;
}

int command_sweep(const std::string& path, const std::string& parameter,
                  const std::vector<double>& values, const Flags& flags) {
    if (values.empty()) {
        emit_error("UsageError", 1, "sweep needs a non-empty --values list");
        return 1;
    }
    fpdvi::LoadedProblem base = fpdvi::load_problem(path);
    fs::create_directories(flags.out);

    std::string summary = "value,converged,iterations,residual,runtime\n";
    for (const double value : values) {
        json doc = base.document;
        if (parameter == "alpha") doc["alpha"] = value;
        else if (parameter == "T") doc["T"] = value;
        else if (parameter == "N") doc["grid"]["N"] = static_cast<int>(value);
        else if (parameter == "damping") doc["solver"]["damping"] = value;

        std::string row = fmt17(value);
        try {
            fpdvi::LoadedProblem loaded =
                fpdvi::load_problem_from_json(doc, base.name);
            apply_flags(loaded, flags);
            const fs::path sub = fs::path(flags.out) /
                                 ("sweep_" + parameter + "_" + fmt17(value));
            double runtime = 0.0;
            fpdvi::SolveReport solve;
            const int code = execute(loaded, flags, sub, &runtime, &solve);
            if (code == 3) return 3; // strict hypothesis failure aborts
            row += std::string(",") + (solve.converged ? "1" : "0") + "," +
                   std::to_string(solve.outer_iterations) + "," +
                   fmt17(solve.max_vi_residual) + "," + fmt17(runtime);
        } catch (const fpdvi::Error& e) {
            emit_error("RowFailure", 0,
                       parameter + "=" + fmt17(value) + ": " + e.what());
            row += ",0,0,nan,nan";
        }
        summary += row + "\n";
    }
    write_text(fs::path(flags.out) / "summary.csv", summary);

    if (parameter == "N") {
        // Convergence-order fit over the swept resolutions (doubling ladder
        // anchored at the smallest N, reference 16x the largest).
        const int base_N = static_cast<int>(
            *std::min_element(values.begin(), values.end()));
        const auto study = fpdvi::refine_and_estimate_order(
            base.problem, base_N, static_cast<int>(values.size()),
            base.solver.tol, base.solver.max_outer, base.solver.damping);
        json order{{"fitted_order", study.fitted_order},
                   {"fit_valid", study.fit_valid},
                   {"reference_N", study.reference_N}};
        json samples = json::array();
        for (const auto& [N, err] : study.samples)
            samples.push_back({{"N", N}, {"error", err}});
        order["samples"] = samples;
        write_text(fs::path(flags.out) / "order.json", order.dump(2) + "\n");
        std::printf("fitted order %.3f (valid=%d, reference N=%d)\n",
                    study.fitted_order, study.fit_valid ? 1 : 0,
                    study.reference_N);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver toolkit for fractional evolution problems driven by "
                 "mixed variational inequalities"};
    app.require_subcommand(1);

    Flags flags;
    std::vector<std::string> run_paths;
    std::string sweep_path, sweep_parameter;
    std::vector<double> sweep_values;

    const auto add_shared = [&](CLI::App* cmd) {
        cmd->add_option("--out", flags.out, "Output directory")
            ->capture_default_str();
        cmd->add_option("--tol", flags.tol, "Outer tolerance override");
        cmd->add_option("--max-outer", flags.max_outer,
                        "Outer iteration budget override");
        cmd->add_option("--damping", flags.damping, "Damping override");
        cmd->add_option("--seed", flags.seed, "Root seed override");
        cmd->add_option("--grid", flags.grid,
                        "Grid override: N or N:graded:GAMMA");
        cmd->add_flag("--skip-hypotheses", flags.skip_hypotheses,
                      "Skip the hypothesis suite");
        cmd->add_flag("--strict", flags.strict,
                      "Exit 3 when the hypothesis suite hard-fails");
    };

    auto* run = app.add_subcommand("run", "Solve problem files");
    run->add_option("paths", run_paths, "Problem files (JSON)")
        ->required()
        ->expected(-1);
    add_shared(run);

    auto* sweep = app.add_subcommand(
        "sweep", "Re-solve one problem across a parameter ladder");
    sweep->add_option("path", sweep_path, "Problem file (JSON)")->required();
    sweep->add_option("--parameter", sweep_parameter, "Swept parameter")
        ->required()
        ->check(CLI::IsMember({"alpha", "N", "T", "damping"}));
    sweep->add_option("--values", sweep_values, "Values to sweep")
        ->required()
        ->delimiter(',');
    add_shared(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        emit_error("UsageError", 1, "invalid command line");
        return 1;
    }

    try {
        if (run->parsed()) return command_run(run_paths, flags);
        return command_sweep(sweep_path, sweep_parameter, sweep_values, flags);
    } catch (const fpdvi::ParseError& e) {
        emit_error("ParseError", 1, e.what());
        return 1;
    } catch (const fpdvi::ValidationError& e) {
        emit_error("ValidationError", 1,
                   std::string("field '") + e.field + "': " + e.what());
        return 1;
    } catch (const fpdvi::UnsupportedCombination& e) {
        emit_error("UnsupportedCombination", 1, e.what());
        return 1;
    } catch (const fpdvi::Error& e) {
        emit_error("NumericFailure", 4, e.what());
        return 4;
    } catch (const std::exception& e) {
        emit_error("InternalError", 4, e.what());
        return 4;
    }
}
