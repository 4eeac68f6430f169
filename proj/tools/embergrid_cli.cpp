// embergrid command-line front end: load a case, run a robust solve or a
// parameter sweep, generate synthetic ignition scores, or cross-check the
// solver against the exhaustive oracles on small cases.
//
// Exit codes: 0 success/converged, 1 input or usage error, 2 solver did not
// converge (iteration limit, stall, or failed sweep points).

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "embergrid/embergrid.hpp"

namespace eg = embergrid;
namespace fs = std::filesystem;

namespace {

struct Overrides {
    double risk_tolerance = -1.0;
    std::string mode;
    int budget = -1;
    double deviation = -1.0;
    double shed_penalty = -1.0;
    double gap = -1.0;
    int max_iterations = -1;
    std::string scores_csv;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--risk-tolerance", risk_tolerance, "Risk tolerance cap on aggregated ignition scores")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--mode", mode, "Risk intake mode: conservative | cumulative");
        cmd->add_option("--budget", budget, "Budget of uncertainty (max active deviation indicators)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--deviation", deviation,
                        "Uniform demand/solar deviation as a fraction of nominal, e.g. 0.10")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--shed-penalty", shed_penalty, "Load shedding penalty K in $/MWh")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--gap", gap, "Convergence gap (UB-LB)/UB")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--max-iters", max_iterations, "Iteration limit of the decomposition loop")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--scores", scores_csv, "Fire ignition score CSV (line_id,hour,score)");
    }

    void apply(eg::NetworkCase& nc) const {
        if (!scores_csv.empty()) nc.fire_scores = eg::load_fire_scores_csv(scores_csv, nc.horizon);
        if (risk_tolerance >= 0.0) nc.robust.risk_tolerance = risk_tolerance;
        if (!mode.empty()) {
            if (mode == "conservative") nc.robust.risk_intake_mode = eg::RiskIntakeMode::Conservative;
            else if (mode == "cumulative") nc.robust.risk_intake_mode = eg::RiskIntakeMode::Cumulative;
            else throw eg::ValidationError("unknown --mode '" + mode + "'");
        }
        if (budget >= 0) nc.robust.budget_of_uncertainty = budget;
        if (deviation >= 0.0) eg::set_uniform_deviation(nc, deviation);
        if (shed_penalty >= 0.0) nc.robust.shed_penalty = shed_penalty;
        if (gap >= 0.0) nc.robust.convergence_gap = gap;
        if (max_iterations >= 0) nc.robust.max_iterations = max_iterations;
        eg::validate(nc);
    }
};

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::set<int> parse_int_set(const std::string& csv) {
    std::set<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.insert(std::stoi(tok));
    return out;
}

int cmd_solve(const std::string& case_path, const Overrides& ov, const std::string& out_dir) {
    eg::NetworkCase nc = eg::load_case(case_path);
    ov.apply(nc);
    fs::create_directories(out_dir);

    eg::CcgResult r = eg::run_ccg(nc);
    eg::RiskReport rep = eg::quantify_line_risk(nc, r.plan);
    eg::write_plan_json(out_dir + "/plan.json", nc, r.plan);
    eg::write_trace_jsonl(out_dir + "/trace.jsonl", nc, r.trace);
    eg::write_risk_csv(out_dir + "/risk_of_operation.csv", rep);
    eg::write_line_status_csv(out_dir + "/line_status.csv", rep);
    eg::write_solve_summary_json(out_dir + "/summary.json", nc, r.trace, rep);

    std::cerr << "status=" << eg::to_string(r.trace.status) << " iterations=" << r.trace.iterations
              << " objective=" << r.trace.final_upper_bound << " gap=" << r.trace.final_gap << "\n";
    for (const auto& rec : r.trace.records)
        std::cerr << "  iter " << rec.iteration << ": LB=" << rec.lower_bound
                  << " UB=" << rec.upper_bound << " gap=" << rec.gap
                  << " master=" << rec.master_seconds << "s sub=" << rec.subproblem_seconds << "s\n";
    return r.trace.status == eg::CcgStatus::Converged ? 0 : 2;
}

int cmd_sweep(const std::string& case_path, const Overrides& ov, const std::string& axis,
              const std::string& grid, const std::string& solar_buses, const std::string& out_dir) {
    eg::NetworkCase nc = eg::load_case(case_path);
    ov.apply(nc);
    eg::SweepSpec spec;
    spec.axis = eg::sweep_axis_from_string(axis);
    spec.values = parse_grid(grid);
    if (!solar_buses.empty()) {
        spec.solar_buses.clear();
        for (int b : parse_int_set(solar_buses)) spec.solar_buses.push_back(b);
    }
    if (ov.deviation >= 0.0) spec.solar_deviation_fraction = ov.deviation;
    spec.validate_spec();
    fs::create_directories(out_dir);

    eg::SweepResult res = eg::run_sweep(nc, spec);
    eg::write_sweep_csv(out_dir + "/sweep.csv", res, eg::fixed_params_line(nc, spec));
    eg::write_sweep_summary_json(out_dir + "/sweep_summary.json", res);

    std::cerr << "sweep axis=" << eg::to_string(spec.axis) << " solved=" << res.summary.points_solved
              << "/" << res.summary.points_total << " monotone=" << (res.summary.monotone ? "yes" : "no")
              << "\n";
    bool all_converged = res.summary.points_solved == res.summary.points_total;
    for (const auto& row : res.rows)
        if (row.solved && row.status != eg::CcgStatus::Converged) all_converged = false;
    return all_converged ? 0 : 2;
}

int cmd_synth(const std::string& case_path, unsigned seed, double base_level, int peak_hour,
              const std::string& safe, const std::string& risky, const std::string& out_csv) {
    eg::NetworkCase nc = eg::load_case(case_path);
    eg::SynthScoreConfig cfg;
    cfg.seed = seed;
    cfg.base_level = base_level;
    cfg.peak_hour = peak_hour;
    cfg.safe_lines = safe.empty() ? std::set<int>{} : parse_int_set(safe);
    cfg.always_risky_lines = risky.empty() ? std::set<int>{} : parse_int_set(risky);
    eg::FireScoreProfile prof = eg::generate_synthetic_scores(nc, cfg);
    eg::save_fire_scores_csv(prof, out_csv);
    std::cerr << "wrote " << out_csv << "\n";
    return 0;
}

int cmd_validate(const std::string& case_path, const Overrides& ov) {
    eg::NetworkCase nc = eg::load_case(case_path);
    ov.apply(nc);

    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
        if (!ok) ++failures;
    };

    // Decomposition run with the dual-MIP worst case, cross-checked per
    // iteration against exhaustive vertex enumeration.
    size_t n_unc = 0;
    for (const auto& d : nc.demands)
        for (double v : d.deviation) n_unc += v > 0.0;
    for (const auto& s : nc.solar_units)
        for (double v : s.deviation) n_unc += v > 0.0;
    if (n_unc > 22) {
        std::cerr << "case has " << n_unc << " uncertainty binaries; oracle needs <= 22\n";
        return 1;
    }
    eg::CcgOptions opts;
    std::vector<double> mip_costs, oracle_costs;
    opts.worst_case_solver = [&](const eg::NetworkCase& c, const eg::FirstStageSolution& plan) {
        auto mip = eg::solve_worst_case_mip(c, plan);
        auto oracle = eg::brute_force_worst_case(c, plan);
        mip_costs.push_back(mip.second);
        oracle_costs.push_back(oracle.second);
        return mip;
    };
    eg::CcgResult r = eg::run_ccg(nc, opts);
    bool sub_ok = true;
    for (size_t i = 0; i < mip_costs.size(); ++i)
        sub_ok &= std::abs(mip_costs[i] - oracle_costs[i]) <= 1e-6 * (1.0 + std::abs(oracle_costs[i]));
    check(sub_ok, "worst-case dual MIP matches exhaustive vertex enumeration on every iteration");
    check(r.trace.status == eg::CcgStatus::Converged, "decomposition converged");

    double robust = eg::robust_objective(nc, r.plan);
    check(std::abs(robust - r.trace.final_upper_bound) <= 1e-6 * (1.0 + std::abs(robust)),
          "returned plan's exhaustive robust cost equals the final upper bound");

    size_t line_hours = nc.lines.size() * static_cast<size_t>(nc.horizon);
    if (line_hours <= 20) {
        eg::EnumeratedOptimum full = eg::enumerate_robust_optimum(nc);
        check(full.feasible, "exhaustive line-status enumeration found a feasible plan");
        check(std::abs(full.objective - r.trace.final_upper_bound) <=
                  1e-6 * (1.0 + std::abs(full.objective)),
              "decomposition objective equals the enumerated robust optimum");
    } else {
        std::cout << "[SKIP] full line-status enumeration (" << line_hours << " line-hours > 20)\n";
    }
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hourly line energization and robust dispatch under wildfire-ignition risk"};
    app.require_subcommand(1);

    std::string case_path, out_dir = "out";
    Overrides ov;

    auto* solve = app.add_subcommand("solve", "Run one robust solve and write plan/trace/risk artifacts");
    solve->add_option("case", case_path, "Case JSON file")->required();
    ov.add_flags(solve);
    solve->add_option("--out", out_dir, "Output directory");

    std::string axis, grid, solar_buses;
    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter axis and write plot-ready CSV");
    sweep->add_option("case", case_path, "Case JSON file")->required();
    ov.add_flags(sweep);
    sweep->add_option("--axis", axis, "risk_tolerance | budget | deviation_pct | solar_mw")->required();
    sweep->add_option("--grid", grid, "Comma-separated grid values")->required();
    sweep->add_option("--solar-buses", solar_buses, "Buses receiving solar on the solar_mw axis");
    sweep->add_option("--out", out_dir, "Output directory");

    unsigned seed = 1;
    double base_level = 0.2;
    int peak_hour = 15;
    std::string safe_lines, risky_lines, out_csv = "scores.csv";
    auto* synth = app.add_subcommand("synth-scores", "Generate a deterministic synthetic score CSV");
    synth->add_option("case", case_path, "Case JSON file")->required();
    synth->add_option("--seed", seed, "RNG seed");
    synth->add_option("--base-level", base_level, "Overall score scale in [0,1)");
    synth->add_option("--peak-hour", peak_hour, "Diurnal peak hour");
    synth->add_option("--safe-lines", safe_lines, "Comma-separated line ids forced to zero score");
    synth->add_option("--always-risky", risky_lines, "Line ids with positive score every hour");
    synth->add_option("--out", out_csv, "Output CSV path");

    auto* validate = app.add_subcommand("validate", "Cross-check the solver against exhaustive oracles");
    validate->add_option("case", case_path, "Case JSON file")->required();
    ov.add_flags(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage / domain errors are input errors
    }

    try {
        if (solve->parsed()) return cmd_solve(case_path, ov, out_dir);
        if (sweep->parsed()) return cmd_sweep(case_path, ov, axis, grid, solar_buses, out_dir);
        if (synth->parsed()) return cmd_synth(case_path, seed, base_level, peak_hour, safe_lines, risky_lines, out_csv);
        if (validate->parsed()) return cmd_validate(case_path, ov);
    } catch (const eg::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const eg::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const eg::MasterInfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& row : e.binding_rows) std::cerr << "  binding: " << row << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
