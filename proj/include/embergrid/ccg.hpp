// Column-and-constraint generation: alternate the master (lower bound) with
// the worst-case dual subproblem (upper bound), appending one recourse block
// per returned realization until (UB - LB)/UB falls below the convergence
// gap. The upper bound is the running minimum over iterations, so the
// returned plan is the one whose certified worst-case cost equals the final
// UB. Also hosts the exhaustive oracles used for validation.

#pragma once

#include <chrono>
#include <functional>

#include "embergrid/subproblem.hpp"

namespace embergrid {

enum class CcgStatus { Converged, IterationLimit, Stalled };

inline const char* to_string(CcgStatus s) {
    switch (s) {
        case CcgStatus::Converged: return "converged";
        case CcgStatus::IterationLimit: return "iteration_limit";
        default: return "stalled";
    }
}

struct CcgIterationRecord {
    int iteration = 0;
    double lower_bound = 0.0;
    double upper_bound_candidate = 0.0;  // worst-case cost of this iteration's plan
    double upper_bound = 0.0;            // running minimum
    double gap = 0.0;
    UncertaintyRealization realization;  // worst case returned this iteration
    std::vector<uint8_t> line_status;    // this iteration's master plan, [l*T + t]
    std::vector<double> dispatch;        // nominal-block generator dispatch, [g*T + t]
    double master_seconds = 0.0;
    double subproblem_seconds = 0.0;
};

struct CcgTrace {
    std::vector<CcgIterationRecord> records;
    CcgStatus status = CcgStatus::IterationLimit;
    double final_lower_bound = 0.0;
    double final_upper_bound = 0.0;
    double final_gap = 0.0;
    int iterations = 0;
};

struct CcgResult {
    FirstStageSolution plan;
    CcgTrace trace;
};

struct CcgOptions {
    MilpOptions master_milp;
    MilpOptions sub_milp;
    bool refine_ties = true;
    std::vector<UncertaintyRealization> initial_scenarios;  // beyond the nominal seed
    // Override for the worst-case search (validation / testing hook).
    std::function<std::pair<UncertaintyRealization, double>(const NetworkCase&,
                                                            const FirstStageSolution&)>
        worst_case_solver;
};

inline std::pair<UncertaintyRealization, double> solve_worst_case_mip(const NetworkCase& nc,
                                                                      const FirstStageSolution& plan,
                                                                      const MilpOptions& opts = {}) {
    SubproblemModel sm = build_dual_subproblem(nc, plan, nc.robust.budget_of_uncertainty);
    SubproblemResult r = solve_subproblem(nc, sm, opts);
    return {std::move(r.realization), r.worst_cost};
}

/// The six-step decomposition loop. Deterministic for identical inputs.
inline CcgResult run_ccg(const NetworkCase& nc, const CcgOptions& opts = {}) {
    validate(nc);
    const double eps_gap = nc.robust.convergence_gap;
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };

    std::vector<UncertaintyRealization> seed{nominal_realization(nc)};
    for (const auto& s : opts.initial_scenarios) {
        bool dup = false;
        for (const auto& prev : seed) dup |= prev.same_vertex(s);
        if (!dup) seed.push_back(s);
    }
    MasterProblem master = build_master(nc, seed);

    CcgResult out;
    double ub = kInf, lb = -kInf;
    FirstStageSolution best_plan, last_plan;
    bool have_last = false;

    for (int iter = 0; iter < nc.robust.max_iterations; ++iter) {
        CcgIterationRecord rec;
        rec.iteration = iter;

        auto t0 = now();
        MasterSolveOptions mo;
        mo.milp = opts.master_milp;
        mo.refine_ties = opts.refine_ties;
        mo.warm_plan = have_last ? &last_plan : nullptr;
        FirstStageSolution plan = solve_master(master, mo);
        rec.master_seconds = secs(t0, now());
        lb = plan.lower_bound;

        auto t1 = now();
        std::pair<UncertaintyRealization, double> wc =
            opts.worst_case_solver ? opts.worst_case_solver(nc, plan)
                                   : solve_worst_case_mip(nc, plan, opts.sub_milp);
        rec.subproblem_seconds = secs(t1, now());

        rec.lower_bound = lb;
        rec.upper_bound_candidate = wc.second;
        rec.line_status = plan.line_status;
        rec.dispatch = plan.dispatch;
        if (wc.second < ub) {
            ub = wc.second;
            best_plan = plan;
        }
        rec.upper_bound = ub;
        rec.gap = std::max(0.0, (ub - lb) / std::max(std::abs(ub), 1e-12));
        rec.realization = wc.first;
        out.trace.records.push_back(rec);
        out.trace.iterations = iter + 1;

        if (rec.gap <= eps_gap) {
            out.trace.status = CcgStatus::Converged;
            break;
        }
        try {
            append_scenario(master, wc.first);
        } catch (const DuplicateRealizationError&) {
            out.trace.status = CcgStatus::Stalled;
            break;
        }
        last_plan = std::move(plan);
        have_last = true;
        out.trace.status = CcgStatus::IterationLimit;
    }
    out.trace.final_lower_bound = lb;
    out.trace.final_upper_bound = ub;
    out.trace.final_gap = out.trace.records.empty() ? kInf : out.trace.records.back().gap;
    out.plan = best_plan;
    return out;
}

// ----- exhaustive validation oracles -----

/// Enumerate every budget-feasible deviation vertex, solve the second-stage
/// primal LP for each, and return the maximizer (ties: lexicographically
/// smallest indicator vector). Independent of the dual-MIP path.
inline std::pair<UncertaintyRealization, double> brute_force_worst_case(const NetworkCase& nc,
                                                                        const FirstStageSolution& plan) {
    const int T = nc.horizon;
    struct Slot {
        bool demand;
        size_t entity;
        int t;
    };
    std::vector<Slot> slots;
    for (size_t d = 0; d < nc.demands.size(); ++d)
        for (int t = 0; t < T; ++t)
            if (nc.demands[d].deviation[static_cast<size_t>(t)] > 0.0) slots.push_back({true, d, t});
    for (size_t s = 0; s < nc.solar_units.size(); ++s)
        for (int t = 0; t < T; ++t)
            if (nc.solar_units[s].deviation[static_cast<size_t>(t)] > 0.0) slots.push_back({false, s, t});
    if (slots.size() > 22)
        throw std::invalid_argument("brute_force_worst_case: " + std::to_string(slots.size()) +
                                    " uncertainty binaries exceed the enumeration bound of 22");
    const int n = static_cast<int>(slots.size());
    const int budget = std::min(nc.robust.budget_of_uncertainty, n);

    std::vector<uint8_t> pick(static_cast<size_t>(n), 0);
    std::vector<uint8_t> best_pick;
    double best_cost = -kInf;
    UncertaintyRealization best_real;

    auto evaluate = [&]() {
        std::vector<uint8_t> ud(nc.demands.size() * static_cast<size_t>(T), 0);
        std::vector<uint8_t> us(nc.solar_units.size() * static_cast<size_t>(T), 0);
        for (int k = 0; k < n; ++k) {
            if (!pick[static_cast<size_t>(k)]) continue;
            const Slot& s = slots[static_cast<size_t>(k)];
            auto& v = s.demand ? ud : us;
            v[s.entity * static_cast<size_t>(T) + static_cast<size_t>(s.t)] = 1;
        }
        UncertaintyRealization real = realization_from_indicators(nc, std::move(ud), std::move(us));
        RecourseEval ev = evaluate_recourse(nc, plan.line_status, real);
        if (ev.status != LpStatus::Optimal)
            throw std::logic_error("brute_force_worst_case: recourse LP not optimal (" +
                                   std::string(to_string(ev.status)) + ")");
        if (ev.cost > best_cost + 1e-12 * (1.0 + std::abs(ev.cost))) {
            best_cost = ev.cost;
            best_pick = pick;
            best_real = std::move(real);
        }
    };

    // Lexicographic depth-first enumeration of all vertices with <= budget
    // active indicators; strict improvement keeps the first (smallest) maximizer.
    std::function<void(int, int)> rec = [&](int idx, int used) {
        if (idx == n) {
            evaluate();
            return;
        }
        pick[static_cast<size_t>(idx)] = 0;
        rec(idx + 1, used);
        if (used < budget) {
            pick[static_cast<size_t>(idx)] = 1;
            rec(idx + 1, used + 1);
            pick[static_cast<size_t>(idx)] = 0;
        }
    };
    rec(0, 0);
    return {best_real, best_cost};
}

/// Robust objective of a fixed plan: c'x plus the exhaustive worst-case
/// recourse (switching is costless, so this is the worst-case cost itself).
inline double robust_objective(const NetworkCase& nc, const FirstStageSolution& plan) {
    return brute_force_worst_case(nc, plan).second;
}

/// Risk-cap feasibility of a line-status pattern under the active intake mode.
inline bool risk_feasible(const NetworkCase& nc, const std::vector<uint8_t>& status) {
    const int T = nc.horizon;
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
        double hour = 0.0;
        for (size_t l = 0; l < nc.lines.size(); ++l)
            if (status[l * static_cast<size_t>(T) + static_cast<size_t>(t)])
                hour += nc.fire_scores.by_line.at(nc.lines[l].id)[static_cast<size_t>(t)];
        if (nc.robust.risk_intake_mode == RiskIntakeMode::Conservative &&
            hour > nc.robust.risk_tolerance + 1e-12)
            return false;
        total += hour;
    }
    return nc.robust.risk_intake_mode == RiskIntakeMode::Conservative ||
           total <= nc.robust.risk_tolerance + 1e-12;
}

struct EnumeratedOptimum {
    double objective = kInf;
    std::vector<uint8_t> line_status;
    bool feasible = false;
};

/// Full exhaustive robust optimum over every line-status pattern (oracle for
/// end-to-end checks; line-hours capped to keep 2^(L*T) enumerable).
inline EnumeratedOptimum enumerate_robust_optimum(const NetworkCase& nc, int max_line_hours = 20) {
    const int T = nc.horizon;
    const size_t nlh = nc.lines.size() * static_cast<size_t>(T);
    if (static_cast<int>(nlh) > max_line_hours)
        throw std::invalid_argument("enumerate_robust_optimum: " + std::to_string(nlh) +
                                    " line-hours exceed the enumeration bound");
    EnumeratedOptimum best;
    FirstStageSolution probe;
    probe.horizon = T;
    for (uint64_t mask = 0; mask < (uint64_t(1) << nlh); ++mask) {
        std::vector<uint8_t> status(nlh, 0);
        for (size_t k = 0; k < nlh; ++k) status[k] = (mask >> k) & 1;
        if (!risk_feasible(nc, status)) continue;
        UncertaintyRealization nominal = nominal_realization(nc);
        RecourseEval nom = evaluate_recourse(nc, status, nominal);
        if (nom.status != LpStatus::Optimal) continue;  // pattern traps a must-run unit
        probe.line_status = status;
        double cost = robust_objective(nc, probe);
        if (cost < best.objective - 1e-12 * (1.0 + std::abs(cost))) {
            best.objective = cost;
            best.line_status = status;
            best.feasible = true;
        }
    }
    return best;
}

}  // namespace embergrid
