// First-stage master MIP: hourly line energization binaries, ignition-score
// variables under the active risk-intake cap, one recourse block per
// uncertainty scenario, and the cost surrogate e bounded below by every
// scenario's dispatch + shedding cost. Line switching itself carries no
// direct cost, so the master objective is e alone and its optimum is the
// algorithm's lower bound.

#pragma once

#include <bit>

#include "embergrid/milp.hpp"
#include "embergrid/second_stage.hpp"

namespace embergrid {

class MasterInfeasibleError : public std::runtime_error {
public:
    MasterInfeasibleError(const std::string& what, std::vector<std::string> rows)
        : std::runtime_error(what), binding_rows(std::move(rows)) {}
    std::vector<std::string> binding_rows;
};

class DuplicateRealizationError : public std::runtime_error {
public:
    explicit DuplicateRealizationError(const std::string& what) : std::runtime_error(what) {}
};

struct FirstStageSolution {
    int horizon = 0;
    std::vector<int> line_ids;
    std::vector<uint8_t> line_status;      // [l*T + t]
    std::vector<double> dispatch;          // nominal-block pg, [g*T + t]
    std::vector<std::vector<double>> segment_dispatch;  // per gen, [k*T + t]
    std::vector<double> solar_dispatch;    // [s*T + t]
    std::vector<double> served_demand;     // [d*T + t]
    std::vector<double> angles;            // [b*T + t]
    std::vector<double> scores;            // realized SC = psi * I, [l*T + t]
    double surrogate_cost = 0.0;           // e
    double objective = 0.0;                // c'x + e (switching is costless: == e)
    double lower_bound = 0.0;

    bool on(size_t l, int t) const { return line_status[l * static_cast<size_t>(horizon) + static_cast<size_t>(t)] != 0; }
};

struct MasterProblem {
    NetworkCase nc;
    MixedIntegerProgram mip;
    std::vector<int> line_cols;  // [l*T + t]
    std::vector<int> sc_cols;    // [l*T + t], -1 where psi == 0 (no SC variable)
    int e_col = -1;
    std::vector<UncertaintyRealization> scenarios;
    std::vector<RecourseVars> blocks;
    // Hourly dispatch costs per (hour, line-status mask), one entry per
    // scenario, grown lazily; +inf marks an hourly pattern with no feasible
    // dispatch under that scenario. Used by the pattern solve path.
    mutable std::map<std::pair<int, uint32_t>, std::vector<double>> hour_cost_cache;
};

namespace detail {

inline void add_scenario_block(MasterProblem& mp, const UncertaintyRealization& real) {
    const int T = mp.nc.horizon;
    const double K = mp.nc.robust.shed_penalty;
    std::string tag = "s" + std::to_string(mp.scenarios.size());
    RecourseVars v = append_recourse_block(mp.mip.lp, mp.nc, real, &mp.line_cols, nullptr,
                                           /*price=*/false, tag);
    // e >= sum_t { sum c*pseg + sum_i K*(P^D - served) }.
    std::vector<std::pair<int, double>> co{{mp.e_col, 1.0}};
    for (size_t g = 0; g < mp.nc.generators.size(); ++g)
        for (size_t k = 0; k < mp.nc.generators[g].segments.size(); ++k)
            for (int t = 0; t < T; ++t)
                co.push_back({v.pseg[g][k * static_cast<size_t>(T) + static_cast<size_t>(t)],
                              -mp.nc.generators[g].segments[k].marginal_cost});
    double rhs = 0.0;
    for (size_t d = 0; d < mp.nc.demands.size(); ++d)
        for (int t = 0; t < T; ++t) {
            size_t i = d * static_cast<size_t>(T) + static_cast<size_t>(t);
            co.push_back({v.served[i], K});
            rhs += K * real.realized_demand[i];
        }
    mp.mip.lp.add_row(std::move(co), Rel::GE, rhs, "cut(" + tag + ")");
    mp.scenarios.push_back(real);
    mp.blocks.push_back(std::move(v));
}

}  // namespace detail

/// Build the first-stage MIP over at least one scenario (iteration 0 passes
/// the nominal realization).
inline MasterProblem build_master(const NetworkCase& nc,
                                  const std::vector<UncertaintyRealization>& scenarios) {
    if (scenarios.empty()) throw std::invalid_argument("build_master: at least one scenario required");
    MasterProblem mp;
    mp.nc = nc;
    const int T = nc.horizon;
    auto& lp = mp.mip.lp;

    mp.line_cols.resize(nc.lines.size() * static_cast<size_t>(T));
    for (size_t l = 0; l < nc.lines.size(); ++l)
        for (int t = 0; t < T; ++t) {
            int col = lp.add_var(0.0, 1.0, 0.0,
                                 "I(" + std::to_string(nc.lines[l].id) + "," + std::to_string(t) + ")");
            mp.line_cols[l * static_cast<size_t>(T) + static_cast<size_t>(t)] = col;
            mp.mip.binaries.push_back(col);
        }
    mp.sc_cols.assign(nc.lines.size() * static_cast<size_t>(T), -1);
    for (size_t l = 0; l < nc.lines.size(); ++l) {
        const auto& profile = nc.fire_scores.by_line.at(nc.lines[l].id);
        for (int t = 0; t < T; ++t) {
            double psi = profile[static_cast<size_t>(t)];
            if (psi <= 0.0) continue;
            size_t i = l * static_cast<size_t>(T) + static_cast<size_t>(t);
            mp.sc_cols[i] = lp.add_var(0.0, 1.0, 0.0,
                                       "SC(" + std::to_string(nc.lines[l].id) + "," + std::to_string(t) + ")");
            lp.add_row({{mp.sc_cols[i], 1.0}, {mp.line_cols[i], -psi}}, Rel::GE, 0.0,
                       "sc-floor(" + std::to_string(nc.lines[l].id) + "," + std::to_string(t) + ")");
        }
    }
    const double tol_e = nc.robust.risk_tolerance;
    if (nc.robust.risk_intake_mode == RiskIntakeMode::Conservative) {
        for (int t = 0; t < T; ++t) {
            std::vector<std::pair<int, double>> co;
            for (size_t l = 0; l < nc.lines.size(); ++l) {
                int c = mp.sc_cols[l * static_cast<size_t>(T) + static_cast<size_t>(t)];
                if (c >= 0) co.push_back({c, 1.0});
            }
            if (!co.empty()) lp.add_row(std::move(co), Rel::LE, tol_e, "risk(" + std::to_string(t) + ")");
        }
    } else {
        std::vector<std::pair<int, double>> co;
        for (int c : mp.sc_cols)
            if (c >= 0) co.push_back({c, 1.0});
        if (!co.empty()) lp.add_row(std::move(co), Rel::LE, tol_e, "risk(horizon)");
    }
    mp.e_col = lp.add_var(0.0, kInf, 1.0, "e");

    for (const auto& s : scenarios) {
        for (const auto& prev : mp.scenarios)
            if (prev.same_vertex(s))
                throw DuplicateRealizationError("build_master: duplicate scenario realization");
        detail::add_scenario_block(mp, s);
    }
    return mp;
}

/// Add one recourse block + cut for a new worst-case realization. Duplicate
/// vertices are rejected: re-proposing a priced scenario signals a stalled
/// decomposition.
inline void append_scenario(MasterProblem& mp, const UncertaintyRealization& real) {
    for (const auto& prev : mp.scenarios)
        if (prev.same_vertex(real))
            throw DuplicateRealizationError("append_scenario: realization already priced in the master");
    detail::add_scenario_block(mp, real);
}

struct MasterSolveOptions {
    MilpOptions milp;
    bool refine_ties = true;        // among epsilon-optimal plans, prefer more energized lines
    long refine_node_limit = 2000;
    const FirstStageSolution* warm_plan = nullptr;
};

inline FirstStageSolution extract_plan(const MasterProblem& mp, const std::vector<double>& x,
                                       double lower_bound) {
    const auto& nc = mp.nc;
    const int T = nc.horizon;
    FirstStageSolution fs;
    fs.horizon = T;
    for (const auto& l : nc.lines) fs.line_ids.push_back(l.id);
    fs.line_status.resize(nc.lines.size() * static_cast<size_t>(T));
    fs.scores.assign(nc.lines.size() * static_cast<size_t>(T), 0.0);
    for (size_t l = 0; l < nc.lines.size(); ++l) {
        const auto& profile = nc.fire_scores.by_line.at(nc.lines[l].id);
        for (int t = 0; t < T; ++t) {
            size_t i = l * static_cast<size_t>(T) + static_cast<size_t>(t);
            fs.line_status[i] = x[static_cast<size_t>(mp.line_cols[i])] > 0.5 ? 1 : 0;
            fs.scores[i] = fs.line_status[i] ? profile[static_cast<size_t>(t)] : 0.0;
        }
    }
    const RecourseVars& nom = mp.blocks.front();
    auto copy_vals = [&](const std::vector<int>& cols) {
        std::vector<double> out(cols.size());
        for (size_t i = 0; i < cols.size(); ++i) out[i] = x[static_cast<size_t>(cols[i])];
        return out;
    };
    fs.dispatch = copy_vals(nom.pg);
    for (const auto& segs : nom.pseg) fs.segment_dispatch.push_back(copy_vals(segs));
    fs.solar_dispatch = copy_vals(nom.psolar);
    fs.served_demand = copy_vals(nom.served);
    fs.angles = copy_vals(nom.theta);
    fs.surrogate_cost = lower_bound;
    fs.objective = lower_bound;
    fs.lower_bound = lower_bound;
    return fs;
}

/// Solve the master as the monolithic big-M MIP; optionally refine ties by
/// re-solving for the most energized plan within a 1e-9 relative band of the
/// optimum.
inline FirstStageSolution solve_master_monolithic(const MasterProblem& mp,
                                                  const MasterSolveOptions& opts = {}) {
    MilpOptions mo = opts.milp;
    std::vector<double> hint;
    if (opts.warm_plan && opts.warm_plan->line_status.size() == mp.line_cols.size()) {
        hint.assign(static_cast<size_t>(mp.mip.lp.num_vars), 0.0);
        for (size_t i = 0; i < mp.line_cols.size(); ++i)
            hint[static_cast<size_t>(mp.line_cols[i])] = opts.warm_plan->line_status[i];
        mo.initial_incumbent = &hint;
    }
    MilpSolution sol = solve_milp(mp.mip, mo);
    if (sol.status == MilpStatus::Infeasible) {
        // Root relaxation certificate names the binding rows when available.
        LpSolution root = solve_lp(mp.mip.lp, mo.lp_opts);
        std::vector<std::string> rows;
        if (root.status == LpStatus::Infeasible) {
            double norm = 0.0;
            for (double v : root.farkas_ray) norm = std::max(norm, std::abs(v));
            for (size_t i = 0; i < root.farkas_ray.size(); ++i)
                if (std::abs(root.farkas_ray[i]) > 1e-7 * norm)
                    rows.push_back(mp.mip.lp.row_name(static_cast<int>(i)));
        }
        throw MasterInfeasibleError(
            rows.empty() ? "master infeasible: no feasible line-status assignment"
                         : "master infeasible: inconsistent case",
            std::move(rows));
    }
    if (sol.status == MilpStatus::GapNotProven)
        throw std::runtime_error("solve_master: node limit exhausted before proving the gap");

    double e_star = sol.objective;
    const std::vector<double>* plan_x = &sol.x;
    MilpSolution refined;
    if (opts.refine_ties && !mp.mip.binaries.empty()) {
        MixedIntegerProgram tie = mp.mip;
        for (auto& c : tie.lp.cost) c = 0.0;
        for (int col : mp.line_cols) tie.lp.cost[static_cast<size_t>(col)] = -1.0;  // maximize energized
        tie.lp.add_row({{mp.e_col, 1.0}}, Rel::LE, e_star + 1e-9 * (1.0 + std::abs(e_star)), "tie-band");
        MilpOptions to = opts.milp;
        to.node_limit = opts.refine_node_limit;
        to.initial_incumbent = &sol.x;
        refined = solve_milp(tie, to);
        if (!refined.x.empty()) plan_x = &refined.x;
    }
    return extract_plan(mp, *plan_x, e_star);
}

namespace detail {

inline double hour_pattern_risk(const NetworkCase& nc, int t, uint32_t mask) {
    double r = 0.0;
    for (size_t l = 0; l < nc.lines.size(); ++l)
        if ((mask >> l) & 1) r += nc.fire_scores.by_line.at(nc.lines[l].id)[static_cast<size_t>(t)];
    return r;
}

inline const std::vector<double>& hour_pattern_costs(const MasterProblem& mp, int t, uint32_t mask) {
    auto& entry = mp.hour_cost_cache[{t, mask}];
    while (entry.size() < mp.scenarios.size()) {
        size_t s = entry.size();
        LinearProgram lp;
        build_hour_recourse_lp(lp, mp.nc, t, mask, mp.scenarios[s]);
        LpSolution sol = solve_lp(lp);
        if (sol.status == LpStatus::Optimal) entry.push_back(sol.objective);
        else if (sol.status == LpStatus::Infeasible) entry.push_back(kInf);
        else throw std::runtime_error("hourly dispatch LP failed: " + std::string(to_string(sol.status)));
    }
    return entry;
}

}  // namespace detail

/// Master solve via per-hour pattern convexification. The recourse problem
/// separates by hour once line statuses are fixed, so the master equals
///   min over per-hour patterns p_t of max over scenarios s of
///   sum_t hour_cost(t, p_t, s)
/// subject to the risk-intake cap. Solved as a pattern-selection MIP whose
/// LP relaxation is the per-hour convex hull, which branch-and-bound closes
/// quickly; the optimum is the same as the monolithic big-M master's.
inline FirstStageSolution solve_master_patterns(const MasterProblem& mp,
                                                const MasterSolveOptions& opts = {}) {
    const auto& nc = mp.nc;
    const int T = nc.horizon;
    const size_t L = nc.lines.size();
    if (L > 10) throw std::invalid_argument("pattern master: too many lines to enumerate");
    const uint32_t npat = uint32_t(1) << L;
    const bool conservative = nc.robust.risk_intake_mode == RiskIntakeMode::Conservative;

    // Candidate patterns per hour: risk-feasible (conservative) and
    // dispatch-feasible for every priced scenario. A pattern is dropped when
    // another pattern costs no more under every scenario, carries no more
    // risk, and energizes at least as many lines (so cost, the cumulative
    // risk row and the energization tie-break all stay intact).
    std::vector<std::vector<uint32_t>> cand(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        std::vector<uint32_t> feasible;
        for (uint32_t mask = 0; mask < npat; ++mask) {
            if (conservative &&
                detail::hour_pattern_risk(nc, t, mask) > nc.robust.risk_tolerance + 1e-12)
                continue;
            const auto& costs = detail::hour_pattern_costs(mp, t, mask);
            bool ok = true;
            for (double c : costs) ok &= std::isfinite(c);
            if (ok) feasible.push_back(mask);
        }
        if (feasible.empty())
            throw MasterInfeasibleError(
                "master infeasible: no admissible line pattern at hour " + std::to_string(t),
                {"risk(" + std::to_string(t) + ")"});
        for (size_t i = 0; i < feasible.size(); ++i) {
            bool dominated = false;
            const auto& ci = detail::hour_pattern_costs(mp, t, feasible[i]);
            double ri = detail::hour_pattern_risk(nc, t, feasible[i]);
            int pi = std::popcount(feasible[i]);
            for (size_t j = 0; j < feasible.size() && !dominated; ++j) {
                if (i == j) continue;
                const auto& cj = detail::hour_pattern_costs(mp, t, feasible[j]);
                double rj = detail::hour_pattern_risk(nc, t, feasible[j]);
                int pj = std::popcount(feasible[j]);
                if (rj > ri + 1e-15 || pj < pi) continue;
                bool leq = true, strict = rj < ri - 1e-15 || pj > pi;
                for (size_t s = 0; s < ci.size(); ++s) {
                    if (cj[s] > ci[s] + 1e-9) { leq = false; break; }
                    if (cj[s] < ci[s] - 1e-9) strict = true;
                }
                dominated = leq && (strict || j < i);
            }
            if (!dominated) cand[static_cast<size_t>(t)].push_back(feasible[i]);
        }
    }

    MixedIntegerProgram pmip;
    auto& lp = pmip.lp;
    int e_col = lp.add_var(0.0, kInf, 1.0, "e");
    std::vector<std::vector<int>> zcols(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t)
        for (uint32_t mask : cand[static_cast<size_t>(t)]) {
            int c = lp.add_var(0.0, 1.0, 0.0, "z(" + std::to_string(t) + "," + std::to_string(mask) + ")");
            zcols[static_cast<size_t>(t)].push_back(c);
            pmip.binaries.push_back(c);
        }
    for (int t = 0; t < T; ++t) {
        std::vector<std::pair<int, double>> co;
        for (int c : zcols[static_cast<size_t>(t)]) co.push_back({c, 1.0});
        lp.add_row(std::move(co), Rel::EQ, 1.0, "one-pattern(" + std::to_string(t) + ")");
    }
    for (size_t s = 0; s < mp.scenarios.size(); ++s) {
        std::vector<std::pair<int, double>> co{{e_col, 1.0}};
        for (int t = 0; t < T; ++t)
            for (size_t k = 0; k < cand[static_cast<size_t>(t)].size(); ++k)
                co.push_back({zcols[static_cast<size_t>(t)][k],
                              -detail::hour_pattern_costs(mp, t, cand[static_cast<size_t>(t)][k])[s]});
        lp.add_row(std::move(co), Rel::GE, 0.0, "cut(s" + std::to_string(s) + ")");
    }
    if (!conservative) {
        std::vector<std::pair<int, double>> co;
        for (int t = 0; t < T; ++t)
            for (size_t k = 0; k < cand[static_cast<size_t>(t)].size(); ++k) {
                double r = detail::hour_pattern_risk(nc, t, cand[static_cast<size_t>(t)][k]);
                if (r > 0.0) co.push_back({zcols[static_cast<size_t>(t)][k], r});
            }
        if (!co.empty()) lp.add_row(std::move(co), Rel::LE, nc.robust.risk_tolerance, "risk(horizon)");
    }

    MilpOptions mo = opts.milp;
    std::vector<double> hint;
    if (opts.warm_plan && opts.warm_plan->line_status.size() == L * static_cast<size_t>(T)) {
        hint.assign(static_cast<size_t>(lp.num_vars), 0.0);
        for (int t = 0; t < T; ++t) {
            uint32_t mask = 0;
            for (size_t l = 0; l < L; ++l)
                if (opts.warm_plan->line_status[l * static_cast<size_t>(T) + static_cast<size_t>(t)])
                    mask |= uint32_t(1) << l;
            for (size_t k = 0; k < cand[static_cast<size_t>(t)].size(); ++k)
                if (cand[static_cast<size_t>(t)][k] == mask)
                    hint[static_cast<size_t>(zcols[static_cast<size_t>(t)][k])] = 1.0;
        }
        mo.initial_incumbent = &hint;
    }
    MilpSolution sol = solve_milp(pmip, mo);
    if (sol.status == MilpStatus::Infeasible)
        throw MasterInfeasibleError("master infeasible: risk cap admits no joint pattern", {"risk"});
    if (sol.status == MilpStatus::GapNotProven)
        throw std::runtime_error("solve_master: node limit exhausted before proving the gap");
    double e_star = sol.objective;

    const std::vector<double>* plan_x = &sol.x;
    MilpSolution refined;
    if (opts.refine_ties) {
        MixedIntegerProgram tie = pmip;
        for (auto& c : tie.lp.cost) c = 0.0;
        for (int t = 0; t < T; ++t)
            for (size_t k = 0; k < cand[static_cast<size_t>(t)].size(); ++k)
                tie.lp.cost[static_cast<size_t>(zcols[static_cast<size_t>(t)][k])] =
                    -static_cast<double>(std::popcount(cand[static_cast<size_t>(t)][k]));
        tie.lp.add_row({{e_col, 1.0}}, Rel::LE, e_star + 1e-9 * (1.0 + std::abs(e_star)), "tie-band");
        MilpOptions to = opts.milp;
        to.node_limit = opts.refine_node_limit;
        to.initial_incumbent = &sol.x;
        refined = solve_milp(tie, to);
        if (!refined.x.empty()) plan_x = &refined.x;
    }

    // Selected pattern per hour, then the nominal-block dispatch for reporting.
    std::vector<uint32_t> chosen(static_cast<size_t>(T), 0);
    for (int t = 0; t < T; ++t)
        for (size_t k = 0; k < cand[static_cast<size_t>(t)].size(); ++k)
            if ((*plan_x)[static_cast<size_t>(zcols[static_cast<size_t>(t)][k])] > 0.5)
                chosen[static_cast<size_t>(t)] = cand[static_cast<size_t>(t)][k];

    FirstStageSolution fs;
    fs.horizon = T;
    for (const auto& l : nc.lines) fs.line_ids.push_back(l.id);
    fs.line_status.assign(L * static_cast<size_t>(T), 0);
    fs.scores.assign(L * static_cast<size_t>(T), 0.0);
    for (size_t l = 0; l < L; ++l) {
        const auto& profile = nc.fire_scores.by_line.at(nc.lines[l].id);
        for (int t = 0; t < T; ++t)
            if ((chosen[static_cast<size_t>(t)] >> l) & 1) {
                fs.line_status[l * static_cast<size_t>(T) + static_cast<size_t>(t)] = 1;
                fs.scores[l * static_cast<size_t>(T) + static_cast<size_t>(t)] = profile[static_cast<size_t>(t)];
            }
    }
    fs.dispatch.assign(nc.generators.size() * static_cast<size_t>(T), 0.0);
    fs.segment_dispatch.resize(nc.generators.size());
    for (size_t g = 0; g < nc.generators.size(); ++g)
        fs.segment_dispatch[g].assign(nc.generators[g].segments.size() * static_cast<size_t>(T), 0.0);
    fs.solar_dispatch.assign(nc.solar_units.size() * static_cast<size_t>(T), 0.0);
    fs.served_demand.assign(nc.demands.size() * static_cast<size_t>(T), 0.0);
    fs.angles.assign(nc.buses.size() * static_cast<size_t>(T), 0.0);
    const auto& nominal = mp.scenarios.front();
    for (int t = 0; t < T; ++t) {
        LinearProgram hlp;
        HourVars hv = build_hour_recourse_lp(hlp, nc, t, chosen[static_cast<size_t>(t)], nominal);
        LpSolution hs = solve_lp(hlp);
        if (hs.status != LpStatus::Optimal)
            throw std::logic_error("pattern master: chosen hourly pattern not dispatchable");
        auto put = [&](std::vector<double>& dst, size_t e, int col) {
            dst[e * static_cast<size_t>(T) + static_cast<size_t>(t)] = hs.x[static_cast<size_t>(col)];
        };
        for (size_t g = 0; g < nc.generators.size(); ++g) {
            put(fs.dispatch, g, hv.pg[g]);
            for (size_t k = 0; k < nc.generators[g].segments.size(); ++k)
                fs.segment_dispatch[g][k * static_cast<size_t>(T) + static_cast<size_t>(t)] =
                    hs.x[static_cast<size_t>(hv.pseg[g][k])];
        }
        for (size_t s = 0; s < nc.solar_units.size(); ++s) put(fs.solar_dispatch, s, hv.psolar[s]);
        for (size_t d = 0; d < nc.demands.size(); ++d) put(fs.served_demand, d, hv.served[d]);
        for (size_t b = 0; b < nc.buses.size(); ++b) put(fs.angles, b, hv.theta[b]);
    }
    fs.surrogate_cost = e_star;
    fs.objective = e_star;
    fs.lower_bound = e_star;
    return fs;
}

/// Solve the master. Small line counts go through the exact pattern
/// decomposition; larger ones fall back to the monolithic big-M MIP.
inline FirstStageSolution solve_master(const MasterProblem& mp, const MasterSolveOptions& opts = {}) {
    if (mp.nc.lines.size() <= 8 && !mp.nc.lines.empty()) return solve_master_patterns(mp, opts);
    return solve_master_monolithic(mp, opts);
}

}  // namespace embergrid
