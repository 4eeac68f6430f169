// Worst-case subproblem: explicit dual of the second-stage dispatch LP with
// the line statuses fixed, binary deviation indicators u selecting the
// adversarial vertex, budget row capping the active indicators, and the
// binary-continuous products u * mu linearized through the Phi / psi-aux
// variable pairs. Solved as a maximization MIP; its optimum equals the primal
// recourse cost of the returned realization (strong duality), which is the
// upper-bound contribution b'y*.
//
// Deviation directions: demand indicators push demand up, solar indicators
// push availability down; the opposite-direction v indicators stay zero (the
// budget counts only u). Shadow prices of the demand and solar caps live in
// [0, K], so K is a tight linearization bound.

#pragma once

#include "embergrid/master.hpp"

namespace embergrid {

struct SubproblemModel {
    MixedIntegerProgram mip;
    // Column maps, [entity*T + t]; -1 where the variable does not exist.
    std::vector<int> u_demand, u_solar;
    std::vector<int> mu4, phi4;  // demand-cap duals and their u-products
    std::vector<int> mu3, phi3;  // solar-cap duals and their u-products
    std::vector<int> lambda2;    // nodal duals, [bus*T + t]
    int budget_row = -1;
    int budget = 0;
};

struct SubproblemResult {
    UncertaintyRealization realization;
    double worst_cost = 0.0;
    MilpSolution raw;
};

/// Assemble the linearized dual MIP for a fixed first-stage plan.
inline SubproblemModel build_dual_subproblem(const NetworkCase& nc, const FirstStageSolution& plan,
                                             int budget) {
    if (plan.line_status.size() != nc.lines.size() * static_cast<size_t>(nc.horizon))
        throw std::invalid_argument("build_dual_subproblem: plan line statuses missing");
    if (budget < 0) throw std::invalid_argument("build_dual_subproblem: budget must be >= 0");
    const int T = nc.horizon;
    const double K = nc.robust.shed_penalty;
    const int ref_bus = nc.reference_bus();
    const bool conservative = nc.robust.risk_intake_mode == RiskIntakeMode::Conservative;

    SubproblemModel sm;
    sm.budget = budget;
    auto& lp = sm.mip.lp;
    lp.sense = Sense::Max;

    auto at = [T](size_t e, int t) { return e * static_cast<size_t>(T) + static_cast<size_t>(t); };
    auto name = [](const char* base, int a, int b, int c = -1) {
        std::string s = std::string(base) + "(" + std::to_string(a) + "," + std::to_string(b);
        if (c >= 0) s += "," + std::to_string(c);
        return s + ")";
    };

    // Dual variables. Objective coefficients follow the primal right-hand
    // sides; products with u enter through Phi columns added below.
    std::vector<int> l1(nc.generators.size() * static_cast<size_t>(T));
    sm.lambda2.assign(nc.buses.size() * static_cast<size_t>(T), -1);
    std::vector<std::vector<int>> m1(nc.generators.size());
    std::vector<int> m2lo(l1.size()), m2hi(l1.size());
    for (size_t g = 0; g < nc.generators.size(); ++g) {
        const auto& gen = nc.generators[g];
        m1[g].resize(gen.segments.size() * static_cast<size_t>(T));
        for (int t = 0; t < T; ++t) {
            l1[at(g, t)] = lp.add_var(-kInf, kInf, 0.0, name("l1", gen.id, t));
            m2lo[at(g, t)] = lp.add_var(0.0, kInf, gen.p_min, name("m2lo", gen.id, t));
            m2hi[at(g, t)] = lp.add_var(0.0, kInf, -gen.p_max, name("m2hi", gen.id, t));
            for (size_t k = 0; k < gen.segments.size(); ++k)
                m1[g][at(k, t)] =
                    lp.add_var(0.0, kInf, -gen.segments[k].width, name("m1", gen.id, static_cast<int>(k), t));
        }
    }
    for (size_t b = 0; b < nc.buses.size(); ++b)
        for (int t = 0; t < T; ++t)
            sm.lambda2[at(b, t)] = lp.add_var(-kInf, kInf, 0.0, name("l2", nc.buses[b].id, t));

    sm.mu3.assign(nc.solar_units.size() * static_cast<size_t>(T), -1);
    sm.phi3.assign(sm.mu3.size(), -1);
    sm.u_solar.assign(sm.mu3.size(), -1);
    for (size_t s = 0; s < nc.solar_units.size(); ++s)
        for (int t = 0; t < T; ++t) {
            size_t i = at(s, t);
            sm.mu3[i] = lp.add_var(0.0, K, -nc.solar_units[s].nominal[static_cast<size_t>(t)],
                                   name("m3", nc.solar_units[s].id, t));
        }
    sm.mu4.assign(nc.demands.size() * static_cast<size_t>(T), -1);
    sm.phi4.assign(sm.mu4.size(), -1);
    sm.u_demand.assign(sm.mu4.size(), -1);
    double offset = 0.0;
    for (size_t d = 0; d < nc.demands.size(); ++d)
        for (int t = 0; t < T; ++t) {
            size_t i = at(d, t);
            sm.mu4[i] = lp.add_var(0.0, K, -nc.demands[d].nominal[static_cast<size_t>(t)],
                                   name("m4", nc.demands[d].bus, t));
            offset += K * nc.demands[d].nominal[static_cast<size_t>(t)];
        }
    lp.objective_offset = offset;

    std::vector<int> m5lo(nc.lines.size() * static_cast<size_t>(T)), m5hi(m5lo.size()),
        m6lo(m5lo.size()), m6hi(m5lo.size()), m7(m5lo.size(), -1);
    for (size_t l = 0; l < nc.lines.size(); ++l) {
        const auto& line = nc.lines[l];
        const double M = nc.line_big_m(line);
        const auto& psi = nc.fire_scores.by_line.at(line.id);
        for (int t = 0; t < T; ++t) {
            size_t i = at(l, t);
            double on = plan.line_status[i] ? 1.0 : 0.0;
            m5lo[i] = lp.add_var(0.0, kInf, -M * (1.0 - on), name("m5lo", line.id, t));
            m5hi[i] = lp.add_var(0.0, kInf, -M * (1.0 - on), name("m5hi", line.id, t));
            m6lo[i] = lp.add_var(0.0, kInf, -line.flow_limit * on, name("m6lo", line.id, t));
            m6hi[i] = lp.add_var(0.0, kInf, -line.flow_limit * on, name("m6hi", line.id, t));
            if (psi[static_cast<size_t>(t)] > 0.0)
                m7[i] = lp.add_var(0.0, kInf, psi[static_cast<size_t>(t)] * on, name("m7", line.id, t));
        }
    }
    std::vector<int> m8(conservative ? static_cast<size_t>(T) : 1, -1);
    bool any_sc = false;
    for (int c : m7) any_sc |= c >= 0;
    if (any_sc) {
        if (conservative) {
            for (int t = 0; t < T; ++t) m8[static_cast<size_t>(t)] = lp.add_var(0.0, kInf, -nc.robust.risk_tolerance, name("m8", t, 0));
        } else {
            m8[0] = lp.add_var(0.0, kInf, -nc.robust.risk_tolerance, "m8(horizon)");
        }
    }
    std::vector<int> mthlo(nc.buses.size() * static_cast<size_t>(T), -1), mthhi(mthlo.size(), -1);
    for (size_t b = 0; b < nc.buses.size(); ++b) {
        if (nc.buses[b].id == ref_bus) continue;
        for (int t = 0; t < T; ++t) {
            mthlo[at(b, t)] = lp.add_var(0.0, kInf, -NetworkCase::angle_bound, name("mthlo", nc.buses[b].id, t));
            mthhi[at(b, t)] = lp.add_var(0.0, kInf, -NetworkCase::angle_bound, name("mthhi", nc.buses[b].id, t));
        }
    }

    // Uncertainty indicators and linearized products, only where the
    // deviation is non-zero (a zero-width deviation cannot move anything).
    for (size_t d = 0; d < nc.demands.size(); ++d)
        for (int t = 0; t < T; ++t) {
            double dev = nc.demands[d].deviation[static_cast<size_t>(t)];
            if (dev <= 0.0) continue;
            size_t i = at(d, t);
            sm.u_demand[i] = lp.add_var(0.0, 1.0, K * dev, name("uD", nc.demands[d].bus, t));
            sm.mip.binaries.push_back(sm.u_demand[i]);
            sm.phi4[i] = lp.add_var(0.0, K, -dev, name("phi4", nc.demands[d].bus, t));
            int aux = lp.add_var(0.0, K, 0.0, name("psi4", nc.demands[d].bus, t));
            lp.add_row({{sm.phi4[i], 1.0}, {aux, 1.0}, {sm.mu4[i], -1.0}}, Rel::EQ, 0.0,
                       name("lin4-eq", nc.demands[d].bus, t));
            lp.add_row({{sm.phi4[i], 1.0}, {sm.u_demand[i], -K}}, Rel::LE, 0.0,
                       name("lin4-ub", nc.demands[d].bus, t));
            lp.add_row({{aux, 1.0}, {sm.u_demand[i], K}}, Rel::LE, K, name("lin4-aux", nc.demands[d].bus, t));
        }
    for (size_t s = 0; s < nc.solar_units.size(); ++s)
        for (int t = 0; t < T; ++t) {
            double dev = nc.solar_units[s].deviation[static_cast<size_t>(t)];
            if (dev <= 0.0) continue;
            size_t i = at(s, t);
            sm.u_solar[i] = lp.add_var(0.0, 1.0, 0.0, name("uS", nc.solar_units[s].id, t));
            sm.mip.binaries.push_back(sm.u_solar[i]);
            sm.phi3[i] = lp.add_var(0.0, K, dev, name("phi3", nc.solar_units[s].id, t));
            int aux = lp.add_var(0.0, K, 0.0, name("psi3", nc.solar_units[s].id, t));
            lp.add_row({{sm.phi3[i], 1.0}, {aux, 1.0}, {sm.mu3[i], -1.0}}, Rel::EQ, 0.0,
                       name("lin3-eq", nc.solar_units[s].id, t));
            lp.add_row({{sm.phi3[i], 1.0}, {sm.u_solar[i], -K}}, Rel::LE, 0.0,
                       name("lin3-ub", nc.solar_units[s].id, t));
            lp.add_row({{aux, 1.0}, {sm.u_solar[i], K}}, Rel::LE, K, name("lin3-aux", nc.solar_units[s].id, t));
        }

    // Dual feasibility rows, one per primal variable.
    for (size_t g = 0; g < nc.generators.size(); ++g) {
        const auto& gen = nc.generators[g];
        int bi = nc.bus_index(gen.bus);
        for (int t = 0; t < T; ++t) {
            for (size_t k = 0; k < gen.segments.size(); ++k)
                lp.add_row({{l1[at(g, t)], 1.0}, {m1[g][at(k, t)], -1.0}}, Rel::LE,
                           gen.segments[k].marginal_cost, name("d-pseg", gen.id, static_cast<int>(k), t));
            lp.add_row({{l1[at(g, t)], -1.0},
                        {sm.lambda2[at(static_cast<size_t>(bi), t)], 1.0},
                        {m2lo[at(g, t)], 1.0},
                        {m2hi[at(g, t)], -1.0}},
                       Rel::EQ, 0.0, name("d-pg", gen.id, t));
        }
    }
    for (size_t s = 0; s < nc.solar_units.size(); ++s) {
        int bi = nc.bus_index(nc.solar_units[s].bus);
        for (int t = 0; t < T; ++t)
            lp.add_row({{sm.lambda2[at(static_cast<size_t>(bi), t)], 1.0}, {sm.mu3[at(s, t)], -1.0}}, Rel::LE,
                       0.0, name("d-psolar", nc.solar_units[s].id, t));
    }
    for (size_t d = 0; d < nc.demands.size(); ++d) {
        int bi = nc.bus_index(nc.demands[d].bus);
        for (int t = 0; t < T; ++t)
            lp.add_row({{sm.lambda2[at(static_cast<size_t>(bi), t)], -1.0}, {sm.mu4[at(d, t)], -1.0}},
                       Rel::LE, -K, name("d-served", nc.demands[d].bus, t));
    }
    for (size_t l = 0; l < nc.lines.size(); ++l) {
        const auto& line = nc.lines[l];
        int fr = nc.bus_index(line.from_bus), to = nc.bus_index(line.to_bus);
        for (int t = 0; t < T; ++t) {
            size_t i = at(l, t);
            lp.add_row({{sm.lambda2[at(static_cast<size_t>(to), t)], 1.0},
                        {sm.lambda2[at(static_cast<size_t>(fr), t)], -1.0},
                        {m5lo[i], -1.0},
                        {m5hi[i], 1.0},
                        {m6lo[i], 1.0},
                        {m6hi[i], -1.0}},
                       Rel::EQ, 0.0, name("d-flow", line.id, t));
        }
    }
    for (size_t b = 0; b < nc.buses.size(); ++b) {
        if (nc.buses[b].id == ref_bus) continue;
        int bus_id = nc.buses[b].id;
        for (int t = 0; t < T; ++t) {
            std::vector<std::pair<int, double>> co;
            for (size_t l = 0; l < nc.lines.size(); ++l) {
                const auto& line = nc.lines[l];
                double bcoef = NetworkCase::base_mva / line.reactance;
                size_t i = at(l, t);
                if (line.to_bus == bus_id) {
                    co.push_back({m5lo[i], bcoef});
                    co.push_back({m5hi[i], -bcoef});
                } else if (line.from_bus == bus_id) {
                    co.push_back({m5lo[i], -bcoef});
                    co.push_back({m5hi[i], bcoef});
                }
            }
            co.push_back({mthhi[at(b, t)], -1.0});
            co.push_back({mthlo[at(b, t)], 1.0});
            lp.add_row(std::move(co), Rel::EQ, 0.0, name("d-theta", bus_id, t));
        }
    }
    for (size_t l = 0; l < nc.lines.size(); ++l)
        for (int t = 0; t < T; ++t) {
            size_t i = at(l, t);
            if (m7[i] < 0) continue;
            int m8col = conservative ? m8[static_cast<size_t>(t)] : m8[0];
            lp.add_row({{m7[i], 1.0}, {m8col, -1.0}}, Rel::LE, 0.0, name("d-sc", nc.lines[l].id, t));
        }

    // Budget of uncertainty over all active indicators.
    {
        std::vector<std::pair<int, double>> co;
        for (int c : sm.u_demand)
            if (c >= 0) co.push_back({c, 1.0});
        for (int c : sm.u_solar)
            if (c >= 0) co.push_back({c, 1.0});
        if (!co.empty())
            sm.budget_row = lp.add_row(std::move(co), Rel::LE, static_cast<double>(budget), "budget");
    }
    return sm;
}

/// Solve the dual MIP and return the maximizing realization plus its cost.
/// An unbounded dual would mean some realization defeats recourse entirely;
/// shedding keeps the primal feasible for every vertex, so this is an
/// internal error.
inline SubproblemResult solve_subproblem(const NetworkCase& nc, const SubproblemModel& sm,
                                         const MilpOptions& opts = {}) {
    SubproblemResult res;
    try {
        res.raw = solve_milp(sm.mip, opts);
    } catch (const std::runtime_error& e) {
        throw std::logic_error(std::string("subproblem dual did not solve cleanly: ") + e.what());
    }
    if (res.raw.status == MilpStatus::Infeasible)
        throw std::logic_error("subproblem dual infeasible: dual feasibility rows are inconsistent");
    if (res.raw.status == MilpStatus::GapNotProven)
        throw std::runtime_error("solve_subproblem: node limit exhausted before proving the gap");
    const int T = nc.horizon;
    std::vector<uint8_t> ud(nc.demands.size() * static_cast<size_t>(T), 0);
    std::vector<uint8_t> us(nc.solar_units.size() * static_cast<size_t>(T), 0);
    for (size_t i = 0; i < sm.u_demand.size(); ++i)
        if (sm.u_demand[i] >= 0) ud[i] = res.raw.x[static_cast<size_t>(sm.u_demand[i])] > 0.5 ? 1 : 0;
    for (size_t i = 0; i < sm.u_solar.size(); ++i)
        if (sm.u_solar[i] >= 0) us[i] = res.raw.x[static_cast<size_t>(sm.u_solar[i])] > 0.5 ? 1 : 0;
    res.realization = realization_from_indicators(nc, std::move(ud), std::move(us));
    res.worst_cost = res.raw.objective;
    return res;
}

/// Largest |Phi - u * mu| over the linearized products at the MIP optimum.
inline double linearization_residual(const SubproblemModel& sm, const MilpSolution& sol) {
    double worst = 0.0;
    auto check = [&](const std::vector<int>& u, const std::vector<int>& phi, const std::vector<int>& mu) {
        for (size_t i = 0; i < u.size(); ++i) {
            if (u[i] < 0) continue;
            double uv = std::round(sol.x[static_cast<size_t>(u[i])]);
            double prod = uv * sol.x[static_cast<size_t>(mu[i])];
            worst = std::max(worst, std::abs(sol.x[static_cast<size_t>(phi[i])] - prod));
        }
    };
    check(sm.u_demand, sm.phi4, sm.mu4);
    check(sm.u_solar, sm.phi3, sm.mu3);
    return worst;
}

}  // namespace embergrid
