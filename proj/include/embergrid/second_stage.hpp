// Second-stage (wait-and-see) dispatch machinery shared by the master
// problem, the worst-case oracle and the primal verification path: uncertainty
// realizations and the hourly DC dispatch block with segment costs, solar,
// served demand and switched line flows.

#pragma once

#include <cstdint>
#include <optional>

#include "embergrid/lp.hpp"
#include "embergrid/model.hpp"
#include "embergrid/simplex.hpp"

namespace embergrid {

/// One vertex of the polyhedral uncertainty set: binary deviation indicators
/// per (entity, hour) plus the realized profiles they induce. The adversarial
/// directions are demand up (u^D) and solar availability down (u^s); the v
/// indicators are bookkeeping and stay zero in worst-case search.
struct UncertaintyRealization {
    std::vector<uint8_t> demand_up;    // u^D, [d*T + t]
    std::vector<uint8_t> demand_down;  // v^D
    std::vector<uint8_t> solar_down;   // u^s, [s*T + t]
    std::vector<uint8_t> solar_up;     // v^s
    std::vector<double> realized_demand;
    std::vector<double> realized_solar_cap;

    int active_count() const {
        int n = 0;
        for (uint8_t v : demand_up) n += v;
        for (uint8_t v : solar_down) n += v;
        return n;
    }

    bool same_vertex(const UncertaintyRealization& o) const {
        return demand_up == o.demand_up && solar_down == o.solar_down &&
               demand_down == o.demand_down && solar_up == o.solar_up;
    }
};

/// Apply the deviation bookkeeping: realized demand/solar from nominal values
/// and the active indicators.
inline UncertaintyRealization realization_from_indicators(const NetworkCase& nc,
                                                          std::vector<uint8_t> demand_up,
                                                          std::vector<uint8_t> solar_down) {
    const size_t dn = nc.demands.size() * static_cast<size_t>(nc.horizon);
    const size_t sn = nc.solar_units.size() * static_cast<size_t>(nc.horizon);
    if (demand_up.size() != dn || solar_down.size() != sn)
        throw std::invalid_argument("realization indicator size mismatch");
    UncertaintyRealization r;
    r.demand_up = std::move(demand_up);
    r.solar_down = std::move(solar_down);
    r.demand_down.assign(dn, 0);
    r.solar_up.assign(sn, 0);
    r.realized_demand.assign(dn, 0.0);
    r.realized_solar_cap.assign(sn, 0.0);
    for (size_t d = 0; d < nc.demands.size(); ++d)
        for (int t = 0; t < nc.horizon; ++t) {
            size_t k = d * static_cast<size_t>(nc.horizon) + static_cast<size_t>(t);
            r.realized_demand[k] = nc.demands[d].nominal[static_cast<size_t>(t)] +
                                   (r.demand_up[k] ? nc.demands[d].deviation[static_cast<size_t>(t)] : 0.0) -
                                   (r.demand_down[k] ? nc.demands[d].deviation[static_cast<size_t>(t)] : 0.0);
        }
    for (size_t s = 0; s < nc.solar_units.size(); ++s)
        for (int t = 0; t < nc.horizon; ++t) {
            size_t k = s * static_cast<size_t>(nc.horizon) + static_cast<size_t>(t);
            r.realized_solar_cap[k] = nc.solar_units[s].nominal[static_cast<size_t>(t)] -
                                      (r.solar_down[k] ? nc.solar_units[s].deviation[static_cast<size_t>(t)] : 0.0) +
                                      (r.solar_up[k] ? nc.solar_units[s].deviation[static_cast<size_t>(t)] : 0.0);
        }
    return r;
}

inline UncertaintyRealization nominal_realization(const NetworkCase& nc) {
    return realization_from_indicators(
        nc, std::vector<uint8_t>(nc.demands.size() * static_cast<size_t>(nc.horizon), 0),
        std::vector<uint8_t>(nc.solar_units.size() * static_cast<size_t>(nc.horizon), 0));
}

/// Column indices of one recourse block, all laid out [entity * T + t].
struct RecourseVars {
    std::vector<int> pg;                   // generator dispatch
    std::vector<std::vector<int>> pseg;    // pseg[g][k*T + t]
    std::vector<int> psolar;
    std::vector<int> served;
    std::vector<int> flow;
    std::vector<int> theta;
};

namespace detail {

inline std::string block_tag(const std::string& base, const std::string& suffix) {
    return suffix.empty() ? base : base + "#" + suffix;
}

}  // namespace detail

/// Append the hourly dispatch block for one realization. Line statuses are
/// either master binary columns (`line_cols`, switched big-M rows) or fixed
/// 0/1 values (`fixed_status`, reduced rows: de-energized lines drop out).
/// With `price` the block carries the dispatch + shedding objective,
/// including the constant K * sum(realized demand).
inline RecourseVars append_recourse_block(LinearProgram& lp, const NetworkCase& nc,
                                          const UncertaintyRealization& real,
                                          const std::vector<int>* line_cols,
                                          const std::vector<uint8_t>* fixed_status, bool price,
                                          const std::string& tag = "") {
    if ((line_cols == nullptr) == (fixed_status == nullptr))
        throw std::invalid_argument("append_recourse_block: exactly one of line_cols/fixed_status");
    const int T = nc.horizon;
    const double K = nc.robust.shed_penalty;
    const int ref_bus = nc.reference_bus();
    RecourseVars v;

    auto at = [T](size_t e, int t) { return e * static_cast<size_t>(T) + static_cast<size_t>(t); };

    v.pg.resize(nc.generators.size() * static_cast<size_t>(T));
    v.pseg.resize(nc.generators.size());
    for (size_t g = 0; g < nc.generators.size(); ++g) {
        const auto& gen = nc.generators[g];
        v.pseg[g].resize(gen.segments.size() * static_cast<size_t>(T));
        for (int t = 0; t < T; ++t) {
            v.pg[at(g, t)] = lp.add_var(gen.p_min, gen.p_max, 0.0,
                                        detail::block_tag("pg(" + std::to_string(gen.id) + "," + std::to_string(t) + ")", tag));
            for (size_t k = 0; k < gen.segments.size(); ++k)
                v.pseg[g][at(k, t)] = lp.add_var(
                    0.0, gen.segments[k].width, price ? gen.segments[k].marginal_cost : 0.0,
                    detail::block_tag("pseg(" + std::to_string(gen.id) + "," + std::to_string(k) + "," + std::to_string(t) + ")", tag));
        }
    }
    v.psolar.resize(nc.solar_units.size() * static_cast<size_t>(T));
    for (size_t s = 0; s < nc.solar_units.size(); ++s)
        for (int t = 0; t < T; ++t)
            v.psolar[at(s, t)] = lp.add_var(0.0, real.realized_solar_cap[at(s, t)], 0.0,
                                            detail::block_tag("psolar(" + std::to_string(nc.solar_units[s].id) + "," + std::to_string(t) + ")", tag));
    v.served.resize(nc.demands.size() * static_cast<size_t>(T));
    double realized_total = 0.0;
    for (size_t d = 0; d < nc.demands.size(); ++d)
        for (int t = 0; t < T; ++t) {
            realized_total += real.realized_demand[at(d, t)];
            v.served[at(d, t)] = lp.add_var(0.0, real.realized_demand[at(d, t)], price ? -K : 0.0,
                                            detail::block_tag("served(" + std::to_string(nc.demands[d].bus) + "," + std::to_string(t) + ")", tag));
        }
    if (price) lp.objective_offset += K * realized_total;

    v.flow.resize(nc.lines.size() * static_cast<size_t>(T));
    for (size_t l = 0; l < nc.lines.size(); ++l)
        for (int t = 0; t < T; ++t) {
            const auto& line = nc.lines[l];
            bool off = fixed_status && (*fixed_status)[at(l, t)] == 0;
            double cap = off ? 0.0 : line.flow_limit;
            v.flow[at(l, t)] = lp.add_var(-cap, cap, 0.0,
                                          detail::block_tag("flow(" + std::to_string(line.id) + "," + std::to_string(t) + ")", tag));
        }
    v.theta.resize(nc.buses.size() * static_cast<size_t>(T));
    for (size_t b = 0; b < nc.buses.size(); ++b)
        for (int t = 0; t < T; ++t) {
            double lo = nc.buses[b].id == ref_bus ? 0.0 : -NetworkCase::angle_bound;
            double hi = nc.buses[b].id == ref_bus ? 0.0 : NetworkCase::angle_bound;
            v.theta[at(b, t)] = lp.add_var(lo, hi, 0.0,
                                           detail::block_tag("theta(" + std::to_string(nc.buses[b].id) + "," + std::to_string(t) + ")", tag));
        }

    // Segment sum: sum_k pseg(g,k,t) = pg(g,t).
    for (size_t g = 0; g < nc.generators.size(); ++g)
        for (int t = 0; t < T; ++t) {
            std::vector<std::pair<int, double>> co{{v.pg[at(g, t)], -1.0}};
            for (size_t k = 0; k < nc.generators[g].segments.size(); ++k)
                co.push_back({v.pseg[g][at(k, t)], 1.0});
            lp.add_row(std::move(co), Rel::EQ, 0.0,
                       detail::block_tag("seg-sum(" + std::to_string(nc.generators[g].id) + "," + std::to_string(t) + ")", tag));
        }

    // Nodal balance per (bus, t).
    for (size_t b = 0; b < nc.buses.size(); ++b) {
        int bus_id = nc.buses[b].id;
        for (int t = 0; t < T; ++t) {
            std::vector<std::pair<int, double>> co;
            for (size_t g = 0; g < nc.generators.size(); ++g)
                if (nc.generators[g].bus == bus_id) co.push_back({v.pg[at(g, t)], 1.0});
            for (size_t s = 0; s < nc.solar_units.size(); ++s)
                if (nc.solar_units[s].bus == bus_id) co.push_back({v.psolar[at(s, t)], 1.0});
            for (size_t l = 0; l < nc.lines.size(); ++l) {
                if (nc.lines[l].to_bus == bus_id) co.push_back({v.flow[at(l, t)], 1.0});
                else if (nc.lines[l].from_bus == bus_id) co.push_back({v.flow[at(l, t)], -1.0});
            }
            for (size_t d = 0; d < nc.demands.size(); ++d)
                if (nc.demands[d].bus == bus_id) co.push_back({v.served[at(d, t)], -1.0});
            lp.add_row(std::move(co), Rel::EQ, 0.0,
                       detail::block_tag("nodal(" + std::to_string(bus_id) + "," + std::to_string(t) + ")", tag));
        }
    }

    // Switched flow-angle coupling and flow capacity.
    for (size_t l = 0; l < nc.lines.size(); ++l) {
        const auto& line = nc.lines[l];
        const double b_coef = NetworkCase::base_mva / line.reactance;
        const double M = nc.line_big_m(line);
        const int fr = nc.bus_index(line.from_bus), to = nc.bus_index(line.to_bus);
        for (int t = 0; t < T; ++t) {
            int fcol = v.flow[at(l, t)];
            int thf = v.theta[at(static_cast<size_t>(fr), t)], tht = v.theta[at(static_cast<size_t>(to), t)];
            std::string id = std::to_string(line.id) + "," + std::to_string(t);
            if (line_cols) {
                int icol = (*line_cols)[at(l, t)];
                lp.add_row({{fcol, 1.0}, {tht, -b_coef}, {thf, b_coef}, {icol, M}}, Rel::LE, M,
                           detail::block_tag("flow-angle-ub(" + id + ")", tag));
                lp.add_row({{fcol, -1.0}, {tht, b_coef}, {thf, -b_coef}, {icol, M}}, Rel::LE, M,
                           detail::block_tag("flow-angle-lb(" + id + ")", tag));
                lp.add_row({{fcol, 1.0}, {icol, -line.flow_limit}}, Rel::LE, 0.0,
                           detail::block_tag("flow-cap-ub(" + id + ")", tag));
                lp.add_row({{fcol, 1.0}, {icol, line.flow_limit}}, Rel::GE, 0.0,
                           detail::block_tag("flow-cap-lb(" + id + ")", tag));
            } else if ((*fixed_status)[at(l, t)]) {
                lp.add_row({{fcol, 1.0}, {tht, -b_coef}, {thf, b_coef}}, Rel::EQ, 0.0,
                           detail::block_tag("flow-angle(" + id + ")", tag));
            }
            // De-energized fixed lines: flow already fixed to 0 by its bounds.
        }
    }
    return v;
}

/// Total dispatch + shedding cost expression value of a block in a solution.
inline double block_cost(const NetworkCase& nc, const UncertaintyRealization& real,
                         const RecourseVars& v, const std::vector<double>& x) {
    const int T = nc.horizon;
    double cost = 0.0;
    for (size_t g = 0; g < nc.generators.size(); ++g)
        for (size_t k = 0; k < nc.generators[g].segments.size(); ++k)
            for (int t = 0; t < T; ++t)
                cost += nc.generators[g].segments[k].marginal_cost *
                        x[static_cast<size_t>(v.pseg[g][k * static_cast<size_t>(T) + static_cast<size_t>(t)])];
    for (size_t d = 0; d < nc.demands.size(); ++d)
        for (int t = 0; t < T; ++t) {
            size_t i = d * static_cast<size_t>(T) + static_cast<size_t>(t);
            cost += nc.robust.shed_penalty * (real.realized_demand[i] - x[static_cast<size_t>(v.served[i])]);
        }
    return cost;
}

/// Column indices of a single-hour dispatch LP.
struct HourVars {
    std::vector<int> pg;                 // per generator
    std::vector<std::vector<int>> pseg;  // per generator, per segment
    std::vector<int> psolar;
    std::vector<int> served;
    std::vector<int> flow;
    std::vector<int> theta;
};

/// One hour of the recourse problem for a fixed line-status mask (bit l =
/// line index l energized). The hourly LPs are what the recourse problem
/// separates into once line statuses are fixed: no constraint couples hours.
inline HourVars build_hour_recourse_lp(LinearProgram& lp, const NetworkCase& nc, int t,
                                       uint32_t mask, const UncertaintyRealization& real) {
    const double K = nc.robust.shed_penalty;
    const int T = nc.horizon;
    const int ref_bus = nc.reference_bus();
    HourVars v;
    v.pg.resize(nc.generators.size());
    v.pseg.resize(nc.generators.size());
    for (size_t g = 0; g < nc.generators.size(); ++g) {
        const auto& gen = nc.generators[g];
        v.pg[g] = lp.add_var(gen.p_min, gen.p_max, 0.0);
        v.pseg[g].resize(gen.segments.size());
        for (size_t k = 0; k < gen.segments.size(); ++k)
            v.pseg[g][k] = lp.add_var(0.0, gen.segments[k].width, gen.segments[k].marginal_cost);
    }
    v.psolar.resize(nc.solar_units.size());
    for (size_t s = 0; s < nc.solar_units.size(); ++s)
        v.psolar[s] = lp.add_var(0.0, real.realized_solar_cap[s * static_cast<size_t>(T) + static_cast<size_t>(t)], 0.0);
    v.served.resize(nc.demands.size());
    for (size_t d = 0; d < nc.demands.size(); ++d) {
        double cap = real.realized_demand[d * static_cast<size_t>(T) + static_cast<size_t>(t)];
        v.served[d] = lp.add_var(0.0, cap, -K);
        lp.objective_offset += K * cap;
    }
    v.flow.resize(nc.lines.size());
    v.theta.resize(nc.buses.size());
    for (size_t l = 0; l < nc.lines.size(); ++l) {
        double cap = (mask >> l) & 1 ? nc.lines[l].flow_limit : 0.0;
        v.flow[l] = lp.add_var(-cap, cap, 0.0);
    }
    for (size_t b = 0; b < nc.buses.size(); ++b) {
        double bound = nc.buses[b].id == ref_bus ? 0.0 : NetworkCase::angle_bound;
        v.theta[b] = lp.add_var(-bound, bound, 0.0);
    }
    for (size_t g = 0; g < nc.generators.size(); ++g) {
        std::vector<std::pair<int, double>> co{{v.pg[g], -1.0}};
        for (int c : v.pseg[g]) co.push_back({c, 1.0});
        lp.add_row(std::move(co), Rel::EQ, 0.0);
    }
    for (size_t b = 0; b < nc.buses.size(); ++b) {
        int bus_id = nc.buses[b].id;
        std::vector<std::pair<int, double>> co;
        for (size_t g = 0; g < nc.generators.size(); ++g)
            if (nc.generators[g].bus == bus_id) co.push_back({v.pg[g], 1.0});
        for (size_t s = 0; s < nc.solar_units.size(); ++s)
            if (nc.solar_units[s].bus == bus_id) co.push_back({v.psolar[s], 1.0});
        for (size_t l = 0; l < nc.lines.size(); ++l) {
            if (nc.lines[l].to_bus == bus_id) co.push_back({v.flow[l], 1.0});
            else if (nc.lines[l].from_bus == bus_id) co.push_back({v.flow[l], -1.0});
        }
        for (size_t d = 0; d < nc.demands.size(); ++d)
            if (nc.demands[d].bus == bus_id) co.push_back({v.served[d], -1.0});
        lp.add_row(std::move(co), Rel::EQ, 0.0);
    }
    for (size_t l = 0; l < nc.lines.size(); ++l) {
        if (!((mask >> l) & 1)) continue;
        const auto& line = nc.lines[l];
        double b_coef = NetworkCase::base_mva / line.reactance;
        int fr = nc.bus_index(line.from_bus), to = nc.bus_index(line.to_bus);
        lp.add_row({{v.flow[l], 1.0}, {v.theta[static_cast<size_t>(to)], -b_coef}, {v.theta[static_cast<size_t>(fr)], b_coef}},
                   Rel::EQ, 0.0);
    }
    return v;
}

struct RecourseEval {
    LpStatus status = LpStatus::NumericalFailure;
    double cost = 0.0;
    LpSolution solution;
    RecourseVars vars;
};

/// Solve the second-stage dispatch LP for fixed line statuses and one
/// realization; `cost` is the full dispatch-plus-shedding objective including
/// the shed penalty constant.
inline RecourseEval evaluate_recourse(const NetworkCase& nc, const std::vector<uint8_t>& line_status,
                                      const UncertaintyRealization& real,
                                      const SimplexOptions& so = {}) {
    LinearProgram lp;
    RecourseEval ev;
    ev.vars = append_recourse_block(lp, nc, real, nullptr, &line_status, /*price=*/true);
    ev.solution = solve_lp(lp, so);
    ev.status = ev.solution.status;
    if (ev.status == LpStatus::Optimal) ev.cost = ev.solution.objective;
    return ev;
}

}  // namespace embergrid
