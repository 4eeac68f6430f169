// Post-solve risk analytics: per-line risk of operation (sum of realized
// ignition scores over energized hours), energization and served-load
// percentages, and the centralized-vs-distributed solar siting comparison.

#pragma once

#include "embergrid/ccg.hpp"

namespace embergrid {

struct RiskReport {
    std::vector<int> line_ids;
    std::vector<double> risk_of_operation;  // per line: sum_t SC_t with SC = psi * I
    std::vector<uint8_t> line_status;       // [l*T + t]
    int horizon = 0;
    double pct_lines_energized = 0.0;
    double pct_load_served = 0.0;  // 100 * served / scheduled, nominal profiles
    double operation_cost = 0.0;
};

inline RiskReport quantify_line_risk(const NetworkCase& nc, const FirstStageSolution& plan) {
    const int T = nc.horizon;
    RiskReport rep;
    rep.horizon = T;
    rep.line_ids = plan.line_ids;
    rep.line_status = plan.line_status;
    rep.operation_cost = plan.objective;
    rep.risk_of_operation.assign(nc.lines.size(), 0.0);
    long on = 0;
    for (size_t l = 0; l < nc.lines.size(); ++l)
        for (int t = 0; t < T; ++t) {
            size_t i = l * static_cast<size_t>(T) + static_cast<size_t>(t);
            if (!plan.line_status[i]) continue;
            ++on;
            rep.risk_of_operation[l] += plan.scores[i];
        }
    size_t total = nc.lines.size() * static_cast<size_t>(T);
    rep.pct_lines_energized = total == 0 ? 100.0 : 100.0 * static_cast<double>(on) / static_cast<double>(total);
    double served = 0.0, scheduled = 0.0;
    for (size_t d = 0; d < nc.demands.size(); ++d)
        for (int t = 0; t < T; ++t) {
            served += plan.served_demand[d * static_cast<size_t>(T) + static_cast<size_t>(t)];
            scheduled += nc.demands[d].nominal[static_cast<size_t>(t)];
        }
    rep.pct_load_served = scheduled <= 0.0 ? 100.0 : 100.0 * served / scheduled;
    return rep;
}

struct SitingRow {
    std::string label;
    RiskIntakeMode mode = RiskIntakeMode::Conservative;
    double operation_cost = 0.0;
    double pct_lines_energized = 0.0;
    double pct_load_served = 0.0;
    CcgStatus status = CcgStatus::Converged;
    int iterations = 0;
};

/// Run the robust solve for each solar siting under both intake modes.
/// Sitings map bus -> MW and must each sum to total_solar_mw.
inline std::vector<SitingRow> compare_solar_siting(const NetworkCase& base, double total_solar_mw,
                                                   const std::vector<std::pair<std::string, std::map<int, double>>>& sitings,
                                                   double solar_deviation_fraction = 0.10,
                                                   const CcgOptions& opts = {}) {
    std::vector<SitingRow> rows;
    for (const auto& [label, siting] : sitings) {
        double total = 0.0;
        for (const auto& [bus, mw] : siting) {
            bool known = false;
            for (const auto& b : base.buses) known |= b.id == bus;
            if (!known)
                throw ValidationError("compare_solar_siting: siting references unknown bus " +
                                      std::to_string(bus));
            total += mw;
        }
        if (std::abs(total - total_solar_mw) > 1e-6)
            throw ValidationError("compare_solar_siting: siting '" + label + "' sums to " +
                                  std::to_string(total) + " MW, expected " +
                                  std::to_string(total_solar_mw));
        for (auto mode : {RiskIntakeMode::Conservative, RiskIntakeMode::Cumulative}) {
            NetworkCase nc = base;
            nc.robust.risk_intake_mode = mode;
            add_solar(nc, siting, solar_deviation_fraction);
            validate(nc);
            CcgResult r = run_ccg(nc, opts);
            RiskReport rep = quantify_line_risk(nc, r.plan);
            SitingRow row;
            row.label = label;
            row.mode = mode;
            row.operation_cost = r.trace.final_upper_bound;
            row.pct_lines_energized = rep.pct_lines_energized;
            row.pct_load_served = rep.pct_load_served;
            row.status = r.trace.status;
            row.iterations = r.trace.iterations;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace embergrid
