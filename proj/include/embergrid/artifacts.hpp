// Artifact writers: plan JSON, per-iteration trace as JSON-lines, worst-case
// realizations, risk tables as CSV, sweep output, and the combined run
// summary. Writers are byte-deterministic for identical inputs; timing lives
// in the in-memory trace only and is never written to artifacts.

#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "embergrid/risk.hpp"
#include "embergrid/sweep.hpp"

namespace embergrid {

namespace detail {

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write artifact: " + path);
    out << body;
}

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

inline nlohmann::json realization_to_json(const NetworkCase& nc, const UncertaintyRealization& r) {
    nlohmann::json j;
    const int T = nc.horizon;
    auto pack = [&](const std::vector<uint8_t>& v, auto id_of) {
        nlohmann::json arr = nlohmann::json::array();
        for (size_t e = 0; e * static_cast<size_t>(T) < v.size(); ++e)
            for (int t = 0; t < T; ++t)
                if (v[e * static_cast<size_t>(T) + static_cast<size_t>(t)])
                    arr.push_back({{"id", id_of(e)}, {"hour", t + 1}});
        return arr;
    };
    j["demand_up"] = pack(r.demand_up, [&](size_t d) { return nc.demands[d].bus; });
    j["demand_down"] = pack(r.demand_down, [&](size_t d) { return nc.demands[d].bus; });
    j["solar_down"] = pack(r.solar_down, [&](size_t s) { return nc.solar_units[s].id; });
    j["solar_up"] = pack(r.solar_up, [&](size_t s) { return nc.solar_units[s].id; });
    j["active_count"] = r.active_count();
    nlohmann::json rd = nlohmann::json::array();
    for (size_t d = 0; d < nc.demands.size(); ++d) {
        std::vector<double> prof(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t)
            prof[static_cast<size_t>(t)] = r.realized_demand[d * static_cast<size_t>(T) + static_cast<size_t>(t)];
        rd.push_back({{"bus", nc.demands[d].bus}, {"profile", prof}});
    }
    j["realized_demand"] = rd;
    nlohmann::json rs = nlohmann::json::array();
    for (size_t s = 0; s < nc.solar_units.size(); ++s) {
        std::vector<double> prof(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t)
            prof[static_cast<size_t>(t)] = r.realized_solar_cap[s * static_cast<size_t>(T) + static_cast<size_t>(t)];
        rs.push_back({{"id", nc.solar_units[s].id}, {"profile", prof}});
    }
    j["realized_solar"] = rs;
    return j;
}

inline nlohmann::json plan_to_json(const NetworkCase& nc, const FirstStageSolution& plan) {
    nlohmann::json j;
    const int T = nc.horizon;
    j["horizon"] = T;
    j["objective"] = plan.objective;
    j["lower_bound"] = plan.lower_bound;
    j["surrogate_cost"] = plan.surrogate_cost;
    nlohmann::json lines = nlohmann::json::array();
    for (size_t l = 0; l < plan.line_ids.size(); ++l) {
        nlohmann::json lj;
        lj["id"] = plan.line_ids[l];
        std::vector<int> status(static_cast<size_t>(T));
        std::vector<double> sc(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t) {
            status[static_cast<size_t>(t)] = plan.line_status[l * static_cast<size_t>(T) + static_cast<size_t>(t)];
            sc[static_cast<size_t>(t)] = plan.scores[l * static_cast<size_t>(T) + static_cast<size_t>(t)];
        }
        lj["status"] = status;
        lj["score"] = sc;
        lines.push_back(std::move(lj));
    }
    j["lines"] = lines;
    auto series = [&](const std::vector<double>& v, size_t e) {
        std::vector<double> out(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t) out[static_cast<size_t>(t)] = v[e * static_cast<size_t>(T) + static_cast<size_t>(t)];
        return out;
    };
    nlohmann::json gens = nlohmann::json::array();
    for (size_t g = 0; g < nc.generators.size(); ++g)
        gens.push_back({{"id", nc.generators[g].id}, {"dispatch", series(plan.dispatch, g)}});
    j["generators"] = gens;
    nlohmann::json solar = nlohmann::json::array();
    for (size_t s = 0; s < nc.solar_units.size(); ++s)
        solar.push_back({{"id", nc.solar_units[s].id}, {"dispatch", series(plan.solar_dispatch, s)}});
    j["solar"] = solar;
    nlohmann::json demands = nlohmann::json::array();
    for (size_t d = 0; d < nc.demands.size(); ++d)
        demands.push_back({{"bus", nc.demands[d].bus}, {"served", series(plan.served_demand, d)}});
    j["demands"] = demands;
    return j;
}

inline void write_plan_json(const std::string& path, const NetworkCase& nc,
                            const FirstStageSolution& plan) {
    detail::write_text_file(path, plan_to_json(nc, plan).dump(2) + "\n");
}

/// One JSON record per iteration: bounds, gap, and the realization added.
inline void write_trace_jsonl(const std::string& path, const NetworkCase& nc, const CcgTrace& trace) {
    std::string body;
    const int T = nc.horizon;
    for (const auto& rec : trace.records) {
        nlohmann::json j;
        j["iteration"] = rec.iteration;
        j["lower_bound"] = rec.lower_bound;
        j["upper_bound_candidate"] = rec.upper_bound_candidate;
        j["upper_bound"] = rec.upper_bound;
        j["gap"] = rec.gap;
        nlohmann::json status = nlohmann::json::array();
        for (size_t l = 0; l < nc.lines.size(); ++l) {
            std::vector<int> row(static_cast<size_t>(T));
            for (int t = 0; t < T; ++t)
                row[static_cast<size_t>(t)] = rec.line_status.empty()
                                                  ? 0
                                                  : rec.line_status[l * static_cast<size_t>(T) + static_cast<size_t>(t)];
            status.push_back({{"id", nc.lines[l].id}, {"status", row}});
        }
        j["line_status"] = status;
        nlohmann::json disp = nlohmann::json::array();
        for (size_t g = 0; g < nc.generators.size(); ++g) {
            std::vector<double> row(static_cast<size_t>(T));
            for (int t = 0; t < T; ++t)
                row[static_cast<size_t>(t)] =
                    rec.dispatch.empty() ? 0.0 : rec.dispatch[g * static_cast<size_t>(T) + static_cast<size_t>(t)];
            disp.push_back({{"id", nc.generators[g].id}, {"dispatch", row}});
        }
        j["dispatch"] = disp;
        j["realization"] = realization_to_json(nc, rec.realization);
        body += j.dump() + "\n";
    }
    detail::write_text_file(path, body);
}

inline void write_risk_csv(const std::string& path, const RiskReport& rep) {
    std::string body = "line_id,risk_of_operation\n";
    for (size_t l = 0; l < rep.line_ids.size(); ++l)
        body += std::to_string(rep.line_ids[l]) + "," + detail::csv_num(rep.risk_of_operation[l]) + "\n";
    detail::write_text_file(path, body);
}

inline void write_line_status_csv(const std::string& path, const RiskReport& rep) {
    std::string body = "line_id";
    for (int t = 0; t < rep.horizon; ++t) body += ",h" + std::to_string(t + 1);
    body += "\n";
    for (size_t l = 0; l < rep.line_ids.size(); ++l) {
        body += std::to_string(rep.line_ids[l]);
        for (int t = 0; t < rep.horizon; ++t)
            body += std::string(",") +
                    (rep.line_status[l * static_cast<size_t>(rep.horizon) + static_cast<size_t>(t)] ? "1" : "0");
        body += "\n";
    }
    detail::write_text_file(path, body);
}

inline void write_solve_summary_json(const std::string& path, const NetworkCase& nc,
                                     const CcgTrace& trace, const RiskReport& rep) {
    nlohmann::json j;
    j["case"] = nc.name;
    j["status"] = to_string(trace.status);
    j["iterations"] = trace.iterations;
    j["lower_bound"] = trace.final_lower_bound;
    j["upper_bound"] = trace.final_upper_bound;
    j["gap"] = trace.final_gap;
    j["operation_cost"] = rep.operation_cost;
    j["pct_lines_energized"] = rep.pct_lines_energized;
    j["pct_load_served"] = rep.pct_load_served;
    j["risk_intake_mode"] = to_string(nc.robust.risk_intake_mode);
    j["risk_tolerance"] = nc.robust.risk_tolerance;
    j["budget_of_uncertainty"] = nc.robust.budget_of_uncertainty;
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline std::string fixed_params_line(const NetworkCase& nc, const SweepSpec& spec) {
    std::string s = "# fixed: mode=" + std::string(to_string(nc.robust.risk_intake_mode)) +
                    " risk_tolerance=" + detail::csv_num(nc.robust.risk_tolerance) +
                    " budget=" + std::to_string(nc.robust.budget_of_uncertainty) +
                    " shed_penalty=" + detail::csv_num(nc.robust.shed_penalty) +
                    " gap=" + detail::csv_num(nc.robust.convergence_gap);
    if (spec.axis == SweepAxis::SolarMW) {
        s += " solar_buses=";
        for (size_t i = 0; i < spec.solar_buses.size(); ++i)
            s += (i ? "," : "") + std::to_string(spec.solar_buses[i]);
        s += " solar_deviation=" + detail::csv_num(spec.solar_deviation_fraction);
    }
    return s + "\n";
}

inline void write_sweep_csv(const std::string& path, const SweepResult& res,
                            const std::string& fixed_params = "") {
    std::string body =
        "value,solved,status,objective,lower_bound,gap,iterations,pct_lines_energized,pct_load_served,"
        "error\n";
    for (const auto& r : res.rows) {
        body += detail::csv_num(r.value);
        body += r.solved ? ",1," : ",0,";
        body += r.solved ? to_string(r.status) : "error";
        body += "," + detail::csv_num(r.objective) + "," + detail::csv_num(r.lower_bound) + "," +
                detail::csv_num(r.gap) + "," + std::to_string(r.iterations) + "," +
                detail::csv_num(r.pct_lines_energized) + "," + detail::csv_num(r.pct_load_served) + ",";
        std::string err = r.error;
        for (auto& c : err)
            if (c == ',' || c == '\n') c = ';';
        body += err + "\n";
    }
    body += fixed_params;
    const auto& s = res.summary;
    body += "# axis=" + std::string(to_string(s.axis)) +
            " expected=" + (s.expected > 0 ? std::string("non-decreasing") : std::string("non-increasing")) +
            " monotone=" + (s.monotone ? "true" : "false") +
            " worst_violation=" + detail::csv_num(s.worst_violation) +
            " solved=" + std::to_string(s.points_solved) + "/" + std::to_string(s.points_total) + "\n";
    detail::write_text_file(path, body);
}

inline void write_sweep_summary_json(const std::string& path, const SweepResult& res) {
    nlohmann::json j;
    j["axis"] = to_string(res.summary.axis);
    j["expected_direction"] = res.summary.expected > 0 ? "non-decreasing" : "non-increasing";
    j["monotone"] = res.summary.monotone;
    j["worst_violation"] = res.summary.worst_violation;
    j["points_solved"] = res.summary.points_solved;
    j["points_total"] = res.summary.points_total;
    detail::write_text_file(path, j.dump(2) + "\n");
}

}  // namespace embergrid
