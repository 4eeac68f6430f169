// Case-file ingestion and serialization.
//
// A case is one JSON document with top-level keys `buses`, `lines`,
// `generators`, `solar`, `demands`, `horizon`, `robust_params` and optional
// `fire_scores`. Fire scores may also come from a CSV with header
// `line_id,hour,score`, one row per (line, hour).

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "embergrid/model.hpp"

namespace embergrid {

namespace detail {

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open case file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key)) throw ParseError(ctx + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(ctx + ": bad field '" + key + "': " + e.what());
    }
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace detail

/// Parse a fire-score CSV (`line_id,hour,score`); hours are 1-based in the
/// file and returned 0-based in the profile.
inline FireScoreProfile load_fire_scores_csv(const std::string& path, int horizon) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fire score file: " + path);
    FireScoreProfile prof;
    std::string header;
    if (!std::getline(in, header)) throw ParseError(path + ": empty fire score file");
    if (header.find("line_id") == std::string::npos)
        throw ParseError(path + ": expected header 'line_id,hour,score'");
    std::string row;
    int lineno = 1;
    while (std::getline(in, row)) {
        ++lineno;
        if (row.empty()) continue;
        std::istringstream ss(row);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 3 comma-separated fields");
        int line_id, hour;
        double score;
        try {
            line_id = std::stoi(a);
            hour = std::stoi(b);
            score = std::stod(c);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": non-numeric field");
        }
        if (hour < 1 || hour > horizon)
            throw ParseError(path + ":" + std::to_string(lineno) + ": hour " + std::to_string(hour) +
                             " outside 1.." + std::to_string(horizon));
        auto& v = prof.by_line[line_id];
        if (v.empty()) v.assign(static_cast<size_t>(horizon), -1.0);
        v[static_cast<size_t>(hour - 1)] = score;
    }
    for (const auto& [lid, v] : prof.by_line)
        for (int t = 0; t < horizon; ++t)
            if (v[static_cast<size_t>(t)] < 0.0)
                throw ParseError(path + ": missing score for line " + std::to_string(lid) + " hour " +
                                 std::to_string(t + 1));
    return prof;
}

inline void save_fire_scores_csv(const FireScoreProfile& prof, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write fire score file: " + path);
    out << "line_id,hour,score\n";
    char buf[64];
    for (const auto& [lid, v] : prof.by_line)
        for (size_t t = 0; t < v.size(); ++t) {
            std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g\n", lid, t + 1, v[t]);
            out << buf;
        }
}

inline nlohmann::json to_json(const NetworkCase& nc) {
    nlohmann::json j;
    j["name"] = nc.name;
    j["horizon"] = nc.horizon;
    j["buses"] = nlohmann::json::array();
    for (const auto& b : nc.buses) j["buses"].push_back({{"id", b.id}, {"reference", b.reference}});
    j["lines"] = nlohmann::json::array();
    for (const auto& l : nc.lines)
        j["lines"].push_back({{"id", l.id},
                              {"from_bus", l.from_bus},
                              {"to_bus", l.to_bus},
                              {"reactance", l.reactance},
                              {"flow_limit", l.flow_limit}});
    j["generators"] = nlohmann::json::array();
    for (const auto& g : nc.generators) {
        nlohmann::json segs = nlohmann::json::array();
        for (const auto& s : g.segments) segs.push_back({{"width", s.width}, {"marginal_cost", s.marginal_cost}});
        j["generators"].push_back(
            {{"id", g.id}, {"bus", g.bus}, {"p_min", g.p_min}, {"p_max", g.p_max}, {"segments", segs}});
    }
    j["solar"] = nlohmann::json::array();
    for (const auto& s : nc.solar_units)
        j["solar"].push_back(
            {{"id", s.id}, {"bus", s.bus}, {"nominal", s.nominal}, {"deviation", s.deviation}});
    j["demands"] = nlohmann::json::array();
    for (const auto& d : nc.demands)
        j["demands"].push_back({{"bus", d.bus}, {"nominal", d.nominal}, {"deviation", d.deviation}});
    nlohmann::json scores;
    for (const auto& [lid, v] : nc.fire_scores.by_line) scores[std::to_string(lid)] = v;
    j["fire_scores"] = scores;
    const auto& rp = nc.robust;
    j["robust_params"] = {{"risk_tolerance", rp.risk_tolerance},
                          {"risk_intake_mode", to_string(rp.risk_intake_mode)},
                          {"budget_of_uncertainty", rp.budget_of_uncertainty},
                          {"shed_penalty", rp.shed_penalty},
                          {"big_m", rp.big_m},
                          {"convergence_gap", rp.convergence_gap},
                          {"max_iterations", rp.max_iterations}};
    return j;
}

inline NetworkCase case_from_json(const nlohmann::json& j, const std::string& base_dir = "") {
    NetworkCase nc;
    nc.name = detail::get_or<std::string>(j, "name", "");
    nc.horizon = detail::get_field<int>(j, "horizon", "case");
    for (const auto& bj : detail::get_field<nlohmann::json>(j, "buses", "case")) {
        Bus b;
        b.id = detail::get_field<int>(bj, "id", "bus");
        b.reference = detail::get_or<bool>(bj, "reference", false);
        nc.buses.push_back(b);
    }
    for (const auto& lj : detail::get_field<nlohmann::json>(j, "lines", "case")) {
        Line l;
        l.id = detail::get_field<int>(lj, "id", "line");
        l.from_bus = detail::get_field<int>(lj, "from_bus", "line");
        l.to_bus = detail::get_field<int>(lj, "to_bus", "line");
        l.reactance = detail::get_field<double>(lj, "reactance", "line");
        l.flow_limit = detail::get_field<double>(lj, "flow_limit", "line");
        nc.lines.push_back(l);
    }
    for (const auto& gj : detail::get_field<nlohmann::json>(j, "generators", "case")) {
        Generator g;
        g.id = detail::get_field<int>(gj, "id", "generator");
        g.bus = detail::get_field<int>(gj, "bus", "generator");
        g.p_min = detail::get_field<double>(gj, "p_min", "generator");
        g.p_max = detail::get_field<double>(gj, "p_max", "generator");
        if (gj.contains("segments")) {
            for (const auto& sj : gj.at("segments"))
                g.segments.push_back({detail::get_field<double>(sj, "width", "segment"),
                                      detail::get_field<double>(sj, "marginal_cost", "segment")});
        } else if (gj.contains("quadratic")) {
            const auto& q = gj.at("quadratic");
            g.segments = segmentize_quadratic(
                detail::get_field<double>(q, "a", "quadratic"), detail::get_field<double>(q, "b", "quadratic"),
                detail::get_field<double>(q, "c", "quadratic"), g.p_min, g.p_max,
                detail::get_or<int>(q, "n_segments", 3));
        } else {
            throw ParseError("generator " + std::to_string(g.id) + ": needs 'segments' or 'quadratic'");
        }
        nc.generators.push_back(std::move(g));
    }
    if (j.contains("solar"))
        for (const auto& sj : j.at("solar")) {
            SolarUnit s;
            s.id = detail::get_field<int>(sj, "id", "solar");
            s.bus = detail::get_field<int>(sj, "bus", "solar");
            s.nominal = detail::get_field<std::vector<double>>(sj, "nominal", "solar");
            s.deviation = detail::get_or<std::vector<double>>(
                sj, "deviation", std::vector<double>(s.nominal.size(), 0.0));
            nc.solar_units.push_back(std::move(s));
        }
    for (const auto& dj : detail::get_field<nlohmann::json>(j, "demands", "case")) {
        DemandPoint d;
        d.bus = detail::get_field<int>(dj, "bus", "demand");
        d.nominal = detail::get_field<std::vector<double>>(dj, "nominal", "demand");
        d.deviation = detail::get_or<std::vector<double>>(
            dj, "deviation", std::vector<double>(d.nominal.size(), 0.0));
        nc.demands.push_back(std::move(d));
    }
    if (j.contains("fire_scores")) {
        const auto& fs = j.at("fire_scores");
        if (fs.is_string()) {
            std::string p = fs.get<std::string>();
            if (!base_dir.empty() && !p.empty() && p.front() != '/') p = base_dir + "/" + p;
            nc.fire_scores = load_fire_scores_csv(p, nc.horizon);
        } else if (fs.is_object()) {
            for (auto it = fs.begin(); it != fs.end(); ++it) {
                int lid;
                try {
                    lid = std::stoi(it.key());
                } catch (const std::exception&) {
                    throw ParseError("fire_scores: non-numeric line id '" + it.key() + "'");
                }
                nc.fire_scores.by_line[lid] = it.value().get<std::vector<double>>();
            }
        } else {
            throw ParseError("fire_scores must be a CSV path or an object of per-line arrays");
        }
    } else {
        for (const auto& l : nc.lines)
            nc.fire_scores.by_line[l.id] = std::vector<double>(static_cast<size_t>(nc.horizon), 0.0);
    }
    if (j.contains("robust_params")) {
        const auto& rj = j.at("robust_params");
        RobustParams rp;
        rp.risk_tolerance = detail::get_or<double>(rj, "risk_tolerance", rp.risk_tolerance);
        std::string mode = detail::get_or<std::string>(rj, "risk_intake_mode", "conservative");
        if (mode == "conservative") rp.risk_intake_mode = RiskIntakeMode::Conservative;
        else if (mode == "cumulative") rp.risk_intake_mode = RiskIntakeMode::Cumulative;
        else throw ParseError("robust_params: unknown risk_intake_mode '" + mode + "'");
        rp.budget_of_uncertainty = detail::get_or<int>(rj, "budget_of_uncertainty", rp.budget_of_uncertainty);
        rp.shed_penalty = detail::get_or<double>(rj, "shed_penalty", rp.shed_penalty);
        rp.big_m = detail::get_or<double>(rj, "big_m", rp.big_m);
        rp.convergence_gap = detail::get_or<double>(rj, "convergence_gap", rp.convergence_gap);
        rp.max_iterations = detail::get_or<int>(rj, "max_iterations", rp.max_iterations);
        nc.robust = rp;
    }
    canonicalize(nc);
    validate(nc);
    return nc;
}

/// Load and validate a case file; throws ParseError / ValidationError.
inline NetworkCase load_case(const std::string& path) {
    auto slash = path.find_last_of('/');
    std::string base_dir = slash == std::string::npos ? "" : path.substr(0, slash);
    return case_from_json(detail::load_json_file(path), base_dir);
}

inline void save_case(const NetworkCase& nc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write case file: " + path);
    out << to_json(nc).dump(2) << "\n";
}

inline bool cases_equal(const NetworkCase& a, const NetworkCase& b) {
    return to_json(a) == to_json(b);
}

}  // namespace embergrid
