// Network data model for risk-aware line switching and robust dispatch.
//
// All quantities are in MW, per-unit reactance, $/MWh and dimensionless
// ignition scores in [0,1). Types are plain value types; a NetworkCase is
// immutable after validate() and safe to share across threads.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace embergrid {

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct Bus {
    int id = 0;
    bool reference = false;
};

struct Line {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance = 0.0;   // p.u., > 0
    double flow_limit = 0.0;  // MW, > 0
};

struct CostSegment {
    double width = 0.0;          // MW
    double marginal_cost = 0.0;  // $/MWh
};

struct Generator {
    int id = 0;
    int bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    std::vector<CostSegment> segments;

    double max_marginal_cost() const {
        double m = 0.0;
        for (const auto& s : segments) m = std::max(m, s.marginal_cost);
        return m;
    }
};

struct SolarUnit {
    int id = 0;
    int bus = 0;
    std::vector<double> nominal;    // MW availability per hour
    std::vector<double> deviation;  // MW per hour, >= 0, <= nominal
};

struct DemandPoint {
    int bus = 0;
    std::vector<double> nominal;    // MW per hour
    std::vector<double> deviation;  // MW per hour, >= 0, <= nominal
};

/// Per-line, per-hour ignition scores; every (line, hour) pair must be present.
struct FireScoreProfile {
    std::map<int, std::vector<double>> by_line;  // line id -> score per hour

    double at(int line_id, int hour) const {
        auto it = by_line.find(line_id);
        if (it == by_line.end() || hour < 0 || hour >= static_cast<int>(it->second.size()))
            throw std::out_of_range("fire score missing for line " + std::to_string(line_id) +
                                    " hour " + std::to_string(hour));
        return it->second[static_cast<size_t>(hour)];
    }

    bool empty() const { return by_line.empty(); }
};

enum class RiskIntakeMode { Conservative, Cumulative };

inline const char* to_string(RiskIntakeMode m) {
    return m == RiskIntakeMode::Conservative ? "conservative" : "cumulative";
}

struct RobustParams {
    double risk_tolerance = 0.5;                            // script-E cap on aggregated scores
    RiskIntakeMode risk_intake_mode = RiskIntakeMode::Conservative;
    int budget_of_uncertainty = 0;                          // E, max active deviation indicators
    double shed_penalty = 150.0;                            // K $/MWh
    double big_m = 0.0;                                     // 0 = derive from the case
    double convergence_gap = 1e-4;                          // epsilon_gap in (0,1)
    int max_iterations = 50;
};

struct NetworkCase {
    std::string name;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<SolarUnit> solar_units;
    std::vector<DemandPoint> demands;
    FireScoreProfile fire_scores;
    int horizon = 24;  // T hours
    RobustParams robust;

    int bus_index(int bus_id) const {
        for (size_t i = 0; i < buses.size(); ++i)
            if (buses[i].id == bus_id) return static_cast<int>(i);
        throw std::out_of_range("unknown bus id " + std::to_string(bus_id));
    }

    int reference_bus() const {
        for (const auto& b : buses)
            if (b.reference) return b.id;
        throw std::logic_error("no reference bus");
    }

    double total_generation_capacity() const {
        double c = 0.0;
        for (const auto& g : generators) c += g.p_max;
        return c;
    }

    double max_marginal_cost() const {
        double m = 0.0;
        for (const auto& g : generators) m = std::max(m, g.max_marginal_cost());
        return m;
    }

    /// MW flow on line l is base_mva * (theta_to - theta_fr) / x_l.
    static constexpr double base_mva = 100.0;
    /// Angle bound giving the switched flow-angle rows a finite valid big-M.
    static constexpr double angle_bound = M_PI;

    /// Valid big-M for the switched flow-angle rows:
    /// max_l (Pbar_l + 2 * angle_bound * base_mva / x_l).
    double derived_big_m() const {
        double m = 0.0;
        for (const auto& l : lines)
            m = std::max(m, l.flow_limit + 2.0 * angle_bound * base_mva / l.reactance);
        return m;
    }

    double effective_big_m() const { return robust.big_m > 0.0 ? robust.big_m : derived_big_m(); }

    double line_big_m(const Line& l) const {
        return std::min(effective_big_m(), l.flow_limit + 2.0 * angle_bound * base_mva / l.reactance);
    }
};

namespace detail {

inline void check(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

inline void check_profile(const std::vector<double>& nominal, const std::vector<double>& deviation,
                          int horizon, const std::string& who) {
    check(static_cast<int>(nominal.size()) == horizon,
          who + ": nominal profile length " + std::to_string(nominal.size()) +
              " does not match horizon " + std::to_string(horizon));
    check(static_cast<int>(deviation.size()) == horizon,
          who + ": deviation profile length " + std::to_string(deviation.size()) +
              " does not match horizon " + std::to_string(horizon));
    for (int t = 0; t < horizon; ++t) {
        check(nominal[static_cast<size_t>(t)] >= 0.0, who + ": negative nominal at hour " + std::to_string(t));
        check(deviation[static_cast<size_t>(t)] >= 0.0, who + ": negative deviation at hour " + std::to_string(t));
        check(deviation[static_cast<size_t>(t)] <= nominal[static_cast<size_t>(t)] + 1e-12,
              who + ": deviation exceeds nominal at hour " + std::to_string(t));
    }
}

}  // namespace detail

/// Sort entities by id and verify ids are unique and contiguous from 1.
inline void canonicalize(NetworkCase& nc) {
    auto by_id = [](auto& v) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    };
    by_id(nc.buses);
    by_id(nc.lines);
    by_id(nc.generators);
    by_id(nc.solar_units);
    std::sort(nc.demands.begin(), nc.demands.end(),
              [](const DemandPoint& a, const DemandPoint& b) { return a.bus < b.bus; });
}

/// Check every invariant of the case; throws ValidationError naming the
/// violated invariant and entity id.
inline void validate(const NetworkCase& nc) {
    using detail::check;
    check(nc.horizon >= 1, "horizon must be >= 1");
    check(!nc.buses.empty(), "case has no buses");

    std::set<int> bus_ids;
    int n_ref = 0;
    for (const auto& b : nc.buses) {
        check(bus_ids.insert(b.id).second, "duplicate bus id " + std::to_string(b.id));
        if (b.reference) ++n_ref;
    }
    for (size_t i = 0; i < nc.buses.size(); ++i)
        check(nc.buses[i].id == static_cast<int>(i) + 1,
              "bus ids not contiguous from 1 (found " + std::to_string(nc.buses[i].id) + ")");
    check(n_ref == 1, "exactly one reference bus required, found " + std::to_string(n_ref));

    std::set<int> line_ids;
    for (const auto& l : nc.lines) {
        const std::string who = "line " + std::to_string(l.id);
        check(line_ids.insert(l.id).second, "duplicate " + who);
        check(bus_ids.count(l.from_bus) == 1, who + ": unknown from_bus " + std::to_string(l.from_bus));
        check(bus_ids.count(l.to_bus) == 1, who + ": unknown to_bus " + std::to_string(l.to_bus));
        check(l.from_bus != l.to_bus, who + ": from_bus equals to_bus");
        check(l.reactance > 0.0, who + ": reactance must be > 0");
        check(l.flow_limit > 0.0, who + ": flow limit must be > 0");
    }

    std::set<int> gen_ids;
    for (const auto& g : nc.generators) {
        const std::string who = "generator " + std::to_string(g.id);
        check(gen_ids.insert(g.id).second, "duplicate " + who);
        check(bus_ids.count(g.bus) == 1, who + ": unknown bus " + std::to_string(g.bus));
        check(g.p_min >= 0.0 && g.p_min <= g.p_max, who + ": requires 0 <= p_min <= p_max");
        check(!g.segments.empty(), who + ": needs at least one cost segment");
        double width_sum = 0.0, prev = -1e300;
        for (const auto& s : g.segments) {
            check(s.width > 0.0, who + ": segment width must be > 0");
            check(s.marginal_cost >= prev - 1e-9, who + ": segment marginal costs must be non-decreasing");
            prev = s.marginal_cost;
            width_sum += s.width;
        }
        check(width_sum >= g.p_max - 1e-6, who + ": segment widths must cover p_max");
    }

    std::set<int> solar_ids;
    for (const auto& s : nc.solar_units) {
        const std::string who = "solar " + std::to_string(s.id);
        check(solar_ids.insert(s.id).second, "duplicate " + who);
        check(bus_ids.count(s.bus) == 1, who + ": unknown bus " + std::to_string(s.bus));
        detail::check_profile(s.nominal, s.deviation, nc.horizon, who);
    }

    std::set<int> demand_buses;
    for (const auto& d : nc.demands) {
        const std::string who = "demand at bus " + std::to_string(d.bus);
        check(bus_ids.count(d.bus) == 1, who + ": unknown bus");
        check(demand_buses.insert(d.bus).second, "duplicate " + who);
        detail::check_profile(d.nominal, d.deviation, nc.horizon, who);
    }

    for (const auto& l : nc.lines) {
        const std::string who = "fire scores for line " + std::to_string(l.id);
        auto it = nc.fire_scores.by_line.find(l.id);
        check(it != nc.fire_scores.by_line.end(), who + " missing");
        check(static_cast<int>(it->second.size()) == nc.horizon,
              who + ": profile length " + std::to_string(it->second.size()) +
                  " does not match horizon " + std::to_string(nc.horizon));
        for (int t = 0; t < nc.horizon; ++t) {
            double psi = it->second[static_cast<size_t>(t)];
            check(psi >= 0.0 && psi < 1.0, who + ": score out of [0,1) at hour " + std::to_string(t));
        }
    }
    for (const auto& [lid, _] : nc.fire_scores.by_line)
        check(line_ids.count(lid) == 1, "fire scores reference unknown line " + std::to_string(lid));

    const auto& rp = nc.robust;
    check(rp.risk_tolerance >= 0.0, "risk_tolerance must be >= 0");
    check(rp.budget_of_uncertainty >= 0, "budget_of_uncertainty must be >= 0");
    check(rp.shed_penalty > 0.0, "shed_penalty must be > 0");
    check(rp.shed_penalty > nc.max_marginal_cost(),
          "shed_penalty K must exceed the largest generator marginal cost");
    check(rp.convergence_gap > 0.0 && rp.convergence_gap < 1.0, "convergence_gap must be in (0,1)");
    check(rp.max_iterations >= 1, "max_iterations must be >= 1");
    if (rp.big_m > 0.0)
        check(rp.big_m >= nc.derived_big_m() - 1e-9,
              "big_M too small: must be >= max_l (flow_limit + 2*pi/x_l) = " +
                  std::to_string(nc.derived_big_m()));

    // Connectivity with all lines energized.
    if (!nc.lines.empty() || nc.buses.size() > 1) {
        std::vector<char> seen(nc.buses.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            int id = nc.buses[static_cast<size_t>(i)].id;
            for (const auto& l : nc.lines) {
                int other = -1;
                if (l.from_bus == id) other = l.to_bus;
                else if (l.to_bus == id) other = l.from_bus;
                if (other < 0) continue;
                int oi = nc.bus_index(other);
                if (!seen[static_cast<size_t>(oi)]) {
                    seen[static_cast<size_t>(oi)] = 1;
                    stack.push_back(oi);
                }
            }
        }
        for (size_t i = 0; i < seen.size(); ++i)
            check(seen[i] == 1, "bus " + std::to_string(nc.buses[i].id) +
                                    " disconnected with all lines energized");
    }
}

/// Piecewise-linear segments of a quadratic cost a + b*P + c*P^2 over [0, p_max]:
/// equal widths, marginal cost = average marginal of the quadratic over the
/// segment (b + 2c * midpoint). Rejects non-convex (c < 0) input.
inline std::vector<CostSegment> segmentize_quadratic(double a, double b, double c, double p_min,
                                                     double p_max, int n_segments) {
    (void)a;  // fixed cost is not part of the dispatch objective
    if (c < 0.0) throw ValidationError("segmentize_quadratic: negative quadratic coefficient (non-convex)");
    if (n_segments < 1) throw ValidationError("segmentize_quadratic: n_segments must be >= 1");
    if (!(p_min <= p_max)) throw ValidationError("segmentize_quadratic: p_min must be <= p_max");
    if (p_max <= 0.0) throw ValidationError("segmentize_quadratic: p_max must be > 0");
    std::vector<CostSegment> segs;
    const double w = p_max / n_segments;
    for (int k = 0; k < n_segments; ++k) {
        const double mid = (k + 0.5) * w;
        segs.push_back({w, b + 2.0 * c * mid});
    }
    return segs;
}

/// Evaluate the segmentized variable cost of dispatching p (fills segments in order).
inline double segment_cost(const std::vector<CostSegment>& segs, double p) {
    double cost = 0.0, left = p;
    for (const auto& s : segs) {
        double take = std::min(left, s.width);
        if (take <= 0.0) break;
        cost += take * s.marginal_cost;
        left -= take;
    }
    return cost;
}

/// The 6-bus study system: 3 generation units, 7 lines, demand at buses 3, 4
/// and 5 set to 20/40/40 percent of the 360 MW total capacity, 3-segment
/// piecewise cost curves. Fire scores default to zero.
inline NetworkCase build_6bus_case() {
    NetworkCase nc;
    nc.name = "case6";
    nc.horizon = 24;
    nc.buses = {{1, true}, {2, false}, {3, false}, {4, false}, {5, false}, {6, false}};
    nc.lines = {
        {1, 1, 2, 0.170, 200.0}, {2, 2, 3, 0.037, 100.0}, {3, 1, 4, 0.258, 100.0},
        {4, 2, 4, 0.197, 100.0}, {5, 4, 5, 0.037, 100.0}, {6, 5, 6, 0.140, 100.0},
        {7, 3, 6, 0.018, 100.0},
    };
    nc.generators = {
        {1, 1, 100.0, 220.0, segmentize_quadratic(177.0, 13.5, 0.00045, 100.0, 220.0, 3)},
        {2, 2, 10.0, 100.0, segmentize_quadratic(130.0, 40.0, 0.001, 10.0, 100.0, 3)},
        {3, 3, 10.0, 40.0, segmentize_quadratic(137.0, 17.7, 0.005, 10.0, 40.0, 3)},
    };
    const double cap = nc.total_generation_capacity();  // 360 MW
    auto flat = [&](double mw) { return std::vector<double>(static_cast<size_t>(nc.horizon), mw); };
    auto zeros = [&]() { return std::vector<double>(static_cast<size_t>(nc.horizon), 0.0); };
    nc.demands = {
        {3, flat(0.20 * cap), zeros()},
        {4, flat(0.40 * cap), zeros()},
        {5, flat(0.40 * cap), zeros()},
    };
    for (const auto& l : nc.lines) nc.fire_scores.by_line[l.id] = zeros();
    nc.robust = RobustParams{};
    return nc;
}

/// Set every demand and solar deviation to `fraction` of its nominal profile.
inline void set_uniform_deviation(NetworkCase& nc, double fraction) {
    if (fraction < 0.0 || fraction > 1.0)
        throw ValidationError("deviation fraction must be in [0,1]");
    for (auto& d : nc.demands)
        for (int t = 0; t < nc.horizon; ++t)
            d.deviation[static_cast<size_t>(t)] = fraction * d.nominal[static_cast<size_t>(t)];
    for (auto& s : nc.solar_units)
        for (int t = 0; t < nc.horizon; ++t)
            s.deviation[static_cast<size_t>(t)] = fraction * s.nominal[static_cast<size_t>(t)];
}

/// Deterministic daylight availability shape (zero at night, bell over hours
/// 6..18, peak 1.0 at hour 12) used when siting solar by capacity.
inline double solar_shape(int hour_of_day) {
    int h = hour_of_day % 24;
    if (h < 6 || h > 18) return 0.0;
    double x = (h - 12.0) / 6.0;
    return std::max(0.0, 1.0 - x * x);
}

/// Add solar units (capacity in MW per bus) with the standard daylight shape.
/// Deviations are set to `deviation_fraction` of nominal.
inline void add_solar(NetworkCase& nc, const std::map<int, double>& capacity_by_bus,
                      double deviation_fraction = 0.0) {
    int next_id = 1;
    for (const auto& s : nc.solar_units) next_id = std::max(next_id, s.id + 1);
    for (const auto& [bus, mw] : capacity_by_bus) {
        if (mw < 0.0) throw ValidationError("solar capacity must be >= 0");
        SolarUnit s;
        s.id = next_id++;
        s.bus = bus;
        s.nominal.resize(static_cast<size_t>(nc.horizon));
        s.deviation.resize(static_cast<size_t>(nc.horizon));
        for (int t = 0; t < nc.horizon; ++t) {
            s.nominal[static_cast<size_t>(t)] = mw * solar_shape(t);
            s.deviation[static_cast<size_t>(t)] = deviation_fraction * s.nominal[static_cast<size_t>(t)];
        }
        nc.solar_units.push_back(std::move(s));
    }
}

inline void remove_generator(NetworkCase& nc, int gen_id) {
    auto it = std::remove_if(nc.generators.begin(), nc.generators.end(),
                             [&](const Generator& g) { return g.id == gen_id; });
    if (it == nc.generators.end())
        throw ValidationError("remove_generator: unknown generator " + std::to_string(gen_id));
    nc.generators.erase(it, nc.generators.end());
}

}  // namespace embergrid
