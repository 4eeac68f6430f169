// Parameter sweeps over the robust solve: one axis, a grid of values, a
// fixed-parameter base case. Points run on a small worker pool; outputs are
// ordered by grid index regardless of completion order, and the monotonicity
// summary is computed from the emitted rows.

#pragma once

#include <atomic>
#include <thread>

#include "embergrid/risk.hpp"

namespace embergrid {

enum class SweepAxis { RiskTolerance, Budget, DeviationPct, SolarMW };

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::RiskTolerance: return "risk_tolerance";
        case SweepAxis::Budget: return "budget";
        case SweepAxis::DeviationPct: return "deviation_pct";
        default: return "solar_mw";
    }
}

inline SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "risk_tolerance") return SweepAxis::RiskTolerance;
    if (s == "budget") return SweepAxis::Budget;
    if (s == "deviation_pct") return SweepAxis::DeviationPct;
    if (s == "solar_mw") return SweepAxis::SolarMW;
    throw ValidationError("unknown sweep axis '" + s + "'");
}

/// Expected cost direction along the axis: -1 non-increasing, +1 non-decreasing.
inline int expected_direction(SweepAxis a) {
    switch (a) {
        case SweepAxis::RiskTolerance: return -1;  // larger tolerance relaxes the risk cap
        case SweepAxis::Budget: return 1;          // stronger adversary
        case SweepAxis::DeviationPct: return 1;    // wider deviations
        default: return -1;                        // more solar
    }
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::RiskTolerance;
    std::vector<double> values;
    std::vector<int> solar_buses{3, 4, 5, 6};  // SolarMW axis: capacity added per bus
    double solar_deviation_fraction = 0.10;

    void validate_spec() const {
        if (values.empty()) throw ValidationError("sweep: empty value grid");
        for (double v : values) {
            switch (axis) {
                case SweepAxis::RiskTolerance:
                    if (v < 0.0) throw ValidationError("sweep: risk_tolerance must be >= 0");
                    break;
                case SweepAxis::Budget:
                    if (v < 0.0 || v != std::floor(v))
                        throw ValidationError("sweep: budget values must be non-negative integers");
                    break;
                case SweepAxis::DeviationPct:
                    if (v < 0.0 || v > 100.0)
                        throw ValidationError("sweep: deviation_pct must be in [0,100]");
                    break;
                case SweepAxis::SolarMW:
                    if (v < 0.0) throw ValidationError("sweep: solar_mw must be >= 0");
                    break;
            }
        }
    }
};

struct SweepRow {
    double value = 0.0;
    bool solved = false;
    std::string error;
    double objective = 0.0;
    double lower_bound = 0.0;
    double gap = 0.0;
    CcgStatus status = CcgStatus::IterationLimit;
    int iterations = 0;
    double pct_lines_energized = 0.0;
    double pct_load_served = 0.0;
    double seconds = 0.0;
};

struct SweepSummary {
    SweepAxis axis = SweepAxis::RiskTolerance;
    int expected = 0;        // expected cost direction
    bool monotone = false;   // emitted objectives follow the expected direction
    double worst_violation = 0.0;
    int points_solved = 0;
    int points_total = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    SweepSummary summary;
};

inline NetworkCase apply_sweep_value(const NetworkCase& base, const SweepSpec& spec, double v) {
    NetworkCase nc = base;
    switch (spec.axis) {
        case SweepAxis::RiskTolerance: nc.robust.risk_tolerance = v; break;
        case SweepAxis::Budget: nc.robust.budget_of_uncertainty = static_cast<int>(v); break;
        case SweepAxis::DeviationPct: set_uniform_deviation(nc, v / 100.0); break;
        case SweepAxis::SolarMW: {
            std::map<int, double> siting;
            for (int b : spec.solar_buses) siting[b] = v;
            add_solar(nc, siting, spec.solar_deviation_fraction);
            break;
        }
    }
    validate(nc);
    return nc;
}

inline int sweep_worker_count() {
    if (const char* env = std::getenv("EMBERGRID_WORKERS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run the sweep; per-point failures are recorded in the row and the sweep
/// continues. The summary is derived from the rows afterwards.
inline SweepResult run_sweep(const NetworkCase& base, const SweepSpec& spec,
                             const CcgOptions& opts = {}, int workers = 0) {
    spec.validate_spec();
    validate(base);
    if (workers <= 0) workers = sweep_worker_count();
    SweepResult out;
    out.rows.assign(spec.values.size(), SweepRow{});

    std::atomic<size_t> next{0};
    auto work = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= spec.values.size()) return;
            SweepRow& row = out.rows[i];
            row.value = spec.values[i];
            auto t0 = std::chrono::steady_clock::now();
            try {
                NetworkCase nc = apply_sweep_value(base, spec, spec.values[i]);
                CcgResult r = run_ccg(nc, opts);
                RiskReport rep = quantify_line_risk(nc, r.plan);
                row.solved = true;
                row.objective = r.trace.final_upper_bound;
                row.lower_bound = r.trace.final_lower_bound;
                row.gap = r.trace.final_gap;
                row.status = r.trace.status;
                row.iterations = r.trace.iterations;
                row.pct_lines_energized = rep.pct_lines_energized;
                row.pct_load_served = rep.pct_load_served;
            } catch (const std::exception& e) {
                row.solved = false;
                row.error = e.what();
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers && w < static_cast<int>(spec.values.size()); ++w)
        pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    auto& s = out.summary;
    s.axis = spec.axis;
    s.expected = expected_direction(spec.axis);
    s.points_total = static_cast<int>(out.rows.size());
    s.monotone = true;
    const SweepRow* prev = nullptr;
    for (const auto& row : out.rows) {
        if (!row.solved) continue;
        ++s.points_solved;
        if (prev) {
            double step = row.objective - prev->objective;
            double viol = s.expected > 0 ? -step : step;
            double scale = 1e-6 * (1.0 + std::abs(prev->objective));
            if (viol > scale) {
                s.monotone = false;
                s.worst_violation = std::max(s.worst_violation, viol);
            }
        }
        prev = &row;
    }
    return out;
}

}  // namespace embergrid
