// Shared toy-case builders for the test suites.

#pragma once

#include <random>

#include "embergrid/embergrid.hpp"

namespace egtest {

using namespace embergrid;

// Generator-at-bus-1, demand-at-bus-2 two-bus case.
inline NetworkCase toy2(int horizon, double demand_mw, double deviation_fraction, int budget,
                        double line_score = 0.0, double shed_penalty = 1000.0) {
    NetworkCase nc;
    nc.name = "toy2";
    nc.horizon = horizon;
    nc.buses = {{1, true}, {2, false}};
    nc.lines = {{1, 1, 2, 0.1, 100.0}};
    nc.generators = {{1, 1, 0.0, 200.0, {{200.0, 20.0}}}};
    std::vector<double> nom(static_cast<size_t>(horizon), demand_mw);
    std::vector<double> dev(static_cast<size_t>(horizon), deviation_fraction * demand_mw);
    nc.demands = {{2, nom, dev}};
    nc.fire_scores.by_line[1] = std::vector<double>(static_cast<size_t>(horizon), line_score);
    nc.robust.shed_penalty = shed_penalty;
    nc.robust.budget_of_uncertainty = budget;
    nc.robust.risk_tolerance = 0.5;
    canonicalize(nc);
    validate(nc);
    return nc;
}

// Single-bus case: one generator and one co-located demand, no lines.
inline NetworkCase toy1(int horizon, double demand_mw, double deviation_mw, int budget,
                        double marginal_cost = 20.0, double shed_penalty = 1000.0) {
    NetworkCase nc;
    nc.name = "toy1";
    nc.horizon = horizon;
    nc.buses = {{1, true}};
    nc.generators = {{1, 1, 0.0, 10.0 * demand_mw + 100.0, {{10.0 * demand_mw + 100.0, marginal_cost}}}};
    std::vector<double> nom(static_cast<size_t>(horizon), demand_mw);
    std::vector<double> dev(static_cast<size_t>(horizon), deviation_mw);
    nc.demands = {{1, nom, dev}};
    nc.robust.shed_penalty = shed_penalty;
    nc.robust.budget_of_uncertainty = budget;
    validate(nc);
    return nc;
}

// Random small case on 3-4 buses with a couple of lines, seeded.
inline NetworkCase random_toy(std::mt19937& rng, int max_horizon = 3) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    NetworkCase nc;
    nc.name = "random_toy";
    nc.horizon = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_horizon));
    int nbus = 2 + static_cast<int>(rng() % 3);
    for (int b = 1; b <= nbus; ++b) nc.buses.push_back({b, b == 1});
    // A spanning path plus an optional chord keeps the case connected.
    int lid = 1;
    for (int b = 1; b < nbus; ++b)
        nc.lines.push_back({lid++, b, b + 1, 0.05 + 0.2 * U(rng), 40.0 + 60.0 * U(rng)});
    if (nbus >= 3 && rng() % 2)
        nc.lines.push_back({lid++, 1, nbus, 0.05 + 0.2 * U(rng), 40.0 + 60.0 * U(rng)});
    int ngen = 1 + static_cast<int>(rng() % 2);
    for (int g = 1; g <= ngen; ++g) {
        double cap = 60.0 + 120.0 * U(rng);
        int segs = 1 + static_cast<int>(rng() % 3);
        nc.generators.push_back({g, 1 + static_cast<int>(rng() % static_cast<unsigned>(nbus)), 0.0, cap,
                                 segmentize_quadratic(0.0, 10.0 + 25.0 * U(rng), 0.05 * U(rng), 0.0, cap, segs)});
    }
    int ndem = 1 + static_cast<int>(rng() % 2);
    std::set<int> used;
    for (int d = 0; d < ndem; ++d) {
        int bus = 1 + static_cast<int>(rng() % static_cast<unsigned>(nbus));
        if (!used.insert(bus).second) continue;
        std::vector<double> nom, dev;
        for (int t = 0; t < nc.horizon; ++t) {
            double n = 15.0 + 50.0 * U(rng);
            nom.push_back(n);
            dev.push_back(rng() % 3 == 0 ? 0.0 : (0.05 + 0.2 * U(rng)) * n);
        }
        nc.demands.push_back({bus, nom, dev});
    }
    if (rng() % 2) {
        std::vector<double> nom, dev;
        for (int t = 0; t < nc.horizon; ++t) {
            double n = 30.0 * U(rng);
            nom.push_back(n);
            dev.push_back(0.2 * n);
        }
        nc.solar_units.push_back({1, 1 + static_cast<int>(rng() % static_cast<unsigned>(nbus)), nom, dev});
    }
    for (const auto& l : nc.lines) {
        std::vector<double> psi;
        for (int t = 0; t < nc.horizon; ++t) psi.push_back(rng() % 3 == 0 ? 0.0 : 0.4 * U(rng));
        nc.fire_scores.by_line[l.id] = psi;
    }
    nc.robust.shed_penalty = 500.0;
    nc.robust.risk_tolerance = 0.1 + 0.5 * U(rng);
    nc.robust.budget_of_uncertainty = static_cast<int>(rng() % 3);
    validate(nc);
    return nc;
}

}  // namespace egtest
