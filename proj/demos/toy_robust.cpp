// Minimal end-to-end use of the library API on a hand-built 2-bus case:
// construct the network, run the decomposition, and cross-check the result
// against the exhaustive oracle.

#include <cstdio>

#include "embergrid/embergrid.hpp"

using namespace embergrid;

int main() {
    NetworkCase nc;
    nc.name = "toy2";
    nc.horizon = 3;
    nc.buses = {{1, true}, {2, false}};
    nc.lines = {{1, 1, 2, 0.1, 100.0}};
    nc.generators = {{1, 1, 0.0, 150.0, segmentize_quadratic(0.0, 18.0, 0.01, 0.0, 150.0, 3)}};
    nc.demands = {{2, {60.0, 80.0, 70.0}, {6.0, 8.0, 7.0}}};
    nc.fire_scores.by_line[1] = {0.0, 0.05, 0.2};
    nc.robust.shed_penalty = 500.0;
    nc.robust.risk_tolerance = 0.1;
    nc.robust.budget_of_uncertainty = 2;
    validate(nc);

    CcgResult r = run_ccg(nc);
    std::printf("status=%s iterations=%d objective=$%.2f gap=%.2g\n", to_string(r.trace.status),
                r.trace.iterations, r.trace.final_upper_bound, r.trace.final_gap);
    for (const auto& rec : r.trace.records)
        std::printf("  iter %d: LB=%.2f UB=%.2f worst-case indicators=%d\n", rec.iteration,
                    rec.lower_bound, rec.upper_bound, rec.realization.active_count());

    double oracle = robust_objective(nc, r.plan);
    std::printf("exhaustive robust cost of the plan: $%.2f (matches: %s)\n", oracle,
                std::abs(oracle - r.trace.final_upper_bound) <= 1e-6 * (1 + oracle) ? "yes" : "no");
    return 0;
}
