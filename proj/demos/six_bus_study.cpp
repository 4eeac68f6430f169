// Build the 6-bus study system, attach synthetic ignition scores, run the
// robust solve at a few risk tolerances and print the hourly line status the
// way the study tables lay it out.

#include <cstdio>

#include "embergrid/embergrid.hpp"

using namespace embergrid;

int main() {
    NetworkCase nc = build_6bus_case();
    nc.fire_scores = generate_synthetic_scores(nc, default_6bus_synth(1));
    nc.robust.budget_of_uncertainty = 5;
    set_uniform_deviation(nc, 0.10);

    for (double tol : {0.0, 0.5, 1.0}) {
        nc.robust.risk_tolerance = tol;
        validate(nc);
        CcgResult r = run_ccg(nc);
        RiskReport rep = quantify_line_risk(nc, r.plan);
        std::printf("risk tolerance %.1f: objective $%.0f, %s in %d iterations\n", tol,
                    r.trace.final_upper_bound, to_string(r.trace.status), r.trace.iterations);
        std::printf("  %%lines energized %.1f, %%load served %.1f\n", rep.pct_lines_energized,
                    rep.pct_load_served);
        for (size_t l = 0; l < nc.lines.size(); ++l) {
            std::printf("  L%zu ", l + 1);
            for (int t = 0; t < nc.horizon; ++t) std::printf("%d", r.plan.on(l, t) ? 1 : 0);
            std::printf("  risk %.2f\n", rep.risk_of_operation[l]);
        }
    }
    return 0;
}
