#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace embergrid;
using egtest::toy2;

TEST_CASE("risk of operation counts only energized hours") {
    auto nc = toy2(24, 50.0, 0.0, 0, 0.05);
    SECTION("all lines off: zero risk everywhere") {
        FirstStageSolution plan;
        plan.horizon = 24;
        plan.line_ids = {1};
        plan.line_status.assign(24, 0);
        plan.scores.assign(24, 0.0);
        plan.served_demand.assign(24, 0.0);
        auto rep = quantify_line_risk(nc, plan);
        CHECK(rep.risk_of_operation[0] == 0.0);
        CHECK(rep.pct_lines_energized == 0.0);
    }
    SECTION("a line energized all day at constant score 0.05 accrues 1.2") {
        nc.robust.risk_tolerance = 2.0;
        validate(nc);
        auto r = run_ccg(nc);
        auto rep = quantify_line_risk(nc, r.plan);
        CHECK(rep.risk_of_operation[0] == Catch::Approx(24.0 * 0.05));
        CHECK(rep.pct_lines_energized == 100.0);
        CHECK(rep.pct_load_served == Catch::Approx(100.0));
    }
}

TEST_CASE("zero tolerance zeroes the whole risk table") {
    auto nc = build_6bus_case();
    nc.fire_scores = generate_synthetic_scores(nc, default_6bus_synth(1));
    nc.robust.risk_tolerance = 0.0;
    validate(nc);
    auto r = run_ccg(nc);
    auto rep = quantify_line_risk(nc, r.plan);
    for (double risk : rep.risk_of_operation) CHECK(risk == 0.0);
}

TEST_CASE("conservative optimum never exceeds the cumulative one at equal tolerance") {
    for (unsigned seed : {1u, 2u, 3u}) {
        auto nc = build_6bus_case();
        nc.fire_scores = generate_synthetic_scores(nc, default_6bus_synth(seed));
        nc.robust.risk_tolerance = 0.4;
        nc.robust.budget_of_uncertainty = 2;
        set_uniform_deviation(nc, 0.10);
        nc.robust.risk_intake_mode = RiskIntakeMode::Conservative;
        validate(nc);
        auto cons = run_ccg(nc);
        nc.robust.risk_intake_mode = RiskIntakeMode::Cumulative;
        auto cum = run_ccg(nc);
        CHECK(cons.trace.final_upper_bound <=
              cum.trace.final_upper_bound + 1e-6 * (1.0 + cum.trace.final_upper_bound));
    }
}

TEST_CASE("solar siting comparison plumbing") {
    auto nc = toy2(2, 50.0, 0.0, 0);
    SECTION("zero solar in all sitings gives identical costs") {
        auto rows = compare_solar_siting(nc, 0.0, {{"a", {{1, 0.0}}}, {"b", {{2, 0.0}}}});
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].operation_cost == Catch::Approx(rows[2].operation_cost));
        CHECK(rows[1].operation_cost == Catch::Approx(rows[3].operation_cost));
    }
    SECTION("generator-only bus accepted like any other") {
        auto rows = compare_solar_siting(nc, 10.0, {{"gen-bus", {{1, 10.0}}}});
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].status == CcgStatus::Converged);
    }
    SECTION("unknown bus and wrong totals rejected") {
        CHECK_THROWS_AS(compare_solar_siting(nc, 10.0, {{"bad", {{9, 10.0}}}}), ValidationError);
        CHECK_THROWS_AS(compare_solar_siting(nc, 10.0, {{"short", {{1, 5.0}}}}), ValidationError);
    }
}

TEST_CASE("solar capacity never raises the cost at a fixed siting shape") {
    auto nc = build_6bus_case();
    nc.fire_scores = generate_synthetic_scores(nc, default_6bus_synth(2));
    nc.robust.risk_tolerance = 0.3;
    nc.robust.budget_of_uncertainty = 2;
    set_uniform_deviation(nc, 0.10);
    double prev = kInf;
    for (double mw : {0.0, 25.0, 50.0}) {
        auto with = nc;
        add_solar(with, {{3, mw}, {4, mw}, {5, mw}, {6, mw}}, 0.10);
        validate(with);
        auto r = run_ccg(with);
        REQUIRE(r.trace.status == CcgStatus::Converged);
        CHECK(r.trace.final_upper_bound <= prev + 1e-6 * (1.0 + std::abs(prev)));
        prev = r.trace.final_upper_bound;
    }
}
