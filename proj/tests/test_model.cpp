#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace embergrid;

TEST_CASE("segmentize_quadratic splits the study coefficients") {
    // G3 row of the study data: a=137, b=17.7, c=0.005, p_max=40, 3 segments.
    auto segs = segmentize_quadratic(137.0, 17.7, 0.005, 10.0, 40.0, 3);
    REQUIRE(segs.size() == 3);
    for (const auto& s : segs) CHECK(s.width == Catch::Approx(40.0 / 3.0));
    // Oracle: average marginal cost of the quadratic over [L,R] is the
    // difference quotient (b + c*(L+R)), frozen from finite differences.
    auto quad = [](double b, double c, double p) { return b * p + c * p * p; };
    for (int k = 0; k < 3; ++k) {
        double L = k * 40.0 / 3.0, R = (k + 1) * 40.0 / 3.0;
        double oracle = (quad(17.7, 0.005, R) - quad(17.7, 0.005, L)) / (R - L);
        CHECK(segs[static_cast<size_t>(k)].marginal_cost == Catch::Approx(oracle).epsilon(1e-12));
    }
    CHECK(segs[0].marginal_cost == Catch::Approx(17.7 + 2 * 0.005 * (40.0 / 6.0)));
    CHECK(segs[1].marginal_cost == Catch::Approx(17.9));
    CHECK(segs[2].marginal_cost == Catch::Approx(17.7 + 2 * 0.005 * (200.0 / 6.0)));
}

TEST_CASE("segmentize_quadratic edge shapes") {
    auto linear = segmentize_quadratic(5.0, 12.0, 0.0, 0.0, 90.0, 3);
    for (const auto& s : linear) CHECK(s.marginal_cost == Catch::Approx(12.0));

    auto single = segmentize_quadratic(0.0, 8.0, 0.01, 0.0, 50.0, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].width == Catch::Approx(50.0));
    CHECK(single[0].marginal_cost == Catch::Approx(8.0 + 0.01 * 50.0));  // average slope over [0,p_max]

    CHECK_THROWS_AS(segmentize_quadratic(0.0, 10.0, -0.1, 0.0, 10.0, 3), ValidationError);
    CHECK_THROWS_AS(segmentize_quadratic(0.0, 10.0, 0.1, 20.0, 10.0, 3), ValidationError);
}

TEST_CASE("segmentized cost tracks the quadratic within 5 percent") {
    // All three study generators, variable part only.
    struct Row { double a, b, c, pmin, pmax; };
    for (const Row& r : {Row{177.0, 13.5, 0.00045, 100.0, 220.0}, Row{130.0, 40.0, 0.001, 10.0, 100.0},
                         Row{137.0, 17.7, 0.005, 10.0, 40.0}}) {
        auto segs = segmentize_quadratic(r.a, r.b, r.c, r.pmin, r.pmax, 3);
        for (int i = 0; i <= 20; ++i) {
            double p = r.pmax * i / 20.0;
            double exact = r.b * p + r.c * p * p;
            double approx = segment_cost(segs, p);
            if (exact > 1e-9) CHECK(std::abs(approx - exact) / exact <= 0.05);
        }
    }
}

TEST_CASE("6-bus case matches the study data") {
    NetworkCase nc = build_6bus_case();
    REQUIRE_NOTHROW(validate(nc));
    REQUIRE(nc.lines.size() == 7);
    REQUIRE(nc.generators.size() == 3);
    CHECK(nc.lines[0].flow_limit == 200.0);       // L1 rating
    CHECK(nc.lines[1].reactance == 0.037);        // L2 impedance
    CHECK(nc.lines[6].from_bus == 3);
    CHECK(nc.lines[6].to_bus == 6);
    CHECK(nc.generators[0].p_min == 100.0);
    CHECK(nc.generators[0].p_max == 220.0);
    CHECK(nc.generators[2].p_max == 40.0);
    CHECK(nc.total_generation_capacity() == Catch::Approx(360.0));
    // Demands are 20/40/40 percent of total capacity at buses 3, 4, 5.
    REQUIRE(nc.demands.size() == 3);
    CHECK(nc.demands[0].bus == 3);
    CHECK(nc.demands[0].nominal[0] == Catch::Approx(72.0));
    CHECK(nc.demands[1].bus == 4);
    CHECK(nc.demands[1].nominal[0] == Catch::Approx(144.0));
    CHECK(nc.demands[2].nominal[23] == Catch::Approx(144.0));
    CHECK(nc.horizon == 24);
}

TEST_CASE("validation names the violated invariant") {
    auto nc = build_6bus_case();
    SECTION("zero reactance") {
        nc.lines[2].reactance = 0.0;
        CHECK_THROWS_WITH(validate(nc), Catch::Matchers::ContainsSubstring("line 3") &&
                                            Catch::Matchers::ContainsSubstring("reactance"));
    }
    SECTION("profile length mismatch") {
        nc.demands[1].nominal.resize(23);
        CHECK_THROWS_WITH(validate(nc), Catch::Matchers::ContainsSubstring("bus 4") &&
                                            Catch::Matchers::ContainsSubstring("23"));
    }
    SECTION("two reference buses") {
        nc.buses[1].reference = true;
        CHECK_THROWS_WITH(validate(nc), Catch::Matchers::ContainsSubstring("reference"));
    }
    SECTION("deviation above nominal") {
        nc.demands[0].deviation[5] = nc.demands[0].nominal[5] + 1.0;
        CHECK_THROWS_WITH(validate(nc), Catch::Matchers::ContainsSubstring("deviation"));
    }
    SECTION("score out of range") {
        nc.fire_scores.by_line[4][7] = 1.0;
        CHECK_THROWS_WITH(validate(nc), Catch::Matchers::ContainsSubstring("[0,1)"));
    }
    SECTION("shed penalty below the marginal cost") {
        nc.robust.shed_penalty = 20.0;
        CHECK_THROWS_WITH(validate(nc), Catch::Matchers::ContainsSubstring("shed_penalty"));
    }
    SECTION("disconnected bus") {
        nc.lines.erase(nc.lines.begin() + 5, nc.lines.begin() + 7);  // drop L6, L7: bus 6 floats
        nc.fire_scores.by_line.erase(6);
        nc.fire_scores.by_line.erase(7);
        CHECK_THROWS_WITH(validate(nc), Catch::Matchers::ContainsSubstring("disconnected"));
    }
}

TEST_CASE("solar integration helpers") {
    auto nc = build_6bus_case();
    add_solar(nc, {{3, 50.0}, {5, 25.0}}, 0.10);
    REQUIRE(nc.solar_units.size() == 2);
    CHECK(nc.solar_units[0].bus == 3);
    CHECK(nc.solar_units[0].nominal[12] == Catch::Approx(50.0));  // peak of the daylight shape
    CHECK(nc.solar_units[0].nominal[0] == 0.0);
    CHECK(nc.solar_units[0].deviation[12] == Catch::Approx(5.0));
    REQUIRE_NOTHROW(validate(nc));

    remove_generator(nc, 3);
    CHECK(nc.generators.size() == 2);
    CHECK_THROWS_AS(remove_generator(nc, 99), ValidationError);

    set_uniform_deviation(nc, 0.2);
    CHECK(nc.demands[0].deviation[3] == Catch::Approx(0.2 * 72.0));
}
