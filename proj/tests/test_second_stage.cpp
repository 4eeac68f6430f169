#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace embergrid;
using egtest::toy2;

TEST_CASE("realizations apply the deviation bookkeeping") {
    auto nc = toy2(2, 50.0, 0.10, 1);
    auto nominal = nominal_realization(nc);
    CHECK(nominal.active_count() == 0);
    CHECK(nominal.realized_demand[0] == Catch::Approx(50.0));

    auto up = realization_from_indicators(nc, {1, 0}, {});
    CHECK(up.active_count() == 1);
    CHECK(up.realized_demand[0] == Catch::Approx(55.0));
    CHECK(up.realized_demand[1] == Catch::Approx(50.0));
    CHECK(up.same_vertex(up));
    CHECK(!up.same_vertex(nominal));
}

TEST_CASE("recourse dispatch serves what the energized network can carry") {
    auto nc = toy2(2, 50.0, 0.0, 0);
    SECTION("line on: full service at generation cost") {
        auto ev = evaluate_recourse(nc, {1, 1}, nominal_realization(nc));
        REQUIRE(ev.status == LpStatus::Optimal);
        CHECK(ev.cost == Catch::Approx(2.0 * 50.0 * 20.0));
    }
    SECTION("line off: everything sheds") {
        auto ev = evaluate_recourse(nc, {0, 0}, nominal_realization(nc));
        REQUIRE(ev.status == LpStatus::Optimal);
        CHECK(ev.cost == Catch::Approx(2.0 * 50.0 * 1000.0));
    }
    SECTION("flow cap binds: remainder sheds") {
        auto big = toy2(1, 150.0, 0.0, 0);  // demand above the 100 MW line cap
        auto ev = evaluate_recourse(big, {1}, nominal_realization(big));
        REQUIRE(ev.status == LpStatus::Optimal);
        CHECK(ev.cost == Catch::Approx(100.0 * 20.0 + 50.0 * 1000.0));
    }
}

TEST_CASE("feasibility survives every adversarial direction") {
    // Demand moves up and solar moves down; a plan feasible at nominal stays
    // feasible for every realization the worst case can propose.
    auto nc = toy2(2, 50.0, 0.20, 4);
    nc.solar_units = {{1, 2, {30.0, 30.0}, {10.0, 10.0}}};
    validate(nc);
    for (int mask = 0; mask < 4; ++mask) {
        for (int smask = 0; smask < 4; ++smask) {
            auto real = realization_from_indicators(
                nc, {uint8_t(mask & 1), uint8_t(mask >> 1)}, {uint8_t(smask & 1), uint8_t(smask >> 1)});
            auto ev = evaluate_recourse(nc, {1, 1}, real);
            CHECK(ev.status == LpStatus::Optimal);
            auto off = evaluate_recourse(nc, {0, 0}, real);
            CHECK(off.status == LpStatus::Optimal);
        }
    }
}

TEST_CASE("must-run generation can trap an island") {
    auto nc = toy2(1, 50.0, 0.0, 0);
    nc.generators[0].p_min = 10.0;  // bus 1 has no demand: line off is infeasible
    validate(nc);
    auto off = evaluate_recourse(nc, {0}, nominal_realization(nc));
    CHECK(off.status == LpStatus::Infeasible);
    auto on = evaluate_recourse(nc, {1}, nominal_realization(nc));
    CHECK(on.status == LpStatus::Optimal);
}

TEST_CASE("hourly decomposition totals match the full recourse LP") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        auto nc = egtest::random_toy(rng);
        const int T = nc.horizon;
        std::vector<uint8_t> status(nc.lines.size() * static_cast<size_t>(T), 0);
        for (auto& b : status) b = rng() % 2;
        auto real = nominal_realization(nc);
        auto full = evaluate_recourse(nc, status, real);
        double sum = 0.0;
        bool all_ok = true;
        for (int t = 0; t < T; ++t) {
            uint32_t mask = 0;
            for (size_t l = 0; l < nc.lines.size(); ++l)
                if (status[l * static_cast<size_t>(T) + static_cast<size_t>(t)]) mask |= uint32_t(1) << l;
            LinearProgram lp;
            build_hour_recourse_lp(lp, nc, t, mask, real);
            auto s = solve_lp(lp);
            all_ok &= s.status == LpStatus::Optimal;
            if (s.status == LpStatus::Optimal) sum += s.objective;
        }
        REQUIRE(all_ok == (full.status == LpStatus::Optimal));
        if (all_ok) CHECK(full.cost == Catch::Approx(sum).margin(1e-6 * (1.0 + std::abs(sum))));
    }
}
