#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "test_helpers.hpp"

using namespace embergrid;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("embergrid_io_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("case JSON round-trip") {
    TempDir tmp;
    auto nc = build_6bus_case();
    nc.fire_scores = generate_synthetic_scores(nc, default_6bus_synth(3));
    add_solar(nc, {{4, 30.0}}, 0.15);
    set_uniform_deviation(nc, 0.1);
    nc.robust.risk_intake_mode = RiskIntakeMode::Cumulative;
    nc.robust.budget_of_uncertainty = 7;

    save_case(nc, tmp.file("case.json"));
    NetworkCase back = load_case(tmp.file("case.json"));
    CHECK(cases_equal(nc, back));

    // And the reloaded case serializes to the identical document.
    save_case(back, tmp.file("case2.json"));
    std::ifstream a(tmp.file("case.json")), b(tmp.file("case2.json"));
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("load_case surfaces parse and validation errors") {
    TempDir tmp;
    SECTION("missing file") { CHECK_THROWS_AS(load_case(tmp.file("nope.json")), ParseError); }
    SECTION("malformed JSON") {
        std::ofstream(tmp.file("bad.json")) << "{ not json";
        CHECK_THROWS_AS(load_case(tmp.file("bad.json")), ParseError);
    }
    SECTION("validation failure carries the entity") {
        auto nc = build_6bus_case();
        save_case(nc, tmp.file("case.json"));
        // Corrupt the reactance of line 2 in the document.
        std::ifstream in(tmp.file("case.json"));
        nlohmann::json j;
        in >> j;
        j["lines"][1]["reactance"] = 0.0;
        std::ofstream(tmp.file("case.json")) << j.dump(2);
        CHECK_THROWS_WITH(load_case(tmp.file("case.json")),
                          Catch::Matchers::ContainsSubstring("line 2"));
    }
    SECTION("demand profile length mismatch") {
        auto nc = build_6bus_case();
        save_case(nc, tmp.file("case.json"));
        std::ifstream in(tmp.file("case.json"));
        nlohmann::json j;
        in >> j;
        j["demands"][0]["nominal"].erase(23);
        j["demands"][0]["deviation"].erase(23);
        std::ofstream(tmp.file("case.json")) << j.dump(2);
        CHECK_THROWS_WITH(load_case(tmp.file("case.json")),
                          Catch::Matchers::ContainsSubstring("length 23"));
    }
}

TEST_CASE("fire score CSV round-trip and reference from the case document") {
    TempDir tmp;
    auto nc = build_6bus_case();
    auto prof = generate_synthetic_scores(nc, default_6bus_synth(9));
    save_fire_scores_csv(prof, tmp.file("scores.csv"));
    FireScoreProfile back = load_fire_scores_csv(tmp.file("scores.csv"), nc.horizon);
    REQUIRE(back.by_line.size() == prof.by_line.size());
    for (const auto& [lid, v] : prof.by_line)
        for (int t = 0; t < nc.horizon; ++t)
            CHECK(back.at(lid, t) == v[static_cast<size_t>(t)]);

    // Case document may point at the CSV instead of embedding scores.
    nc.fire_scores = prof;
    auto j = to_json(nc);
    j["fire_scores"] = "scores.csv";
    std::ofstream(tmp.file("case.json")) << j.dump(2);
    NetworkCase loaded = load_case(tmp.file("case.json"));
    CHECK(loaded.fire_scores.at(6, 12) == prof.at(6, 12));
}

TEST_CASE("fire score CSV rejects incomplete or malformed data") {
    TempDir tmp;
    std::ofstream(tmp.file("a.csv")) << "line_id,hour,score\n1,1,0.5\n";
    CHECK_THROWS_WITH(load_fire_scores_csv(tmp.file("a.csv"), 2),
                      Catch::Matchers::ContainsSubstring("missing score"));
    std::ofstream(tmp.file("b.csv")) << "line_id,hour,score\n1,3,0.5\n";
    CHECK_THROWS_AS(load_fire_scores_csv(tmp.file("b.csv"), 2), ParseError);
    std::ofstream(tmp.file("c.csv")) << "nope\n";
    CHECK_THROWS_AS(load_fire_scores_csv(tmp.file("c.csv"), 2), ParseError);
    std::ofstream(tmp.file("d.csv")) << "line_id,hour,score\n1,x,0.5\n";
    CHECK_THROWS_AS(load_fire_scores_csv(tmp.file("d.csv"), 2), ParseError);
}

TEST_CASE("shipped 6-bus case file loads with the expected structure") {
    NetworkCase nc = load_case(std::string(EMBERGRID_DATA_DIR) + "/case6.json");
    CHECK(nc.lines.size() == 7);
    CHECK(nc.generators.size() == 3);
    CHECK(nc.buses.size() == 6);
    CHECK(nc.horizon == 24);
    CHECK(nc.robust.budget_of_uncertainty == 5);
    // The embedded scores honor the shipped structure: lines 6 and 7 are
    // scored every hour, the backbone is score-free.
    for (int t = 0; t < 24; ++t) {
        CHECK(nc.fire_scores.at(6, t) > 0.0);
        CHECK(nc.fire_scores.at(7, t) > 0.0);
        CHECK(nc.fire_scores.at(5, t) == 0.0);
    }
}

TEST_CASE("quadratic coefficients accepted in the case document") {
    TempDir tmp;
    nlohmann::json j;
    j["horizon"] = 2;
    j["buses"] = {{{"id", 1}, {"reference", true}}};
    j["lines"] = nlohmann::json::array();
    j["generators"] = {{{"id", 1},
                        {"bus", 1},
                        {"p_min", 0.0},
                        {"p_max", 40.0},
                        {"quadratic", {{"a", 137.0}, {"b", 17.7}, {"c", 0.005}, {"n_segments", 3}}}}};
    j["demands"] = {{{"bus", 1}, {"nominal", {10.0, 12.0}}}};
    std::ofstream(tmp.file("q.json")) << j.dump();
    NetworkCase nc = load_case(tmp.file("q.json"));
    REQUIRE(nc.generators[0].segments.size() == 3);
    CHECK(nc.generators[0].segments[1].marginal_cost == Catch::Approx(17.9));
}
