#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "embergrid/lp_write.hpp"
#include "embergrid/simplex.hpp"

using namespace embergrid;

namespace {

std::string solution_bytes(const LpSolution& s) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(s.status) << '|' << s.objective << '|';
    for (double v : s.x) os << v << ',';
    for (double v : s.row_duals) os << v << ',';
    for (double v : s.reduced_costs) os << v << ',';
    return os.str();
}

void check_clean(const LinearProgram& lp, const LpSolution& s) {
    REQUIRE(s.status == LpStatus::Optimal);
    LpResiduals r = verify_lp_solution(lp, s);
    CHECK(r.primal_infeasibility <= 1e-7);
    CHECK(r.duality_gap <= 1e-6);
    CHECK(r.complementary_slackness <= 1e-6);
    CHECK(r.dual_infeasibility <= 1e-6);
}

// Exhaustive vertex oracle for small LPs: try every choice of active
// constraints/bounds, solve the square system by Gaussian elimination, keep
// the best feasible point. Independent of the simplex path.
double vertex_enumeration_optimum(const LinearProgram& lp) {
    const int n = lp.num_vars;
    struct Plane {
        std::vector<double> a;
        double rhs;
    };
    std::vector<Plane> planes;
    for (const auto& row : lp.rows) {
        Plane p{std::vector<double>(static_cast<size_t>(n), 0.0), row.rhs};
        for (auto [j, c] : row.coeffs) p.a[static_cast<size_t>(j)] += c;
        planes.push_back(p);
    }
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(lp.lower[static_cast<size_t>(j)])) {
            Plane p{std::vector<double>(static_cast<size_t>(n), 0.0), lp.lower[static_cast<size_t>(j)]};
            p.a[static_cast<size_t>(j)] = 1.0;
            planes.push_back(p);
        }
        if (std::isfinite(lp.upper[static_cast<size_t>(j)])) {
            Plane p{std::vector<double>(static_cast<size_t>(n), 0.0), lp.upper[static_cast<size_t>(j)]};
            p.a[static_cast<size_t>(j)] = 1.0;
            planes.push_back(p);
        }
    }
    const size_t m = planes.size();
    double best = lp.sense == Sense::Min ? kInf : -kInf;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    std::function<void(int, size_t)> rec = [&](int k, size_t start) {
        if (k == n) {
            // Solve the active set.
            std::vector<std::vector<double>> A(static_cast<size_t>(n),
                                               std::vector<double>(static_cast<size_t>(n) + 1, 0.0));
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) A[static_cast<size_t>(r)][static_cast<size_t>(c)] = planes[static_cast<size_t>(idx[static_cast<size_t>(r)])].a[static_cast<size_t>(c)];
                A[static_cast<size_t>(r)][static_cast<size_t>(n)] = planes[static_cast<size_t>(idx[static_cast<size_t>(r)])].rhs;
            }
            for (int col = 0; col < n; ++col) {
                int piv = -1;
                double mx = 1e-9;
                for (int r = col; r < n; ++r)
                    if (std::abs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) > mx) {
                        mx = std::abs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]);
                        piv = r;
                    }
                if (piv < 0) return;
                std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(piv)]);
                for (int r = 0; r < n; ++r) {
                    if (r == col) continue;
                    double f = A[static_cast<size_t>(r)][static_cast<size_t>(col)] / A[static_cast<size_t>(col)][static_cast<size_t>(col)];
                    for (int c = col; c <= n; ++c) A[static_cast<size_t>(r)][static_cast<size_t>(c)] -= f * A[static_cast<size_t>(col)][static_cast<size_t>(c)];
                }
            }
            std::vector<double> x(static_cast<size_t>(n));
            for (int r = 0; r < n; ++r) x[static_cast<size_t>(r)] = A[static_cast<size_t>(r)][static_cast<size_t>(n)] / A[static_cast<size_t>(r)][static_cast<size_t>(r)];
            for (int j = 0; j < n; ++j)
                if (x[static_cast<size_t>(j)] < lp.lower[static_cast<size_t>(j)] - 1e-7 ||
                    x[static_cast<size_t>(j)] > lp.upper[static_cast<size_t>(j)] + 1e-7)
                    return;
            for (int i = 0; i < lp.num_rows(); ++i) {
                double act = row_activity(lp, i, x);
                const auto& row = lp.rows[static_cast<size_t>(i)];
                if (row.rel == Rel::LE && act > row.rhs + 1e-7) return;
                if (row.rel == Rel::GE && act < row.rhs - 1e-7) return;
                if (row.rel == Rel::EQ && std::abs(act - row.rhs) > 1e-7) return;
            }
            double obj = lp.objective_offset;
            for (int j = 0; j < n; ++j) obj += lp.cost[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
            best = lp.sense == Sense::Min ? std::min(best, obj) : std::max(best, obj);
            return;
        }
        for (size_t p = start; p < m; ++p) {
            idx[static_cast<size_t>(k)] = static_cast<int>(p);
            rec(k + 1, p + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_CASE("simplex solves the reference examples") {
    SECTION("lower-bounded minimum with its dual") {
        LinearProgram lp;
        int x = lp.add_var(0, 10, 1.0, "x");
        lp.add_row({{x, 1.0}}, Rel::GE, 1.0, "floor");
        auto s = solve_lp(lp);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.x[0] == Catch::Approx(1.0));
        CHECK(s.objective == Catch::Approx(1.0));
        CHECK(s.row_duals[0] == Catch::Approx(1.0));
        check_clean(lp, s);
    }
    SECTION("degenerate maximum over a simplex face") {
        LinearProgram lp;
        lp.sense = Sense::Max;
        int x = lp.add_var(0, kInf, 1.0, "x");
        int y = lp.add_var(0, kInf, 1.0, "y");
        lp.add_row({{x, 1.0}, {y, 1.0}}, Rel::LE, 1.0, "cap");
        auto s = solve_lp(lp);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.objective == Catch::Approx(1.0));
        CHECK(s.x[0] + s.x[1] == Catch::Approx(1.0));
    }
    SECTION("unbounded ray detected") {
        LinearProgram lp;
        int x = lp.add_var(0, kInf, -1.0, "x");
        lp.add_row({{x, 1.0}}, Rel::GE, 0.0);
        CHECK(solve_lp(lp).status == LpStatus::Unbounded);
    }
    SECTION("two-bus dispatch with the nodal price") {
        LinearProgram lp;
        int g = lp.add_var(0, 100, 10.0, "g");
        int f = lp.add_var(-100, 100, 0.0, "f");
        int t1 = lp.add_var(0, 0, 0.0, "th1");
        int t2 = lp.add_var(-M_PI, M_PI, 0.0, "th2");
        lp.add_row({{g, 1.0}, {f, -1.0}}, Rel::EQ, 0.0, "balance(bus1)");
        lp.add_row({{f, 1.0}}, Rel::EQ, 50.0, "balance(bus2)");
        lp.add_row({{f, 1.0}, {t2, -1000.0}, {t1, 1000.0}}, Rel::EQ, 0.0, "flow-angle(1)");
        auto s = solve_lp(lp);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.x[static_cast<size_t>(g)] == Catch::Approx(50.0));
        CHECK(s.objective == Catch::Approx(500.0));
        auto duals = extract_duals(s, lp.row_names);
        CHECK(duals.at("balance(bus2)") == Catch::Approx(10.0));
        check_clean(lp, s);
    }
}

TEST_CASE("extract_duals maps tags and rejects mismatches") {
    LinearProgram lp;
    int x = lp.add_var(0, 5, 1.0, "x");
    lp.add_row({{x, 1.0}}, Rel::GE, 2.0, "active");
    lp.add_row({{x, 1.0}}, Rel::LE, 100.0, "inactive-cap");
    auto s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    auto duals = extract_duals(s, {"active", "inactive-cap"});
    CHECK(duals.at("active") == Catch::Approx(1.0));
    CHECK(duals.at("inactive-cap") == 0.0);  // complementary slackness
    CHECK_THROWS_AS(extract_duals(s, {"only-one"}), std::invalid_argument);
}

TEST_CASE("equality row duals are free in sign") {
    LinearProgram lp;
    int x = lp.add_var(-10, 10, -1.0, "x");  // min -x pushes x up
    lp.add_row({{x, 1.0}}, Rel::EQ, -3.0, "pin");
    auto s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.row_duals[0] == Catch::Approx(-1.0));  // negative dual accepted on = rows
    check_clean(lp, s);
}

TEST_CASE("strong duality and clean residuals on random feasible programs") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 3 + static_cast<int>(rng() % 10);
        int m = 2 + static_cast<int>(rng() % 12);
        LinearProgram lp;
        std::vector<double> x0;
        for (int j = 0; j < n; ++j) {
            double lo = (rng() % 4 == 0) ? -kInf : -4.0 + U(rng);
            double hi = (rng() % 4 == 0) ? kInf : 4.0 + U(rng);
            if (lo > hi) std::swap(lo, hi);
            lp.add_var(lo, hi, 2.0 * U(rng));
            double v = 0.5 * U(rng);
            if (std::isfinite(lo)) v = std::max(v, lo + 0.1);
            if (std::isfinite(hi)) v = std::min(v, hi - 0.1);
            x0.push_back(v);
        }
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> co;
            double act = 0.0;
            for (int j = 0; j < n; ++j) {
                if (rng() % 3 == 0) continue;
                double a = 2.0 * U(rng);
                co.push_back({j, a});
                act += a * x0[static_cast<size_t>(j)];
            }
            if (co.empty()) continue;
            int rel = static_cast<int>(rng() % 3);
            if (rel == 0) lp.add_row(co, Rel::LE, act + std::abs(U(rng)));
            else if (rel == 1) lp.add_row(co, Rel::GE, act - std::abs(U(rng)));
            else lp.add_row(co, Rel::EQ, act);
        }
        auto s = solve_lp(lp);
        if (s.status == LpStatus::Unbounded) continue;  // free vars allow rays
        check_clean(lp, s);
        ++solved;
    }
    CHECK(solved > 100);
}

TEST_CASE("constructed box optima survive redundant rows") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng() % 8);
        LinearProgram lp;
        double expect = 0.0;
        std::vector<double> xstar;
        for (int j = 0; j < n; ++j) {
            double lo = -5.0 + 4.0 * U(rng), hi = 1.0 + 4.0 * (U(rng) + 1.0);
            double c = 3.0 * U(rng);
            lp.add_var(lo, hi, c);
            double v = c > 0 ? lo : (c < 0 ? hi : lo);
            xstar.push_back(v);
            expect += c * v;
        }
        for (int i = 0; i < 8; ++i) {
            std::vector<std::pair<int, double>> co;
            double act = 0.0;
            for (int j = 0; j < n; ++j) {
                if (rng() % 2) continue;
                double a = 2.0 * U(rng);
                co.push_back({j, a});
                act += a * xstar[static_cast<size_t>(j)];
            }
            if (co.empty()) continue;
            if (rng() % 2) lp.add_row(co, Rel::LE, act + 0.5 + std::abs(U(rng)));
            else lp.add_row(co, Rel::GE, act - 0.5 - std::abs(U(rng)));
        }
        auto s = solve_lp(lp);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.objective == Catch::Approx(expect).margin(1e-6));
    }
}

TEST_CASE("vertex enumeration oracle agrees on tiny programs") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + static_cast<int>(rng() % 2);
        LinearProgram lp;
        for (int j = 0; j < n; ++j) lp.add_var(-2.0 - U(rng), 2.0 + U(rng), 2.0 * U(rng));
        int m = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> co;
            for (int j = 0; j < n; ++j)
                if (rng() % 2) co.push_back({j, 2.0 * U(rng)});
            if (co.empty()) continue;
            lp.add_row(co, rng() % 2 ? Rel::LE : Rel::GE, U(rng));
        }
        auto s = solve_lp(lp);
        double oracle = vertex_enumeration_optimum(lp);
        if (s.status == LpStatus::Infeasible) {
            CHECK(!std::isfinite(oracle));
            continue;
        }
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.objective == Catch::Approx(oracle).margin(1e-6));
        ++checked;
    }
    CHECK(checked > 30);
}

TEST_CASE("infeasibility comes with a verifiable certificate") {
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);
        LinearProgram lp;
        for (int j = 0; j < n; ++j) lp.add_var(-3.0, 3.0, U(rng));
        std::vector<std::pair<int, double>> co;
        for (int j = 0; j < n; ++j) co.push_back({j, 1.0 + std::abs(U(rng))});
        lp.add_row(co, Rel::LE, 1.0);
        lp.add_row(co, Rel::GE, 10.0 + 20.0 * n);
        for (int i = 0; i < 3; ++i) {
            std::vector<std::pair<int, double>> c2;
            for (int j = 0; j < n; ++j)
                if (rng() % 2) c2.push_back({j, U(rng)});
            if (!c2.empty()) lp.add_row(c2, Rel::LE, 10.0);
        }
        auto s = solve_lp(lp);
        REQUIRE(s.status == LpStatus::Infeasible);
        CHECK(farkas_margin(lp, s.farkas_ray) > 1e-9);
    }
}

TEST_CASE("identical bytes in, identical bytes out") {
    std::mt19937 rng(11);
    LinearProgram lp;
    for (int j = 0; j < 30; ++j)
        lp.add_var(0, 1 + static_cast<double>(rng() % 5), 1.0 - 0.02 * static_cast<double>(rng() % 100));
    for (int i = 0; i < 45; ++i) {
        std::vector<std::pair<int, double>> co;
        for (int j = 0; j < 30; ++j)
            if (rng() % 3 == 0) co.push_back({j, 1.0 - 0.02 * static_cast<double>(rng() % 100)});
        if (!co.empty()) lp.add_row(co, static_cast<Rel>(rng() % 3), 0.2 * static_cast<double>(rng() % 10));
    }
    auto s1 = solve_lp(lp);
    auto s2 = solve_lp(lp);
    CHECK(solution_bytes(s1) == solution_bytes(s2));
}

TEST_CASE("LP text dump contains the model") {
    LinearProgram lp;
    int x = lp.add_var(0, 10, 1.5, "serve");
    int y = lp.add_var(-kInf, kInf, 0.0, "angle");
    lp.add_row({{x, 1.0}, {y, -2.0}}, Rel::GE, 3.0, "floor");
    std::string text = to_lp_format(lp, {x});
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("serve") != std::string::npos);
    CHECK(text.find("floor:") != std::string::npos);
    CHECK(text.find(">= 3") != std::string::npos);
    CHECK(text.find("angle free") != std::string::npos);
    CHECK(text.find("Binaries") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
}
