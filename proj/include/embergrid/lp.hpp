// Canonical linear-program form: sparse constraint rows over bounded
// variables, objective sense, and the solution/certificate types returned by
// the simplex kernel. Dual sign convention: row duals are shadow prices
// d(objective)/d(rhs) in the user's sense, so duals of >= rows are >= 0 under
// Min.

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace embergrid {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Min, Max };
enum class Rel { LE, EQ, GE };

struct LinearProgram {
    Sense sense = Sense::Min;
    int num_vars = 0;
    std::vector<double> cost;
    double objective_offset = 0.0;
    std::vector<double> lower, upper;

    struct Row {
        std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
        Rel rel = Rel::LE;
        double rhs = 0.0;
    };
    std::vector<Row> rows;
    std::vector<std::string> col_names;  // optional, parallel to columns
    std::vector<std::string> row_names;  // optional, parallel to rows

    int add_var(double lb, double ub, double c, const std::string& name = "") {
        lower.push_back(lb);
        upper.push_back(ub);
        cost.push_back(c);
        col_names.push_back(name);
        return num_vars++;
    }

    int add_row(std::vector<std::pair<int, double>> coeffs, Rel rel, double rhs,
                const std::string& name = "") {
        rows.push_back(Row{std::move(coeffs), rel, rhs});
        row_names.push_back(name);
        return static_cast<int>(rows.size()) - 1;
    }

    int num_rows() const { return static_cast<int>(rows.size()); }

    const std::string& row_name(int i) const { return row_names[static_cast<size_t>(i)]; }
};

inline void validate_lp(const LinearProgram& lp) {
    if (static_cast<int>(lp.cost.size()) != lp.num_vars ||
        static_cast<int>(lp.lower.size()) != lp.num_vars ||
        static_cast<int>(lp.upper.size()) != lp.num_vars)
        throw std::invalid_argument("lp: cost/bound arrays do not match num_vars");
    for (int j = 0; j < lp.num_vars; ++j)
        if (!(lp.lower[static_cast<size_t>(j)] <= lp.upper[static_cast<size_t>(j)]))
            throw std::invalid_argument("lp: lower > upper for variable " + std::to_string(j));
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        if (!std::isfinite(lp.rows[i].rhs))
            throw std::invalid_argument("lp: non-finite rhs in row " + std::to_string(i));
        for (const auto& [j, a] : lp.rows[i].coeffs) {
            if (j < 0 || j >= lp.num_vars)
                throw std::invalid_argument("lp: column index out of range in row " + std::to_string(i));
            if (!std::isfinite(a))
                throw std::invalid_argument("lp: non-finite coefficient in row " + std::to_string(i));
        }
    }
}

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        default: return "numerical_failure";
    }
}

enum class VarStatus : int8_t { Basic = 0, AtLower = 1, AtUpper = 2, FreeNonbasic = 3 };

struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    std::vector<double> x;
    double objective = 0.0;
    std::vector<double> row_duals;
    std::vector<double> reduced_costs;
    std::vector<double> farkas_ray;           // per row, set when Infeasible
    std::vector<VarStatus> basis;             // structural then slack statuses
    long iterations = 0;
    long phase1_iterations = 0;
};

/// Residuals used by tests and internal sanity checks.
struct LpResiduals {
    double primal_infeasibility = 0.0;   // max scaled row/bound violation
    double duality_gap = 0.0;            // |primal - dual| / (1 + |primal|)
    double complementary_slackness = 0.0;
    double dual_infeasibility = 0.0;     // reduced-cost sign violations
};

inline double row_activity(const LinearProgram& lp, int i, const std::vector<double>& x) {
    double a = 0.0;
    for (const auto& [j, c] : lp.rows[static_cast<size_t>(i)].coeffs) a += c * x[static_cast<size_t>(j)];
    return a;
}

inline LpResiduals verify_lp_solution(const LinearProgram& lp, const LpSolution& sol) {
    LpResiduals r;
    if (sol.status != LpStatus::Optimal) return r;
    const double s = lp.sense == Sense::Min ? 1.0 : -1.0;
    // Primal feasibility, scaled by row magnitude.
    for (int i = 0; i < lp.num_rows(); ++i) {
        const auto& row = lp.rows[static_cast<size_t>(i)];
        double scale = std::abs(row.rhs);
        for (const auto& [j, c] : row.coeffs)
            scale = std::max(scale, std::abs(c) * std::max(1.0, std::abs(sol.x[static_cast<size_t>(j)])));
        double act = row_activity(lp, i, sol.x);
        double viol = 0.0;
        if (row.rel == Rel::LE) viol = act - row.rhs;
        else if (row.rel == Rel::GE) viol = row.rhs - act;
        else viol = std::abs(act - row.rhs);
        r.primal_infeasibility = std::max(r.primal_infeasibility, viol / std::max(1.0, scale));
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        double xj = sol.x[static_cast<size_t>(j)];
        double scale = std::max(1.0, std::abs(xj));
        r.primal_infeasibility =
            std::max(r.primal_infeasibility, (lp.lower[static_cast<size_t>(j)] - xj) / scale);
        r.primal_infeasibility =
            std::max(r.primal_infeasibility, (xj - lp.upper[static_cast<size_t>(j)]) / scale);
    }
    // Dual objective: sum y_i * rhs_i + sum over nonbasic bounds of d_j * bound.
    double dual_obj = lp.objective_offset;
    for (int i = 0; i < lp.num_rows(); ++i)
        dual_obj += sol.row_duals[static_cast<size_t>(i)] * lp.rows[static_cast<size_t>(i)].rhs;
    for (int j = 0; j < lp.num_vars; ++j) {
        double d = sol.reduced_costs[static_cast<size_t>(j)];
        if (sol.basis.empty() || sol.basis[static_cast<size_t>(j)] == VarStatus::Basic) continue;
        if (sol.basis[static_cast<size_t>(j)] == VarStatus::AtLower && std::isfinite(lp.lower[static_cast<size_t>(j)]))
            dual_obj += d * lp.lower[static_cast<size_t>(j)];
        else if (sol.basis[static_cast<size_t>(j)] == VarStatus::AtUpper && std::isfinite(lp.upper[static_cast<size_t>(j)]))
            dual_obj += d * lp.upper[static_cast<size_t>(j)];
    }
    r.duality_gap = std::abs(sol.objective - dual_obj) / (1.0 + std::abs(sol.objective));
    // Complementary slackness: y_i * slack_i ~= 0, scaled.
    for (int i = 0; i < lp.num_rows(); ++i) {
        const auto& row = lp.rows[static_cast<size_t>(i)];
        if (row.rel == Rel::EQ) continue;
        double slack = row.rhs - row_activity(lp, i, sol.x);
        double y = sol.row_duals[static_cast<size_t>(i)];
        double scale = 1.0 + std::abs(row.rhs) + std::abs(sol.objective);
        r.complementary_slackness =
            std::max(r.complementary_slackness, std::abs(slack * y) / scale);
        // Sign convention under Min: GE rows have y >= 0, LE rows y <= 0.
        double sign_viol = row.rel == Rel::GE ? -s * y : s * y;
        r.dual_infeasibility = std::max(r.dual_infeasibility, sign_viol / scale);
    }
    return r;
}

/// Verify a Farkas-type infeasibility certificate: a per-row ray y with the
/// relation-consistent signs such that no x within the variable box can
/// satisfy sum_i y_i (a_i x) >= y' rhs. Returns the positive margin by which
/// the certificate proves infeasibility (<= 0 means the ray proves nothing).
inline double farkas_margin(const LinearProgram& lp, const std::vector<double>& ray,
                            double sign_tol = 1e-7) {
    if (static_cast<int>(ray.size()) != lp.num_rows())
        throw std::invalid_argument("farkas ray size mismatch");
    double ray_norm = 0.0;
    for (double v : ray) ray_norm = std::max(ray_norm, std::abs(v));
    if (ray_norm == 0.0) return 0.0;
    std::vector<double> g(static_cast<size_t>(lp.num_vars), 0.0);
    double yrhs = 0.0;
    for (int i = 0; i < lp.num_rows(); ++i) {
        const auto& row = lp.rows[static_cast<size_t>(i)];
        double y = ray[static_cast<size_t>(i)];
        if (row.rel == Rel::GE && y < -sign_tol * ray_norm) return -kInf;
        if (row.rel == Rel::LE && y > sign_tol * ray_norm) return -kInf;
        for (const auto& [j, c] : row.coeffs) g[static_cast<size_t>(j)] += y * c;
        yrhs += y * row.rhs;
    }
    double best = 0.0;  // max over the box of (y' A) x
    for (int j = 0; j < lp.num_vars; ++j) {
        double gj = g[static_cast<size_t>(j)];
        if (std::abs(gj) <= sign_tol * ray_norm) continue;
        double b = gj > 0.0 ? lp.upper[static_cast<size_t>(j)] : lp.lower[static_cast<size_t>(j)];
        if (!std::isfinite(b)) return -kInf;
        best += gj * b;
    }
    return yrhs - best;
}

/// Map row duals to semantic tags. Throws on tag/row count mismatch.
inline std::map<std::string, double> extract_duals(const LpSolution& sol,
                                                   const std::vector<std::string>& row_tags) {
    if (sol.status != LpStatus::Optimal)
        throw std::invalid_argument("extract_duals: solution is not optimal");
    if (row_tags.size() != sol.row_duals.size())
        throw std::invalid_argument("extract_duals: tag count " + std::to_string(row_tags.size()) +
                                    " does not match row count " + std::to_string(sol.row_duals.size()));
    std::map<std::string, double> out;
    for (size_t i = 0; i < row_tags.size(); ++i) out[row_tags[i]] = sol.row_duals[i];
    return out;
}

}  // namespace embergrid
