// Branch-and-bound over binary variables on top of the simplex kernel.
// Fixed, reproducible search: most-fractional branching with lowest-index
// tie-breaks, depth-first diving (round-to-nearest child first) with
// best-bound backtracking. Root bound propagation tightens big-M rows before
// the search; incumbents are re-solved with binaries fixed so the reported
// point is exactly feasible.

#pragma once

#include <functional>
#include <memory>

#include "embergrid/simplex.hpp"

namespace embergrid {

struct MixedIntegerProgram {
    LinearProgram lp;
    std::vector<int> binaries;  // indices of binary-marked variables
};

inline void validate_mip(const MixedIntegerProgram& mip) {
    validate_lp(mip.lp);
    for (int j : mip.binaries) {
        if (j < 0 || j >= mip.lp.num_vars)
            throw std::invalid_argument("mip: binary index out of range");
        if (mip.lp.lower[static_cast<size_t>(j)] < -1e-9 || mip.lp.upper[static_cast<size_t>(j)] > 1.0 + 1e-9)
            throw std::invalid_argument("mip: binary variable " + std::to_string(j) + " has bounds outside [0,1]");
    }
}

enum class MilpStatus { Optimal, Infeasible, GapNotProven };

inline const char* to_string(MilpStatus s) {
    switch (s) {
        case MilpStatus::Optimal: return "optimal";
        case MilpStatus::Infeasible: return "infeasible";
        default: return "gap_not_proven";
    }
}

struct MilpSolution {
    MilpStatus status = MilpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    long node_count = 0;
    double gap_achieved = 0.0;
    double best_bound = 0.0;
};

struct MilpOptions {
    double gap = 0.0;              // relative optimality gap to prove
    long node_limit = 2'000'000;
    double int_tol = 1e-6;
    SimplexOptions lp_opts;
    const std::vector<double>* initial_incumbent = nullptr;  // binary assignment hint
    // Called after each node LP with the global proven bound (min over the
    // node and all open nodes) and the current incumbent objective.
    std::function<void(double global_bound, double incumbent)> on_node;
};

namespace detail {

// Interval bound propagation over rows; rounds binaries forced to 0/1.
// Returns false when some bound pair becomes contradictory.
inline bool propagate_bounds(const LinearProgram& lp, const std::vector<int>& binaries,
                             std::vector<double>& lo, std::vector<double>& hi) {
    std::vector<char> is_bin(static_cast<size_t>(lp.num_vars), 0);
    for (int j : binaries) is_bin[static_cast<size_t>(j)] = 1;
    auto round_binary = [&](int j) {
        if (!is_bin[static_cast<size_t>(j)]) return;
        if (lo[static_cast<size_t>(j)] > 1e-6) lo[static_cast<size_t>(j)] = 1.0;
        if (hi[static_cast<size_t>(j)] < 1.0 - 1e-6) hi[static_cast<size_t>(j)] = 0.0;
    };
    for (int pass = 0; pass < 10; ++pass) {
        bool changed = false;
        for (const auto& row : lp.rows) {
            // Activity bounds, tracking infinite contributions.
            double min_act = 0.0, max_act = 0.0;
            int min_infs = 0, max_infs = 0;
            for (const auto& [j, a] : row.coeffs) {
                double l = lo[static_cast<size_t>(j)], u = hi[static_cast<size_t>(j)];
                double cmin = a > 0 ? a * l : a * u;
                double cmax = a > 0 ? a * u : a * l;
                if (std::isfinite(cmin)) min_act += cmin; else ++min_infs;
                if (std::isfinite(cmax)) max_act += cmax; else ++max_infs;
            }
            const bool need_ub = row.rel != Rel::GE;  // activity <= rhs
            const bool need_lb = row.rel != Rel::LE;  // activity >= rhs
            if (need_ub && min_infs == 0 && min_act > row.rhs + 1e-7 * (1.0 + std::abs(row.rhs))) return false;
            if (need_lb && max_infs == 0 && max_act < row.rhs - 1e-7 * (1.0 + std::abs(row.rhs))) return false;
            for (const auto& [j, a] : row.coeffs) {
                if (a == 0.0) continue;
                double l = lo[static_cast<size_t>(j)], u = hi[static_cast<size_t>(j)];
                double cmin = a > 0 ? a * l : a * u;
                double cmax = a > 0 ? a * u : a * l;
                if (need_ub) {
                    // a*x_j <= rhs - (min_act - own_min)
                    double rest = min_act - (std::isfinite(cmin) ? cmin : 0.0);
                    if (min_infs - (std::isfinite(cmin) ? 0 : 1) == 0) {
                        double cap = row.rhs - rest;
                        if (a > 0) {
                            double nu = cap / a;
                            if (nu < u - 1e-9 * (1.0 + std::abs(u))) { hi[static_cast<size_t>(j)] = nu; round_binary(j); changed = true; }
                        } else {
                            double nl = cap / a;
                            if (nl > l + 1e-9 * (1.0 + std::abs(l))) { lo[static_cast<size_t>(j)] = nl; round_binary(j); changed = true; }
                        }
                    }
                }
                if (need_lb) {
                    double rest = max_act - (std::isfinite(cmax) ? cmax : 0.0);
                    if (max_infs - (std::isfinite(cmax) ? 0 : 1) == 0) {
                        double cap = row.rhs - rest;
                        if (a > 0) {
                            double nl = cap / a;
                            if (nl > lo[static_cast<size_t>(j)] + 1e-9 * (1.0 + std::abs(lo[static_cast<size_t>(j)]))) {
                                lo[static_cast<size_t>(j)] = nl; round_binary(j); changed = true;
                            }
                        } else {
                            double nu = cap / a;
                            if (nu < hi[static_cast<size_t>(j)] - 1e-9 * (1.0 + std::abs(hi[static_cast<size_t>(j)]))) {
                                hi[static_cast<size_t>(j)] = nu; round_binary(j); changed = true;
                            }
                        }
                    }
                }
                l = lo[static_cast<size_t>(j)]; u = hi[static_cast<size_t>(j)];
                if (l > u + 1e-7 * (1.0 + std::abs(l))) return false;
            }
        }
        if (!changed) break;
    }
    // Clamp tiny crossings produced by the tolerance bands.
    for (int j = 0; j < lp.num_vars; ++j)
        if (lo[static_cast<size_t>(j)] > hi[static_cast<size_t>(j)])
            lo[static_cast<size_t>(j)] = hi[static_cast<size_t>(j)];
    return true;
}

}  // namespace detail

inline MilpSolution solve_milp(const MixedIntegerProgram& mip, const MilpOptions& opts = {}) {
    validate_mip(mip);
    if (mip.lp.sense == Sense::Max) {
        // Search in Min space; flip the objective back on the way out.
        MixedIntegerProgram flipped = mip;
        flipped.lp.sense = Sense::Min;
        for (auto& c : flipped.lp.cost) c = -c;
        flipped.lp.objective_offset = -flipped.lp.objective_offset;
        MilpSolution s = solve_milp(flipped, opts);
        s.objective = -s.objective;
        s.best_bound = -s.best_bound;
        return s;
    }
    MilpSolution out;

    LinearProgram work = mip.lp;  // rows shared logically; bounds mutated per node
    std::vector<double> root_lo = work.lower, root_hi = work.upper;
    if (!detail::propagate_bounds(work, mip.binaries, root_lo, root_hi)) {
        out.status = MilpStatus::Infeasible;
        return out;
    }

    struct Node {
        std::vector<std::pair<int, double>> fixes;  // (binary var, value)
        double bound;
        long id;
        std::shared_ptr<const std::vector<VarStatus>> warm;
    };
    std::vector<Node> open;

    const double tol = opts.int_tol;
    double incumbent_obj = kInf;
    std::vector<double> incumbent_x;
    long next_id = 0;

    auto solve_node_lp = [&](const Node& node, bool use_warm) {
        work.lower = root_lo;
        work.upper = root_hi;
        for (const auto& [j, v] : node.fixes) {
            work.lower[static_cast<size_t>(j)] = v;
            work.upper[static_cast<size_t>(j)] = v;
        }
        std::vector<double> lo = work.lower, hi = work.upper;
        if (!detail::propagate_bounds(work, mip.binaries, lo, hi)) {
            LpSolution infeas;
            infeas.status = LpStatus::Infeasible;
            return infeas;
        }
        work.lower = std::move(lo);
        work.upper = std::move(hi);
        SimplexOptions so = opts.lp_opts;
        so.warm_basis = (use_warm && node.warm) ? node.warm.get() : nullptr;
        LpSolution sol = solve_lp(work, so);
        if (sol.status == LpStatus::NumericalFailure && so.warm_basis) {
            so.warm_basis = nullptr;  // retry cold
            sol = solve_lp(work, so);
        }
        return sol;
    };

    // Fix binaries to a hinted assignment for a fast first incumbent.
    auto try_assignment = [&](const std::vector<double>& hint) {
        Node node;
        node.bound = -kInf;
        node.id = -1;
        for (int j : mip.binaries)
            node.fixes.emplace_back(j, hint[static_cast<size_t>(j)] > 0.5 ? 1.0 : 0.0);
        LpSolution sol = solve_node_lp(node, false);
        if (sol.status == LpStatus::Optimal) {
            double obj = sol.objective;
            if (obj < incumbent_obj) {
                incumbent_obj = obj;
                incumbent_x = sol.x;
                for (int j : mip.binaries)
                    incumbent_x[static_cast<size_t>(j)] = std::round(incumbent_x[static_cast<size_t>(j)]);
            }
        }
    };
    if (opts.initial_incumbent && static_cast<int>(opts.initial_incumbent->size()) == mip.lp.num_vars)
        try_assignment(*opts.initial_incumbent);

    Node root;
    root.bound = -kInf;
    root.id = next_id++;
    open.push_back(std::move(root));

    double best_open_bound = -kInf;
    auto cutoff = [&]() {
        if (!std::isfinite(incumbent_obj)) return kInf;
        return incumbent_obj - std::max(opts.gap * std::max(1.0, std::abs(incumbent_obj)),
                                        1e-9 * (1.0 + std::abs(incumbent_obj)));
    };

    while (!open.empty()) {
        if (out.node_count >= opts.node_limit) break;
        // Depth-first dive on the most recent node while it can win;
        // otherwise backtrack to the best open bound (ties: lowest id).
        size_t pick = open.size() - 1;
        if (open[pick].bound >= cutoff()) {
            double best = kInf;
            size_t best_at = open.size();
            for (size_t i = 0; i < open.size(); ++i)
                if (open[i].bound < best - 1e-15) { best = open[i].bound; best_at = i; }
            if (best_at == open.size() || best >= cutoff()) break;  // all pruned
            pick = best_at;
        }
        Node node = std::move(open[pick]);
        open.erase(open.begin() + static_cast<long>(pick));
        ++out.node_count;

        LpSolution sol = solve_node_lp(node, true);
        if (sol.status == LpStatus::Infeasible) continue;
        if (sol.status == LpStatus::Unbounded)
            throw std::runtime_error("solve_milp: LP relaxation unbounded");
        if (sol.status == LpStatus::NumericalFailure)
            throw std::runtime_error("solve_milp: LP relaxation failed numerically");
        double bound = sol.objective;
        if (opts.on_node) {
            double gb = bound;
            for (const auto& nd : open) gb = std::min(gb, nd.bound);
            opts.on_node(gb, incumbent_obj);
        }
        if (bound >= cutoff()) continue;

        // Most-fractional binary, ties by lowest index.
        int branch_var = -1;
        double best_frac_dist = 1.0;
        for (int j : mip.binaries) {
            double v = sol.x[static_cast<size_t>(j)];
            double frac = v - std::floor(v);
            double dist = std::abs(frac - 0.5);
            if (frac > tol && frac < 1.0 - tol && dist < best_frac_dist - 1e-12) {
                best_frac_dist = dist;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // Integral: polish with binaries fixed to the rounded values.
            Node fixnode;
            fixnode.bound = bound;
            fixnode.id = -1;
            fixnode.fixes = node.fixes;
            for (int j : mip.binaries) {
                double v = std::round(sol.x[static_cast<size_t>(j)]);
                fixnode.fixes.emplace_back(j, v);
            }
            fixnode.warm = std::make_shared<const std::vector<VarStatus>>(sol.basis);
            LpSolution polished = solve_node_lp(fixnode, true);
            const LpSolution& use = polished.status == LpStatus::Optimal ? polished : sol;
            if (use.objective < incumbent_obj) {
                incumbent_obj = use.objective;
                incumbent_x = use.x;
                for (int j : mip.binaries)
                    incumbent_x[static_cast<size_t>(j)] = std::round(incumbent_x[static_cast<size_t>(j)]);
            }
            continue;
        }

        auto warm = std::make_shared<const std::vector<VarStatus>>(sol.basis);
        double frac = sol.x[static_cast<size_t>(branch_var)];
        double near = frac >= 0.5 ? 1.0 : 0.0;
        Node far_child, near_child;
        far_child.fixes = node.fixes;
        far_child.fixes.emplace_back(branch_var, 1.0 - near);
        far_child.bound = bound;
        far_child.id = next_id++;
        far_child.warm = warm;
        near_child.fixes = node.fixes;
        near_child.fixes.emplace_back(branch_var, near);
        near_child.bound = bound;
        near_child.id = next_id++;
        near_child.warm = warm;
        open.push_back(std::move(far_child));
        open.push_back(std::move(near_child));  // dive on the rounded side first
    }

    best_open_bound = std::isfinite(incumbent_obj) ? incumbent_obj : kInf;
    for (const auto& nd : open) best_open_bound = std::min(best_open_bound, nd.bound);
    // Nodes never solved keep bound -inf; treat an empty open list as proven.
    if (open.empty()) best_open_bound = std::isfinite(incumbent_obj) ? incumbent_obj : kInf;

    if (!std::isfinite(incumbent_obj)) {
        out.status = open.empty() ? MilpStatus::Infeasible : MilpStatus::GapNotProven;
        return out;
    }
    out.x = incumbent_x;
    out.objective = incumbent_obj;
    out.best_bound = best_open_bound;
    out.gap_achieved = std::max(0.0, (incumbent_obj - best_open_bound) /
                                         std::max(1.0, std::abs(incumbent_obj)));
    out.status = (out.node_count >= opts.node_limit && !open.empty() && out.gap_achieved > opts.gap)
                     ? MilpStatus::GapNotProven
                     : MilpStatus::Optimal;
    return out;
}

}  // namespace embergrid
