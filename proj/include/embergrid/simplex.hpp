// Bounded-variable revised primal simplex with a sparse LU basis
// factorization (Gilbert-Peierls style, partial pivoting) and product-form
// eta updates between refactorizations. Deterministic: Dantzig pricing with
// lowest-index tie-breaks, switching to Bland's rule after a stall threshold.
//
// Tolerance ladder: pivot 1e-9, feasibility 1e-7, optimality 1e-7, applied in
// equilibrated (power-of-two scaled) space.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "embergrid/lp.hpp"

namespace embergrid {

struct SimplexOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    double pivot_tol = 1e-9;
    int refactor_every = 100;
    long stall_limit = 500;
    long max_iterations = 0;  // 0: derived from problem size
    const std::vector<VarStatus>* warm_basis = nullptr;
};

namespace detail {

inline double pow2_scale(double max_abs) {
    if (max_abs <= 0.0 || !std::isfinite(max_abs)) return 1.0;
    int e = 0;
    std::frexp(max_abs, &e);
    return std::ldexp(1.0, -e + 1);  // power of two near 1/max_abs
}

class SimplexSolver {
public:
    SimplexSolver(const LinearProgram& lp, const SimplexOptions& opts) : lp_(lp), opts_(opts) {
        n_ = lp.num_vars;
        m_ = lp.num_rows();
        total_ = n_ + m_;
        build_matrix();
        scale();
    }

    LpSolution solve() {
        LpSolution out;
        init_basis();
        long iter_cap = opts_.max_iterations > 0
                            ? opts_.max_iterations
                            : 20000 + 50L * static_cast<long>(total_);
        if (!factorize_with_repair()) return fail(out);
        compute_basics();

        bool feasible = false;
        for (int attempt = 0; attempt < 3 && !feasible; ++attempt) {
            int p1 = run_phase1(iter_cap, out);
            if (p1 < 0) return fail(out);
            if (p1 == 1) {  // proven infeasible
                out.status = LpStatus::Infeasible;
                extract_farkas(out);
                extract_point(out, /*with_duals=*/false);
                return out;
            }
            int p2 = run_phase2(iter_cap, out);
            if (p2 < 0) return fail(out);
            if (p2 == 2) {
                out.status = LpStatus::Unbounded;
                extract_point(out, /*with_duals=*/false);
                return out;
            }
            // Polish: refactorize, recompute basics, re-check feasibility.
            if (!factorize_with_repair()) return fail(out);
            compute_basics();
            feasible = max_infeasibility() <= 10.0 * opts_.feas_tol;
        }
        if (!feasible) return fail(out);
        out.status = LpStatus::Optimal;
        extract_point(out, /*with_duals=*/true);
        return out;
    }

private:
    const LinearProgram& lp_;
    SimplexOptions opts_;
    int n_ = 0, m_ = 0, total_ = 0;

    // Column-major matrix: structural columns then implicit slack columns.
    std::vector<int> col_start_;
    std::vector<int> col_row_;
    std::vector<double> col_val_;

    std::vector<double> row_scale_, col_scale_;
    std::vector<double> lb_, ub_, cost_, rhs_;  // scaled working data
    std::vector<double> xval_;
    std::vector<VarStatus> vstat_;
    std::vector<int> basic_;    // slot -> column
    std::vector<int> slot_of_;  // column -> slot or -1

    // LU factors of the basis, plus product-form eta updates.
    std::vector<int> perm_row_, pos_of_row_;
    std::vector<std::vector<std::pair<int, double>>> lcols_, ucols_;
    std::vector<double> udiag_;
    struct Eta {
        int slot;
        double pivot;
        std::vector<std::pair<int, double>> entries;  // excludes the pivot slot
    };
    std::vector<Eta> etas_;

    std::vector<double> work_, work2_;
    std::vector<int> touched_;
    std::vector<char> mark_;

    long iterations_ = 0, phase1_iterations_ = 0;
    bool bland_ = false;
    long stall_count_ = 0;
    double last_obj_ = kInf;

    double sense_sign() const { return lp_.sense == Sense::Min ? 1.0 : -1.0; }

    void build_matrix() {
        std::vector<int> count(static_cast<size_t>(n_), 0);
        for (const auto& row : lp_.rows)
            for (const auto& [j, a] : row.coeffs)
                if (a != 0.0) ++count[static_cast<size_t>(j)];
        col_start_.assign(static_cast<size_t>(n_) + 1, 0);
        for (int j = 0; j < n_; ++j)
            col_start_[static_cast<size_t>(j) + 1] = col_start_[static_cast<size_t>(j)] + count[static_cast<size_t>(j)];
        col_row_.resize(static_cast<size_t>(col_start_[static_cast<size_t>(n_)]));
        col_val_.resize(col_row_.size());
        std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
        for (int i = 0; i < m_; ++i)
            for (const auto& [j, a] : lp_.rows[static_cast<size_t>(i)].coeffs)
                if (a != 0.0) {
                    int p = fill[static_cast<size_t>(j)]++;
                    col_row_[static_cast<size_t>(p)] = i;
                    col_val_[static_cast<size_t>(p)] = a;
                }
    }

    void scale() {
        row_scale_.assign(static_cast<size_t>(m_), 1.0);
        col_scale_.assign(static_cast<size_t>(n_), 1.0);
        std::vector<double> rmax(static_cast<size_t>(m_), 0.0);
        for (size_t p = 0; p < col_row_.size(); ++p)
            rmax[static_cast<size_t>(col_row_[p])] =
                std::max(rmax[static_cast<size_t>(col_row_[p])], std::abs(col_val_[p]));
        for (int i = 0; i < m_; ++i) row_scale_[static_cast<size_t>(i)] = pow2_scale(rmax[static_cast<size_t>(i)]);
        for (int j = 0; j < n_; ++j) {
            double cmax = 0.0;
            for (int p = col_start_[static_cast<size_t>(j)]; p < col_start_[static_cast<size_t>(j) + 1]; ++p)
                cmax = std::max(cmax, std::abs(col_val_[static_cast<size_t>(p)]) *
                                          row_scale_[static_cast<size_t>(col_row_[static_cast<size_t>(p)])]);
            col_scale_[static_cast<size_t>(j)] = pow2_scale(cmax);
        }
        for (int j = 0; j < n_; ++j)
            for (int p = col_start_[static_cast<size_t>(j)]; p < col_start_[static_cast<size_t>(j) + 1]; ++p)
                col_val_[static_cast<size_t>(p)] *= row_scale_[static_cast<size_t>(col_row_[static_cast<size_t>(p)])] *
                                                    col_scale_[static_cast<size_t>(j)];

        lb_.assign(static_cast<size_t>(total_), 0.0);
        ub_.assign(static_cast<size_t>(total_), 0.0);
        cost_.assign(static_cast<size_t>(total_), 0.0);
        const double s = sense_sign();
        for (int j = 0; j < n_; ++j) {
            double cs = col_scale_[static_cast<size_t>(j)];
            lb_[static_cast<size_t>(j)] = lp_.lower[static_cast<size_t>(j)] / cs;
            ub_[static_cast<size_t>(j)] = lp_.upper[static_cast<size_t>(j)] / cs;
            cost_[static_cast<size_t>(j)] = s * lp_.cost[static_cast<size_t>(j)] * cs;
        }
        rhs_.assign(static_cast<size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) {
            rhs_[static_cast<size_t>(i)] = lp_.rows[static_cast<size_t>(i)].rhs * row_scale_[static_cast<size_t>(i)];
            int sj = n_ + i;
            switch (lp_.rows[static_cast<size_t>(i)].rel) {
                case Rel::LE: lb_[static_cast<size_t>(sj)] = 0.0; ub_[static_cast<size_t>(sj)] = kInf; break;
                case Rel::GE: lb_[static_cast<size_t>(sj)] = -kInf; ub_[static_cast<size_t>(sj)] = 0.0; break;
                case Rel::EQ: lb_[static_cast<size_t>(sj)] = 0.0; ub_[static_cast<size_t>(sj)] = 0.0; break;
            }
        }
    }

    template <typename F>
    void for_col(int j, F&& f) const {
        if (j < n_) {
            for (int p = col_start_[static_cast<size_t>(j)]; p < col_start_[static_cast<size_t>(j) + 1]; ++p)
                f(col_row_[static_cast<size_t>(p)], col_val_[static_cast<size_t>(p)]);
        } else {
            f(j - n_, 1.0);
        }
    }

    void init_basis() {
        vstat_.assign(static_cast<size_t>(total_), VarStatus::AtLower);
        xval_.assign(static_cast<size_t>(total_), 0.0);
        basic_.assign(static_cast<size_t>(m_), 0);
        slot_of_.assign(static_cast<size_t>(total_), -1);

        bool warm = false;
        if (opts_.warm_basis && static_cast<int>(opts_.warm_basis->size()) == total_) {
            int nb = 0;
            for (int j = 0; j < total_; ++j)
                if ((*opts_.warm_basis)[static_cast<size_t>(j)] == VarStatus::Basic) ++nb;
            if (nb == m_) {
                warm = true;
                int slot = 0;
                for (int j = 0; j < total_; ++j) {
                    VarStatus st = (*opts_.warm_basis)[static_cast<size_t>(j)];
                    vstat_[static_cast<size_t>(j)] = st;
                    if (st == VarStatus::Basic) {
                        basic_[static_cast<size_t>(slot)] = j;
                        slot_of_[static_cast<size_t>(j)] = slot++;
                    }
                }
            }
        }
        if (!warm) {
            for (int i = 0; i < m_; ++i) {
                basic_[static_cast<size_t>(i)] = n_ + i;
                slot_of_[static_cast<size_t>(n_ + i)] = i;
                vstat_[static_cast<size_t>(n_ + i)] = VarStatus::Basic;
            }
        }
        for (int j = 0; j < total_; ++j) {
            if (vstat_[static_cast<size_t>(j)] == VarStatus::Basic) continue;
            double lo = lb_[static_cast<size_t>(j)], hi = ub_[static_cast<size_t>(j)];
            VarStatus st = vstat_[static_cast<size_t>(j)];
            if (st == VarStatus::AtUpper && std::isfinite(hi)) {
                xval_[static_cast<size_t>(j)] = hi;
            } else if (std::isfinite(lo)) {
                vstat_[static_cast<size_t>(j)] = VarStatus::AtLower;
                xval_[static_cast<size_t>(j)] = lo;
            } else if (std::isfinite(hi)) {
                vstat_[static_cast<size_t>(j)] = VarStatus::AtUpper;
                xval_[static_cast<size_t>(j)] = hi;
            } else {
                vstat_[static_cast<size_t>(j)] = VarStatus::FreeNonbasic;
                xval_[static_cast<size_t>(j)] = 0.0;
            }
        }
    }

    // ----- LU factorization -----

    bool factorize_with_repair() {
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::vector<int> failed = factorize();
            if (failed.empty()) return true;
            std::vector<int> open_rows;
            for (int i = 0; i < m_; ++i)
                if (pos_of_row_[static_cast<size_t>(i)] < 0) open_rows.push_back(i);
            if (open_rows.size() != failed.size()) return false;
            for (size_t k = 0; k < failed.size(); ++k) {
                int slot = failed[k];
                int out_var = basic_[static_cast<size_t>(slot)];
                slot_of_[static_cast<size_t>(out_var)] = -1;
                vstat_[static_cast<size_t>(out_var)] =
                    std::isfinite(lb_[static_cast<size_t>(out_var)]) ? VarStatus::AtLower
                    : std::isfinite(ub_[static_cast<size_t>(out_var)]) ? VarStatus::AtUpper
                                                                       : VarStatus::FreeNonbasic;
                xval_[static_cast<size_t>(out_var)] =
                    vstat_[static_cast<size_t>(out_var)] == VarStatus::AtLower ? lb_[static_cast<size_t>(out_var)]
                    : vstat_[static_cast<size_t>(out_var)] == VarStatus::AtUpper ? ub_[static_cast<size_t>(out_var)]
                                                                                 : 0.0;
                int in_var = n_ + open_rows[k];
                basic_[static_cast<size_t>(slot)] = in_var;
                slot_of_[static_cast<size_t>(in_var)] = slot;
                vstat_[static_cast<size_t>(in_var)] = VarStatus::Basic;
            }
        }
        return false;
    }

    // Returns slots whose columns were numerically singular (empty on success).
    std::vector<int> factorize() {
        etas_.clear();
        perm_row_.assign(static_cast<size_t>(m_), -1);
        pos_of_row_.assign(static_cast<size_t>(m_), -1);
        lcols_.assign(static_cast<size_t>(m_), {});
        ucols_.assign(static_cast<size_t>(m_), {});
        udiag_.assign(static_cast<size_t>(m_), 0.0);
        work_.assign(static_cast<size_t>(m_), 0.0);
        mark_.assign(static_cast<size_t>(m_), 0);
        touched_.clear();
        std::vector<int> failed;

        for (int j = 0; j < m_; ++j) {
            for_col(basic_[static_cast<size_t>(j)], [&](int i, double v) {
                if (!mark_[static_cast<size_t>(i)]) {
                    mark_[static_cast<size_t>(i)] = 1;
                    touched_.push_back(i);
                    work_[static_cast<size_t>(i)] = v;
                } else {
                    work_[static_cast<size_t>(i)] += v;
                }
            });
            for (int k = 0; k < j; ++k) {
                int pr = perm_row_[static_cast<size_t>(k)];
                if (pr < 0 || !mark_[static_cast<size_t>(pr)]) continue;
                double t = work_[static_cast<size_t>(pr)];
                if (t == 0.0) continue;
                for (const auto& [i, l] : lcols_[static_cast<size_t>(k)]) {
                    if (!mark_[static_cast<size_t>(i)]) {
                        mark_[static_cast<size_t>(i)] = 1;
                        touched_.push_back(i);
                        work_[static_cast<size_t>(i)] = 0.0;
                    }
                    work_[static_cast<size_t>(i)] -= l * t;
                }
            }
            int pivot_row = -1;
            double pivot_abs = 0.0;
            std::sort(touched_.begin(), touched_.end());
            for (int i : touched_) {
                double v = work_[static_cast<size_t>(i)];
                if (pos_of_row_[static_cast<size_t>(i)] >= 0) {
                    if (v != 0.0) ucols_[static_cast<size_t>(j)].emplace_back(pos_of_row_[static_cast<size_t>(i)], v);
                } else if (std::abs(v) > pivot_abs) {
                    pivot_abs = std::abs(v);
                    pivot_row = i;
                }
            }
            if (pivot_row < 0 || pivot_abs <= 1e-11) {
                failed.push_back(j);
            } else {
                double piv = work_[static_cast<size_t>(pivot_row)];
                perm_row_[static_cast<size_t>(j)] = pivot_row;
                pos_of_row_[static_cast<size_t>(pivot_row)] = j;
                udiag_[static_cast<size_t>(j)] = piv;
                for (int i : touched_) {
                    if (pos_of_row_[static_cast<size_t>(i)] >= 0) continue;
                    double mult = work_[static_cast<size_t>(i)] / piv;
                    if (std::abs(mult) > 1e-14) lcols_[static_cast<size_t>(j)].emplace_back(i, mult);
                }
            }
            for (int i : touched_) {
                mark_[static_cast<size_t>(i)] = 0;
                work_[static_cast<size_t>(i)] = 0.0;
            }
            touched_.clear();
        }
        return failed;
    }

    // b: dense vector in row space; result: coefficients per basis slot.
    void ftran(std::vector<double>& b) {
        for (int k = 0; k < m_; ++k) {
            double t = b[static_cast<size_t>(perm_row_[static_cast<size_t>(k)])];
            if (t == 0.0) continue;
            for (const auto& [i, l] : lcols_[static_cast<size_t>(k)]) b[static_cast<size_t>(i)] -= l * t;
        }
        work2_.assign(static_cast<size_t>(m_), 0.0);
        for (int k = 0; k < m_; ++k) work2_[static_cast<size_t>(k)] = b[static_cast<size_t>(perm_row_[static_cast<size_t>(k)])];
        for (int k = m_ - 1; k >= 0; --k) {
            double t = work2_[static_cast<size_t>(k)] / udiag_[static_cast<size_t>(k)];
            work2_[static_cast<size_t>(k)] = t;
            if (t != 0.0)
                for (const auto& [kk, u] : ucols_[static_cast<size_t>(k)]) work2_[static_cast<size_t>(kk)] -= u * t;
        }
        b.assign(work2_.begin(), work2_.end());  // slot space
        for (const auto& e : etas_) {
            double t = b[static_cast<size_t>(e.slot)] / e.pivot;
            b[static_cast<size_t>(e.slot)] = t;
            if (t != 0.0)
                for (const auto& [i, w] : e.entries) b[static_cast<size_t>(i)] -= w * t;
        }
    }

    // c: dense vector per basis slot; result: dual values per row.
    void btran(std::vector<double>& c) {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double t = c[static_cast<size_t>(it->slot)];
            for (const auto& [i, w] : it->entries) t -= w * c[static_cast<size_t>(i)];
            c[static_cast<size_t>(it->slot)] = t / it->pivot;
        }
        work2_.assign(static_cast<size_t>(m_), 0.0);
        for (int k = 0; k < m_; ++k) {
            double t = c[static_cast<size_t>(k)];
            for (const auto& [kk, u] : ucols_[static_cast<size_t>(k)]) t -= u * work2_[static_cast<size_t>(kk)];
            work2_[static_cast<size_t>(k)] = t / udiag_[static_cast<size_t>(k)];
        }
        c.assign(static_cast<size_t>(m_), 0.0);
        for (int k = m_ - 1; k >= 0; --k) {
            double t = work2_[static_cast<size_t>(k)];
            for (const auto& [i, l] : lcols_[static_cast<size_t>(k)]) t -= l * c[static_cast<size_t>(i)];
            c[static_cast<size_t>(perm_row_[static_cast<size_t>(k)])] = t;
        }
    }

    void compute_basics() {
        std::vector<double> b(rhs_);
        for (int j = 0; j < total_; ++j) {
            if (vstat_[static_cast<size_t>(j)] == VarStatus::Basic) continue;
            double v = xval_[static_cast<size_t>(j)];
            if (v == 0.0) continue;
            for_col(j, [&](int i, double a) { b[static_cast<size_t>(i)] -= a * v; });
        }
        ftran(b);
        for (int k = 0; k < m_; ++k) xval_[static_cast<size_t>(basic_[static_cast<size_t>(k)])] = b[static_cast<size_t>(k)];
    }

    double infeas_of(int j) const {
        double v = xval_[static_cast<size_t>(j)];
        if (v < lb_[static_cast<size_t>(j)]) return lb_[static_cast<size_t>(j)] - v;
        if (v > ub_[static_cast<size_t>(j)]) return v - ub_[static_cast<size_t>(j)];
        return 0.0;
    }

    double max_infeasibility() const {
        double worst = 0.0;
        for (int k = 0; k < m_; ++k) worst = std::max(worst, infeas_of(basic_[static_cast<size_t>(k)]));
        return worst;
    }

    // ----- pricing and the pivot step -----

    struct Pricing {
        int var = -1;
        double dir = 0.0;
        double score = 0.0;
    };

    // pcost: objective coefficients for the current phase (per column).
    Pricing price(const std::vector<double>& y, const std::vector<double>& pcost) {
        Pricing best;
        for (int j = 0; j < total_; ++j) {
            VarStatus st = vstat_[static_cast<size_t>(j)];
            if (st == VarStatus::Basic) continue;
            if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;  // fixed
            double d = pcost[static_cast<size_t>(j)];
            for_col(j, [&](int i, double a) { d -= a * y[static_cast<size_t>(i)]; });
            double dir = 0.0;
            if (st == VarStatus::AtLower && d < -opts_.opt_tol) dir = 1.0;
            else if (st == VarStatus::AtUpper && d > opts_.opt_tol) dir = -1.0;
            else if (st == VarStatus::FreeNonbasic && std::abs(d) > opts_.opt_tol) dir = d < 0.0 ? 1.0 : -1.0;
            if (dir == 0.0) continue;
            double score = std::abs(d);
            if (bland_) return Pricing{j, dir, score};
            if (score > best.score) best = Pricing{j, dir, score};
        }
        return best;
    }

    // Blocking bound for a basic variable moving at `rate`; returns false if
    // nothing ahead blocks (e.g. already beyond a bound and moving away).
    bool blocking_target(double xv, double lo, double hi, double rate, double& target) const {
        const double ftol = opts_.feas_tol;
        if (rate > 0.0) {
            if (xv < lo - ftol) target = lo;
            else if (xv <= hi + ftol) target = hi;
            else return false;
        } else {
            if (xv > hi + ftol) target = hi;
            else if (xv >= lo - ftol) target = lo;
            else return false;
        }
        return std::isfinite(target);
    }

    // Returns: 0 pivot done, 1 unbounded direction, -1 numerical trouble.
    int pivot_step(int enter, double dir, bool phase1) {
        std::vector<double> w(static_cast<size_t>(m_), 0.0);
        for_col(enter, [&](int i, double a) { w[static_cast<size_t>(i)] = a; });
        ftran(w);

        const double tiny = 1e-11;
        // Pass 1: exact minimum ratio.
        double t_min = kInf;
        for (int k = 0; k < m_; ++k) {
            double wk = w[static_cast<size_t>(k)];
            if (std::abs(wk) <= tiny) continue;
            int bv = basic_[static_cast<size_t>(k)];
            double rate = -dir * wk;
            double target;
            if (!blocking_target(xval_[static_cast<size_t>(bv)], lb_[static_cast<size_t>(bv)],
                                 ub_[static_cast<size_t>(bv)], rate, target))
                continue;
            double t = std::max(0.0, (target - xval_[static_cast<size_t>(bv)]) / rate);
            t_min = std::min(t_min, t);
        }
        // Pass 2: among near-ties, the largest pivot element (ties: lowest slot).
        int leave_slot = -1;
        double leave_bound = 0.0, leave_t = 0.0, best_pivot = 0.0;
        if (std::isfinite(t_min)) {
            const double band = t_min + 1e-9 * (1.0 + t_min);
            for (int k = 0; k < m_; ++k) {
                double wk = w[static_cast<size_t>(k)];
                if (std::abs(wk) <= tiny) continue;
                int bv = basic_[static_cast<size_t>(k)];
                double rate = -dir * wk;
                double target;
                if (!blocking_target(xval_[static_cast<size_t>(bv)], lb_[static_cast<size_t>(bv)],
                                     ub_[static_cast<size_t>(bv)], rate, target))
                    continue;
                double t = std::max(0.0, (target - xval_[static_cast<size_t>(bv)]) / rate);
                if (t <= band && std::abs(wk) > best_pivot) {
                    leave_slot = k;
                    leave_bound = target;
                    leave_t = t;
                    best_pivot = std::abs(wk);
                }
            }
        }
        double t_flip = kInf;
        if (std::isfinite(lb_[static_cast<size_t>(enter)]) && std::isfinite(ub_[static_cast<size_t>(enter)]))
            t_flip = ub_[static_cast<size_t>(enter)] - lb_[static_cast<size_t>(enter)];

        if (leave_slot < 0 && !std::isfinite(t_flip)) return phase1 ? -1 : 1;

        if (t_flip < (leave_slot < 0 ? kInf : leave_t) - 1e-12) {
            apply_step(enter, dir, t_flip, w);
            vstat_[static_cast<size_t>(enter)] =
                dir > 0.0 ? VarStatus::AtUpper : VarStatus::AtLower;
            xval_[static_cast<size_t>(enter)] =
                dir > 0.0 ? ub_[static_cast<size_t>(enter)] : lb_[static_cast<size_t>(enter)];
            return 0;
        }

        double t = leave_t;
        apply_step(enter, dir, t, w);

        int lv = basic_[static_cast<size_t>(leave_slot)];
        xval_[static_cast<size_t>(lv)] = leave_bound;  // snap to the bound
        vstat_[static_cast<size_t>(lv)] =
            leave_bound == ub_[static_cast<size_t>(lv)] && std::isfinite(ub_[static_cast<size_t>(lv)])
                ? VarStatus::AtUpper
                : VarStatus::AtLower;
        if (!std::isfinite(lb_[static_cast<size_t>(lv)]) && !std::isfinite(ub_[static_cast<size_t>(lv)]))
            vstat_[static_cast<size_t>(lv)] = VarStatus::FreeNonbasic;
        slot_of_[static_cast<size_t>(lv)] = -1;
        basic_[static_cast<size_t>(leave_slot)] = enter;
        slot_of_[static_cast<size_t>(enter)] = leave_slot;
        vstat_[static_cast<size_t>(enter)] = VarStatus::Basic;

        Eta e;
        e.slot = leave_slot;
        e.pivot = w[static_cast<size_t>(leave_slot)];
        if (std::abs(e.pivot) <= 1e-12) return -1;
        for (int k = 0; k < m_; ++k)
            if (k != leave_slot && std::abs(w[static_cast<size_t>(k)]) > 1e-14)
                e.entries.emplace_back(k, w[static_cast<size_t>(k)]);
        etas_.push_back(std::move(e));

        if (static_cast<int>(etas_.size()) >= opts_.refactor_every) {
            if (!factorize_with_repair()) return -1;
            compute_basics();
        }
        return 0;
    }

    void apply_step(int enter, double dir, double t, const std::vector<double>& w) {
        if (t != 0.0) {
            for (int k = 0; k < m_; ++k) {
                double wk = w[static_cast<size_t>(k)];
                if (wk != 0.0) xval_[static_cast<size_t>(basic_[static_cast<size_t>(k)])] -= dir * t * wk;
            }
        }
        xval_[static_cast<size_t>(enter)] += dir * t;
    }

    // ----- phases -----

    double phase1_objective() const {
        double s = 0.0;
        for (int k = 0; k < m_; ++k) s += infeas_of(basic_[static_cast<size_t>(k)]);
        return s;
    }

    std::vector<double> phase1_costs() const {
        std::vector<double> c(static_cast<size_t>(total_), 0.0);
        for (int k = 0; k < m_; ++k) {
            int bv = basic_[static_cast<size_t>(k)];
            double v = xval_[static_cast<size_t>(bv)];
            if (v < lb_[static_cast<size_t>(bv)] - opts_.feas_tol) c[static_cast<size_t>(bv)] = -1.0;
            else if (v > ub_[static_cast<size_t>(bv)] + opts_.feas_tol) c[static_cast<size_t>(bv)] = 1.0;
        }
        return c;
    }

    // Returns 0 feasible, 1 infeasible proven, -1 failure.
    int run_phase1(long iter_cap, LpSolution& out) {
        bland_ = false;
        stall_count_ = 0;
        last_obj_ = kInf;
        while (true) {
            if (max_infeasibility() <= opts_.feas_tol) return 0;
            if (iterations_ >= iter_cap) return -1;
            std::vector<double> pc = phase1_costs();
            std::vector<double> cb(static_cast<size_t>(m_), 0.0);
            for (int k = 0; k < m_; ++k) cb[static_cast<size_t>(k)] = pc[static_cast<size_t>(basic_[static_cast<size_t>(k)])];
            btran(cb);
            Pricing pr = price(cb, pc);
            if (pr.var < 0) {
                out.farkas_ray = cb;  // row-space phase-1 duals
                return 1;
            }
            int rc = pivot_step(pr.var, pr.dir, /*phase1=*/true);
            if (rc != 0) return -1;
            ++iterations_;
            ++phase1_iterations_;
            double obj = phase1_objective();
            if (obj > last_obj_ - 1e-12 * (1.0 + std::abs(last_obj_))) ++stall_count_;
            else stall_count_ = 0;
            last_obj_ = obj;
            if (stall_count_ > opts_.stall_limit) bland_ = true;
        }
    }

    // Returns 0 optimal, 2 unbounded, -1 failure.
    int run_phase2(long iter_cap, LpSolution&) {
        bland_ = false;
        stall_count_ = 0;
        last_obj_ = kInf;
        while (true) {
            if (iterations_ >= iter_cap) return -1;
            std::vector<double> cb(static_cast<size_t>(m_), 0.0);
            for (int k = 0; k < m_; ++k) cb[static_cast<size_t>(k)] = cost_[static_cast<size_t>(basic_[static_cast<size_t>(k)])];
            btran(cb);
            Pricing pr = price(cb, cost_);
            if (pr.var < 0) return 0;
            int rc = pivot_step(pr.var, pr.dir, /*phase1=*/false);
            if (rc == 1) return 2;
            if (rc < 0) return -1;
            ++iterations_;
            double obj = 0.0;
            for (int j = 0; j < total_; ++j) obj += cost_[static_cast<size_t>(j)] * xval_[static_cast<size_t>(j)];
            if (obj > last_obj_ - 1e-12 * (1.0 + std::abs(last_obj_))) ++stall_count_;
            else stall_count_ = 0;
            last_obj_ = obj;
            if (stall_count_ > opts_.stall_limit) bland_ = true;
        }
    }

    // ----- extraction -----

    LpSolution fail(LpSolution& out) {
        out.status = LpStatus::NumericalFailure;
        out.iterations = iterations_;
        out.phase1_iterations = phase1_iterations_;
        return out;
    }

    void extract_farkas(LpSolution& out) {
        // Phase-1 duals y, in row space. For any x in the box,
        // sum_i y_i (a_i x) >= y' rhs must fail; user-space ray needs the
        // relation-consistent orientation, which the phase-1 duals carry up to
        // an overall sign. Unscale and orient so GE rows get >= 0 entries.
        std::vector<double>& y = out.farkas_ray;
        for (int i = 0; i < m_; ++i) y[static_cast<size_t>(i)] *= row_scale_[static_cast<size_t>(i)];
    }

    void extract_point(LpSolution& out, bool with_duals) {
        out.iterations = iterations_;
        out.phase1_iterations = phase1_iterations_;
        out.x.assign(static_cast<size_t>(n_), 0.0);
        for (int j = 0; j < n_; ++j)
            out.x[static_cast<size_t>(j)] = xval_[static_cast<size_t>(j)] * col_scale_[static_cast<size_t>(j)];
        out.basis.assign(static_cast<size_t>(total_), VarStatus::AtLower);
        for (int j = 0; j < total_; ++j) out.basis[static_cast<size_t>(j)] = vstat_[static_cast<size_t>(j)];
        out.objective = lp_.objective_offset;
        for (int j = 0; j < n_; ++j) out.objective += lp_.cost[static_cast<size_t>(j)] * out.x[static_cast<size_t>(j)];
        if (!with_duals) return;

        std::vector<double> cb(static_cast<size_t>(m_), 0.0);
        for (int k = 0; k < m_; ++k) cb[static_cast<size_t>(k)] = cost_[static_cast<size_t>(basic_[static_cast<size_t>(k)])];
        btran(cb);
        const double s = sense_sign();
        out.row_duals.assign(static_cast<size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i)
            out.row_duals[static_cast<size_t>(i)] = s * cb[static_cast<size_t>(i)] * row_scale_[static_cast<size_t>(i)];
        out.reduced_costs.assign(static_cast<size_t>(n_), 0.0);
        for (int j = 0; j < n_; ++j) {
            double d = cost_[static_cast<size_t>(j)];
            for_col(j, [&](int i, double a) { d -= a * cb[static_cast<size_t>(i)]; });
            out.reduced_costs[static_cast<size_t>(j)] = s * d / col_scale_[static_cast<size_t>(j)];
        }
    }
};

}  // namespace detail

/// Solve an LP. Deterministic: identical inputs give identical outputs.
/// Numerical failure is reported as a distinct status, never silently.
inline LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {}) {
    validate_lp(lp);
    if (lp.num_rows() == 0) {
        // Pure bound problem: each variable sits at the bound favoured by its cost.
        LpSolution out;
        const double s = lp.sense == Sense::Min ? 1.0 : -1.0;
        out.x.assign(static_cast<size_t>(lp.num_vars), 0.0);
        out.basis.assign(static_cast<size_t>(lp.num_vars), VarStatus::AtLower);
        out.reduced_costs = lp.cost;
        out.objective = lp.objective_offset;
        for (int j = 0; j < lp.num_vars; ++j) {
            double c = s * lp.cost[static_cast<size_t>(j)];
            double v;
            if (c > 0.0) v = lp.lower[static_cast<size_t>(j)];
            else if (c < 0.0) v = lp.upper[static_cast<size_t>(j)];
            else v = std::isfinite(lp.lower[static_cast<size_t>(j)]) ? lp.lower[static_cast<size_t>(j)]
                     : std::isfinite(lp.upper[static_cast<size_t>(j)]) ? lp.upper[static_cast<size_t>(j)] : 0.0;
            if (!std::isfinite(v)) {
                out.status = LpStatus::Unbounded;
                return out;
            }
            out.x[static_cast<size_t>(j)] = v;
            out.basis[static_cast<size_t>(j)] = v == lp.upper[static_cast<size_t>(j)] ? VarStatus::AtUpper : VarStatus::AtLower;
            out.objective += lp.cost[static_cast<size_t>(j)] * v;
        }
        out.status = LpStatus::Optimal;
        return out;
    }
    detail::SimplexSolver solver(lp, opts);
    return solver.solve();
}

}  // namespace embergrid
