// Debug dump of a LinearProgram (or MIP) in the common LP text interchange
// format, for cross-checking against external solvers during development.

#pragma once

#include <fstream>
#include <sstream>

#include "embergrid/milp.hpp"

namespace embergrid {

namespace detail {

inline std::string lp_ident(const std::string& given, const char* prefix, int idx) {
    if (given.empty()) return std::string(prefix) + std::to_string(idx);
    std::string s = given;
    for (auto& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
    return s;
}

}  // namespace detail

inline std::string to_lp_format(const LinearProgram& lp, const std::vector<int>& binaries = {}) {
    std::ostringstream os;
    os.precision(17);
    auto var = [&](int j) { return detail::lp_ident(lp.col_names[static_cast<size_t>(j)], "x", j); };
    os << (lp.sense == Sense::Min ? "Minimize\n obj:" : "Maximize\n obj:");
    bool any = false;
    for (int j = 0; j < lp.num_vars; ++j) {
        double c = lp.cost[static_cast<size_t>(j)];
        if (c == 0.0) continue;
        os << (c >= 0 ? " + " : " - ") << std::abs(c) << " " << var(j);
        any = true;
    }
    if (!any) os << " 0";
    os << "\nSubject To\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        const auto& row = lp.rows[static_cast<size_t>(i)];
        os << " " << detail::lp_ident(lp.row_names[static_cast<size_t>(i)], "r", i) << ":";
        if (row.coeffs.empty()) os << " 0 " << var(0);
        for (const auto& [j, a] : row.coeffs)
            os << (a >= 0 ? " + " : " - ") << std::abs(a) << " " << var(j);
        os << (row.rel == Rel::LE ? " <= " : row.rel == Rel::GE ? " >= " : " = ") << row.rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.num_vars; ++j) {
        double lo = lp.lower[static_cast<size_t>(j)], hi = lp.upper[static_cast<size_t>(j)];
        if (lo == -kInf && hi == kInf) os << " " << var(j) << " free\n";
        else if (lo == -kInf) os << " -inf <= " << var(j) << " <= " << hi << "\n";
        else if (hi == kInf) os << " " << var(j) << " >= " << lo << "\n";
        else if (lo == hi) os << " " << var(j) << " = " << lo << "\n";
        else os << " " << lo << " <= " << var(j) << " <= " << hi << "\n";
    }
    if (!binaries.empty()) {
        os << "Binaries\n";
        for (int j : binaries) os << " " << var(j);
        os << "\n";
    }
    os << "End\n";
    return os.str();
}

inline void dump_lp(const LinearProgram& lp, const std::string& path,
                    const std::vector<int>& binaries = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write LP dump: " + path);
    out << to_lp_format(lp, binaries);
}

}  // namespace embergrid
