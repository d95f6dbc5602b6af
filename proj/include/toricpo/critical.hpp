#pragma once

// The full critical-point pipeline: candidates, initial solve, lift, and the
// surface refinement for cells the initial system cannot settle.

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "cpoly.hpp"
#include "laurent.hpp"
#include "polytope.hpp"
#include "puiseux.hpp"
#include "tropical.hpp"

namespace toricpo {

struct CriticalOptions {
    Rational order = default_truncation();
    int jobs = 1;
    bool refine = true;  // n = 2: resolve positive-dimensional and degenerate cells by elimination
    SolveOptions solve;
    double residual_tol = 1e-9;
};

struct CellReport {
    TropicalCell cell;
    std::vector<CPoly> initial;  // 0-dimensional cells only
    ComplexVector eliminant;
    int eliminant_var = 0;
    std::string status;  // lifted, degenerate, refined, positive-dimensional, no-solutions
    int found = 0;
    int unresolved = 0;
    std::vector<std::string> notes;
};

struct CriticalAnalysis {
    std::vector<CriticalPoint> points;
    std::vector<CellReport> cells;
    std::vector<TropicalCell> leftovers;  // positive-dimensional cells, for the leading term equation
    std::vector<std::string> notes;

    int multiplicity_total() const {
        int s = 0;
        for (const auto& p : points) s += p.multiplicity.value_or(0);
        return s;
    }
    bool any_unresolved() const {
        for (const auto& p : points)
            if (!p.multiplicity) return true;
        for (const auto& c : cells)
            if (c.unresolved > 0) return true;
        return false;
    }
};

namespace detail {

inline bool same_initial(const ComplexVector& a, const ComplexVector& b, double eps) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > eps * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

inline CriticalPoint leading_order_point(const RationalVector& u, const ComplexVector& root, std::optional<int> mult,
                                         const Rational& order) {
    CriticalPoint cp;
    cp.u = u;
    cp.initial = root;
    for (std::size_t i = 0; i < root.size(); ++i) {
        cp.ybar.push_back(NovikovScalar::from_terms({{Rational(0), root[i]}}, ExtRational(order)));
        cp.y.push_back(cp.ybar.back().shifted(u[i]));
    }
    cp.multiplicity = mult;
    cp.residual_valuation = ExtRational(Rational(0));
    cp.method = "leading-order";
    return cp;
}

struct CellResult {
    CellReport report;
    std::vector<CriticalPoint> points;
};

inline CellResult analyze_cell(const std::vector<LaurentPoly>& system, const TropicalCell& cell, const MomentPolytope& p,
                               const CriticalOptions& opt) {
    const std::size_t n = system.size();
    CellResult out;
    out.report.cell = cell;
    LiftOptions lo;
    lo.order = opt.order;
    lo.degeneracy = opt.solve.degeneracy;
    lo.residual_tol = opt.residual_tol;
    const bool can_refine = opt.refine && n == 2;

    auto refine = [&](auto accept) {
        auto r = refine_cell(system, cell, p, lo);
        for (auto& note : r.notes) out.report.notes.push_back(note);
        out.report.unresolved += r.unresolved;
        int k = 0;
        for (auto& q : r.points)
            if (accept(q)) {
                out.points.push_back(std::move(q));
                ++k;
            }
        return k;
    };

    if (cell.dim > 0) {
        if (can_refine) {
            int k = refine([](const CriticalPoint&) { return true; });
            out.report.found = k;
            out.report.status = "refined";
        } else {
            out.report.status = "positive-dimensional";
        }
        return out;
    }

    out.report.initial = initial_system(system, cell.point);
    InitialSolve sol;
    try {
        sol = solve_initial(out.report.initial, opt.solve);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::PositiveDimensionalInitialLocus) throw;
        out.report.notes.push_back(e.what());
        if (can_refine) {
            out.report.found = refine([](const CriticalPoint&) { return true; });
            out.report.status = "refined";
        } else {
            out.report.status = "positive-dimensional";
        }
        return out;
    }
    out.report.eliminant = sol.eliminant;
    out.report.eliminant_var = sol.eliminant_var;
    if (sol.points.empty()) {
        out.report.status = "no-solutions";
        return out;
    }

    std::vector<std::pair<ComplexVector, int>> degenerate;
    for (std::size_t k = 0; k < sol.points.size(); ++k) {
        if (sol.nondegenerate[k]) {
            try {
                out.points.push_back(newton_lift(system, cell.point, sol.points[k], lo));
            } catch (const Error& e) {
                if (!e.is_numerical()) throw;
                out.report.notes.push_back(e.what());
                ++out.report.unresolved;
            }
        } else {
            degenerate.emplace_back(sol.points[k], sol.multiplicity[k]);
        }
    }
    out.report.status = degenerate.empty() ? "lifted" : "degenerate";
    for (const auto& [root, mult] : degenerate) {
        int k = 0;
        if (can_refine) {
            k = refine([&, r = root](const CriticalPoint& q) { return same_initial(q.initial, r, 1e-3); });
            if (k > 0) out.report.status = "refined";
        }
        if (k == 0) {
            std::optional<int> m;
            if (mult > 0 && n <= 2) m = mult;
            out.points.push_back(leading_order_point(cell.point, root, m, opt.order));
            if (!m) ++out.report.unresolved;
        }
    }
    out.report.found = 0;
    for (const auto& q : out.points) out.report.found += q.multiplicity.value_or(1);
    return out;
}

inline double arg_key(Complex c) {
    double a = std::arg(c);
    if (std::abs(a) < 1e-9 || std::abs(std::abs(a) - M_PI) < 1e-9) a = std::abs(a);  // +-pi and +-0 agree
    return std::round(a * 1e9) / 1e9;
}

}  // namespace detail

/// Critical points of a potential (or of any n-variable Laurent potential on P).
inline CriticalAnalysis find_critical_points(const LaurentPoly& w, const MomentPolytope& p, const CriticalOptions& opt = {}) {
    CriticalAnalysis out;
    auto system = critical_system(w);
    auto cells = tropical_candidates(system, p);

    std::vector<detail::CellResult> results(cells.size());
    if (opt.jobs > 1 && cells.size() > 1) {
        std::vector<std::future<detail::CellResult>> futs;
        std::size_t next = 0;
        while (next < cells.size()) {
            futs.clear();
            std::size_t start = next;
            for (; next < cells.size() && next - start < static_cast<std::size_t>(opt.jobs); ++next)
                futs.push_back(std::async(std::launch::async, detail::analyze_cell, std::cref(system), std::cref(cells[next]),
                                          std::cref(p), std::cref(opt)));
            for (std::size_t k = 0; k < futs.size(); ++k) results[start + k] = futs[k].get();
        }
    } else {
        for (std::size_t k = 0; k < cells.size(); ++k) results[k] = detail::analyze_cell(system, cells[k], p, opt);
    }

    for (std::size_t k = 0; k < cells.size(); ++k) {
        for (auto& q : results[k].points) out.points.push_back(std::move(q));
        if (cells[k].dim > 0) out.leftovers.push_back(cells[k]);
        out.cells.push_back(std::move(results[k].report));
    }
    std::stable_sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.u != b.u) return a.u < b.u;
        for (std::size_t i = 0; i < a.initial.size(); ++i) {
            double x = detail::arg_key(a.initial[i]), y = detail::arg_key(b.initial[i]);
            if (x != y) return x < y;
            double ma = std::abs(a.initial[i]), mb = std::abs(b.initial[i]);
            if (std::abs(ma - mb) > 1e-9 * std::max(ma, mb)) return ma < mb;
        }
        return false;
    });
    if (cells.empty()) out.notes.push_back("no tropical candidates in the interior of P");
    return out;
}

inline CriticalAnalysis find_critical_points(const Potential& w, const CriticalOptions& opt = {}) {
    auto out = find_critical_points(w.polynomial(opt.order), w.polytope(), opt);
    for (const auto& note : w.notes()) out.notes.push_back(note);
    return out;
}

}  // namespace toricpo
