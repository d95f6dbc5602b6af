#pragma once

// Leading term equation at a fixed u: facets grouped by the value of l_j(u),
// the filtration by spans of normals, an adapted integral basis, and the
// triangular system it produces.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpoly.hpp"
#include "lattice.hpp"
#include "polytope.hpp"

namespace toricpo {

struct Level {
    Rational S;                        // common value of l_j(u)
    std::vector<std::size_t> members;  // facet indices, ascending
};

struct Filtration {
    std::vector<std::size_t> d;  // rank increase at each level
    std::vector<std::size_t> span_rank;
    std::size_t K = 0;           // first level (1-based) where the span is everything
    std::size_t K0 = 0;          // number of levels
};

struct AdaptedBasis {
    IntegerMatrix e;     // rows e*_s, unimodular
    IntegerMatrix einv;  // e^{-1}
    std::vector<std::size_t> level_of;  // 0-based level of each basis vector
    std::vector<std::size_t> offset;    // first basis index of each level (size K0 + 1)
    IntegerMatrix c;     // c[j] = v_j e^{-1}: v_j = sum_s c[j][s] e*_s
};

struct LTESystem {
    MomentPolytope p;
    RationalVector u;
    std::vector<Level> levels;
    Filtration filtration;
    AdaptedBasis basis;
    std::vector<Complex> coefficients;     // exponent-0 parts of c_j
    std::vector<CPoly> level_potentials;   // in the adapted variables Y_s = ybar^{e*_s}
    std::vector<CPoly> equations;          // Y_s d/dY_s of the potential of Y_s's level
    std::vector<std::size_t> equation_level;

    std::size_t n() const { return basis.e.size(); }
};

struct LTESolution {
    std::vector<std::optional<Complex>> adapted;  // nullopt: free
    std::vector<std::optional<Complex>> ybar;     // nullopt when it depends on a free variable
    std::vector<std::size_t> sampled;             // adapted variables fixed at a generic value

    bool has_free() const {
        return std::any_of(adapted.begin(), adapted.end(), [](const auto& x) { return !x; });
    }
};

struct LTEResult {
    bool solvable = false;
    std::vector<LTESolution> solutions;
    std::optional<std::size_t> obstruction_level;  // 0-based, when unsolvable
    std::vector<std::string> notes;
};

struct LTEOptions {
    SolveOptions solve;
    bool sample_underdetermined = true;  // false: raise LevelUnderdetermined
    double zero_tol = 1e-9;
};

/// Facets grouped by l_j(u), strictly increasing.
inline std::vector<Level> order_levels(const MomentPolytope& p, const RationalVector& u) {
    if (u.size() != static_cast<std::size_t>(p.dim())) throw Error(ErrorCode::IndexOutOfRange, "point has the wrong dimension");
    if (!p.is_interior(u)) throw Error(ErrorCode::NotInterior, detail::point_str(u) + " is not in the interior of P");
    std::map<Rational, std::vector<std::size_t>> by_value;
    for (std::size_t j = 0; j < p.num_facets(); ++j) by_value[p.ell(j, u)].push_back(j);
    std::vector<Level> out;
    for (auto& [s, js] : by_value) out.push_back(Level{s, std::move(js)});
    return out;
}

inline Filtration build_filtration(const MomentPolytope& p, const std::vector<Level>& levels) {
    Filtration f;
    f.K0 = levels.size();
    RationalMatrix rows;
    std::size_t prev = 0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        for (auto j : levels[l].members) {
            RationalVector r;
            for (long x : p.facet(j).normal) r.emplace_back(x);
            rows.push_back(std::move(r));
        }
        std::size_t r = linalg::rank(rows);
        f.d.push_back(r - prev);
        f.span_rank.push_back(r);
        if (r == static_cast<std::size_t>(p.dim()) && f.K == 0) f.K = l + 1;
        prev = r;
    }
    return f;
}

namespace detail {

inline std::vector<Integer> row_times(const std::vector<long>& v, const IntegerMatrix& m) {
    std::vector<Integer> out(m.empty() ? 0 : m[0].size(), Integer(0));
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t s = 0; s < out.size(); ++s) out[s] += v[i] * m[i][s];
    return out;
}

}  // namespace detail

/// Level by level: the saturation of the new normals (modulo the earlier basis
/// vectors) in Hermite form, completed to a unimodular basis.
inline AdaptedBasis adapted_basis(const MomentPolytope& p, const std::vector<Level>& levels, const Filtration& f) {
    const std::size_t n = static_cast<std::size_t>(p.dim());
    AdaptedBasis b;
    b.e = lattice::identity(n);
    std::size_t k = 0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        b.offset.push_back(k);
        if (f.d[l] == 0) continue;
        auto inv = lattice::unimodular_inverse(b.e);
        if (!inv) throw Error(ErrorCode::IntegralityFailure, "basis lost unimodularity");
        IntegerMatrix tail;
        for (auto j : levels[l].members) {
            auto c = detail::row_times(p.facet(j).normal, *inv);
            tail.emplace_back(c.begin() + static_cast<long>(k), c.end());
        }
        std::size_t d = 0;
        auto F = lattice::saturated_completion(tail, n - k, d);
        if (d != f.d[l]) throw Error(ErrorCode::IntegralityFailure, "rank mismatch at level " + std::to_string(l + 1));
        IntegerMatrix old_tail(b.e.begin() + static_cast<long>(k), b.e.end());
        auto new_tail = lattice::multiply(F, old_tail);
        for (std::size_t i = 0; i < new_tail.size(); ++i) b.e[k + i] = std::move(new_tail[i]);
        for (std::size_t s = 0; s < d; ++s) b.level_of.push_back(l);
        k += d;
    }
    b.offset.push_back(k);
    if (k != n) throw Error(ErrorCode::IntegralityFailure, "normals do not span");

    auto inv = lattice::unimodular_inverse(b.e);
    if (!inv) throw Error(ErrorCode::IntegralityFailure, "adapted basis is not unimodular");
    b.einv = *inv;
    b.c.assign(p.num_facets(), {});
    for (std::size_t l = 0; l < levels.size(); ++l)
        for (auto j : levels[l].members) {
            b.c[j] = detail::row_times(p.facet(j).normal, b.einv);
            for (std::size_t s = b.offset[l + 1]; s < n; ++s)
                if (b.c[j][s] != 0)
                    throw Error(ErrorCode::IntegralityFailure,
                                "facet " + std::to_string(j) + " leaves the span of its level's basis vectors");
        }
    return b;
}

inline LTESystem leading_term_system(const MomentPolytope& p, const RationalVector& u, const std::vector<Complex>& coefficients) {
    LTESystem sys;
    sys.p = p;
    sys.u = u;
    sys.levels = order_levels(p, u);
    sys.filtration = build_filtration(p, sys.levels);
    sys.basis = adapted_basis(p, sys.levels, sys.filtration);
    sys.coefficients = coefficients;
    if (sys.coefficients.empty()) sys.coefficients.assign(p.num_facets(), Complex(1.0));
    if (sys.coefficients.size() != p.num_facets()) throw Error(ErrorCode::IndexOutOfRange, "one coefficient per facet required");
    for (const auto& c : sys.coefficients)
        if (std::abs(c) == 0.0) throw Error(ErrorCode::ParamOutOfRange, "bulk coefficients must be nonzero");

    const int n = p.dim();
    for (std::size_t l = 0; l < sys.levels.size(); ++l) {
        CPoly w(n);
        for (auto j : sys.levels[l].members) {
            Exponent a;
            for (const auto& x : sys.basis.c[j]) a.push_back(static_cast<int>(x.get_si()));
            w.add_term(a, sys.coefficients[j]);
        }
        sys.level_potentials.push_back(w);
        for (std::size_t s = sys.basis.offset[l]; s < sys.basis.offset[l + 1]; ++s) {
            sys.equations.push_back(w.log_derivative(static_cast<int>(s)));
            sys.equation_level.push_back(l);
        }
    }
    return sys;
}

inline LTESystem leading_term_system(const MomentPolytope& p, const RationalVector& u, const BulkCoefficients& bulk = {}) {
    std::vector<Complex> c;
    for (std::size_t j = 0; j < bulk.size(); ++j) c.push_back(bulk.leading(j));
    return leading_term_system(p, u, c);
}

namespace detail {

/// Substitutes the known adapted variables. Terms that cancel to rounding
/// level (relative to the sum of their moduli) are dropped.
inline CPoly fix_known(const CPoly& g, const std::vector<std::optional<Complex>>& known, double tol) {
    const int n = g.nvars();
    std::map<Exponent, std::pair<Complex, double>> acc;
    for (const auto& [e, c] : g.terms()) {
        Complex v = c;
        Exponent a = e;
        for (int i = 0; i < n; ++i)
            if (known[i] && a[i] != 0) {
                v *= std::pow(*known[i], a[i]);
                a[i] = 0;
            }
        auto& slot = acc[a];
        slot.first += v;
        slot.second += std::abs(v);
    }
    CPoly r(n);
    for (const auto& [a, s] : acc)
        if (std::abs(s.first) > tol * s.second) r.add_term(a, s.first);
    return r;
}

/// Restricts to the listed variables (all others must be absent).
inline CPoly restrict_to(const CPoly& g, const std::vector<int>& vars) {
    CPoly r(static_cast<int>(vars.size()));
    for (const auto& [e, c] : g.terms()) {
        Exponent a;
        for (int v : vars) a.push_back(e[v]);
        r.add_term(a, c);
    }
    return r;
}

inline Complex generic_value(std::size_t k) {
    // fixed, irrational-looking point on an off-unit circle
    return std::polar(1.0 + 0.0917 * static_cast<double>(k % 5), 0.7 + 0.6180339887 * static_cast<double>(k));
}

inline bool is_monomial_or_constant(const CPoly& g) { return g.size() == 1; }

/// All index subsets of size k from [0, m).
inline std::vector<std::vector<std::size_t>> subsets(std::size_t m, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < m; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

struct Branch {
    std::vector<std::optional<Complex>> y;
    std::vector<std::size_t> sampled;
};

}  // namespace detail

/// Solves the system level by level (d(l) <= 3, or binomial levels of any
/// size, as solve_initial allows); each branch carries the values found so
/// far. A variable no equation constrains stays free unless a later level
/// needs it, in which case it joins that level's unknowns.
inline LTEResult solve_lte(const LTESystem& sys, const LTEOptions& opt = {}) {
    const std::size_t n = sys.n();
    LTEResult out;
    detail::Branch start;
    start.y.assign(n, std::nullopt);
    std::vector<detail::Branch> branches{start};
    std::size_t sample_counter = 0;

    for (std::size_t l = 0; l < sys.levels.size() && !branches.empty(); ++l) {
        const std::size_t lo = sys.basis.offset[l], hi = sys.basis.offset[l + 1];
        if (lo == hi) continue;
        std::vector<detail::Branch> next;
        for (auto& br : branches) {
            std::vector<CPoly> eqs;
            bool dead = false;
            for (std::size_t s = lo; s < hi && !dead; ++s) {
                CPoly g = detail::fix_known(sys.equations[s], br.y, opt.zero_tol);
                if (g.is_zero()) continue;
                if (detail::is_monomial_or_constant(g)) dead = true;
                eqs.push_back(std::move(g));
            }
            if (dead) continue;

            std::vector<int> unknowns;
            for (std::size_t s = 0; s < hi; ++s) {
                if (br.y[s]) continue;
                bool used = std::any_of(eqs.begin(), eqs.end(), [&](const CPoly& g) { return g.involves(static_cast<int>(s)); });
                if (used) unknowns.push_back(static_cast<int>(s));
            }

            // sample until square (earlier free variables first)
            while (unknowns.size() > eqs.size()) {
                if (!opt.sample_underdetermined)
                    throw Error(ErrorCode::LevelUnderdetermined, "level " + std::to_string(l + 1) + " has more unknowns than equations");
                int s = unknowns.front();
                br.y[s] = detail::generic_value(sample_counter++);
                br.sampled.push_back(static_cast<std::size_t>(s));
                unknowns.erase(unknowns.begin());
                for (auto& g : eqs) g = detail::fix_known(g, br.y, opt.zero_tol);
            }
            if (unknowns.empty()) {
                bool ok = std::all_of(eqs.begin(), eqs.end(), [](const CPoly& g) { return g.is_zero(); });
                if (ok) next.push_back(br);
                continue;
            }

            std::vector<CPoly> local;
            for (const auto& g : eqs) local.push_back(detail::restrict_to(g, unknowns));

            std::vector<ComplexVector> roots;
            bool solved = false;
            for (const auto& pick : detail::subsets(local.size(), unknowns.size())) {
                std::vector<CPoly> square, rest;
                for (std::size_t i = 0, q = 0; i < local.size(); ++i) {
                    if (q < pick.size() && pick[q] == i) {
                        square.push_back(local[i]);
                        ++q;
                    } else {
                        rest.push_back(local[i]);
                    }
                }
                InitialSolve sol;
                try {
                    sol = solve_initial(square, opt.solve);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::PositiveDimensionalInitialLocus && e.code() != ErrorCode::EliminationFailed) throw;
                    continue;
                }
                for (const auto& x : sol.points) {
                    bool keep = true;
                    for (const auto& g : rest) {
                        double mag = g.magnitude(x);
                        if (std::abs(g.evaluate(x)) > opt.solve.accept * std::max(mag, 1e-300)) keep = false;
                    }
                    if (keep) roots.push_back(x);
                }
                solved = true;
                break;
            }
            if (!solved) {
                // positive-dimensional for every square choice: fix one more unknown
                if (!opt.sample_underdetermined)
                    throw Error(ErrorCode::LevelUnderdetermined, "level " + std::to_string(l + 1) + " has a positive-dimensional solution set");
                int s = unknowns.front();
                detail::Branch b2 = br;
                b2.y[s] = detail::generic_value(sample_counter++);
                b2.sampled.push_back(static_cast<std::size_t>(s));
                // re-run this level for the sampled branch
                std::vector<CPoly> eq2;
                for (const auto& g : eqs) eq2.push_back(detail::fix_known(g, b2.y, opt.zero_tol));
                std::vector<int> u2(unknowns.begin() + 1, unknowns.end());
                std::vector<CPoly> loc2;
                for (const auto& g : eq2)
                    if (!g.is_zero()) loc2.push_back(detail::restrict_to(g, u2));
                if (u2.empty() || loc2.size() < u2.size()) {
                    out.notes.push_back("level " + std::to_string(l + 1) + ": positive-dimensional solution set not resolved by sampling");
                    continue;
                }
                loc2.resize(u2.size());
                InitialSolve sol = solve_initial(loc2, opt.solve);
                for (const auto& x : sol.points) {
                    detail::Branch b3 = b2;
                    for (std::size_t i = 0; i < u2.size(); ++i) b3.y[u2[i]] = x[i];
                    next.push_back(std::move(b3));
                }
                continue;
            }
            for (const auto& x : roots) {
                detail::Branch b2 = br;
                for (std::size_t i = 0; i < unknowns.size(); ++i) b2.y[unknowns[i]] = x[i];
                next.push_back(std::move(b2));
            }
        }
        if (next.empty()) out.obstruction_level = l;
        branches = std::move(next);
    }

    for (const auto& br : branches) {
        LTESolution s;
        s.adapted = br.y;
        s.sampled = br.sampled;
        for (std::size_t i = 0; i < n; ++i) {
            Complex v = 1.0;
            bool known = true;
            for (std::size_t t = 0; t < n; ++t) {
                if (sys.basis.einv[i][t] == 0) continue;
                if (!br.y[t]) {
                    known = false;
                    break;
                }
                v *= std::pow(*br.y[t], static_cast<int>(sys.basis.einv[i][t].get_si()));
            }
            s.ybar.push_back(known ? std::optional<Complex>(v) : std::nullopt);
        }
        out.solutions.push_back(std::move(s));
    }
    // identical branches can arise from repeated roots
    std::vector<LTESolution> uniq;
    for (auto& s : out.solutions) {
        bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const LTESolution& t) {
            for (std::size_t i = 0; i < n; ++i) {
                if (s.adapted[i].has_value() != t.adapted[i].has_value()) return false;
                if (s.adapted[i] && std::abs(*s.adapted[i] - *t.adapted[i]) > opt.solve.eps_s * std::max(1.0, std::abs(*s.adapted[i])))
                    return false;
            }
            return true;
        });
        if (!dup) uniq.push_back(std::move(s));
    }
    out.solutions = std::move(uniq);
    out.solvable = !out.solutions.empty();
    if (out.solvable) out.obstruction_level.reset();
    for (const auto& s : out.solutions)
        if (!s.sampled.empty()) {
            out.notes.push_back("some variables were fixed at generic values to make a level square");
            break;
        }
    return out;
}

struct BalanceVerdict {
    bool balanced = false;
    std::optional<LTESolution> witness;
    std::vector<LTESolution> solutions;
    std::optional<std::size_t> obstruction_level;
    std::string note;
};

/// Solvability of the leading term equation with c_j = 1 (or the given
/// coefficients). Only PO_0 enters; for non-Fano P this is the PO_0-level verdict.
inline BalanceVerdict is_strongly_bulk_balanced(const MomentPolytope& p, const RationalVector& u,
                                                const std::vector<Complex>& coefficients = {}, const LTEOptions& opt = {}) {
    BalanceVerdict v;
    auto sys = leading_term_system(p, u, coefficients);
    auto r = solve_lte(sys, opt);
    v.balanced = r.solvable;
    if (r.solvable) v.witness = r.solutions.front();
    v.solutions = std::move(r.solutions);
    v.obstruction_level = r.obstruction_level;
    if (fano_check(p) != FanoType::fano) v.note = "PO_0-level verdict (P is not Fano)";
    return v;
}

}  // namespace toricpo
