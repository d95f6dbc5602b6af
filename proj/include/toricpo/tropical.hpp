#pragma once

// Critical points of PO over the Novikov field: the tropical prevariety of
// the critical equations inside P, initial systems over (C^*)^n and T-adic
// Newton lifting.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cpoly.hpp"
#include "error.hpp"
#include "laurent.hpp"
#include "novikov.hpp"
#include "novikov_linalg.hpp"
#include "polytope.hpp"
#include "rational_linalg.hpp"

namespace toricpo {

/// Largest dimension handled by the arrangement and the lifting code.
inline constexpr int kMaxTropicalDim = 4;

/// The n logarithmic derivatives y_i dPO/dy_i.
inline std::vector<LaurentPoly> critical_system(const LaurentPoly& w) {
    std::vector<LaurentPoly> eqs;
    for (int i = 0; i < w.nvars(); ++i) eqs.push_back(w.log_derivative(i));
    return eqs;
}
inline std::vector<LaurentPoly> critical_system(const Potential& w, const Rational& order = default_truncation()) {
    return critical_system(w.polynomial(order));
}

// ---------------------------------------------------------------- arrangement

struct Hyperplane {
    RationalVector normal;  // normal . u + offset = 0
    Rational offset;
};

class Arrangement {
public:
    std::vector<Hyperplane> planes;

    std::vector<int> signs(const RationalVector& u) const {
        std::vector<int> s;
        s.reserve(planes.size());
        for (const auto& h : planes) s.push_back(sgn(linalg::dot(h.normal, u) + h.offset));
        return s;
    }

    /// Adds a hyperplane unless it is already present; scaled so the first
    /// nonzero normal entry is 1.
    void add(RationalVector normal, Rational offset) {
        std::size_t lead = 0;
        while (lead < normal.size() && normal[lead] == 0) ++lead;
        if (lead == normal.size()) return;
        Rational f = normal[lead];
        for (auto& x : normal) x /= f;
        offset /= f;
        for (const auto& h : planes)
            if (h.normal == normal && h.offset == offset) return;
        planes.push_back({std::move(normal), std::move(offset)});
    }
};

struct TropicalCell {
    int dim = 0;
    RationalVector point;                          // the vertex, or the centroid of the closure's vertices
    std::vector<RationalVector> vertices;          // vertices of the closure
    std::vector<int> signs;                        // position relative to every hyperplane
    std::vector<std::vector<Exponent>> tie_pattern;  // per equation, the monomials attaining the minimum
    std::shared_ptr<const Arrangement> arrangement;

    /// Is u in the relative interior of this cell?
    bool contains(const RationalVector& u) const { return arrangement && arrangement->signs(u) == signs; }
};

namespace detail {

struct Face {
    int dim;
    RationalVector point;
    std::vector<int> signs;
};

inline std::vector<std::size_t> zero_set(const std::vector<int>& signs) {
    std::vector<std::size_t> z;
    for (std::size_t k = 0; k < signs.size(); ++k)
        if (signs[k] == 0) z.push_back(k);
    return z;
}

/// Is face f contained in the closure of face g?
inline bool in_closure(const std::vector<int>& f, const std::vector<int>& g) {
    for (std::size_t k = 0; k < f.size(); ++k)
        if (f[k] != 0 && f[k] != g[k]) return false;
    return true;
}

/// Every face of the arrangement that lies in P. Vertices come from
/// intersecting n hyperplanes; a d-face is reached by stepping off a
/// (d-1)-face in its closure along a direction of the d-flat.
inline std::vector<Face> arrangement_faces(const Arrangement& arr, const MomentPolytope& p) {
    const std::size_t n = p.dim();
    const auto& hs = arr.planes;
    std::map<std::vector<int>, Face> faces;
    std::vector<std::vector<std::vector<int>>> by_dim(n + 1);

    linalg::for_each_subset(hs.size(), n, [&](const std::vector<std::size_t>& idx) {
        RationalMatrix a;
        RationalVector b;
        for (auto k : idx) {
            a.push_back(hs[k].normal);
            b.push_back(-hs[k].offset);
        }
        auto x = linalg::solve(a, b);
        if (!x || !p.contains(*x)) return;
        auto s = arr.signs(*x);
        if (faces.emplace(s, Face{0, *x, s}).second) by_dim[0].push_back(s);
    });

    for (std::size_t d = 1; d <= n; ++d) {
        for (const auto& gs : by_dim[d - 1]) {
            const Face g = faces.at(gs);
            auto z = zero_set(g.signs);
            RationalMatrix zn;
            for (auto k : z) zn.push_back(hs[k].normal);
            std::set<std::vector<std::size_t>> seen_flats;
            linalg::for_each_subset(z.size(), n - d, [&](const std::vector<std::size_t>& sub) {
                RationalMatrix a;
                for (auto i : sub) a.push_back(hs[z[i]].normal);
                if (!a.empty() && linalg::rank(a) != n - d) return;
                auto dir = linalg::nullspace(a, n);
                // hyperplanes of z containing the flat identify it
                std::vector<std::size_t> closure;
                for (auto k : z) {
                    bool all = true;
                    for (const auto& w : dir) all = all && linalg::dot(hs[k].normal, w) == 0;
                    if (all) closure.push_back(k);
                }
                if (!seen_flats.insert(closure).second) return;
                const RationalVector* w = nullptr;
                for (const auto& v : dir) {
                    bool transverse = false;
                    for (auto k : z) transverse = transverse || linalg::dot(hs[k].normal, v) != 0;
                    if (transverse) {
                        w = &v;
                        break;
                    }
                }
                if (!w) return;
                for (int sign : {1, -1}) {
                    RationalVector step = *w;
                    for (auto& x : step) x *= sign;
                    Rational eps = -1;
                    for (const auto& h : hs) {
                        Rational val = linalg::dot(h.normal, g.point) + h.offset;
                        Rational slope = linalg::dot(h.normal, step);
                        if (val == 0 || slope == 0) continue;
                        Rational t = -val / slope;
                        if (t > 0 && (eps < 0 || t < eps)) eps = t;
                    }
                    eps = eps < 0 ? Rational(1) : Rational(eps / 2);
                    RationalVector q = g.point;
                    for (std::size_t i = 0; i < n; ++i) q[i] += eps * step[i];
                    if (!p.contains(q)) continue;
                    auto s = arr.signs(q);
                    if (faces.emplace(s, Face{static_cast<int>(d), q, s}).second) by_dim[d].push_back(s);
                }
            });
        }
    }
    std::vector<Face> out;
    for (std::size_t d = 0; d <= n; ++d)
        for (const auto& s : by_dim[d]) out.push_back(faces.at(s));
    return out;
}

/// Monomials attaining the minimum of v(c_a) + <a,u>, per equation.
inline std::vector<std::vector<Exponent>> ties(const std::vector<LaurentPoly>& system, const RationalVector& u) {
    std::vector<std::vector<Exponent>> out;
    for (const auto& eq : system) {
        ExtRational best = eq.valuation_at_u(u);
        std::vector<Exponent> arg;
        for (const auto& [a, c] : eq.terms()) {
            Rational s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * u[i];
            if (c.valuation() + ExtRational(s) == best) arg.push_back(a);
        }
        out.push_back(std::move(arg));
    }
    return out;
}

}  // namespace detail

/// Bisector hyperplanes of every pair of monomials in each equation, plus
/// the facet hyperplanes of P.
inline Arrangement tie_arrangement(const std::vector<LaurentPoly>& system, const MomentPolytope& p) {
    Arrangement arr;
    const int n = p.dim();
    for (const auto& eq : system) {
        std::vector<std::pair<Exponent, Rational>> mons;
        for (const auto& [a, c] : eq.terms()) mons.emplace_back(a, c.valuation().value());
        for (std::size_t i = 0; i < mons.size(); ++i)
            for (std::size_t j = i + 1; j < mons.size(); ++j) {
                RationalVector normal(n);
                for (int k = 0; k < n; ++k) normal[k] = mons[i].first[k] - mons[j].first[k];
                arr.add(std::move(normal), mons[i].second - mons[j].second);
            }
    }
    for (const auto& f : p.facets()) {
        RationalVector normal;
        for (long x : f.normal) normal.emplace_back(x);
        arr.add(std::move(normal), f.constant);
    }
    return arr;
}

/// Cells of { u in Int P : in every equation the minimal valuation is attained
/// at least twice }: all vertices first, then the maximal positive-dimensional cells.
inline std::vector<TropicalCell> tropical_candidates(const std::vector<LaurentPoly>& system, const MomentPolytope& p) {
    const int n = p.dim();
    if (n > kMaxTropicalDim)
        throw Error(ErrorCode::DimensionUnsupported, "tropical candidates need n <= " + std::to_string(kMaxTropicalDim));
    auto arr = std::make_shared<Arrangement>(tie_arrangement(system, p));
    auto faces = detail::arrangement_faces(*arr, p);

    std::vector<const detail::Face*> vertices;
    for (const auto& f : faces)
        if (f.dim == 0) vertices.push_back(&f);

    auto tropical = [&](const RationalVector& u) {
        if (!p.is_interior(u)) return false;
        for (const auto& t : detail::ties(system, u))
            if (t.size() < 2) return false;
        return true;
    };

    std::vector<TropicalCell> cells;
    for (const auto& f : faces) {
        TropicalCell c;
        c.dim = f.dim;
        c.signs = f.signs;
        c.arrangement = arr;
        if (f.dim == 0) {
            c.point = f.point;
        } else {
            for (const auto* v : vertices)
                if (detail::in_closure(v->signs, f.signs)) c.vertices.push_back(v->point);
            RationalVector centroid(n, Rational(0));
            for (const auto& v : c.vertices)
                for (int i = 0; i < n; ++i) centroid[i] += v[i];
            for (auto& x : centroid) x /= static_cast<long>(c.vertices.size());
            c.point = centroid;
        }
        if (!tropical(c.point)) continue;
        c.tie_pattern = detail::ties(system, c.point);
        cells.push_back(std::move(c));
    }

    std::vector<TropicalCell> out;
    for (const auto& c : cells)
        if (c.dim == 0) out.push_back(c);
    for (const auto& c : cells) {
        if (c.dim == 0) continue;
        bool maximal = true;
        for (const auto& d : cells)
            if (d.dim > c.dim && detail::in_closure(c.signs, d.signs)) maximal = false;
        if (maximal) out.push_back(c);
    }
    std::stable_sort(out.begin(), out.end(), [](const TropicalCell& a, const TropicalCell& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.point < b.point;
    });
    return out;
}

// ---------------------------------------------------------------- initial systems

/// G_i = T^{-S_i} change_frame(eq_i, u) with S_i = v_T^u(eq_i), so every G_i lies in
/// Lambda_0[ybar] and has a nonzero exponent-0 part.
struct ScaledSystem {
    RationalVector u;
    std::vector<Rational> shift;
    std::vector<LaurentPoly> eqs;
};

inline ScaledSystem scaled_system(const std::vector<LaurentPoly>& system, const RationalVector& u) {
    ScaledSystem s;
    s.u = u;
    for (const auto& eq : system) {
        ExtRational v = eq.valuation_at_u(u);
        Rational sh = v.is_finite() ? v.value() : Rational(0);
        s.shift.push_back(sh);
        s.eqs.push_back(eq.change_frame(u).shifted(-sh));
    }
    return s;
}

inline std::vector<CPoly> initial_system(const std::vector<LaurentPoly>& system, const RationalVector& u) {
    auto s = scaled_system(system, u);
    std::vector<CPoly> out;
    for (const auto& g : s.eqs) {
        CPoly c(static_cast<int>(u.size()));
        for (const auto& [a, coeff] : g.terms()) {
            Complex x = coeff.coefficient_at(Rational(0));
            if (x != Complex(0.0)) c.add_term(a, x);
        }
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------- lifting

struct CriticalPoint {
    std::vector<NovikovScalar> y;     // in the original frame, y_i = T^{u_i} ybar_i
    std::vector<NovikovScalar> ybar;
    RationalVector u;
    ComplexVector initial;            // leading coefficients of ybar
    bool nondegenerate = false;
    std::optional<int> multiplicity;  // empty when unresolved
    ExtRational residual_valuation;   // min_i v(G_i(ybar)) in the ybar frame
    bool lifted = false;
    std::string method;               // "initial-system", "resultant", "leading-order"
};

struct LiftOptions {
    Rational order = default_truncation();  // target residual valuation E
    Rational extra_work = Rational(0);      // working order beyond E for ill-conditioned lifts
    double degeneracy = 1e-8;
    double residual_tol = 1e-9;             // relative; floating noise in the residual is not a term
};

namespace detail {

inline NovikovScalar magnitudes(const NovikovScalar& x) {
    auto terms = x.terms();
    for (auto& t : terms) t.coeff = std::abs(t.coeff);
    return NovikovScalar::from_terms(std::move(terms), x.truncation());
}

/// Integer powers of a fixed point, shared by every evaluation at it.
class PowerCache {
public:
    PowerCache(const std::vector<NovikovScalar>& y, Rational work) : y_(y), work_(std::move(work)), pw_(y.size()), mag_(y.size()) {}

    const NovikovScalar& power(std::size_t i, int k) {
        auto it = pw_[i].find(k);
        if (it != pw_[i].end()) return it->second;
        return pw_[i].emplace(k, pow(y_[i], k, work_)).first->second;
    }
    const NovikovScalar& magnitude(std::size_t i, int k) {
        auto it = mag_[i].find(k);
        if (it != mag_[i].end()) return it->second;
        return mag_[i].emplace(k, magnitudes(power(i, k))).first->second;
    }

    NovikovScalar evaluate(const LaurentPoly& f) {
        NovikovScalar total;
        for (const auto& [a, c] : f.terms()) {
            NovikovScalar t = c;
            for (std::size_t i = 0; i < y_.size(); ++i)
                if (a[i] != 0) t = t * power(i, a[i]);
            total += t;
        }
        return total.truncated(ExtRational(work_));
    }

    /// Termwise bound sum |c| prod |y^a| for the size of the numbers that
    /// cancel in f(y); rounding noise in the value scales with it.
    NovikovScalar bound(const LaurentPoly& f) {
        NovikovScalar total;
        for (const auto& [a, c] : f.terms()) {
            NovikovScalar t = magnitudes(c);
            for (std::size_t i = 0; i < y_.size(); ++i)
                if (a[i] != 0) t = t * magnitude(i, a[i]);
            total += t;
        }
        return total.truncated(ExtRational(work_));
    }

private:
    std::vector<NovikovScalar> y_;
    Rational work_;
    std::vector<std::map<int, NovikovScalar>> pw_, mag_;
};

/// Smallest exponent at which some residual has a coefficient above
/// tol * (floor + bound at that exponent).
inline ExtRational min_valuation(const std::vector<NovikovScalar>& r, const std::vector<NovikovScalar>& bound, double tol,
                                 double floor) {
    ExtRational v = ExtRational::infinity();
    for (std::size_t i = 0; i < r.size(); ++i) {
        ExtRational vi = r[i].truncation();
        for (const auto& t : r[i].terms()) {
            if (std::abs(t.coeff) > tol * (floor + std::abs(bound[i].coefficient_at(t.exponent)))) {
                vi = ExtRational(t.exponent);
                break;
            }
        }
        v = min(v, vi);
    }
    return v;
}

/// Sum over permutations of prod |m_{i,s(i)}|: a termwise bound for det m.
inline NovikovScalar permanent_bound(const NovikovMatrix& m, std::size_t row = 0, unsigned used = 0) {
    if (row == m.size()) return NovikovScalar(1.0);
    NovikovScalar acc;
    for (std::size_t c = 0; c < m.size(); ++c) {
        if (used & (1u << c) || m[row][c].is_zero()) continue;
        acc += magnitudes(m[row][c]) * permanent_bound(m, row + 1, used | (1u << c));
    }
    return acc;
}

/// Valuation of det j with rounding-level coefficients ignored.
inline ExtRational determinant_valuation(const NovikovMatrix& j, double tol) {
    return min_valuation({determinant(j)}, {permanent_bound(j)}, tol, 1.0);
}

inline double max_coefficient(const std::vector<LaurentPoly>& g) {
    double m = 0.0;
    for (const auto& gi : g)
        for (const auto& [_, c] : gi.terms()) m = std::max(m, c.max_abs_coefficient());
    return m;
}

inline NovikovMatrix log_jacobian(const std::vector<LaurentPoly>& g, PowerCache& pc) {
    const std::size_t n = g.size();
    NovikovMatrix j(n, NovikovVector(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) j[i][k] = pc.evaluate(g[i].log_derivative(static_cast<int>(k)));
    return j;
}

inline NovikovMatrix log_jacobian(const std::vector<LaurentPoly>& g, const std::vector<NovikovScalar>& ybar, const Rational& work) {
    PowerCache pc(ybar, work);
    return log_jacobian(g, pc);
}

struct RefineResult {
    std::vector<NovikovScalar> ybar;
    ExtRational residual;
    int iterations = 0;
};

/// Newton iteration ybar_k <- ybar_k (1 + delta_k) with L delta = -G(ybar),
/// L the logarithmic Jacobian, until v(G(ybar)) >= target. Residual
/// coefficients at rounding level count as zero.
inline RefineResult newton_refine(const std::vector<LaurentPoly>& g, std::vector<NovikovScalar> ybar, const Rational& target,
                                  const Rational& work, double tol) {
    RefineResult out;
    const double floor = std::max(1.0, max_coefficient(g));
    auto measure = [&](PowerCache& pc, std::vector<NovikovScalar>& r) {
        std::vector<NovikovScalar> b;
        r.clear();
        for (const auto& gi : g) {
            r.push_back(pc.evaluate(gi));
            b.push_back(pc.bound(gi));
        }
        return min_valuation(r, b, tol, floor);
    };
    std::vector<NovikovScalar> r;
    auto pc = std::make_unique<PowerCache>(ybar, work);
    ExtRational v = measure(*pc, r);
    Rational start = v.is_finite() && v.value() > 0 ? v.value() : Rational(1, 8);
    double ratio = std::max(1.0, target.get_d() / start.get_d());
    int budget = static_cast<int>(std::ceil(2.0 * std::log2(ratio))) + 8;
    while (v < ExtRational(target)) {
        if (out.iterations >= budget)
            throw Error(ErrorCode::NoConvergence, "Newton lift stalled at residual valuation " + v.str());
        auto j = log_jacobian(g, *pc);
        NovikovVector rhs;
        for (const auto& x : r) rhs.push_back(-x);
        auto delta = gauss_solve(j, rhs, work);
        for (std::size_t k = 0; k < ybar.size(); ++k)
            ybar[k] = (ybar[k] + ybar[k] * delta[k]).truncated(ExtRational(work));
        pc = std::make_unique<PowerCache>(ybar, work);
        v = measure(*pc, r);
        ++out.iterations;
    }
    out.ybar = std::move(ybar);
    out.residual = v;
    return out;
}

/// Zeroes real or imaginary parts at rounding level.
inline NovikovScalar snap(const NovikovScalar& x) {
    auto terms = x.terms();
    for (auto& t : terms) {
        double m = std::abs(t.coeff);
        double re = t.coeff.real(), im = t.coeff.imag();
        if (std::abs(re) < 1e-12 * m) re = 0.0;
        if (std::abs(im) < 1e-12 * m) im = 0.0;
        t.coeff = Complex(re, im);
    }
    return NovikovScalar::from_terms(std::move(terms), x.truncation());
}

inline CriticalPoint make_point(const RationalVector& u, std::vector<NovikovScalar> ybar, const Rational& order) {
    CriticalPoint cp;
    cp.u = u;
    for (std::size_t i = 0; i < ybar.size(); ++i) {
        ybar[i] = snap(ybar[i].truncated(ExtRational(order)));
        cp.initial.push_back(ybar[i].coefficient_at(Rational(0)));
        cp.y.push_back(ybar[i].shifted(u[i]));
    }
    cp.ybar = std::move(ybar);
    return cp;
}

}  // namespace detail

/// Lifts a nondegenerate zero of the initial system at u to a critical point
/// whose residual valuation (in the ybar frame) is at least opt.order.
inline CriticalPoint newton_lift(const std::vector<LaurentPoly>& system, const RationalVector& u, const ComplexVector& initial,
                                 const LiftOptions& opt = {}) {
    auto s = scaled_system(system, u);
    auto init = initial_system(system, u);
    if (detail::log_jacobian_measure(init, initial) < opt.degeneracy)
        throw Error(ErrorCode::SingularInitialJacobian, "initial point is a degenerate zero of the initial system");
    std::vector<NovikovScalar> ybar;
    for (auto c : initial) ybar.emplace_back(c);
    Rational work = opt.order + opt.extra_work;
    auto res = detail::newton_refine(s.eqs, std::move(ybar), opt.order, work, opt.residual_tol);
    auto cp = detail::make_point(u, std::move(res.ybar), opt.order);
    cp.nondegenerate = true;
    cp.multiplicity = 1;
    cp.residual_valuation = res.residual;
    cp.lifted = true;
    cp.method = "initial-system";
    return cp;
}

}  // namespace toricpo
