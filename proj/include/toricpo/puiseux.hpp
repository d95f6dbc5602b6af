#pragma once

// Surfaces: critical points whose tropical cell is positive-dimensional, or
// whose initial system is degenerate, found by eliminating one variable over
// the Novikov field and reading root valuations off a Newton polygon.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpoly.hpp"
#include "novikov_linalg.hpp"
#include "tropical.hpp"

namespace toricpo {

struct SeriesRoot {
    Rational valuation;
    Complex lead;
    int cluster = 1;                    // size of the cluster of edge roots at lead
    std::optional<NovikovScalar> value;  // lifted root when the cluster is simple
};

namespace detail {

/// Lower convex hull of the Newton polygon as a list of vertex indices k.
inline std::vector<std::size_t> newton_polygon(const SeriesPoly& f) {
    std::vector<std::size_t> pts;
    for (std::size_t k = 0; k < f.coeffs().size(); ++k)
        if (!f.coeffs()[k].is_zero()) pts.push_back(k);
    std::vector<std::size_t> hull;
    auto v = [&](std::size_t k) { return f.coeffs()[k].valuation().value(); };
    for (auto k : pts) {
        while (hull.size() >= 2) {
            auto a = hull[hull.size() - 2], b = hull.back();
            // drop b unless it lies strictly below the segment a-k
            Rational cross = (v(b) - v(a)) * Rational(static_cast<long>(k - a)) - (v(k) - v(a)) * Rational(static_cast<long>(b - a));
            if (cross >= 0) hull.pop_back();
            else break;
        }
        hull.push_back(k);
    }
    return hull;
}

inline NovikovScalar hensel(const SeriesPoly& g, Complex lead, const Rational& work) {
    SeriesPoly dg = g.derivative();
    NovikovScalar x(lead);
    for (int it = 0; it < 64; ++it) {
        NovikovScalar r = g.evaluate(x, work);
        NovikovScalar d = dg.evaluate(x, work);
        if (d.is_zero()) break;
        NovikovScalar delta = r * invert(d, work);
        double scale = std::max(1.0, x.max_abs_coefficient());
        x = (x - delta).truncated(ExtRational(work));
        if (delta.valuation_above(1e-10 * scale) >= ExtRational(work)) break;
    }
    return x;
}

}  // namespace detail

/// Nonzero roots of f in the algebraic closure of the Novikov field, grouped
/// by Newton-polygon edge; simple ones are lifted to the given order.
template <class Keep>
std::vector<SeriesRoot> series_roots(const SeriesPoly& f, const Rational& work, Keep keep) {
    std::vector<SeriesRoot> out;
    if (f.is_zero()) return out;
    auto hull = detail::newton_polygon(f);
    const auto& c = f.coeffs();
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        std::size_t k0 = hull[e], k1 = hull[e + 1];
        Rational v0 = c[k0].valuation().value(), v1 = c[k1].valuation().value();
        Rational mu = (v0 - v1) / Rational(static_cast<long>(k1 - k0));
        if (!keep(mu)) continue;
        Rational m = v0 + mu * Rational(static_cast<long>(k0));
        ComplexVector edge(k1 - k0 + 1, Complex(0.0));
        std::vector<NovikovScalar> scaled;
        for (std::size_t k = 0; k < c.size(); ++k) {
            Rational sh = mu * Rational(static_cast<long>(k)) - m;
            scaled.push_back(c[k].is_zero() ? c[k] : c[k].shifted(sh));
            if (k >= k0 && k <= k1) edge[k - k0] = scaled.back().coefficient_at(Rational(0));
        }
        SeriesPoly g(std::move(scaled));
        auto clusters = detail::cluster_roots(poly::roots(edge));
        for (auto [r, count] : clusters) {
            SeriesRoot sr{mu, r, count, std::nullopt};
            if (count == 1) sr.value = detail::hensel(g, r, work).shifted(mu);
            out.push_back(std::move(sr));
        }
    }
    return out;
}

namespace detail {

/// eq times a monomial so that all exponents are >= 0, as a polynomial in
/// the last variable with SeriesPoly coefficients in the first.
using BiPoly = std::vector<SeriesPoly>;

inline BiPoly to_bipoly(const LaurentPoly& eq) {
    int m0 = 0, m1 = 0;
    for (const auto& [a, _] : eq.terms()) {
        m0 = std::min(m0, a[0]);
        m1 = std::min(m1, a[1]);
    }
    int d1 = 0;
    for (const auto& [a, _] : eq.terms()) d1 = std::max(d1, a[1] - m1);
    std::vector<std::vector<NovikovScalar>> grid(d1 + 1);
    for (const auto& [a, c] : eq.terms()) {
        auto& row = grid[a[1] - m1];
        std::size_t i = static_cast<std::size_t>(a[0] - m0);
        if (row.size() <= i) row.resize(i + 1);
        row[i] += c;
    }
    BiPoly out;
    for (auto& row : grid) out.emplace_back(std::move(row));
    while (!out.empty() && out.back().is_zero()) out.pop_back();
    return out;
}

/// Res_{y2}(f, g) as a polynomial in y1.
inline SeriesPoly resultant(const BiPoly& f, const BiPoly& g) {
    const std::size_t p = f.size() - 1, q = g.size() - 1, n = p + q;
    if (n == 0) return SeriesPoly(1);
    std::vector<std::vector<SeriesPoly>> m(n, std::vector<SeriesPoly>(n));
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j <= p; ++j) m[i][i + p - j] = f[j];
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j <= q; ++j) m[q + i][i + q - j] = g[j];
    return laplace_determinant(m, [](const SeriesPoly& s) { return s.is_zero(); });
}

inline SeriesPoly specialize(const BiPoly& f, const NovikovScalar& y1, const Rational& work) {
    std::vector<NovikovScalar> c;
    for (const auto& row : f) c.push_back(row.evaluate(y1, work));
    return SeriesPoly(std::move(c));
}

inline SeriesPoly strip_zero_roots(const SeriesPoly& f) {
    std::size_t k = 0;
    while (k < f.coeffs().size() && f.coeffs()[k].is_zero()) ++k;
    return SeriesPoly(std::vector<NovikovScalar>(f.coeffs().begin() + static_cast<long>(k), f.coeffs().end()));
}

inline LaurentPoly swap_vars(const LaurentPoly& f) {
    LaurentPoly r(2);
    for (const auto& [a, c] : f.terms()) r.add_term({a[1], a[0]}, c);
    return r;
}

}  // namespace detail

struct RefineOutcome {
    std::vector<CriticalPoint> points;
    int unresolved = 0;  // root clusters that could not be separated
    std::vector<std::string> notes;
};

/// Critical points of a two-variable system whose valuation lies in the
/// relative interior of cell (and in Int P).
inline RefineOutcome refine_cell(const std::vector<LaurentPoly>& system, const TropicalCell& cell, const MomentPolytope& p,
                                 const LiftOptions& opt = {}) {
    if (system.size() != 2) throw Error(ErrorCode::DimensionUnsupported, "cell refinement is implemented for n = 2");
    RefineOutcome out;
    const Rational work = opt.order + 1;

    // eliminate along the direction in which the cell is not constant
    Rational lo0, hi0, lo1, hi1;
    std::vector<RationalVector> pts = cell.vertices;
    if (pts.empty()) pts.push_back(cell.point);
    lo0 = hi0 = pts[0][0];
    lo1 = hi1 = pts[0][1];
    for (const auto& v : pts) {
        lo0 = std::min(lo0, v[0]);
        hi0 = std::max(hi0, v[0]);
        lo1 = std::min(lo1, v[1]);
        hi1 = std::max(hi1, v[1]);
    }
    const bool swap = lo0 == hi0 && lo1 != hi1;
    std::vector<LaurentPoly> eqs = system;
    if (swap)
        for (auto& e : eqs) e = detail::swap_vars(e);
    const Rational lo = swap ? lo1 : lo0, hi = swap ? hi1 : hi0;

    auto f = detail::to_bipoly(eqs[0]);
    auto g = detail::to_bipoly(eqs[1]);
    if (f.empty() || g.empty()) {
        out.notes.push_back("an equation vanishes identically");
        return out;
    }
    SeriesPoly r = detail::strip_zero_roots(detail::resultant(f, g));
    if (r.is_zero()) {
        out.notes.push_back("resultant vanishes identically");
        return out;
    }
    auto roots1 = series_roots(r, work, [&](const Rational& mu) { return mu >= lo && mu <= hi; });

    for (const auto& x : roots1) {
        if (!x.value) {
            out.unresolved += x.cluster;
            continue;
        }
        const NovikovScalar& y1 = *x.value;
        std::vector<std::pair<Rational, NovikovScalar>> cands;
        for (const auto* h : {&f, &g}) {
            SeriesPoly s = detail::specialize(*h, y1, work);
            for (const auto& y : series_roots(detail::strip_zero_roots(s), work, [](const Rational&) { return true; })) {
                if (!y.value) continue;
                bool seen = false;
                for (const auto& [nu, c] : cands) seen = seen || (nu == y.valuation && std::abs(c.leading_coefficient() - y.lead) < 1e-6);
                if (!seen) cands.emplace_back(y.valuation, *y.value);
            }
        }
        std::vector<CriticalPoint> found;
        for (const auto& [nu, y2] : cands) {
            RationalVector u = swap ? RationalVector{nu, x.valuation} : RationalVector{x.valuation, nu};
            if (!cell.contains(u) || !p.is_interior(u)) continue;
            std::vector<NovikovScalar> ybar = swap ? std::vector<NovikovScalar>{y2, y1} : std::vector<NovikovScalar>{y1, y2};
            for (std::size_t i = 0; i < 2; ++i) ybar[i] = ybar[i].shifted(-u[i]);
            auto s = scaled_system(system, u);
            detail::PowerCache pc(ybar, work);
            bool cancels = true;
            for (const auto& gi : s.eqs) cancels = cancels && pc.evaluate(gi).valuation_above(1e-6) > ExtRational(0);
            if (!cancels) continue;

            // a Jacobian of valuation d costs 2d orders in each Newton step
            ExtRational d = detail::determinant_valuation(detail::log_jacobian(s.eqs, pc), opt.residual_tol);
            Rational dv = d.is_finite() ? std::min(d.value(), opt.order) : opt.order;
            Rational newton_work = opt.order + 2 * dv + 1;
            detail::RefineResult res;
            try {
                res = detail::newton_refine(s.eqs, ybar, opt.order, newton_work, opt.residual_tol);
            } catch (const Error& e) {
                if (!e.is_numerical()) throw;
                continue;
            }
            auto j = detail::log_jacobian(s.eqs, res.ybar, newton_work);
            auto cp = detail::make_point(u, std::move(res.ybar), opt.order);
            bool dup = false;
            for (const auto& q : found) dup = dup || (q.u == cp.u && std::abs(q.initial[0] - cp.initial[0]) < 1e-6 && std::abs(q.initial[1] - cp.initial[1]) < 1e-6);
            if (dup) continue;
            cp.residual_valuation = res.residual;
            cp.nondegenerate = detail::determinant_valuation(j, opt.residual_tol) < ExtRational(opt.order);
            if (cp.nondegenerate) cp.multiplicity = 1;
            cp.lifted = true;
            cp.method = "resultant";
            found.push_back(std::move(cp));
        }
        for (auto& q : found) out.points.push_back(std::move(q));
    }
    return out;
}

}  // namespace toricpo
