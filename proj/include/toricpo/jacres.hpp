#pragma once

// Post-processing of critical points: logarithmic Hessians, Z = det Hess,
// the diagonal residue pairing 1/Z, the trace identity, Morse counts and
// critical values.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "critical.hpp"
#include "novikov_linalg.hpp"

namespace toricpo {

struct ResidueOptions {
    Rational order = default_truncation();  // relative precision kept in every output
    double tol = 1e-9;                      // zero acceptance, relative to the largest input coefficient
};

struct PointResidue {
    NovikovMatrix hessian;
    std::optional<NovikovScalar> Z;            // empty for degenerate points
    std::optional<NovikovScalar> pairing_diag;  // 1/Z
    NovikovScalar critical_value;
};

struct MorseCount {
    std::string verdict;  // equal, strict-inequality, inconsistent, lower-bound
    bool morse = false;
    int points = 0;       // distinct critical points
    int count_with_multiplicity = 0;
    int betti = 0;
    bool unresolved = false;
};

struct ResidueReport {
    std::vector<PointResidue> points;
    std::string regime;  // surface, nef-deg2, leading-order-only
    MorseCount count;
    std::optional<NovikovScalar> trace_sum;
    bool trace_vanishes = false;
    double trace_tol = 0.0;
    std::vector<std::string> notes;
};

namespace detail {

/// Drops the terms of v that are rounding noise next to the termwise bound
/// of the numbers that cancelled at the same exponent.
inline NovikovScalar cleaned(const NovikovScalar& v, const NovikovScalar& bound, double rel = 1e-10) {
    std::vector<NovikovScalar::Term> keep;
    auto b = bound.terms().begin();
    for (const auto& t : v.terms()) {
        while (b != bound.terms().end() && b->exponent < t.exponent) ++b;
        double scale = (b != bound.terms().end() && b->exponent == t.exponent) ? std::abs(b->coeff) : 0.0;
        if (std::abs(t.coeff) > rel * scale) keep.push_back(t);
    }
    return NovikovScalar::from_terms(std::move(keep), v.truncation());
}

inline Rational absolute_order(const LaurentPoly& f, const RationalVector& u, const Rational& order) {
    ExtRational v = f.valuation_at_u(u);
    return v.is_finite() ? v.value() + order : order;
}

struct BoundedHessian {
    NovikovMatrix value, bound;
};

inline BoundedHessian bounded_hessian(const LaurentPoly& w, const CriticalPoint& cp, const Rational& order) {
    const int n = w.nvars();
    std::vector<std::vector<LaurentPoly>> d(n, std::vector<LaurentPoly>(n));
    Rational work = order;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            d[i][j] = w.log_derivative(i).log_derivative(j);
            work = std::max(work, absolute_order(d[i][j], cp.u, order));
        }
    PowerCache pc(cp.y, work);
    BoundedHessian h{NovikovMatrix(n, NovikovVector(n)), NovikovMatrix(n, NovikovVector(n))};
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            ExtRational t(absolute_order(d[i][j], cp.u, order));
            h.bound[i][j] = h.bound[j][i] = pc.bound(d[i][j]).truncated(t);
            h.value[i][j] = h.value[j][i] = cleaned(pc.evaluate(d[i][j]).truncated(t), h.bound[i][j]);
        }
    return h;
}

inline NovikovScalar inverse_of(const NovikovScalar& z, const Rational& order) {
    return invert(z, order - z.valuation().value());
}

}  // namespace detail

/// Logarithmic Hessian y_i d/dy_i (y_j d/dy_j W) at the point. It differs from
/// [y_i y_j d^2W/dy_i dy_j] by diag(y_i dW/dy_i), which vanishes there.
inline NovikovMatrix hessian(const LaurentPoly& w, const CriticalPoint& cp, const Rational& order = default_truncation()) {
    return detail::bounded_hessian(w, cp, order).value;
}

inline std::string exactness_regime(const MomentPolytope& p) {
    if (p.dim() == 2) return "surface";
    if (fano_check(p) != FanoType::neither) return "nef-deg2";
    return "leading-order-only";
}

/// det of the Hessian. Raises SingularHessian when nothing survives below the
/// truncation order.
inline NovikovScalar z_value(const LaurentPoly& w, const CriticalPoint& cp, const Rational& order = default_truncation()) {
    if (cp.multiplicity && *cp.multiplicity > 1)
        throw Error(ErrorCode::SingularHessian, "critical point of multiplicity " + std::to_string(*cp.multiplicity));
    auto h = detail::bounded_hessian(w, cp, order);
    NovikovScalar z = detail::cleaned(determinant(h.value), detail::permanent_bound(h.bound));
    if (z.is_zero()) throw Error(ErrorCode::SingularHessian, "Hessian determinant vanishes below T^" + z.truncation().str());
    return z;
}

/// Diagonal entries 1/Z of the residue pairing; off-diagonal entries are 0.
inline std::vector<NovikovScalar> residue_pairing(const LaurentPoly& w, const std::vector<CriticalPoint>& points,
                                                  const Rational& order = default_truncation()) {
    std::vector<NovikovScalar> out;
    for (const auto& cp : points) {
        if (!cp.multiplicity || *cp.multiplicity != 1) throw Error(ErrorCode::NotMorse, "degenerate or unresolved critical point");
        NovikovScalar z = z_value(w, cp, order);
        out.push_back(detail::inverse_of(z, order));
    }
    return out;
}

/// Sum of 1/Z over all critical points.
inline NovikovScalar trace_sum_check(const LaurentPoly& w, const std::vector<CriticalPoint>& points,
                                     const Rational& order = default_truncation()) {
    NovikovScalar s;
    for (const auto& q : residue_pairing(w, points, order)) s += q;
    return s;
}

/// Every coefficient of s below tol * scale.
inline bool accept_zero(const NovikovScalar& s, double scale, double tol = 1e-9) {
    for (const auto& t : s.terms())
        if (std::abs(t.coeff) >= tol * scale) return false;
    return true;
}

inline MorseCount morse_count_check(const CriticalAnalysis& a, const MomentPolytope& p, bool strict = false) {
    MorseCount m;
    m.betti = total_betti(p);
    m.points = static_cast<int>(a.points.size());
    m.count_with_multiplicity = a.multiplicity_total();
    m.unresolved = a.any_unresolved();
    if (m.unresolved) {
        if (strict) throw Error(ErrorCode::UnresolvedMultiplicities, "some multiplicities are unresolved");
        m.verdict = m.count_with_multiplicity <= m.betti ? "lower-bound" : "inconsistent";
        return m;
    }
    bool simple = true;
    for (const auto& q : a.points) simple = simple && q.multiplicity == 1;
    if (simple) {
        m.morse = true;
        m.verdict = m.points == m.betti ? "equal" : "inconsistent";
    } else {
        m.verdict = (m.points > 0 && m.points < m.betti && m.count_with_multiplicity == m.betti) ? "strict-inequality" : "inconsistent";
    }
    return m;
}

inline std::vector<NovikovScalar> critical_values(const LaurentPoly& w, const std::vector<CriticalPoint>& points,
                                                  const Rational& order = default_truncation()) {
    std::vector<NovikovScalar> out;
    for (const auto& cp : points) {
        Rational t = detail::absolute_order(w, cp.u, order);
        detail::PowerCache pc(cp.y, t);
        out.push_back(detail::cleaned(pc.evaluate(w), pc.bound(w)));
    }
    return out;
}

inline ResidueReport residue_report(const Potential& w, const CriticalAnalysis& a, const ResidueOptions& opt = {}) {
    ResidueReport r;
    LaurentPoly f = w.polynomial(opt.order);
    r.regime = exactness_regime(w.polytope());
    r.count = morse_count_check(a, w.polytope());
    auto values = critical_values(f, a.points, opt.order);
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        PointResidue pr;
        pr.hessian = hessian(f, a.points[k], opt.order);
        pr.critical_value = values[k];
        if (a.points[k].multiplicity == 1) {
            try {
                pr.Z = z_value(f, a.points[k], opt.order);
                pr.pairing_diag = detail::inverse_of(*pr.Z, opt.order);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularHessian) throw;
                r.notes.push_back(e.what());
            }
        }
        r.points.push_back(std::move(pr));
    }
    if (r.regime == "leading-order-only") r.notes.push_back("Z equals det Hess only to leading order here");
    bool all_paired = std::all_of(r.points.begin(), r.points.end(), [](const PointResidue& p) { return p.pairing_diag.has_value(); });
    if (r.count.morse && all_paired && !r.points.empty()) {
        NovikovScalar s;
        double scale = 0.0;
        for (const auto& p : r.points) {
            s += *p.pairing_diag;
            scale = std::max(scale, p.pairing_diag->max_abs_coefficient());
        }
        r.trace_sum = s;
        r.trace_tol = opt.tol * scale;
        r.trace_vanishes = accept_zero(s, scale, opt.tol);
    } else {
        r.notes.push_back("not in the Morse case: no residue pairing or trace sum");
    }
    return r;
}

struct DualityCheck {
    int n = 0;
    bool pass = false;
    // pairing[l][l'] = <ks(p_l), ks(p_l')>
    std::vector<std::vector<NovikovScalar>> pairing;
    double max_error = 0.0;
};

/// For CP^n: ks(p_l) = T^{l/(n+1)} sum_k zeta^{kl} 1_k, paired with the
/// residue pairing computed from the Hessians at y_i = T^{1/(n+1)} zeta^k.
inline DualityCheck cpn_duality_check(int n, double tol = 1e-9) {
    if (n < 1 || n > 6) throw Error(ErrorCode::ParamOutOfRange, "cpn_duality_check needs 1 <= n <= 6");
    DualityCheck out;
    out.n = n;
    MomentPolytope p(n, [&] {
        std::vector<Facet> f;
        f.push_back(Facet{std::vector<long>(n, -1), Rational(1), "l0"});
        for (int i = 0; i < n; ++i) {
            std::vector<long> v(n, 0);
            v[i] = 1;
            f.push_back(Facet{v, Rational(0), "l" + std::to_string(i + 1)});
        }
        return f;
    }());
    auto f = build_potential(p).polynomial();
    const int m = n + 1;
    std::vector<CriticalPoint> points;
    for (int k = 0; k < m; ++k) {
        CriticalPoint cp;
        Complex zeta = std::polar(1.0, 2 * std::numbers::pi * k / m);
        cp.u.assign(n, make_rational(1, m));
        cp.initial.assign(n, zeta);
        for (int i = 0; i < n; ++i) cp.y.push_back(NovikovScalar::monomial(make_rational(1, m), zeta));
        cp.ybar.assign(n, NovikovScalar(zeta));
        cp.nondegenerate = true;
        cp.multiplicity = 1;
        points.push_back(std::move(cp));
    }
    auto pair = residue_pairing(f, points);

    std::vector<std::vector<NovikovScalar>> ks(m);
    for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k) ks[l].push_back(NovikovScalar::monomial(make_rational(l, m), std::polar(1.0, 2 * std::numbers::pi * k * l / m)));

    out.pairing.assign(m, std::vector<NovikovScalar>(m));
    for (int l = 0; l < m; ++l)
        for (int l2 = 0; l2 < m; ++l2) {
            NovikovScalar s;
            for (int k = 0; k < m; ++k) s += ks[l][k] * ks[l2][k] * pair[k];
            out.pairing[l][l2] = s;
            NovikovScalar expect = (l + l2 == n) ? NovikovScalar(1.0) : NovikovScalar();
            NovikovScalar diff = s - expect;
            for (const auto& t : diff.terms()) out.max_error = std::max(out.max_error, std::abs(t.coeff));
        }
    out.pass = out.max_error < tol;
    return out;
}

}  // namespace toricpo
