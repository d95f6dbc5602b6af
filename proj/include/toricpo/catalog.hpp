#pragma once

// Builtin examples: projective spaces, one- and two-point blow-ups of CP^2
// and Hirzebruch surfaces.

#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "polytope.hpp"
#include "rational.hpp"

namespace toricpo {

struct CatalogEntry {
    std::string spec;  // e.g. "blowup1:2/5"
    MomentPolytope polytope;
    std::vector<Correction> corrections;
    bool corrections_known = true;  // false when the entry is non-Fano and no corrections are recorded
};

struct CatalogInfo {
    std::string name;
    std::string params;
    std::string description;
};

inline std::vector<CatalogInfo> catalog_list() {
    return {
        {"simplex", "n", "CP^n: l0 = 1 - u1 - ... - un, li = ui"},
        {"blowup1", "a", "CP^2 blown up at one point: simplex(2) and l3 = 1 - a - u2, 0 < a < 1"},
        {"blowup2", "a,b", "CP^2 blown up at two points: blowup1(a) and l4 = u1 + u2 - b, a + b < 1"},
        {"hirzebruch", "n,a", "F_n: u1, u2, n - u1 - n u2, 1 - a - u2, 0 < a < 1 (corrections known for n = 2)"},
    };
}

namespace detail {

inline Facet facet(std::vector<long> normal, Rational constant, std::string name) {
    return Facet{std::move(normal), std::move(constant), std::move(name)};
}

inline long require_positive_int(const Rational& q, const char* what) {
    if (q.get_den() != 1 || q <= 0 || !q.get_num().fits_slong_p())
        throw Error(ErrorCode::ParamOutOfRange, std::string(what) + " must be a positive integer");
    return q.get_num().get_si();
}

inline void require_open_unit(const Rational& a, const char* what) {
    if (a <= 0 || a >= 1) throw Error(ErrorCode::ParamOutOfRange, std::string(what) + " must lie in (0,1), got " + a.get_str());
}

inline std::string spec_string(std::string_view name, const RationalVector& params) {
    std::string s(name);
    for (std::size_t i = 0; i < params.size(); ++i) s += (i ? "," : ":") + params[i].get_str();
    return s;
}

inline std::vector<Facet> simplex_facets(long n) {
    std::vector<Facet> f;
    f.push_back(facet(std::vector<long>(n, -1), Rational(1), "l0"));
    for (long i = 0; i < n; ++i) {
        std::vector<long> v(n, 0);
        v[i] = 1;
        f.push_back(facet(std::move(v), Rational(0), "l" + std::to_string(i + 1)));
    }
    return f;
}

}  // namespace detail

inline CatalogEntry catalog(std::string_view name, const RationalVector& params) {
    auto arity = [&](std::size_t k) {
        if (params.size() != k)
            throw Error(ErrorCode::ParamOutOfRange,
                        std::string(name) + " takes " + std::to_string(k) + " parameter(s), got " + std::to_string(params.size()));
    };
    CatalogEntry e;
    e.spec = detail::spec_string(name, params);
    if (name == "simplex") {
        arity(1);
        long n = detail::require_positive_int(params[0], "n");
        if (n > 6) throw Error(ErrorCode::ParamOutOfRange, "simplex supports n <= 6");
        e.polytope = MomentPolytope(static_cast<int>(n), detail::simplex_facets(n));
    } else if (name == "blowup1") {
        arity(1);
        const Rational& a = params[0];
        detail::require_open_unit(a, "alpha");
        auto f = detail::simplex_facets(2);
        f.push_back(detail::facet({0, -1}, Rational(1 - a), "l3"));
        e.polytope = MomentPolytope(2, std::move(f));
    } else if (name == "blowup2") {
        arity(2);
        const Rational &a = params[0], &b = params[1];
        detail::require_open_unit(a, "alpha");
        detail::require_open_unit(b, "alpha'");
        if (a + b >= 1) throw Error(ErrorCode::ParamOutOfRange, "need alpha + alpha' < 1");
        auto f = detail::simplex_facets(2);
        f.push_back(detail::facet({0, -1}, Rational(1 - a), "l3"));
        f.push_back(detail::facet({1, 1}, Rational(-b), "l4"));
        e.polytope = MomentPolytope(2, std::move(f));
    } else if (name == "hirzebruch") {
        arity(2);
        long n = detail::require_positive_int(params[0], "n");
        const Rational& a = params[1];
        detail::require_open_unit(a, "alpha");
        std::vector<Facet> f;
        f.push_back(detail::facet({1, 0}, Rational(0), "l1"));
        f.push_back(detail::facet({0, 1}, Rational(0), "l2"));
        f.push_back(detail::facet({-1, -n}, Rational(n), "l3"));
        f.push_back(detail::facet({0, -1}, Rational(1 - a), "l4"));
        e.polytope = MomentPolytope(2, std::move(f));
        if (n == 2) {
            // the one disc-count correction of F_2: T^{2a} z4
            e.corrections.push_back(Correction{{0, 0, 0, 1}, Rational(2 * a), Complex(1.0)});
        } else if (n > 2) {
            e.corrections_known = false;
        }
    } else {
        throw Error(ErrorCode::UnknownName, "unknown catalog entry '" + std::string(name) + "'");
    }
    return e;
}

/// Parses "name:p1,p2,...".
inline CatalogEntry catalog(std::string_view spec) {
    auto colon = spec.find(':');
    std::string_view name = spec.substr(0, colon);
    RationalVector params;
    if (colon != std::string_view::npos) params = parse_rational_list(spec.substr(colon + 1));
    return catalog(name, params);
}

}  // namespace toricpo
