#pragma once

// JSON mirrors of scalars, polytopes and the analysis reports.
// Rationals are written as "p/q" strings, complex numbers as {re, im}.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "jacres.hpp"
#include "lte.hpp"

namespace toricpo::io {

using json = nlohmann::ordered_json;

struct PolytopeData {
    MomentPolytope polytope;
    std::vector<Correction> corrections;
    std::string source;
};

namespace detail {

[[noreturn]] inline void bad(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, where + ": " + what);
}

inline const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) bad(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(where, std::string("missing \"") + key + "\"");
    return *it;
}

inline long as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) bad(where, "expected an integer");
    return j.get<long>();
}

inline double as_double(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    return j.get<double>();
}

}  // namespace detail

inline json rational(const Rational& q) { return q.get_str(); }

inline Rational rational_from(const json& j, const std::string& where = "rational") {
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const Error& e) {
            detail::bad(where, e.what());
        }
    }
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number_float()) {
        try {
            return parse_rational(j.dump());  // shortest decimal form, read exactly
        } catch (const Error& e) {
            detail::bad(where, e.what());
        }
    }
    detail::bad(where, "expected \"p/q\"");
}

inline json rationals(const RationalVector& v) {
    json a = json::array();
    for (const auto& q : v) a.push_back(rational(q));
    return a;
}

inline json complex(Complex c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

inline Complex complex_from(const json& j, const std::string& where = "coeff") {
    return {detail::as_double(detail::field(j, "re", where), where + ".re"),
            detail::as_double(detail::field(j, "im", where), where + ".im")};
}

inline json scalar(const NovikovScalar& s) {
    json terms = json::array();
    for (const auto& t : s.terms())
        terms.push_back(json{{"exp", rational(t.exponent)}, {"re", t.coeff.real()}, {"im", t.coeff.imag()}});
    return json{{"terms", std::move(terms)}, {"trunc", s.truncation().str()}};
}

inline NovikovScalar scalar_from(const json& j, const std::string& where = "scalar") {
    const json& terms = detail::field(j, "terms", where);
    if (!terms.is_array()) detail::bad(where + ".terms", "expected an array");
    std::vector<NovikovScalar::Term> out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        std::string w = where + ".terms[" + std::to_string(k) + "]";
        out.push_back({rational_from(detail::field(terms[k], "exp", w), w + ".exp"),
                       Complex(detail::as_double(detail::field(terms[k], "re", w), w + ".re"),
                               detail::as_double(detail::field(terms[k], "im", w), w + ".im"))});
    }
    ExtRational trunc = ExtRational::infinity();
    if (auto it = j.find("trunc"); it != j.end()) {
        if (!it->is_string()) detail::bad(where + ".trunc", "expected a string");
        try {
            trunc = ExtRational::parse(it->get<std::string>());
        } catch (const Error& e) {
            detail::bad(where + ".trunc", e.what());
        }
    }
    return NovikovScalar::from_terms(std::move(out), trunc);
}

inline json scalars(const std::vector<NovikovScalar>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back(scalar(s));
    return a;
}

inline json polytope(const MomentPolytope& p, const std::vector<Correction>& corrections = {}) {
    json facets = json::array();
    for (const auto& f : p.facets()) facets.push_back(json{{"normal", f.normal}, {"constant", rational(f.constant)}, {"name", f.name}});
    json corr = json::array();
    for (const auto& c : corrections)
        corr.push_back(json{{"monomial_z", c.monomial_z}, {"extra_T", rational(c.extra_T)}, {"coeff", complex(c.coeff)}});
    return json{{"dim", p.dim()}, {"facets", std::move(facets)}, {"corrections", std::move(corr)}};
}

inline PolytopeData polytope_from(const json& j) {
    PolytopeData out;
    long dim = detail::as_int(detail::field(j, "dim", "polytope"), "dim");
    if (dim < 1) detail::bad("dim", "must be positive");
    const json& facets = detail::field(j, "facets", "polytope");
    if (!facets.is_array()) detail::bad("facets", "expected an array");
    std::vector<Facet> fs;
    for (std::size_t k = 0; k < facets.size(); ++k) {
        std::string w = "facets[" + std::to_string(k) + "]";
        const json& nj = detail::field(facets[k], "normal", w);
        if (!nj.is_array() || nj.size() != static_cast<std::size_t>(dim)) detail::bad(w + ".normal", "expected " + std::to_string(dim) + " integers");
        Facet f;
        for (std::size_t i = 0; i < nj.size(); ++i) f.normal.push_back(detail::as_int(nj[i], w + ".normal"));
        f.constant = rational_from(detail::field(facets[k], "constant", w), w + ".constant");
        if (auto it = facets[k].find("name"); it != facets[k].end() && it->is_string()) f.name = it->get<std::string>();
        else f.name = "l" + std::to_string(k + 1);
        fs.push_back(std::move(f));
    }
    out.polytope = MomentPolytope(static_cast<int>(dim), std::move(fs));
    if (auto it = j.find("corrections"); it != j.end()) {
        if (!it->is_array()) detail::bad("corrections", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& cj = (*it)[k];
            std::string w = "corrections[" + std::to_string(k) + "]";
            Correction c;
            const json& mz = detail::field(cj, "monomial_z", w);
            if (!mz.is_array()) detail::bad(w + ".monomial_z", "expected an array");
            for (const auto& x : mz) c.monomial_z.push_back(static_cast<int>(detail::as_int(x, w + ".monomial_z")));
            c.extra_T = rational_from(detail::field(cj, "extra_T", w), w + ".extra_T");
            if (auto cc = cj.find("coeff"); cc != cj.end()) c.coeff = complex_from(*cc, w + ".coeff");
            out.corrections.push_back(std::move(c));
        }
    }
    return out;
}

/// Parses text, reporting syntax errors with line and column.
inline json parse(std::string_view text, const std::string& source = "<input>") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t pos = e.byte == 0 ? 0 : e.byte - 1;
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k < pos && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (auto c = msg.find("syntax error"); c != std::string::npos) msg = msg.substr(c);
        throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline PolytopeData load_polytope(const std::string& path) {
    auto d = polytope_from(parse(read_file(path), path));
    d.source = path;
    return d;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- reports

inline json critical_point(const CriticalPoint& cp) {
    json init = json::array();
    for (auto c : cp.initial) init.push_back(complex(c));
    json j{{"u", rationals(cp.u)},
           {"initial", std::move(init)},
           {"y", scalars(cp.y)},
           {"ybar", scalars(cp.ybar)},
           {"nondegenerate", cp.nondegenerate},
           {"multiplicity", cp.multiplicity ? json(*cp.multiplicity) : json(nullptr)},
           {"residual_valuation", cp.residual_valuation.str()},
           {"lifted", cp.lifted},
           {"method", cp.method}};
    return j;
}

inline json cell(const CellReport& c) {
    json ties = json::array();
    for (const auto& eq : c.cell.tie_pattern) ties.push_back(eq);
    return json{{"dim", c.cell.dim},
                {"point", rationals(c.cell.point)},
                {"status", c.status},
                {"found", c.found},
                {"unresolved", c.unresolved},
                {"ties", std::move(ties)},
                {"notes", c.notes}};
}

inline json analysis(const CriticalAnalysis& a) {
    json pts = json::array();
    for (const auto& p : a.points) pts.push_back(critical_point(p));
    json cells = json::array();
    for (const auto& c : a.cells) cells.push_back(cell(c));
    return json{{"points", std::move(pts)},
                {"multiplicity_total", a.multiplicity_total()},
                {"unresolved", a.any_unresolved()},
                {"cells", std::move(cells)},
                {"notes", a.notes}};
}

inline json optional_complexes(const std::vector<std::optional<Complex>>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x ? complex(*x) : json(nullptr));
    return a;
}

inline json lte_solution(const LTESolution& s) {
    return json{{"adapted", optional_complexes(s.adapted)}, {"ybar", optional_complexes(s.ybar)}, {"sampled", s.sampled}};
}

inline json integer_matrix(const IntegerMatrix& m) {
    json a = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& x : row) r.push_back(x.get_str());
        a.push_back(std::move(r));
    }
    return a;
}

inline json lte_system(const LTESystem& sys) {
    json levels = json::array();
    for (std::size_t l = 0; l < sys.levels.size(); ++l) {
        json members = json::array();
        for (auto j : sys.levels[l].members) members.push_back(sys.p.facets()[j].name);
        levels.push_back(json{{"S", rational(sys.levels[l].S)},
                              {"facets", std::move(members)},
                              {"d", sys.filtration.d[l]}});
    }
    json eqs = json::array();
    for (std::size_t k = 0; k < sys.equations.size(); ++k)
        eqs.push_back(json{{"level", sys.equation_level[k]}, {"equation", sys.equations[k].str("Y")}});
    return json{{"levels", std::move(levels)},
                {"K", sys.filtration.K},
                {"basis", integer_matrix(sys.basis.e)},
                {"c", integer_matrix(sys.basis.c)},
                {"equations", std::move(eqs)}};
}

inline json verdict(const RationalVector& u, const BalanceVerdict& v) {
    json sols = json::array();
    for (const auto& s : v.solutions) sols.push_back(lte_solution(s));
    return json{{"u", rationals(u)},
                {"balanced", v.balanced},
                {"witness", v.witness ? lte_solution(*v.witness) : json(nullptr)},
                {"solutions", std::move(sols)},
                {"obstruction_level", v.obstruction_level ? json(*v.obstruction_level) : json(nullptr)},
                {"note", v.note}};
}

inline json morse(const MorseCount& m) {
    return json{{"verdict", m.verdict},
                {"morse", m.morse},
                {"points", m.points},
                {"count_with_multiplicity", m.count_with_multiplicity},
                {"betti", m.betti},
                {"unresolved", m.unresolved}};
}

inline json residue(const ResidueReport& r) {
    json pts = json::array();
    for (const auto& p : r.points) {
        json h = json::array();
        for (const auto& row : p.hessian) h.push_back(scalars(row));
        pts.push_back(json{{"hessian", std::move(h)},
                           {"Z", p.Z ? scalar(*p.Z) : json(nullptr)},
                           {"pairing", p.pairing_diag ? scalar(*p.pairing_diag) : json(nullptr)},
                           {"critical_value", scalar(p.critical_value)}});
    }
    return json{{"regime", r.regime},
                {"count", morse(r.count)},
                {"points", std::move(pts)},
                {"trace_sum", r.trace_sum ? scalar(*r.trace_sum) : json(nullptr)},
                {"trace_vanishes", r.trace_vanishes},
                {"trace_tol", r.trace_tol},
                {"notes", r.notes}};
}

}  // namespace toricpo::io
