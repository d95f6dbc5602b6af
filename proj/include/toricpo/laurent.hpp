#pragma once

// Laurent polynomials in y_1..y_n with Novikov coefficients, and the potential
// function PO = sum_j c_j z_j + corrections built from a moment polytope.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "novikov.hpp"
#include "polytope.hpp"
#include "rational.hpp"

namespace toricpo {

using Exponent = std::vector<int>;

namespace detail {

/// "2", "0.5", "1/3": terminating decimals are printed as decimals.
inline std::string format_exponent(const Rational& q) {
    if (q.get_den() == 1) return q.get_str();
    Integer d = q.get_den();
    int twos = 0, fives = 0;
    while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) {
        d /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) {
        d /= 5;
        ++fives;
    }
    if (d != 1) return q.get_str();
    int digits = std::max(twos, fives);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
    Integer scaled = q.get_num() * scale / q.get_den();
    bool neg = scaled < 0;
    std::string s = Integer(abs(scaled)).get_str();
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
    return (neg ? "-" : "") + s;
}

inline std::string format_complex(Complex c) {
    std::ostringstream os;
    os.precision(12);
    if (std::abs(c.imag()) < 1e-15) {
        os << c.real();
    } else if (std::abs(c.real()) < 1e-15) {
        os << c.imag() << "i";
    } else {
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    }
    return os.str();
}

/// Coefficient rendered as a multiplicative prefix ("", "T", "T^0.5", "2 T^1/3", "(1+T^1)").
inline std::string format_factor(const NovikovScalar& s) {
    auto one_term = [](const NovikovScalar::Term& t, bool compact) {
        std::string c;
        bool unit = std::abs(t.coeff - Complex(1.0)) < 1e-15;
        if (!unit || t.exponent == 0) c = format_complex(t.coeff);
        if (t.exponent != 0) {
            if (!c.empty() && !compact) c += " ";
            c += "T";
            if (t.exponent != 1 || compact) c += "^" + format_exponent(t.exponent);
        }
        return c;
    };
    if (s.terms().size() == 1 && s.is_exact()) {
        const auto& t = s.terms().front();
        if (t.exponent == 0 && std::abs(t.coeff - Complex(1.0)) < 1e-15) return "";
        return one_term(t, false);
    }
    std::string out = "(";
    for (std::size_t i = 0; i < s.terms().size(); ++i) {
        if (i) out += "+";
        out += one_term(s.terms()[i], true);
    }
    if (s.truncation().is_finite()) out += "+O(T^" + format_exponent(s.truncation().value()) + ")";
    return out + ")";
}

inline std::string format_monomial(const Exponent& a, const std::string& var) {
    int nonzero = 0;
    for (int x : a) nonzero += x != 0;
    if (nonzero == 0) return "1";
    bool uniform = a.size() >= 2 && nonzero == static_cast<int>(a.size()) && a[0] != 1;
    for (int x : a) uniform = uniform && x == a[0];
    std::string s;
    if (uniform) {
        s = "(";
        for (std::size_t i = 0; i < a.size(); ++i) s += (i ? " " : "") + var + std::to_string(i + 1);
        return s + ")^" + std::to_string(a[0]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        if (!s.empty()) s += " ";
        s += var + std::to_string(i + 1);
        if (a[i] != 1) s += "^" + std::to_string(a[i]);
    }
    return s;
}

}  // namespace detail

class LaurentPoly {
public:
    LaurentPoly() = default;
    explicit LaurentPoly(int nvars) : nvars_(nvars) {}

    static LaurentPoly monomial(Exponent a, NovikovScalar c) {
        LaurentPoly p(static_cast<int>(a.size()));
        p.add_term(std::move(a), std::move(c));
        return p;
    }
    static LaurentPoly constant(int nvars, NovikovScalar c) { return monomial(Exponent(nvars, 0), std::move(c)); }

    int nvars() const noexcept { return nvars_; }
    const std::map<Exponent, NovikovScalar>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    NovikovScalar coefficient(const Exponent& a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? NovikovScalar() : it->second;
    }

    void add_term(Exponent a, const NovikovScalar& c) {
        if (static_cast<int>(a.size()) != nvars_) throw Error(ErrorCode::IndexOutOfRange, "exponent vector has the wrong length");
        auto it = terms_.find(a);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_.emplace(std::move(a), c);
            return;
        }
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }

    LaurentPoly operator-() const {
        LaurentPoly r = *this;
        for (auto& [_, c] : r.terms_) c = -c;
        return r;
    }
    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
        for (const auto& [e, c] : b.terms_) a.add_term(e, c);
        return a;
    }
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exponent e(ea.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                r.add_term(std::move(e), ca * cb);
            }
        }
        return r;
    }
    friend LaurentPoly operator*(const NovikovScalar& s, const LaurentPoly& p) {
        LaurentPoly r(p.nvars_);
        for (const auto& [e, c] : p.terms_) r.add_term(e, s * c);
        return r;
    }
    LaurentPoly& operator+=(const LaurentPoly& o) { return *this = *this + o; }

    /// Term-exact comparison.
    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }

    bool approx_equal(const LaurentPoly& o, double tol) const {
        LaurentPoly d = *this - o;
        for (const auto& [_, c] : d.terms_)
            if (c.max_abs_coefficient() > tol) return false;
        return true;
    }

    LaurentPoly truncated(const ExtRational& order) const {
        LaurentPoly r(nvars_);
        for (const auto& [e, c] : terms_) r.add_term(e, c.truncated(order));
        return r;
    }

    /// Multiplies every coefficient by T^e.
    LaurentPoly shifted(const Rational& e) const {
        LaurentPoly r = *this;
        for (auto& [_, c] : r.terms_) c = c.shifted(e);
        return r;
    }

    /// y_i d/dy_i (0-based i).
    LaurentPoly log_derivative(int i) const {
        if (i < 0 || i >= nvars_) throw Error(ErrorCode::IndexOutOfRange, "variable index " + std::to_string(i));
        LaurentPoly r(nvars_);
        for (const auto& [e, c] : terms_)
            if (e[i] != 0) r.add_term(e, c.scaled(static_cast<double>(e[i])));
        return r;
    }

    /// v_T^u: min over terms of v(c) + <a,u>.
    ExtRational valuation_at_u(const RationalVector& u) const {
        ExtRational best = ExtRational::infinity();
        for (const auto& [e, c] : terms_) {
            Rational s = 0;
            for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * u[i];
            best = min(best, c.valuation() + ExtRational(s));
        }
        return best;
    }

    /// Rewrites c y^a as c T^{<a,u>} ybar^a, where y_i = T^{u_i} ybar_i.
    LaurentPoly change_frame(const RationalVector& u) const {
        LaurentPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            Rational s = 0;
            for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * u[i];
            r.terms_.emplace(e, c.shifted(s));
        }
        return r;
    }

    /// Substitution y = point. Negative powers of non-monomial entries are
    /// inverted to the given order.
    NovikovScalar evaluate(const std::vector<NovikovScalar>& y, const Rational& order = default_truncation()) const {
        if (static_cast<int>(y.size()) != nvars_) throw Error(ErrorCode::IndexOutOfRange, "point has the wrong dimension");
        std::vector<std::map<int, NovikovScalar>> cache(nvars_);
        auto power = [&](int i, int k) -> const NovikovScalar& {
            auto it = cache[i].find(k);
            if (it != cache[i].end()) return it->second;
            return cache[i].emplace(k, pow(y[i], k, order)).first->second;
        };
        NovikovScalar total;
        for (const auto& [e, c] : terms_) {
            NovikovScalar t = c;
            for (int i = 0; i < nvars_; ++i)
                if (e[i] != 0) t = t * power(i, e[i]);
            total += t;
        }
        return total.truncated(ExtRational(order));
    }

    /// Sorted monomial list, "T^{1/2} y1 + (2) y2^-1" style.
    std::string str(const std::string& var = "y") const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [e, c] : terms_) {
            std::string f = detail::format_factor(c);
            std::string m = detail::format_monomial(e, var);
            std::string t = f.empty() ? m : (m == "1" ? f : f + " " + m);
            if (!s.empty()) s += " + ";
            s += t;
        }
        return s;
    }

private:
    int nvars_ = 0;
    std::map<Exponent, NovikovScalar> terms_;
};

/// z_j = T^{lambda_j} y^{v_j} (0-based j).
inline LaurentPoly z_monomial(const MomentPolytope& p, std::size_t j) {
    if (j >= p.num_facets()) throw Error(ErrorCode::IndexOutOfRange, "facet index " + std::to_string(j));
    const auto& f = p.facets()[j];
    Exponent a(f.normal.begin(), f.normal.end());
    return LaurentPoly::monomial(std::move(a), NovikovScalar::T(f.constant));
}

class Potential {
public:
    Potential() = default;
    Potential(MomentPolytope p, BulkCoefficients bulk, std::vector<Correction> corrections)
        : p_(std::move(p)), bulk_(std::move(bulk)), corrections_(std::move(corrections)) {
        if (bulk_.empty()) bulk_ = BulkCoefficients(p_.num_facets());
        if (bulk_.size() != p_.num_facets()) throw Error(ErrorCode::IndexOutOfRange, "bulk coefficient count differs from facet count");
        for (const auto& c : corrections_) {
            if (c.extra_T <= 0) throw Error(ErrorCode::CorrectionNotPositive, "correction exponent " + c.extra_T.get_str() + " is not positive");
            if (c.monomial_z.size() != p_.num_facets())
                throw Error(ErrorCode::IndexOutOfRange, "correction monomial must have one exponent per facet");
        }
    }

    const MomentPolytope& polytope() const noexcept { return p_; }
    const BulkCoefficients& bulk() const noexcept { return bulk_; }
    const std::vector<Correction>& corrections() const noexcept { return corrections_; }
    const std::vector<std::string>& notes() const noexcept { return notes_; }
    void add_note(std::string s) { notes_.push_back(std::move(s)); }
    int nvars() const noexcept { return p_.dim(); }

    /// PO_0 = sum_j c_j z_j.
    LaurentPoly base() const {
        LaurentPoly r(p_.dim());
        for (std::size_t j = 0; j < p_.num_facets(); ++j) r += bulk_[j] * z_monomial(p_, j);
        return r;
    }

    /// T^{rho} coeff prod z_j^{k_j} as a single y-monomial.
    LaurentPoly correction_term(const Correction& c) const {
        Exponent a(p_.dim(), 0);
        Rational t = c.extra_T;
        for (std::size_t j = 0; j < p_.num_facets(); ++j) {
            int k = c.monomial_z[j];
            if (k == 0) continue;
            t += k * p_.facets()[j].constant;
            for (int i = 0; i < p_.dim(); ++i) a[i] += k * static_cast<int>(p_.facets()[j].normal[i]);
        }
        return LaurentPoly::monomial(std::move(a), NovikovScalar::monomial(t, c.coeff));
    }

    /// Base plus every correction with extra exponent below the truncation order.
    LaurentPoly polynomial(const Rational& order = default_truncation()) const {
        LaurentPoly r = base();
        for (const auto& c : corrections_)
            if (c.extra_T < order) r += correction_term(c);
        return r;
    }

    std::vector<std::string> dropped_corrections(const Rational& order) const {
        std::vector<std::string> out;
        for (const auto& c : corrections_)
            if (c.extra_T >= order) out.push_back("correction with T^" + c.extra_T.get_str() + " dropped at truncation " + order.get_str());
        return out;
    }

    /// PO(y) for y with valuation vector in P.
    NovikovScalar evaluate(const std::vector<NovikovScalar>& y, const Rational& order = default_truncation()) const {
        if (static_cast<int>(y.size()) != p_.dim()) throw Error(ErrorCode::IndexOutOfRange, "point has the wrong dimension");
        RationalVector u;
        for (const auto& x : y) {
            if (x.is_zero()) throw Error(ErrorCode::OutsideDomain, "zero coordinate");
            u.push_back(x.valuation().value());
        }
        bool ok = corrections_.empty() ? p_.contains(u) : p_.is_interior(u);
        if (!ok) throw Error(ErrorCode::OutsideDomain, "valuation vector " + detail::point_str(u) + " is outside P");
        return polynomial(order).evaluate(y, order);
    }

    /// Groups each facet term with the corrections that are pure powers of the
    /// same z_j: "y1 + y2 + T^2 y1^-1 y2^-2 + (1+T^1) y2^-1 T^0.5".
    std::string str(const std::string& var = "y") const {
        std::vector<std::string> zero_first, rest;
        std::vector<bool> used(corrections_.size(), false);
        for (std::size_t j = 0; j < p_.num_facets(); ++j) {
            const auto& f = p_.facets()[j];
            NovikovScalar factor = bulk_[j];
            for (std::size_t k = 0; k < corrections_.size(); ++k) {
                const auto& c = corrections_[k];
                bool single = true;
                for (std::size_t i = 0; i < c.monomial_z.size(); ++i) single = single && c.monomial_z[i] == (i == j ? 1 : 0);
                if (!single) continue;
                factor += NovikovScalar::monomial(c.extra_T, c.coeff);
                used[k] = true;
            }
            Exponent a(f.normal.begin(), f.normal.end());
            std::string mono = detail::format_monomial(a, var);
            std::string tpow;
            if (f.constant != 0) tpow = f.constant == 1 ? "T" : "T^" + detail::format_exponent(f.constant);
            std::string fac = detail::format_factor(factor);
            std::string term;
            if (!fac.empty() && fac.front() == '(') {
                term = fac + (mono == "1" ? "" : " " + mono) + (tpow.empty() ? "" : " " + tpow);
            } else {
                if (mono == "1" && !(fac.empty() && tpow.empty())) mono.clear();
                for (const std::string& piece : {fac, tpow, mono})
                    if (!piece.empty()) term += (term.empty() ? "" : " ") + piece;
            }
            (f.constant == 0 ? zero_first : rest).push_back(term);
        }
        for (std::size_t k = 0; k < corrections_.size(); ++k)
            if (!used[k]) rest.push_back(correction_term(corrections_[k]).str(var));
        std::string s;
        for (const auto* list : {&zero_first, &rest})
            for (const auto& t : *list) s += (s.empty() ? "" : " + ") + t;
        return s.empty() ? "0" : s;
    }

private:
    MomentPolytope p_;
    BulkCoefficients bulk_;
    std::vector<Correction> corrections_;
    std::vector<std::string> notes_;
};

struct PotentialOptions {
    bool assume_fano = false;
    bool corrections_supplied = false;
};

/// Builds PO from facet data, degree-2 bulk coefficients and correction data.
/// Adds a note when the polytope is not Fano and no corrections are given.
inline Potential build_potential(const MomentPolytope& p, const BulkCoefficients& bulk = {},
                                 const std::vector<Correction>& corrections = {}, PotentialOptions opt = {}) {
    require_valid(p);
    Potential w(p, bulk, corrections);
    FanoType type = fano_check(p);
    if (type != FanoType::fano && corrections.empty() && !opt.corrections_supplied) {
        std::string msg = std::string("polytope is ") + std::string(to_string(type)) +
                          "; no correction terms given, using PO_0 only";
        if (opt.assume_fano) msg += " (--assume-fano)";
        w.add_note(std::move(msg));
    }
    return w;
}

/// Evaluates F at y after checking that the valuation vector lies in P.
inline NovikovScalar evaluate_in(const MomentPolytope& p, const LaurentPoly& f, const std::vector<NovikovScalar>& y,
                                 const Rational& order = default_truncation()) {
    RationalVector u;
    for (const auto& x : y) {
        if (x.is_zero()) throw Error(ErrorCode::OutsideDomain, "zero coordinate");
        u.push_back(x.valuation().value());
    }
    if (!p.contains(u)) throw Error(ErrorCode::OutsideDomain, "valuation vector " + detail::point_str(u) + " is outside P");
    return f.evaluate(y, order);
}

}  // namespace toricpo
