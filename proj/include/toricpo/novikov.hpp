#pragma once

/**
 * Truncated generalized power series over the universal Novikov field.
 *
 * A NovikovScalar is a finite sum  sum_i a_i T^{lambda_i}  with exact rational
 * exponents and complex floating point coefficients, together with a
 * truncation order: every exponent >= truncation() is unknown. Exact values
 * (polynomials in T) carry truncation +infinity.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rational.hpp"

namespace toricpo {

using Complex = std::complex<double>;

namespace detail {
inline std::atomic<double>& coefficient_epsilon_storage() {
    static std::atomic<double> eps{1e-12};
    return eps;
}
}  // namespace detail

/// Coefficients smaller than this in magnitude are dropped (default 1e-12).
inline double coefficient_epsilon() { return detail::coefficient_epsilon_storage().load(std::memory_order_relaxed); }
inline void set_coefficient_epsilon(double eps) { detail::coefficient_epsilon_storage().store(eps, std::memory_order_relaxed); }

/// Default truncation order for series produced by inversion, exp, log.
inline Rational default_truncation() { return Rational(5); }

class NovikovScalar {
public:
    struct Term {
        Rational exponent;
        Complex coeff;
    };

    /// Exact zero.
    NovikovScalar() = default;
    NovikovScalar(Complex c) {  // NOLINT(implicit)
        if (std::abs(c) >= coefficient_epsilon()) terms_.push_back({Rational(0), c});
    }
    NovikovScalar(double c) : NovikovScalar(Complex(c, 0.0)) {}  // NOLINT(implicit)
    NovikovScalar(int c) : NovikovScalar(Complex(c, 0.0)) {}     // NOLINT(implicit)

    static NovikovScalar monomial(const Rational& exponent, Complex coeff = 1.0) {
        NovikovScalar s;
        if (std::abs(coeff) >= coefficient_epsilon()) s.terms_.push_back({exponent, coeff});
        return s;
    }
    /// T^e.
    static NovikovScalar T(const Rational& exponent) { return monomial(exponent, 1.0); }

    /// The unknown quantity O(T^order).
    static NovikovScalar zero(ExtRational truncation) {
        NovikovScalar s;
        s.trunc_ = std::move(truncation);
        return s;
    }

    /// Sorts, merges equal exponents, prunes small coefficients and drops
    /// everything at or above the truncation order.
    static NovikovScalar from_terms(std::vector<Term> terms, ExtRational truncation = ExtRational::infinity()) {
        NovikovScalar s;
        s.trunc_ = std::move(truncation);
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
        const double eps = coefficient_epsilon();
        for (auto& t : terms) {
            if (s.trunc_.is_finite() && t.exponent >= s.trunc_.value()) break;
            if (!s.terms_.empty() && s.terms_.back().exponent == t.exponent) {
                s.terms_.back().coeff += t.coeff;
            } else {
                s.terms_.push_back(std::move(t));
            }
        }
        std::erase_if(s.terms_, [eps](const Term& t) { return std::abs(t.coeff) < eps; });
        return s;
    }

    const std::vector<Term>& terms() const noexcept { return terms_; }
    const ExtRational& truncation() const noexcept { return trunc_; }
    bool is_exact() const noexcept { return trunc_.is_infinite(); }

    /// True when no term survives below the truncation order.
    bool is_zero() const noexcept { return terms_.empty(); }

    /// Smallest exponent with a nonzero coefficient; +infinity for zero.
    ExtRational valuation() const {
        if (terms_.empty()) return ExtRational::infinity();
        return ExtRational(terms_.front().exponent);
    }

    /// Lower bound for the true valuation: the truncation order when nothing is known.
    ExtRational valuation_bound() const { return terms_.empty() ? trunc_ : valuation(); }

    /// valuation_bound() after treating coefficients of magnitude <= tol as zero.
    ExtRational valuation_above(double tol) const {
        for (const auto& t : terms_)
            if (std::abs(t.coeff) > tol) return ExtRational(t.exponent);
        return trunc_;
    }

    Complex leading_coefficient() const { return terms_.empty() ? Complex(0.0) : terms_.front().coeff; }

    Complex coefficient_at(const Rational& exponent) const {
        for (const auto& t : terms_) {
            if (t.exponent == exponent) return t.coeff;
            if (t.exponent > exponent) break;
        }
        return Complex(0.0);
    }

    bool in_lambda0() const { return valuation() >= ExtRational(0); }
    bool in_lambda_plus() const { return valuation() > ExtRational(0); }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
        return m;
    }

    NovikovScalar truncated(const ExtRational& order) const {
        if (order >= trunc_) return *this;
        NovikovScalar s;
        s.trunc_ = order;
        for (const auto& t : terms_) {
            if (t.exponent >= order.value()) break;
            s.terms_.push_back(t);
        }
        return s;
    }

    /// Multiplication by T^e.
    NovikovScalar shifted(const Rational& e) const {
        NovikovScalar s = *this;
        for (auto& t : s.terms_) t.exponent += e;
        s.trunc_ = s.trunc_ + ExtRational(e);
        return s;
    }

    NovikovScalar scaled(Complex c) const {
        if (std::abs(c) == 0.0) return NovikovScalar();
        std::vector<Term> terms = terms_;
        for (auto& t : terms) t.coeff *= c;
        return from_terms(std::move(terms), trunc_);
    }

    NovikovScalar operator-() const {
        NovikovScalar s = *this;
        for (auto& t : s.terms_) t.coeff = -t.coeff;
        return s;
    }

    friend NovikovScalar operator+(const NovikovScalar& a, const NovikovScalar& b) {
        ExtRational trunc = min(a.trunc_, b.trunc_);
        std::vector<Term> out;
        out.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].exponent < b.terms_[j].exponent)) {
                out.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || b.terms_[j].exponent < a.terms_[i].exponent) {
                out.push_back(b.terms_[j++]);
            } else {
                out.push_back({a.terms_[i].exponent, a.terms_[i].coeff + b.terms_[j].coeff});
                ++i;
                ++j;
            }
        }
        return from_sorted(std::move(out), std::move(trunc));
    }
    friend NovikovScalar operator-(const NovikovScalar& a, const NovikovScalar& b) { return a + (-b); }

    friend NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b);

    NovikovScalar& operator+=(const NovikovScalar& o) { return *this = *this + o; }
    NovikovScalar& operator-=(const NovikovScalar& o) { return *this = *this - o; }
    NovikovScalar& operator*=(const NovikovScalar& o) { return *this = *this * o; }

    /// Exact equality of exponents, coefficients and truncation order.
    friend bool operator==(const NovikovScalar& a, const NovikovScalar& b) {
        if (a.trunc_ != b.trunc_ || a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i) {
            if (a.terms_[i].exponent != b.terms_[i].exponent || a.terms_[i].coeff != b.terms_[i].coeff) return false;
        }
        return true;
    }

    /// Equality below min(truncations): exponents exact, coefficients within tol.
    bool approx_equal(const NovikovScalar& other, double tol) const {
        ExtRational order = min(trunc_, other.trunc_);
        NovikovScalar diff = truncated(order) - other.truncated(order);
        for (const auto& t : diff.terms_) {
            if (std::abs(t.coeff) > tol) return false;
        }
        return true;
    }

    std::string str() const {
        std::ostringstream os;
        if (terms_.empty()) {
            os << "0";
        }
        bool first = true;
        for (const auto& t : terms_) {
            double re = t.coeff.real(), im = t.coeff.imag();
            if (!first) os << " + ";
            first = false;
            if (std::abs(im) < 1e-15) {
                os << re;
            } else {
                os << "(" << re << (im < 0 ? "-" : "+") << std::abs(im) << "i)";
            }
            if (t.exponent != 0) os << " T^{" << t.exponent.get_str() << "}";
        }
        if (trunc_.is_finite()) os << " + O(T^{" << trunc_.str() << "})";
        return os.str();
    }

    friend NovikovScalar invert(const NovikovScalar& s, const Rational& order);
    friend NovikovScalar pow(const NovikovScalar& s, long k, const Rational& order);

private:
    static NovikovScalar from_sorted(std::vector<Term> terms, ExtRational trunc) {
        NovikovScalar s;
        s.trunc_ = std::move(trunc);
        const double eps = coefficient_epsilon();
        for (auto& t : terms) {
            if (s.trunc_.is_finite() && t.exponent >= s.trunc_.value()) break;
            if (std::abs(t.coeff) >= eps) s.terms_.push_back(std::move(t));
        }
        return s;
    }

    std::vector<Term> terms_;
    ExtRational trunc_ = ExtRational::infinity();
};

namespace detail {

/// Maps a family of rationals onto integers n/D for a common denominator D.
class ExponentScale {
public:
    void include(const Rational& q) { den_ = lcm_(den_, Integer(q.get_den())); }
    void include(const ExtRational& q) {
        if (q.is_finite()) include(q.value());
    }
    const Integer& denominator() const { return den_; }

    std::optional<long long> to_int(const Rational& q) const {
        Integer n = q.get_num() * (den_ / q.get_den());
        if (!n.fits_slong_p()) return std::nullopt;
        long long v = n.get_si();
        if (v > kLimit || v < -kLimit) return std::nullopt;
        return v;
    }
    Rational to_rational(long long n) const {
        Rational q(Integer(static_cast<long>(n)), den_);
        q.canonicalize();
        return q;
    }

private:
    static constexpr long long kLimit = (1LL << 60);
    static Integer lcm_(const Integer& a, const Integer& b) {
        Integer r;
        mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return r;
    }
    Integer den_ = 1;
};

/// Computes the unit series f = 1 + ... (exponents < rel) defined by
///   f_e = (1/e) sum_{b in W, b <= e} w_b f_{e-b} weight(b, e)
/// This one recursion covers (1+w)^k (weight = k b - (e - b)) and exp(w)
/// (weight = b), using the Euler derivation T d/dT.
inline std::vector<NovikovScalar::Term> unit_series(const std::vector<NovikovScalar::Term>& w, const Rational& rel,
                                                    const std::function<double(double b, double e)>& weight) {
    std::vector<NovikovScalar::Term> out;
    if (rel <= 0) return out;
    out.push_back({Rational(0), Complex(1.0)});
    if (w.empty()) return out;

    ExponentScale scale;
    scale.include(rel);
    for (const auto& t : w) scale.include(t.exponent);
    auto rel_int = scale.to_int(rel);
    std::vector<std::pair<long long, Complex>> wi;
    bool ok = rel_int.has_value();
    for (const auto& t : w) {
        auto b = scale.to_int(t.exponent);
        if (!b || *b <= 0) {
            ok = false;
            break;
        }
        if (*b < *rel_int) wi.emplace_back(*b, t.coeff);
    }
    if (!ok) throw Error(ErrorCode::NoConvergence, "series exponents exceed the supported range");

    // Exponents of f lie in the monoid generated by W, below rel.
    const auto n = static_cast<std::size_t>(*rel_int);
    if (n > 50'000'000) throw Error(ErrorCode::NoConvergence, "series exponents exceed the supported range");
    std::vector<char> in(n, 0);
    in[0] = 1;
    for (std::size_t e = 0; e < n; ++e)
        if (in[e])
            for (const auto& [b, c] : wi)
                if (e + static_cast<std::size_t>(b) < n) in[e + static_cast<std::size_t>(b)] = 1;

    std::vector<Complex> f(n, Complex(0.0));
    f[0] = 1.0;
    for (std::size_t e = 1; e < n; ++e) {
        if (!in[e]) continue;
        Complex acc = 0.0;
        for (const auto& [b, c] : wi) {
            auto bs = static_cast<std::size_t>(b);
            if (bs > e || !in[e - bs]) continue;
            acc += c * f[e - bs] * weight(static_cast<double>(b), static_cast<double>(e));
        }
        acc /= static_cast<double>(e);
        f[e] = acc;
        out.push_back({scale.to_rational(static_cast<long long>(e)), acc});
    }
    return out;
}

/// Splits s = c T^v (1 + w) and returns (v, c, w).
inline std::tuple<Rational, Complex, std::vector<NovikovScalar::Term>> unit_split(const NovikovScalar& s) {
    const auto& terms = s.terms();
    Rational v = terms.front().exponent;
    Complex c = terms.front().coeff;
    std::vector<NovikovScalar::Term> w;
    w.reserve(terms.size());
    for (std::size_t i = 1; i < terms.size(); ++i) w.push_back({Rational(terms[i].exponent - v), terms[i].coeff / c});
    return {v, c, std::move(w)};
}

}  // namespace detail

inline NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b) {
    using Term = NovikovScalar::Term;
    ExtRational trunc = min(a.valuation_bound() + b.trunc_, b.valuation_bound() + a.trunc_);
    if (a.terms_.empty() || b.terms_.empty()) return NovikovScalar::zero(trunc);

    detail::ExponentScale scale;
    for (const auto& t : a.terms_) scale.include(t.exponent);
    for (const auto& t : b.terms_) scale.include(t.exponent);
    scale.include(trunc);

    std::vector<std::pair<long long, Complex>> ai, bi;
    bool fast = true;
    for (const auto& t : a.terms_) {
        auto e = scale.to_int(t.exponent);
        if (!e) { fast = false; break; }
        ai.emplace_back(*e, t.coeff);
    }
    for (const auto& t : b.terms_) {
        if (!fast) break;
        auto e = scale.to_int(t.exponent);
        if (!e) { fast = false; break; }
        bi.emplace_back(*e, t.coeff);
    }
    std::optional<long long> limit;
    if (fast && trunc.is_finite()) {
        limit = scale.to_int(trunc.value());
        if (!limit) fast = false;
    }

    if (fast) {
        long long lo = ai.front().first + bi.front().first;
        long long hi = ai.back().first + bi.back().first;
        if (limit) hi = std::min(hi, *limit - 1);
        if (hi < lo) return NovikovScalar::zero(trunc);
        const auto span = static_cast<std::size_t>(hi - lo + 1);
        if (span <= 4 * ai.size() * bi.size() + 64) {
            // dense accumulation
            std::vector<Complex> acc(span, Complex(0.0));
            std::vector<char> hit(span, 0);
            for (const auto& [ea, ca] : ai) {
                for (const auto& [eb, cb] : bi) {
                    long long e = ea + eb;
                    if (e > hi) break;
                    acc[static_cast<std::size_t>(e - lo)] += ca * cb;
                    hit[static_cast<std::size_t>(e - lo)] = 1;
                }
            }
            std::vector<Term> out;
            for (std::size_t k = 0; k < span; ++k)
                if (hit[k]) out.push_back({scale.to_rational(lo + static_cast<long long>(k)), acc[k]});
            return NovikovScalar::from_sorted(std::move(out), std::move(trunc));
        }
        std::vector<std::pair<long long, Complex>> prod;
        prod.reserve(ai.size() * bi.size());
        for (const auto& [ea, ca] : ai) {
            for (const auto& [eb, cb] : bi) {
                long long e = ea + eb;
                if (limit && e >= *limit) break;
                prod.emplace_back(e, ca * cb);
            }
        }
        std::sort(prod.begin(), prod.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        std::vector<Term> out;
        for (std::size_t i = 0; i < prod.size();) {
            long long e = prod[i].first;
            Complex c = 0.0;
            for (; i < prod.size() && prod[i].first == e; ++i) c += prod[i].second;
            out.push_back({scale.to_rational(e), c});
        }
        return NovikovScalar::from_sorted(std::move(out), std::move(trunc));
    }

    std::map<Rational, Complex> acc;
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            Rational e = ta.exponent + tb.exponent;
            if (trunc.is_finite() && e >= trunc.value()) break;
            acc[e] += ta.coeff * tb.coeff;
        }
    }
    std::vector<Term> out;
    for (auto& [e, c] : acc) out.push_back({e, c});
    return NovikovScalar::from_sorted(std::move(out), std::move(trunc));
}

/// Multiplicative inverse. The result is known to min(trunc(s) - 2 v(s), order).
inline NovikovScalar invert(const NovikovScalar& s, const Rational& order = default_truncation()) {
    if (s.is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of a zero series");
    auto [v, c, w] = detail::unit_split(s);
    ExtRational trunc = s.trunc_ - Rational(2 * v);
    if (w.empty() && s.is_exact()) return NovikovScalar::monomial(Rational(-v), 1.0 / c);
    trunc = min(trunc, ExtRational(order));
    Rational rel = trunc.value() + v;
    auto f = detail::unit_series(w, rel, [](double b, double e) { return -b - (e - b); });
    for (auto& t : f) {
        t.exponent -= v;
        t.coeff /= c;
    }
    return NovikovScalar::from_terms(std::move(f), trunc);
}

/// Integer power; negative powers go through the same unit-series recursion.
inline NovikovScalar pow(const NovikovScalar& s, long k, const Rational& order = default_truncation()) {
    if (k == 0) return NovikovScalar(1.0);
    if (k == 1) return s;
    if (s.is_zero()) {
        if (k < 0) throw Error(ErrorCode::DivisionByZero, "negative power of a zero series");
        ExtRational v = s.valuation_bound();
        return NovikovScalar::zero(v.is_infinite() ? v : ExtRational(Rational(v.value() * k)));
    }
    if (k > 0 && (s.is_exact() || s.terms_.size() == 1)) {
        NovikovScalar r(1.0), base = s;
        long e = k;
        while (e > 0) {
            if (e & 1) r = r * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return r;
    }
    auto [v, c, w] = detail::unit_split(s);
    Rational kv = v * k;
    if (w.empty() && s.is_exact()) return NovikovScalar::monomial(kv, std::pow(c, static_cast<double>(k)));
    ExtRational trunc = s.trunc_ - v + ExtRational(kv);
    if (k < 0) trunc = min(trunc, ExtRational(order));
    Rational rel = trunc.value() - kv;
    const double kd = static_cast<double>(k);
    auto f = detail::unit_series(w, rel, [kd](double b, double e) { return kd * b - (e - b); });
    Complex ck = std::pow(c, kd);
    for (auto& t : f) {
        t.exponent += kv;
        t.coeff *= ck;
    }
    return NovikovScalar::from_terms(std::move(f), trunc);
}

/// exp on Lambda_0: x = x0 + x_plus, exp(x) = e^{x0} sum x_plus^k / k!.
inline NovikovScalar exp(const NovikovScalar& x, const Rational& order = default_truncation()) {
    if (x.valuation() < ExtRational(0)) throw Error(ErrorCode::NotInLambda0, "exp needs valuation >= 0, got " + x.valuation().str());
    Complex x0 = x.coefficient_at(Rational(0));
    std::vector<NovikovScalar::Term> w;
    for (const auto& t : x.terms()) {
        if (t.exponent > 0) w.push_back(t);
    }
    Complex scale = std::exp(x0);
    if (w.empty() && x.is_exact()) return NovikovScalar(scale);
    ExtRational trunc = min(x.truncation(), ExtRational(order));
    auto f = detail::unit_series(w, trunc.value(), [](double b, double) { return b; });
    for (auto& t : f) t.coeff *= scale;
    return NovikovScalar::from_terms(std::move(f), trunc);
}

/// Inverse of exp on series of valuation 0 (principal branch of log y0).
inline NovikovScalar log1p_frame(const NovikovScalar& y, const Rational& order = default_truncation()) {
    if (y.is_zero() || y.valuation() > ExtRational(0))
        throw Error(ErrorCode::ZeroLeadingCoefficient, "log needs a nonzero exponent-0 coefficient");
    if (y.valuation() < ExtRational(0)) throw Error(ErrorCode::NotInLambda0, "log needs valuation 0, got " + y.valuation().str());
    Complex y0 = y.leading_coefficient();
    auto [v, c, w] = detail::unit_split(y);
    Complex log0 = std::log(y0);
    if (w.empty() && y.is_exact()) return NovikovScalar(log0);
    ExtRational trunc = min(y.truncation(), ExtRational(order));
    const Rational& rel = trunc.value();
    // log(1+w) = sum_e (h_e / e) T^e with h = D(w) / (1 + w), D = T d/dT.
    std::vector<NovikovScalar::Term> dw = w;
    for (auto& t : dw) t.coeff *= t.exponent.get_d();
    auto inv = detail::unit_series(w, rel, [](double b, double e) { return -b - (e - b); });
    NovikovScalar h = NovikovScalar::from_terms(std::move(dw), trunc) * NovikovScalar::from_terms(std::move(inv), trunc);
    std::vector<NovikovScalar::Term> out;
    out.push_back({Rational(0), log0});
    for (const auto& t : h.terms()) {
        if (t.exponent > 0) out.push_back({t.exponent, t.coeff / t.exponent.get_d()});
    }
    return NovikovScalar::from_terms(std::move(out), trunc);
}

/// a / b with the inverse of b computed to the given order.
inline NovikovScalar divide(const NovikovScalar& a, const NovikovScalar& b, const Rational& order = default_truncation()) {
    return a * invert(b, order);
}

}  // namespace toricpo
