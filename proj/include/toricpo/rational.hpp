#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace toricpo {

using Rational = mpq_class;
using Integer = mpz_class;
using RationalVector = std::vector<Rational>;

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "p/q", an integer, or a finite decimal such as "-0.125". Decimals are
/// converted exactly, so "0.4" becomes 2/5.
inline Rational parse_rational(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty rational");
    auto fail = [&] { throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(text) + "'"); };
    auto digits_only = [](std::string_view d) {
        if (d.empty()) return false;
        for (char c : d) if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };

    bool negative = false;
    std::string_view body(s);
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational q;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!digits_only(num) || !digits_only(den)) fail();
        Integer d{std::string(den)};
        if (d == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
        q = Rational(Integer{std::string(num)}, d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if (whole.empty() && frac.empty()) fail();
        if ((!whole.empty() && !digits_only(whole)) || (!frac.empty() && !digits_only(frac))) fail();
        Integer w = whole.empty() ? Integer(0) : Integer(std::string(whole));
        Integer f = frac.empty() ? Integer(0) : Integer(std::string(frac));
        Integer scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        q = Rational(w * scale + f, scale);
    } else {
        if (!digits_only(body)) fail();
        q = Rational(Integer(std::string(body)));
    }
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline RationalVector parse_rational_list(std::string_view text) {
    RationalVector out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_rational(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// A rational number or +infinity. Used for valuations and truncation orders.
class ExtRational {
public:
    ExtRational() : infinite_(true) {}
    ExtRational(const Rational& q) : infinite_(false), value_(q) {}  // NOLINT(implicit)
    ExtRational(long n) : infinite_(false), value_(n) {}             // NOLINT(implicit)

    static ExtRational infinity() { return ExtRational(); }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }
    const Rational& value() const {
        if (infinite_) throw Error(ErrorCode::OutsideDomain, "value() of +infinity");
        return value_;
    }

    friend bool operator==(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
        if (a.infinite_) return std::strong_ordering::greater;
        if (b.infinite_) return std::strong_ordering::less;
        int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
        if (a.infinite_ || b.infinite_) return infinity();
        return ExtRational(Rational(a.value_ + b.value_));
    }
    friend ExtRational operator-(const ExtRational& a, const Rational& b) {
        if (a.infinite_) return infinity();
        return ExtRational(Rational(a.value_ - b));
    }

    std::string str() const { return infinite_ ? std::string("inf") : value_.get_str(); }

    static ExtRational parse(std::string_view s) {
        if (s == "inf" || s == "+inf" || s == "infinity") return infinity();
        return ExtRational(parse_rational(s));
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtRational& e) { return os << e.str(); }

private:
    bool infinite_;
    Rational value_;
};

inline ExtRational min(const ExtRational& a, const ExtRational& b) { return a <= b ? a : b; }

}  // namespace toricpo
