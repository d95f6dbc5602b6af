#include <catch_amalgamated.hpp>

#include <random>

#include <toricpo/novikov.hpp>

#include "generators.hpp"

using namespace toricpo;

using testing::random_scalar;

TEST_CASE("valuation", "[novikov]") {
    CHECK(NovikovScalar().valuation().is_infinite());
    auto s = NovikovScalar::T(make_rational(1, 2)) - NovikovScalar::monomial(make_rational(1, 3), 2.0);
    CHECK(s.valuation() == ExtRational(make_rational(1, 3)));
    auto p = NovikovScalar::T(make_rational(1, 2)) * NovikovScalar::monomial(Rational(1), 3.0);
    CHECK(p.valuation() == ExtRational(make_rational(3, 2)));
    CHECK(p.leading_coefficient() == Complex(3.0));
}

TEST_CASE("field operations", "[novikov]") {
    auto half = NovikovScalar::T(make_rational(1, 2));
    CHECK(half * half == NovikovScalar::T(Rational(1)));

    auto third = NovikovScalar::T(make_rational(1, 3));
    CHECK((third - third).is_zero());
    CHECK((third - third).is_exact());

    SECTION("invert(1 + T) is the geometric series") {
        auto inv = invert(NovikovScalar(1.0) + NovikovScalar::T(Rational(1)), Rational(5));
        REQUIRE(inv.terms().size() == 5);
        for (int k = 0; k < 5; ++k) {
            CHECK(inv.terms()[k].exponent == Rational(k));
            CHECK(std::abs(inv.terms()[k].coeff - Complex(k % 2 ? -1.0 : 1.0)) < 1e-14);
        }
        CHECK(inv.truncation() == ExtRational(Rational(5)));
    }

    SECTION("invert(0) throws") {
        CHECK_THROWS_AS(invert(NovikovScalar()), Error);
        try {
            invert(NovikovScalar());
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DivisionByZero);
        }
    }

    SECTION("invert shifts the truncation by -2v") {
        auto s = NovikovScalar::from_terms({{make_rational(1, 2), 2.0}, {Rational(1), 1.0}}, ExtRational(Rational(3)));
        auto inv = invert(s, Rational(10));
        CHECK(inv.truncation() == ExtRational(Rational(2)));
        CHECK(inv.valuation() == ExtRational(make_rational(-1, 2)));
        auto one = s * inv;
        CHECK(one.truncation() == ExtRational(make_rational(5, 2)));
        CHECK(one.approx_equal(NovikovScalar(1.0), 1e-12));
    }
}

TEST_CASE("exp and log1p_frame", "[novikov]") {
    CHECK(exp(NovikovScalar()) == NovikovScalar(1.0));
    auto w = Complex(0.0, 2.0 * M_PI / 3.0);
    auto e = exp(NovikovScalar(w));
    REQUIRE(e.terms().size() == 1);
    CHECK(std::abs(e.leading_coefficient() - std::exp(w)) < 1e-15);

    auto et = exp(NovikovScalar::T(Rational(1)), Rational(5));
    REQUIRE(et.terms().size() == 5);
    double fact = 1.0;
    for (int k = 0; k < 5; ++k) {
        if (k > 0) fact *= k;
        CHECK(std::abs(et.terms()[k].coeff - 1.0 / fact) < 1e-14);
    }
    CHECK_THROWS_AS(exp(NovikovScalar::T(make_rational(-1, 2))), Error);

    CHECK(log1p_frame(NovikovScalar(1.0)).is_zero());
    auto x = NovikovScalar::T(make_rational(1, 2));
    auto back = log1p_frame(exp(x, Rational(5)), Rational(5));
    CHECK(back.approx_equal(x, 1e-12));
    CHECK(back.truncation() == ExtRational(Rational(5)));

    auto m = log1p_frame(NovikovScalar(-1.0) + NovikovScalar::T(Rational(1)), Rational(4));
    CHECK(std::abs(m.coefficient_at(Rational(0)) - Complex(0.0, M_PI)) < 1e-14);
    // log(-1 + T) = i pi + log(1 - T) = i pi - T - T^2/2 - T^3/3
    CHECK(std::abs(m.coefficient_at(Rational(1)) - Complex(-1.0)) < 1e-14);
    CHECK(std::abs(m.coefficient_at(Rational(2)) - Complex(-0.5)) < 1e-14);
    CHECK(std::abs(m.coefficient_at(Rational(3)) - Complex(-1.0 / 3.0)) < 1e-14);

    CHECK_THROWS_AS(log1p_frame(NovikovScalar::T(Rational(1))), Error);
}

TEST_CASE("valuation axioms on random scalars", "[novikov][property]") {
    std::mt19937 rng(20260101);
    for (int trial = 0; trial < 500; ++trial) {
        auto a = random_scalar(rng);
        auto b = random_scalar(rng);
        if (a.is_zero() || b.is_zero()) continue;
        CHECK((a * b).valuation() == a.valuation() + b.valuation());
        auto sum = a + b;
        CHECK(sum.valuation() >= min(a.valuation(), b.valuation()));
        if (a.valuation() != b.valuation()) CHECK(sum.valuation() == min(a.valuation(), b.valuation()));
    }
}

TEST_CASE("ring axioms below truncation", "[novikov][property]") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = random_scalar(rng).truncated(ExtRational(Rational(4)));
        auto b = random_scalar(rng);
        auto c = random_scalar(rng).truncated(ExtRational(Rational(6)));
        CHECK(((a + b) + c).approx_equal(a + (b + c), 1e-12));
        CHECK((a * (b + c)).approx_equal(a * b + a * c, 1e-10));
    }
}

TEST_CASE("exp/log round trip and truncation monotonicity", "[novikov][property]") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unit(-10.0 / std::sqrt(2.0), 10.0 / std::sqrt(2.0));
    for (int trial = 0; trial < 100; ++trial) {
        auto x = random_scalar(rng, true);
        // |x0| <= 10 with imaginary part in (-pi, pi] so the principal log recovers it
        Complex x0(unit(rng), std::fmod(unit(rng), M_PI - 1e-3));
        std::vector<NovikovScalar::Term> terms;
        for (const auto& t : x.terms()) {
            if (t.exponent > 0) terms.push_back(t);
        }
        terms.push_back({Rational(0), x0});
        x = NovikovScalar::from_terms(terms);
        auto back = log1p_frame(exp(x, Rational(4)), Rational(4));
        CHECK(back.approx_equal(x.truncated(ExtRational(Rational(4))), 1e-8 * std::max(1.0, x.max_abs_coefficient())));

        auto y = NovikovScalar(1.0) + random_scalar(rng, true).truncated(ExtRational(Rational(8))) * NovikovScalar::T(make_rational(1, 3));
        if (y.valuation() != ExtRational(0)) continue;
        auto lo = invert(y, Rational(3));
        auto hi = invert(y, Rational(6));
        for (const auto& t : lo.terms()) {
            CHECK(std::abs(hi.coefficient_at(t.exponent) - t.coeff) < 1e-9 * std::max(1.0, std::abs(t.coeff)));
        }
        for (const auto& t : hi.terms()) {
            if (t.exponent < 3) CHECK(std::abs(lo.coefficient_at(t.exponent) - t.coeff) < 1e-9 * std::max(1.0, std::abs(t.coeff)));
        }
    }
}
