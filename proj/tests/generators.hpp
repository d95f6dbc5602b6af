#pragma once

// Random scalars and Laurent polynomials for the property suites.

#include <random>

#include <toricpo/laurent.hpp>

namespace toricpo::testing {

inline NovikovScalar random_scalar(std::mt19937& rng, bool lambda0 = false) {
    std::uniform_int_distribution<int> count(1, 5);
    std::uniform_int_distribution<int> num(lambda0 ? 0 : -6, 12);
    std::uniform_int_distribution<int> den(1, 4);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    std::vector<NovikovScalar::Term> terms;
    int k = count(rng);
    for (int i = 0; i < k; ++i) {
        terms.push_back({make_rational(num(rng), den(rng)), Complex(coeff(rng), coeff(rng))});
    }
    return NovikovScalar::from_terms(std::move(terms));
}

inline LaurentPoly random_poly(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> count(1, 4), expo(-3, 3), num(0, 8), den(1, 3);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    LaurentPoly p(n);
    int k = count(rng);
    for (int t = 0; t < k; ++t) {
        Exponent a(n);
        for (auto& x : a) x = expo(rng);
        std::vector<NovikovScalar::Term> terms;
        int nt = count(rng);
        for (int i = 0; i < nt; ++i) terms.push_back({make_rational(num(rng), den(rng)), Complex(coeff(rng), coeff(rng))});
        p.add_term(a, NovikovScalar::from_terms(terms));
    }
    return p;
}

}  // namespace toricpo::testing
