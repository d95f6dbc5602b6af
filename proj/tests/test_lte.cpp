#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <toricpo/catalog.hpp>
#include <toricpo/critical.hpp>
#include <toricpo/lte.hpp>

#include "random_polytopes.hpp"

using namespace toricpo;

namespace {

RationalVector rv(std::initializer_list<Rational> xs) { return RationalVector(xs); }

MomentPolytope catalog_polytope(const std::string& spec) { return catalog(spec).polytope; }

bool near(Complex a, Complex b, double eps = 1e-9) { return std::abs(a - b) <= eps * std::max(1.0, std::abs(a)); }

// every v_j is an integer combination of e*_s with level(s) <= level(j)
void check_integrality(const MomentPolytope& p, const LTESystem& sys) {
    const auto n = static_cast<std::size_t>(p.dim());
    for (std::size_t l = 0; l < sys.levels.size(); ++l)
        for (auto j : sys.levels[l].members) {
            std::vector<Integer> back(n, Integer(0));
            for (std::size_t s = 0; s < n; ++s) {
                if (sys.basis.c[j][s] != 0) CHECK(sys.basis.level_of[s] <= l);
                for (std::size_t i = 0; i < n; ++i) back[i] += sys.basis.c[j][s] * sys.basis.e[s][i];
            }
            for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == p.facet(j).normal[i]);
        }
}

void check_triangular(const LTESystem& sys) {
    for (std::size_t k = 0; k < sys.equations.size(); ++k)
        for (std::size_t s = 0; s < sys.n(); ++s)
            if (sys.equations[k].involves(static_cast<int>(s))) CHECK(sys.basis.level_of[s] <= sys.equation_level[k]);
}

}  // namespace

TEST_CASE("lattice helpers", "[lte]") {
    IntegerMatrix a{{Integer(2), Integer(4)}, {Integer(0), Integer(6)}, {Integer(2), Integer(10)}};
    auto h = lattice::hnf_rows(a);
    REQUIRE(h.size() == 2);
    CHECK(h[0] == std::vector<Integer>{2, 4});
    CHECK(h[1] == std::vector<Integer>{0, 6});

    // span{(2,0)} saturates to (1,0)
    std::size_t d = 0;
    auto f = lattice::saturated_completion({{Integer(2), Integer(0)}}, 2, d);
    CHECK(d == 1);
    CHECK(f[0] == std::vector<Integer>{1, 0});
    CHECK(lattice::unimodular_inverse(f).has_value());

    // (1,2) spans a saturated line; completion must be unimodular
    f = lattice::saturated_completion({{Integer(-1), Integer(-2)}}, 2, d);
    CHECK(f[0] == std::vector<Integer>{1, 2});
    CHECK(lattice::unimodular_inverse(f).has_value());
    CHECK_FALSE(lattice::unimodular_inverse({{Integer(2), Integer(0)}, {Integer(0), Integer(1)}}).has_value());
}

TEST_CASE("level ordering", "[lte]") {
    auto f2 = catalog_polytope("hirzebruch:2,1/2");
    auto lv = order_levels(f2, rv({Rational(1, 2), Rational(1, 4)}));
    REQUIRE(lv.size() == 3);
    CHECK(lv[0].S == Rational(1, 4));
    CHECK(lv[0].members == std::vector<std::size_t>{1, 3});

    for (int n = 1; n <= 4; ++n) {
        auto p = catalog_polytope("simplex:" + std::to_string(n));
        RationalVector bary(n, Rational(1, n + 1));
        auto levels = order_levels(p, bary);
        REQUIRE(levels.size() == 1);
        CHECK(levels[0].members.size() == static_cast<std::size_t>(n + 1));
        auto f = build_filtration(p, levels);
        CHECK(f.K == 1);
        CHECK(f.d[0] == static_cast<std::size_t>(n));
    }

    auto b2 = catalog_polytope("blowup2:1/2,1/4");
    auto levels = order_levels(b2, rv({Rational(3, 10), Rational(1, 4)}));
    REQUIRE(levels.size() == 3);
    CHECK(levels[0].members == std::vector<std::size_t>{2, 3});
    CHECK(levels[1].members == std::vector<std::size_t>{1, 4});
    auto f = build_filtration(b2, levels);
    CHECK(f.d == std::vector<std::size_t>{1, 1, 0});
    CHECK(f.K == 2);
    CHECK(f.K0 == 3);

    CHECK_THROWS_MATCHES(order_levels(f2, rv({Rational(0), Rational(1, 4)})), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NotInterior; }));
    CHECK_THROWS_MATCHES(order_levels(f2, rv({Rational(3), Rational(1, 4)})), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NotInterior; }));
}

TEST_CASE("adapted basis", "[lte]") {
    SECTION("F_2 on the segment u2 = 1/4") {
        auto p = catalog_polytope("hirzebruch:2,1/2");
        auto sys = leading_term_system(p, rv({Rational(3, 4), Rational(1, 4)}));
        CHECK(sys.basis.e[0] == std::vector<Integer>{0, 1});
        CHECK(sys.basis.e[1] == std::vector<Integer>{1, 0});
        CHECK(sys.basis.c[2] == std::vector<Integer>{-2, -1});
        check_integrality(p, sys);
    }
    SECTION("standard basis stays") {
        // square [0,1]^2 at u1 < u2 < 1/2: levels {u1}, {u2}, ...
        MomentPolytope sq(2, {{{1, 0}, Rational(0), ""}, {{0, 1}, Rational(0), ""}, {{-1, 0}, Rational(1), ""}, {{0, -1}, Rational(1), ""}});
        auto sys = leading_term_system(sq, rv({Rational(1, 5), Rational(1, 3)}));
        CHECK(sys.basis.e == lattice::identity(2));
        CHECK(sys.basis.einv == lattice::identity(2));
    }
    SECTION("non-trivial change of variables") {
        // the level with normal (1,1) comes first; second basis vector completes it
        auto p = catalog_polytope("blowup2:1/3,1/3");
        auto sys = leading_term_system(p, rv({Rational(1, 5), Rational(1, 5)}));
        check_integrality(p, sys);
        check_triangular(sys);
    }
}

TEST_CASE("leading term equations", "[lte]") {
    SECTION("F_2 at the balanced point") {
        auto p = catalog_polytope("hirzebruch:2,1/2");
        auto sys = leading_term_system(p, rv({Rational(3, 4), Rational(1, 4)}));
        REQUIRE(sys.equations.size() == 2);
        // Y1 - Y1^-1 and Y2 - Y1^-2 Y2^-1
        CHECK(sys.equations[0].size() == 2);
        CHECK(sys.equations[0].coefficient({1, 0}) == Complex(1.0));
        CHECK(sys.equations[0].coefficient({-1, 0}) == Complex(-1.0));
        CHECK(sys.equations[1].coefficient({0, 1}) == Complex(1.0));
        CHECK(sys.equations[1].coefficient({-2, -1}) == Complex(-1.0));

        auto r = solve_lte(sys);
        REQUIRE(r.solvable);
        REQUIRE(r.solutions.size() == 4);
        int hits = 0;
        for (Complex a : {Complex(1), Complex(-1)})
            for (Complex b : {Complex(1), Complex(-1)})
                for (const auto& s : r.solutions)
                    if (near(*s.ybar[0], a) && near(*s.ybar[1], b)) ++hits;
        CHECK(hits == 4);
    }
    SECTION("F_2 off the balanced point") {
        auto p = catalog_polytope("hirzebruch:2,1/2");
        auto r = solve_lte(leading_term_system(p, rv({Rational(1, 2), Rational(1, 4)})));
        CHECK_FALSE(r.solvable);
        REQUIRE(r.obstruction_level);
        CHECK(*r.obstruction_level == 1);
        for (auto u : {rv({Rational(1), Rational(1, 4)}), rv({Rational(1, 2), Rational(1, 3)}), rv({Rational(1, 5), Rational(1, 7)})})
            CHECK_FALSE(is_strongly_bulk_balanced(p, u).balanced);
        CHECK(is_strongly_bulk_balanced(p, rv({Rational(3, 4), Rational(1, 4)})).note.empty() == false);
    }
    SECTION("blowup2 along the segment: ybar2 = -1, ybar1 free") {
        auto p = catalog_polytope("blowup2:1/2,1/4");
        for (int k = 1; k <= 10; ++k) {
            Rational t = Rational(1, 4) + make_rational(k, 88);  // inside (1/4, 3/8)
            auto sys = leading_term_system(p, rv({t, Rational(1, 4)}));
            check_triangular(sys);
            auto r = solve_lte(sys);
            INFO("t = " << t.get_str());
            REQUIRE(r.solvable);
            REQUIRE(r.solutions.size() == 1);
            const auto& s = r.solutions[0];
            CHECK(s.has_free());
            CHECK(s.sampled.empty());
            REQUIRE(s.ybar[1]);
            CHECK(near(*s.ybar[1], Complex(-1.0)));
            CHECK_FALSE(s.ybar[0]);
        }
        CHECK_FALSE(is_strongly_bulk_balanced(p, rv({Rational(1, 5), Rational(1, 5)})).balanced);
        CHECK_FALSE(is_strongly_bulk_balanced(p, rv({Rational(3, 10), Rational(1, 3)})).balanced);
    }
    SECTION("CP^n at the barycenter") {
        for (int n = 1; n <= 4; ++n) {
            auto p = catalog_polytope("simplex:" + std::to_string(n));
            auto r = solve_lte(leading_term_system(p, RationalVector(n, Rational(1, n + 1))));
            REQUIRE(r.solutions.size() == static_cast<std::size_t>(n + 1));
            for (const auto& s : r.solutions) {
                // ybar_i = (ybar_1 ... ybar_n)^{-1}, all equal
                Complex prod = 1.0;
                for (const auto& y : s.ybar) prod *= *y;
                for (const auto& y : s.ybar) CHECK(near(*y * prod, Complex(1.0)));
                CHECK(std::abs(std::pow(*s.ybar[0], n + 1) - 1.0) < 1e-9);
            }
        }
    }
    SECTION("underdetermined levels can be made to throw") {
        auto p = catalog_polytope("simplex:2");
        // a generic point: one facet per level, d = 1 each, equation is a monomial
        auto r = solve_lte(leading_term_system(p, rv({Rational(1, 5), Rational(1, 3)})));
        CHECK_FALSE(r.solvable);
        LTEOptions strict;
        strict.sample_underdetermined = false;
        auto b2 = catalog_polytope("blowup2:1/2,1/4");
        CHECK_NOTHROW(solve_lte(leading_term_system(b2, rv({Rational(3, 10), Rational(1, 4)})), strict));
    }
}

TEST_CASE("integrality over random Delzant polygons", "[lte][property]") {
    std::mt19937 rng(20240611);
    int built = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto p = testing::random_delzant_polygon(rng);
        REQUIRE(validate(p).valid);
        auto verts = vertices(p);
        // vertex centroid, midpoints towards it, and points where two facet values tie
        RationalVector c(2, Rational(0));
        for (const auto& v : verts)
            for (int i = 0; i < 2; ++i) c[i] += v.point[i] / Rational(static_cast<long>(verts.size()));
        std::vector<RationalVector> samples{c};
        for (const auto& v : verts) samples.push_back({(v.point[0] + 3 * c[0]) / 4, (v.point[1] + 3 * c[1]) / 4});
        for (const auto& u : samples) {
            if (!p.is_interior(u)) continue;
            auto sys = leading_term_system(p, u);
            ++built;
            check_integrality(p, sys);
            check_triangular(sys);
            CHECK(sys.filtration.K >= 1);
        }
    }
    CHECK(built >= 100);
}

TEST_CASE("lte agrees with the initial systems of 0-dimensional cells", "[lte][property]") {
    for (const auto& spec : {"simplex:1", "simplex:2", "simplex:3", "simplex:4", "blowup1:0.2", "blowup1:1/3", "blowup1:0.4",
                             "blowup1:0.7", "blowup2:1/3,1/3", "blowup2:1/2,1/4", "blowup2:1/5,1/2", "hirzebruch:1,1/2"}) {
        auto e = catalog(spec);
        REQUIRE(fano_check(e.polytope) == FanoType::fano);
        auto w = build_potential(e.polytope);
        auto system = critical_system(w);
        for (const auto& cell : tropical_candidates(system, e.polytope)) {
            if (cell.dim != 0) continue;
            auto r = solve_lte(leading_term_system(e.polytope, cell.point));
            INFO(spec << " at " << detail::point_str(cell.point));
            InitialSolve init;
            try {
                init = solve_initial(initial_system(system, cell.point));
            } catch (const Error& err) {
                // a curve of initial solutions: the leading term equation leaves a variable free
                REQUIRE(err.code() == ErrorCode::PositiveDimensionalInitialLocus);
                for (const auto& s : r.solutions) CHECK(s.has_free());
                continue;
            }
            REQUIRE(r.solutions.size() == init.points.size());
            for (const auto& x : init.points) {
                int matches = 0;
                for (const auto& s : r.solutions) {
                    bool same = true;
                    for (std::size_t i = 0; i < x.size(); ++i) same = same && s.ybar[i] && near(*s.ybar[i], x[i], 1e-8);
                    matches += same;
                }
                CHECK(matches == 1);
            }
        }
    }
}

TEST_CASE("scaling covariance", "[lte][property]") {
    const std::vector<std::pair<std::string, RationalVector>> cases{
        {"hirzebruch:2,1/2", rv({Rational(3, 4), Rational(1, 4)})},
        {"hirzebruch:2,1/2", rv({Rational(1, 2), Rational(1, 4)})},
        {"blowup2:1/2,1/4", rv({Rational(3, 10), Rational(1, 4)})},
        {"blowup1:1/3", rv({Rational(1, 3), Rational(1, 3)})},
        {"simplex:3", RationalVector(3, Rational(1, 4))},
        {"simplex:2", rv({Rational(1, 5), Rational(1, 3)})},
    };
    for (const auto& [spec, u] : cases) {
        auto p = catalog_polytope(spec);
        bool base = is_strongly_bulk_balanced(p, u).balanced;
        for (Complex k : {Complex(2.0), Complex(0.0, 1.0), std::polar(0.3, 2.1)}) {
            std::vector<Complex> c(p.num_facets(), k);
            CHECK(is_strongly_bulk_balanced(p, u, c).balanced == base);
        }
    }
}
