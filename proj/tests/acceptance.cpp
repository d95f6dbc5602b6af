// Acceptance checks, one line per criterion.
//   acceptance        run all
//   acceptance 3 5    run the listed criteria

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <toricpo/catalog.hpp>
#include <toricpo/critical.hpp>
#include <toricpo/jacres.hpp>
#include <toricpo/lte.hpp>
#include <toricpo/scan.hpp>

#include "generators.hpp"
#include "random_polytopes.hpp"

using namespace toricpo;

namespace {

constexpr double kCoeffTol = 1e-9;

class Criterion {
public:
    void check(bool ok, const std::string& what) {
        ++total_;
        if (!ok) failures_.push_back(what);
    }
    bool passed() const { return failures_.empty() && total_ > 0; }
    int total() const { return total_; }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    int total_ = 0;
    std::vector<std::string> failures_;
};

Potential catalog_potential(const std::string& spec) {
    auto e = catalog(spec);
    return build_potential(e.polytope, {}, e.corrections);
}

Complex root_of_unity(int k, int m) { return std::polar(1.0, 2 * std::numbers::pi * k / m); }

int phase_index(Complex c, int m) {
    double a = std::arg(c) / (2 * std::numbers::pi) * m;
    return ((static_cast<int>(std::lround(a)) % m) + m) % m;
}

// largest coefficient error of s against c T^e, terms outside e included
double series_error(const NovikovScalar& s, const Rational& e, Complex c) {
    double err = 0.0;
    bool seen = false;
    for (const auto& t : s.terms()) {
        if (t.exponent == e) {
            err = std::max(err, std::abs(t.coeff - c));
            seen = true;
        } else {
            err = std::max(err, std::abs(t.coeff));
        }
    }
    if (!seen) err = std::max(err, std::abs(c));
    return err;
}

std::string str(const RationalVector& u) { return detail::point_str(u); }

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

// ---------------------------------------------------------------- 1

void cpn_regression(Criterion& c) {
    for (int n = 1; n <= 4; ++n) {
        std::string tag = "CP^" + std::to_string(n) + ": ";
        auto w = catalog_potential("simplex:" + std::to_string(n));
        auto a = find_critical_points(w);
        const int m = n + 1;
        const Rational q = make_rational(1, m);
        c.check(static_cast<int>(a.points.size()) == m, tag + std::to_string(a.points.size()) + " critical points");
        auto report = residue_report(w, a);
        std::set<int> phases;
        double coord_err = 0.0, value_err = 0.0, pair_err = 0.0;
        for (std::size_t k = 0; k < a.points.size(); ++k) {
            const auto& p = a.points[k];
            c.check(p.nondegenerate && p.multiplicity == 1, tag + "point " + std::to_string(k) + " degenerate");
            c.check(p.u == RationalVector(n, q), tag + "u = " + str(p.u));
            int j = phase_index(p.y[0].leading_coefficient(), m);
            phases.insert(j);
            Complex zeta = root_of_unity(j, m);
            for (const auto& y : p.y) {
                c.check(y.valuation() == ExtRational(q), tag + "coordinate valuation " + y.valuation().str());
                coord_err = std::max(coord_err, series_error(y, q, zeta));
            }
            value_err = std::max(value_err, series_error(report.points[k].critical_value, q, double(m) * zeta));
            // <1_k, 1_k> = T^{-n/(n+1)} zeta^{-kn} / (n+1)
            const auto& pd = report.points[k].pairing_diag;
            c.check(pd.has_value(), tag + "no residue pairing at point " + std::to_string(k));
            if (pd) pair_err = std::max(pair_err, series_error(*pd, make_rational(-n, m), std::pow(zeta, -n) / double(m)));
        }
        c.check(static_cast<int>(phases.size()) == m, tag + "phases do not cover all roots of unity");
        c.check(coord_err < kCoeffTol, tag + "coordinate error " + fmt(coord_err));
        c.check(value_err < kCoeffTol, tag + "critical value error " + fmt(value_err));
        c.check(pair_err < kCoeffTol, tag + "residue pairing error " + fmt(pair_err));
        auto d = cpn_duality_check(n, kCoeffTol);
        c.check(d.pass, tag + "duality check, max error " + fmt(d.max_error));
    }
}

// ---------------------------------------------------------------- 2

void blowup_cases(Criterion& c) {
    RationalVector balanced_hi{make_rational(7, 20), make_rational(3, 10)};
    RationalVector third{make_rational(1, 3), make_rational(1, 3)};
    RationalVector low{make_rational(1, 5), make_rational(3, 5)};

    struct Case {
        std::string spec;
        std::map<RationalVector, int> where;
    };
    std::vector<Case> cases{{"blowup1:2/5", {{balanced_hi, 4}}}, {"blowup1:1/5", {{low, 1}, {third, 3}}}, {"blowup1:1/3", {{third, 4}}}};
    for (const auto& k : cases) {
        std::string tag = k.spec + ": ";
        auto w = catalog_potential(k.spec);
        auto a = find_critical_points(w);
        std::map<RationalVector, int> where;
        for (const auto& p : a.points) {
            where[p.u] += 1;
            for (std::size_t i = 0; i < p.y.size(); ++i)
                c.check(p.y[i].valuation() == ExtRational(p.u[i]), tag + "valuation of y" + std::to_string(i + 1) + " differs from u");
        }
        c.check(where == k.where, tag + "points at the wrong places");
        c.check(a.multiplicity_total() == 4, tag + "multiplicity total " + std::to_string(a.multiplicity_total()));
        c.check(total_betti(w.polytope()) == 4, tag + "Betti sum");

        std::set<int> fourth, cube;
        for (const auto& p : a.points) {
            Complex z = p.initial[0];
            if (k.spec == "blowup1:2/5") {
                int j = phase_index(z, 4);
                c.check(std::abs(z - root_of_unity(j, 4)) < kCoeffTol, tag + "initial root is not +-1, +-i");
                fourth.insert(j);
            } else if (k.spec == "blowup1:1/5" && p.u == third) {
                int j = phase_index(z, 3);
                c.check(std::abs(z - root_of_unity(j, 3)) < kCoeffTol, tag + "initial root is not a cube root of unity");
                cube.insert(j);
            } else if (k.spec == "blowup1:1/5") {
                c.check(std::abs(z + 1.0) < kCoeffTol, tag + "initial root at (1/5,3/5) is not -1");
            } else {
                c.check(std::abs(std::pow(z, 4) + std::pow(z, 3) - 1.0) < kCoeffTol, tag + "initial root off z^4 + z^3 - 1");
            }
        }
        if (k.spec == "blowup1:2/5") c.check(fourth.size() == 4, tag + "fourth roots of unity repeated");
        if (k.spec == "blowup1:1/5") c.check(cube.size() == 3, tag + "cube roots of unity repeated");
    }
}

// ---------------------------------------------------------------- 3

void hirzebruch_f2(Criterion& c) {
    const Rational alpha = make_rational(1, 2);
    auto w = catalog_potential("hirzebruch:2,1/2");
    c.check(w.corrections().size() == 1, "F_2: correction term missing");
    auto a = find_critical_points(w);
    c.check(a.points.size() == 4, "F_2: " + std::to_string(a.points.size()) + " critical points");
    RationalVector stated{(1 - alpha) / 2, (1 + alpha) / 2};
    for (const auto& p : a.points) c.check(p.u == stated, "F_2: critical point at u = " + str(p.u) + ", expected " + str(stated));

    auto r = residue_report(w, a);
    int plus = 0, minus = 0;
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const auto& z = r.points[k].Z;
        c.check(z.has_value(), "F_2: Z missing");
        if (!z) continue;
        c.check(z->valuation() == ExtRational(Rational(1)), "F_2: v(Z) = " + z->valuation().str());
        Complex lead = z->leading_coefficient();
        double err = std::min(series_error(*z, Rational(1), 4.0), series_error(*z, Rational(1), -4.0));
        c.check(err < kCoeffTol, "F_2: Z = " + z->str());
        plus += std::abs(lead - 4.0) < kCoeffTol;
        minus += std::abs(lead + 4.0) < kCoeffTol;
    }
    c.check(plus == 2 && minus == 2, "F_2: determinants are not {4T, 4T, -4T, -4T}");
    c.check(r.trace_sum.has_value() && r.trace_vanishes, "F_2: trace sum does not vanish within tol_abs");
}

// ---------------------------------------------------------------- 4

void monotone_trace(Criterion& c) {
    RationalVector third{make_rational(1, 3), make_rational(1, 3)};
    auto w = catalog_potential("blowup1:1/3");
    auto a = find_critical_points(w);
    bool found = false;
    for (const auto& cell : a.cells) {
        if (cell.cell.point != third || cell.eliminant.empty()) continue;
        found = true;
        ComplexVector e = cell.eliminant;
        Complex top = e.back();
        for (auto& x : e) x /= top;
        ComplexVector want{-1.0, 0.0, 0.0, 1.0, 1.0};
        bool same = e.size() == want.size() && cell.eliminant_var == 0;
        for (std::size_t i = 0; same && i < e.size(); ++i) same = std::abs(e[i] - want[i]) < kCoeffTol;
        c.check(same, "eliminant at (1/3,1/3) is not z^4 + z^3 - 1 in ybar1");
    }
    c.check(found, "no eliminant at (1/3,1/3)");
    c.check(a.points.size() == 4, "monotone blow-up: " + std::to_string(a.points.size()) + " points");

    auto f = w.polynomial();
    Complex sum = 0.0;
    for (const auto& p : a.points) {
        Complex z = p.initial[0];
        Complex expect = (4.0 - std::pow(z, 3)) / z;
        auto Z = z_value(f, p);
        double err = series_error(Z, make_rational(2, 3), expect);
        c.check(err < kCoeffTol, "Z = " + Z.str() + " against " + fmt(std::abs(expect)) + " T^2/3, error " + fmt(err));
        sum += z / (4.0 - std::pow(z, 3));
    }
    c.check(std::abs(sum) < 1e-10, "sum z/(4 - z^3) = " + fmt(std::abs(sum)));
}

// ---------------------------------------------------------------- 5

std::set<std::pair<long, long>> witness_set(const BalanceVerdict& v) {
    std::set<std::pair<long, long>> out;
    for (const auto& s : v.solutions) {
        if (!s.ybar[0] || !s.ybar[1]) continue;
        auto round = [](Complex x) { return std::abs(x.imag()) < kCoeffTol && std::abs(x.real() - std::round(x.real())) < kCoeffTol ? std::lround(x.real()) : 0L; };
        out.insert({round(*s.ybar[0]), round(*s.ybar[1])});
    }
    return out;
}

void lte_verdicts(Criterion& c) {
    const Rational alpha = make_rational(1, 2);
    auto f2 = catalog("hirzebruch:2,1/2").polytope;
    RationalVector target{(1 + alpha) * 2 / 4, (1 - alpha) / 2};
    // steps 1/52 and 1/104: every point lies inside P and the grid passes through the target
    GridSpec g{{Rational(0), Rational(0)}, {make_rational(1, 52), make_rational(1, 104)}, 50};
    auto pts = grid_points(f2, g);
    c.check(pts.size() == 2500, "F_2 grid has " + std::to_string(pts.size()) + " interior points");
    auto scan = lte_scan(f2, pts, {}, {}, 4);
    int hits = 0;
    for (const auto& e : scan) {
        c.check(e.error.empty(), "F_2 grid: " + str(e.u) + " undecided: " + e.error);
        if (!e.verdict.balanced) continue;
        ++hits;
        c.check(e.u == target, "F_2 grid: balanced at " + str(e.u));
    }
    c.check(hits == 1, "F_2 grid: " + std::to_string(hits) + " balanced points");
    auto v = is_strongly_bulk_balanced(f2, target);
    std::set<std::pair<long, long>> want{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    c.check(v.balanced && v.solutions.size() == 4 && witness_set(v) == want, "F_2: witness set at " + str(target));

    auto b2 = catalog("blowup2:1/2,1/4").polytope;
    const Rational lo = (1 - alpha) / 2, hi = (1 + alpha) / 4;
    for (int k = 1; k <= 10; ++k) {
        Rational t = lo + (hi - lo) * make_rational(k, 11);
        RationalVector u{t, (1 - alpha) / 2};
        auto r = is_strongly_bulk_balanced(b2, u);
        bool ok = r.balanced && r.witness && r.witness->ybar[1] && std::abs(*r.witness->ybar[1] + 1.0) < kCoeffTol;
        c.check(ok, "blowup2: u(t) = " + str(u) + " should be balanced with ybar2 = -1");
    }
    std::vector<RationalVector> off{{make_rational(3, 10), make_rational(1, 5)}, {make_rational(3, 10), make_rational(3, 10)},
                                    {make_rational(1, 3), make_rational(1, 6)},  {make_rational(9, 20), make_rational(1, 4)},
                                    {make_rational(1, 5), make_rational(1, 4)},  {make_rational(1, 2), make_rational(1, 5)},
                                    {make_rational(1, 5), make_rational(2, 5)},  {make_rational(3, 5), make_rational(1, 10)}};
    for (const auto& u : off) c.check(!is_strongly_bulk_balanced(b2, u).balanced, "blowup2: " + str(u) + " off the segment is balanced");
}

// ---------------------------------------------------------------- 6

const std::vector<std::string> kFano{"simplex:1",   "simplex:2",   "simplex:3",       "simplex:4",
                                     "blowup1:0.2", "blowup1:1/3", "blowup1:0.4",     "blowup1:0.7",
                                     "blowup2:1/3,1/3", "blowup2:1/2,1/4", "blowup2:1/5,1/2", "hirzebruch:1,1/2"};

std::multiset<std::pair<RationalVector, int>> signature(const CriticalAnalysis& a) {
    std::multiset<std::pair<RationalVector, int>> s;
    for (const auto& p : a.points) s.insert({p.u, p.multiplicity.value_or(-1)});
    return s;
}

void properties(Criterion& c) {
    std::mt19937 rng(20261016);
    int axioms = 0;
    while (axioms < 500) {
        auto a = testing::random_scalar(rng), b = testing::random_scalar(rng);
        if (a.is_zero() || b.is_zero()) continue;
        ++axioms;
        c.check((a * b).valuation() == a.valuation() + b.valuation(), "v(ab) != v(a) + v(b)");
        auto s = a + b;
        c.check(s.valuation() >= min(a.valuation(), b.valuation()), "v(a+b) < min");
        if (a.valuation() != b.valuation()) c.check(s.valuation() == min(a.valuation(), b.valuation()), "v(a+b) != min for distinct valuations");
    }

    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + trial % 2;
        auto f = testing::random_poly(rng, n), g = testing::random_poly(rng, n);
        auto fg = f * g;
        for (int i = 0; i < n; ++i)
            c.check(fg.log_derivative(i).approx_equal(f.log_derivative(i) * g + f * g.log_derivative(i), 1e-10), "Leibniz rule");
    }

    std::vector<std::string> specs = kFano;
    specs.push_back("hirzebruch:2,1/2");
    for (const auto& spec : specs) {
        auto w = catalog_potential(spec);
        CriticalOptions o3, o6;
        o3.order = 3;
        o6.order = 6;
        auto r3 = find_critical_points(w, o3), r6 = find_critical_points(w, o6);
        for (const auto* r : {&r3, &r6})
            for (const auto& p : r->points)
                if (p.lifted) {
                    ExtRational e(r == &r3 ? o3.order : o6.order);
                    c.check(p.residual_valuation >= e, spec + ": residual valuation " + p.residual_valuation.str() + " below " + e.str());
                }
        // the E = 3 series are the E = 6 series cut at their own truncation
        for (const auto& p : r3.points) {
            if (!p.lifted) continue;
            bool matched = false;
            for (const auto& q : r6.points) {
                if (q.u != p.u) continue;
                bool same = true;
                for (std::size_t i = 0; i < p.y.size(); ++i) {
                    double scale = std::max(1.0, q.y[i].max_abs_coefficient());
                    same = same && q.y[i].truncated(p.y[i].truncation()).approx_equal(p.y[i], 1e-8 * scale);
                }
                matched = matched || same;
            }
            c.check(matched, spec + ": E = 3 point at " + str(p.u) + " is not a truncation of an E = 6 point");
        }
        c.check(signature(r3) == signature(r6), spec + ": points differ between E = 3 and E = 6");
    }

    int polytopes = 0, systems = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto p = testing::random_delzant_polygon(rng);
        if (!validate(p).valid) continue;
        ++polytopes;
        auto verts = vertices(p);
        RationalVector centre(2, Rational(0));
        for (const auto& v : verts)
            for (int i = 0; i < 2; ++i) centre[i] += v.point[i] / Rational(static_cast<long>(verts.size()));
        std::vector<RationalVector> samples{centre};
        for (const auto& v : verts) samples.push_back({(v.point[0] + 3 * centre[0]) / 4, (v.point[1] + 3 * centre[1]) / 4});
        for (const auto& u : samples) {
            if (!p.is_interior(u)) continue;
            LTESystem sys;
            try {
                sys = leading_term_system(p, u);
            } catch (const Error& e) {
                c.check(false, "random polygon: " + std::string(e.what()));
                continue;
            }
            ++systems;
            for (std::size_t l = 0; l < sys.levels.size(); ++l)
                for (auto j : sys.levels[l].members)
                    for (int i = 0; i < 2; ++i) {
                        Integer back = 0;
                        for (std::size_t s = 0; s < 2; ++s) {
                            if (sys.basis.c[j][s] != 0) c.check(sys.basis.level_of[s] <= l, "c has an entry above its level");
                            back += sys.basis.c[j][s] * sys.basis.e[s][i];
                        }
                        c.check(back == p.facet(j).normal[i], "v_j != sum c_js e*_s");
                    }
        }
    }
    c.check(polytopes == 100, std::to_string(polytopes) + " valid random polygons");

    for (const auto& spec : kFano) {
        auto e = catalog(spec);
        auto system = critical_system(build_potential(e.polytope));
        for (const auto& cell : tropical_candidates(system, e.polytope)) {
            if (cell.dim != 0) continue;
            auto r = solve_lte(leading_term_system(e.polytope, cell.point));
            std::string tag = spec + " at " + str(cell.point) + ": ";
            InitialSolve init;
            try {
                init = solve_initial(initial_system(system, cell.point));
            } catch (const Error& err) {
                c.check(err.code() == ErrorCode::PositiveDimensionalInitialLocus, tag + err.what());
                for (const auto& s : r.solutions) c.check(s.has_free(), tag + "curve of initial roots but no free variable");
                continue;
            }
            c.check(r.solutions.size() == init.points.size(), tag + "solution counts differ");
            for (const auto& x : init.points) {
                int matches = 0;
                for (const auto& s : r.solutions) {
                    bool same = true;
                    for (std::size_t i = 0; i < x.size(); ++i)
                        same = same && s.ybar[i] && std::abs(*s.ybar[i] - x[i]) < 1e-8 * std::max(1.0, std::abs(x[i]));
                    matches += same;
                }
                c.check(matches == 1, tag + "initial root without a unique LTE partner");
            }
        }
    }
}

struct Entry {
    int id;
    const char* title;
    std::function<void(Criterion&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<Entry> all{{1, "CP^n regression (n = 1..4)", cpn_regression},
                           {2, "one-point blow-up case analysis", blowup_cases},
                           {3, "Hirzebruch F_2(1/2) with correction", hirzebruch_f2},
                           {4, "monotone blow-up trace identity", monotone_trace},
                           {5, "leading term equation verdicts", lte_verdicts},
                           {6, "property suites", properties}};
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    bool ok = true;
    for (const auto& e : all) {
        if (!wanted.empty() && !wanted.count(e.id)) continue;
        Criterion c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            e.run(c);
        } catch (const std::exception& ex) {
            c.check(false, std::string("exception: ") + ex.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (c.passed() ? "PASS" : "FAIL") << "  criterion " << e.id << ": " << e.title << "  (" << c.total() - c.failures().size()
                  << "/" << c.total() << " checks, " << std::fixed << std::setprecision(1) << secs << " s)\n";
        std::size_t shown = 0;
        for (const auto& f : c.failures()) {
            if (++shown > 8) {
                std::cout << "      ... " << c.failures().size() - 8 << " more\n";
                break;
            }
            std::cout << "      " << f << "\n";
        }
        std::cout.unsetf(std::ios::fixed);
        ok = ok && c.passed();
    }
    return ok ? 0 : 1;
}
