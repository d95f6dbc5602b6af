#pragma once

// Complex Laurent polynomials, univariate root finding and resultant-based
// solving of small square systems over (C^*)^n.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "lattice.hpp"
#include "novikov.hpp"

namespace toricpo {

using Exponent = std::vector<int>;
using ComplexVector = std::vector<Complex>;

class CPoly {
public:
    CPoly() = default;
    explicit CPoly(int nvars) : nvars_(nvars) {}

    int nvars() const noexcept { return nvars_; }
    const std::map<Exponent, Complex>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    void add_term(const Exponent& a, Complex c) {
        auto& slot = terms_[a];
        slot += c;
        if (std::abs(slot) == 0.0) terms_.erase(a);
    }
    Complex coefficient(const Exponent& a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? Complex(0.0) : it->second;
    }

    /// Drops coefficients below rel * (largest magnitude).
    CPoly pruned(double rel = 1e-12) const {
        double m = max_abs();
        CPoly r(nvars_);
        for (const auto& [e, c] : terms_)
            if (std::abs(c) > rel * m) r.terms_.emplace(e, c);
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [_, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    Complex evaluate(const ComplexVector& y) const {
        Complex s = 0.0;
        for (const auto& [e, c] : terms_) {
            Complex t = c;
            for (int i = 0; i < nvars_; ++i)
                if (e[i]) t *= std::pow(y[i], e[i]);
            s += t;
        }
        return s;
    }

    /// Sum of |term| at y; the natural scale for residuals.
    double magnitude(const ComplexVector& y) const {
        double s = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = std::abs(c);
            for (int i = 0; i < nvars_; ++i)
                if (e[i]) t *= std::pow(std::abs(y[i]), e[i]);
            s += t;
        }
        return s;
    }

    CPoly log_derivative(int i) const {
        CPoly r(nvars_);
        for (const auto& [e, c] : terms_)
            if (e[i]) r.terms_.emplace(e, c * static_cast<double>(e[i]));
        return r;
    }

    /// Multiplies by the monomial that makes every exponent >= 0 with minimum 0.
    CPoly cleared() const {
        if (terms_.empty()) return *this;
        Exponent lo(nvars_, std::numeric_limits<int>::max());
        for (const auto& [e, _] : terms_)
            for (int i = 0; i < nvars_; ++i) lo[i] = std::min(lo[i], e[i]);
        CPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            Exponent a = e;
            for (int i = 0; i < nvars_; ++i) a[i] -= lo[i];
            r.terms_.emplace(std::move(a), c);
        }
        return r;
    }

    int degree(int i) const {
        int d = 0;
        for (const auto& [e, _] : terms_) d = std::max(d, e[i]);
        return d;
    }
    bool involves(int i) const {
        for (const auto& [e, _] : terms_)
            if (e[i] != 0) return true;
        return false;
    }

    /// Substitutes y_i = x and removes that variable.
    CPoly substitute(int i, Complex x) const {
        CPoly r(nvars_ - 1);
        for (const auto& [e, c] : terms_) {
            Exponent a;
            for (int k = 0; k < nvars_; ++k)
                if (k != i) a.push_back(e[k]);
            r.add_term(a, c * std::pow(x, e[i]));
        }
        return r;
    }

    /// Reorders variables: new variable k is old variable perm[k].
    CPoly permuted(const std::vector<int>& perm) const {
        CPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            Exponent a(nvars_);
            for (int k = 0; k < nvars_; ++k) a[k] = e[perm[k]];
            r.terms_.emplace(std::move(a), c);
        }
        return r;
    }

    /// Univariate coefficient list (ascending) for a one-variable polynomial.
    ComplexVector univariate() const {
        if (nvars_ != 1) throw Error(ErrorCode::EliminationFailed, "univariate() on a multivariate polynomial");
        CPoly c = cleared();
        ComplexVector out(c.degree(0) + 1, Complex(0.0));
        for (const auto& [e, v] : c.terms_) out[e[0]] = v;
        return out;
    }

    std::string str(const std::string& var = "ybar") const;

private:
    int nvars_ = 0;
    std::map<Exponent, Complex> terms_;
};

inline std::string CPoly::str(const std::string& var) const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
        std::ostringstream os;
        os.precision(12);
        if (std::abs(c.imag()) < 1e-15)
            os << c.real();
        else
            os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        std::string t = os.str();
        for (int i = 0; i < nvars_; ++i) {
            if (!e[i]) continue;
            t += " " + var + std::to_string(i + 1);
            if (e[i] != 1) t += "^" + std::to_string(e[i]);
        }
        if (!s.empty()) s += " + ";
        s += t;
    }
    return s;
}

// ---------------------------------------------------------------- univariate

namespace poly {

inline Complex horner(const ComplexVector& p, Complex x) {
    Complex s = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
    return s;
}

inline ComplexVector derivative(const ComplexVector& p) {
    ComplexVector d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<double>(k));
    return d;
}

/// Removes leading coefficients that are negligible relative to the largest.
inline ComplexVector trimmed(ComplexVector p, double rel = 1e-13) {
    double m = 0.0;
    for (auto c : p) m = std::max(m, std::abs(c));
    while (!p.empty() && std::abs(p.back()) <= rel * m) p.pop_back();
    return p;
}

/// All complex roots (with repetition) via companion-matrix eigenvalues,
/// followed by a few Newton polishing steps.
inline ComplexVector roots(const ComplexVector& coeffs) {
    ComplexVector p = trimmed(coeffs);
    if (p.size() <= 1) return {};
    const int d = static_cast<int>(p.size()) - 1;
    ComplexVector out;
    if (d == 1) {
        out.push_back(-p[0] / p[1]);
        return out;
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -p[i] / p[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EliminationFailed, "companion eigenvalue solver failed");
    ComplexVector dp = derivative(p);
    for (int i = 0; i < d; ++i) {
        Complex x = es.eigenvalues()[i];
        for (int it = 0; it < 3; ++it) {
            Complex f = horner(p, x), fp = horner(dp, x);
            if (std::abs(fp) < 1e-300) break;
            Complex nx = x - f / fp;
            if (std::abs(horner(p, nx)) >= std::abs(f)) break;
            x = nx;
        }
        out.push_back(x);
    }
    return out;
}

/// Ascending coefficients of the monic polynomial with no root at 0 sharing
/// the nonzero roots of p.
inline ComplexVector monic_nonzero_part(const ComplexVector& coeffs) {
    ComplexVector p = trimmed(coeffs);
    double m = 0.0;
    for (auto c : p) m = std::max(m, std::abs(c));
    std::size_t lo = 0;
    while (lo < p.size() && std::abs(p[lo]) <= 1e-13 * m) ++lo;
    ComplexVector r(p.begin() + static_cast<std::ptrdiff_t>(lo), p.end());
    if (!r.empty()) {
        Complex lead = r.back();
        for (auto& c : r) c /= lead;
    }
    return r;
}

}  // namespace poly

// ---------------------------------------------------------------- resultants

namespace detail {

/// Sylvester resultant of two univariate polynomials with formal degrees p, q.
inline Complex sylvester_det(const ComplexVector& f, int p, const ComplexVector& g, int q) {
    const int n = p + q;
    if (n == 0) return 1.0;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < q; ++r)
        for (int k = 0; k <= p; ++k) s(r, r + k) = k < static_cast<int>(f.size()) ? f[p - k] : Complex(0.0);
    for (int r = 0; r < p; ++r)
        for (int k = 0; k <= q; ++k) s(q + r, r + k) = k < static_cast<int>(g.size()) ? g[q - k] : Complex(0.0);
    return s.partialPivLu().determinant();
}

/// Coefficients in the last variable after fixing the others at x.
inline ComplexVector coefficients_in_last(const CPoly& f, const ComplexVector& x) {
    const int k = f.nvars() - 1;
    ComplexVector c(f.degree(k) + 1, Complex(0.0));
    for (const auto& [e, v] : f.terms()) {
        Complex t = v;
        for (int i = 0; i < k; ++i)
            if (e[i]) t *= std::pow(x[i], e[i]);
        c[e[k]] += t;
    }
    return c;
}

inline double l1_norm(const CPoly& f) {
    double s = 0.0;
    for (const auto& [_, c] : f.terms()) s += std::abs(c);
    return s;
}

}  // namespace detail

struct ResultantResult {
    CPoly poly;          // in the first nvars-1 variables
    bool identically_zero = false;
};

/// Res_{y_last}(f, g) for polynomials (nonnegative exponents), computed by
/// evaluating Sylvester determinants on a grid of roots of unity and applying
/// the inverse DFT.
inline ResultantResult resultant_last(const CPoly& f, const CPoly& g) {
    const int nv = f.nvars();
    const int k = nv - 1;
    const int p = f.degree(k), q = g.degree(k);
    std::vector<int> bound(k);
    for (int i = 0; i < k; ++i) bound[i] = f.degree(i) * q + g.degree(i) * p;
    std::vector<int> size(k);
    long total = 1;
    for (int i = 0; i < k; ++i) {
        size[i] = bound[i] + 1;
        total *= size[i];
    }
    if (total > 200000) throw Error(ErrorCode::EliminationFailed, "resultant grid too large");
    std::vector<Complex> values(total);
    std::vector<int> idx(k, 0);
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        ComplexVector x(k);
        for (int i = 0; i < k; ++i) {
            idx[i] = static_cast<int>(rem % size[i]);
            rem /= size[i];
            x[i] = std::polar(1.0, 2.0 * std::numbers::pi * idx[i] / size[i]);
        }
        values[flat] = detail::sylvester_det(detail::coefficients_in_last(f, x), p, detail::coefficients_in_last(g, x), q);
    }
    // inverse DFT, one axis at a time
    long stride = 1;
    for (int i = 0; i < k; ++i) {
        const int n = size[i];
        std::vector<Complex> tmp(n);
        for (long base = 0; base < total; ++base) {
            if ((base / stride) % n != 0) continue;
            for (int m = 0; m < n; ++m) {
                Complex s = 0.0;
                for (int j = 0; j < n; ++j) s += values[base + j * stride] * std::polar(1.0, -2.0 * std::numbers::pi * j * m / n);
                tmp[m] = s / static_cast<double>(n);
            }
            for (int m = 0; m < n; ++m) values[base + m * stride] = tmp[m];
        }
        stride *= n;
    }
    ResultantResult out;
    out.poly = CPoly(k);
    double scale = std::pow(detail::l1_norm(f), q) * std::pow(detail::l1_norm(g), p);
    double m = 0.0;
    for (auto v : values) m = std::max(m, std::abs(v));
    if (m <= 1e-10 * std::max(scale, 1.0)) {
        out.identically_zero = true;
        return out;
    }
    for (long flat = 0; flat < total; ++flat) {
        if (std::abs(values[flat]) <= 1e-11 * m) continue;
        long rem = flat;
        Exponent a(k);
        for (int i = 0; i < k; ++i) {
            a[i] = static_cast<int>(rem % size[i]);
            rem /= size[i];
        }
        out.poly.add_term(a, values[flat]);
    }
    return out;
}

// ---------------------------------------------------------------- solving

struct InitialSolve {
    std::vector<ComplexVector> points;
    std::vector<bool> nondegenerate;
    std::vector<int> multiplicity;  // -1: unresolved
    ComplexVector eliminant;         // monic, ascending, in eliminant_var
    int eliminant_var = 0;
};

namespace detail {

/// Normalized |det| of the logarithmic Jacobian [y_k d g_i / d y_k].
inline double log_jacobian_measure(const std::vector<CPoly>& g, const ComplexVector& y) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXcd j(n, n);
    for (int i = 0; i < n; ++i) {
        double s = g[i].magnitude(y);
        if (s == 0.0) s = 1.0;
        for (int k = 0; k < n; ++k) j(i, k) = g[i].log_derivative(k).evaluate(y) / s;
    }
    return std::abs(j.determinant());
}

/// Complex Newton iteration on a square system in logarithmic coordinates.
inline ComplexVector polish(const std::vector<CPoly>& g, ComplexVector y, int iters = 8) {
    const int n = static_cast<int>(y.size());
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXcd j(n, n);
        Eigen::VectorXcd r(n);
        for (int i = 0; i < n; ++i) {
            r(i) = g[i].evaluate(y);
            for (int k = 0; k < n; ++k) j(i, k) = g[i].log_derivative(k).evaluate(y);
        }
        if (r.norm() == 0.0) break;
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(j);
        if (!lu.isInvertible()) break;
        Eigen::VectorXcd d = lu.solve(-r);
        if (!d.allFinite() || d.norm() > 0.5) break;
        ComplexVector ny = y;
        for (int k = 0; k < n; ++k) ny[k] = y[k] * std::exp(d(k));
        double before = 0.0, after = 0.0;
        for (int i = 0; i < n; ++i) {
            before += std::abs(g[i].evaluate(y)) / std::max(g[i].magnitude(y), 1e-300);
            after += std::abs(g[i].evaluate(ny)) / std::max(g[i].magnitude(ny), 1e-300);
        }
        if (after > before) break;
        y = ny;
    }
    return y;
}

inline double relative_residual(const std::vector<CPoly>& g, const ComplexVector& y) {
    double r = 0.0;
    for (const auto& gi : g) {
        double m = gi.magnitude(y);
        r = std::max(r, m == 0.0 ? 0.0 : std::abs(gi.evaluate(y)) / m);
    }
    return r;
}

inline bool close(const ComplexVector& a, const ComplexVector& b, double eps) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > eps * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

inline bool has_solution_univariate(const std::vector<CPoly>& eqs, double tol) {
    // all equations in one variable; common nonzero root?
    std::vector<ComplexVector> cand;
    for (const auto& e : eqs) {
        if (e.is_zero()) continue;
        CPoly c = e.cleared();
        if (c.size() == 1) return false;
        auto rs = poly::roots(c.univariate());
        for (auto r : rs)
            if (std::abs(r) > 1e-12) cand.push_back({r});
        break;
    }
    for (const auto& x : cand)
        if (relative_residual(eqs, x) < tol) return true;
    return false;
}

}  // namespace detail

struct SolveOptions {
    double eps_s = 1e-8;         // deduplication
    double degeneracy = 1e-8;    // |det log-Jacobian| threshold
    double accept = 1e-8;        // relative residual to accept a root
};

inline InitialSolve solve_initial(const std::vector<CPoly>& system, const SolveOptions& opt = {});

namespace detail {

/// Roots of the eliminant grouped into clusters: (representative, count).
inline std::vector<std::pair<Complex, int>> cluster_roots(const ComplexVector& rs) {
    std::vector<std::pair<Complex, int>> out;
    for (auto r : rs) {
        bool merged = false;
        for (auto& [c, k] : out) {
            if (std::abs(c - r) <= 1e-4 * std::max(1.0, std::abs(c))) {
                c = (c * static_cast<double>(k) + r) / static_cast<double>(k + 1);
                ++k;
                merged = true;
                break;
            }
        }
        if (!merged) out.emplace_back(r, 1);
    }
    return out;
}

inline void add_unique(InitialSolve& out, const ComplexVector& y, double eps) {
    for (const auto& p : out.points)
        if (close(p, y, eps)) return;
    out.points.push_back(y);
}

inline InitialSolve solve_one(const CPoly& g, const SolveOptions& opt) {
    InitialSolve out;
    CPoly c = g.cleared();
    if (c.is_zero()) throw Error(ErrorCode::PositiveDimensionalInitialLocus, "initial equation vanishes identically");
    auto coeffs = c.univariate();
    out.eliminant = poly::monic_nonzero_part(coeffs);
    auto clusters = cluster_roots(poly::roots(out.eliminant));
    for (auto [x, k] : clusters) {
        ComplexVector y{x};
        y = polish({g}, y);
        add_unique(out, y, opt.eps_s);
    }
    for (const auto& y : out.points) {
        bool nd = log_jacobian_measure({g}, y) >= opt.degeneracy;
        int mult = 1;
        if (!nd) {
            mult = 0;
            for (auto [x, k] : clusters)
                if (std::abs(x - y[0]) <= 1e-4 * std::max(1.0, std::abs(x))) mult = k;
        }
        out.nondegenerate.push_back(nd);
        out.multiplicity.push_back(mult);
    }
    return out;
}

/// Two equations in two variables, eliminating y2.
inline InitialSolve solve_two(const std::vector<CPoly>& g, const SolveOptions& opt) {
    InitialSolve out;
    CPoly f1 = g[0].cleared(), f2 = g[1].cleared();
    if (f1.is_zero() || f2.is_zero()) throw Error(ErrorCode::PositiveDimensionalInitialLocus, "an initial equation vanishes identically");
    if (f1.size() == 1 || f2.size() == 1) return out;  // a monomial has no zeros in the torus

    for (int var = 0; var < 2; ++var) {
        if (!f1.involves(var) && !f2.involves(var)) {
            std::vector<CPoly> rest{f1.substitute(var, 1.0), f2.substitute(var, 1.0)};
            if (has_solution_univariate(rest, opt.accept))
                throw Error(ErrorCode::PositiveDimensionalInitialLocus,
                            "ybar" + std::to_string(var + 1) + " does not appear in the initial system");
            return out;
        }
    }

    // eliminate the last variable; fall back to the other order if the resultant vanishes
    for (int order = 0; order < 2; ++order) {
        std::vector<int> perm = order == 0 ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
        CPoly p1 = f1.permuted(perm), p2 = f2.permuted(perm);
        auto res = resultant_last(p1, p2);
        if (res.identically_zero) continue;
        out.eliminant_var = perm[0];
        out.eliminant = poly::monic_nonzero_part(res.poly.univariate());
        auto clusters = cluster_roots(poly::roots(out.eliminant));
        std::vector<CPoly> sys{p1, p2};
        std::vector<std::pair<ComplexVector, int>> found;  // point (permuted order), cluster size
        for (auto [x, k] : clusters) {
            if (std::abs(x) < 1e-12) continue;
            CPoly h1 = p1.substitute(0, x).pruned(1e-10), h2 = p2.substitute(0, x).pruned(1e-10);
            if (h1.is_zero() && h2.is_zero())
                throw Error(ErrorCode::PositiveDimensionalInitialLocus, "initial system vanishes on a whole fibre");
            ComplexVector cand;
            for (const auto* h : {&h1, &h2}) {
                if (h->is_zero() || !h->involves(0)) continue;
                for (auto r : poly::roots(h->univariate()))
                    if (std::abs(r) > 1e-12) cand.push_back(r);
            }
            for (auto r : cand) {
                ComplexVector y = polish(sys, {x, r});
                if (relative_residual(sys, y) > opt.accept) continue;
                bool dup = false;
                for (const auto& [p, _] : found) dup = dup || close(p, y, opt.eps_s);
                if (!dup) found.emplace_back(y, k);
            }
        }
        for (const auto& [y, k] : found) {
            ComplexVector orig(2);
            orig[perm[0]] = y[0];
            orig[perm[1]] = y[1];
            out.points.push_back(orig);
            bool nd = log_jacobian_measure(g, orig) >= opt.degeneracy;
            out.nondegenerate.push_back(nd);
            int mult = 1;
            if (!nd) {
                int share = 0;
                for (const auto& [z, _] : found)
                    if (&z != &y && std::abs(z[0] - y[0]) <= 1e-4 * std::max(1.0, std::abs(y[0]))) ++share;
                mult = std::max(1, k - share);
            }
            out.multiplicity.push_back(mult);
        }
        return out;
    }
    throw Error(ErrorCode::PositiveDimensionalInitialLocus, "eliminant vanishes identically");
}

inline InitialSolve solve_three(const std::vector<CPoly>& g, const SolveOptions& opt) {
    InitialSolve out;
    std::vector<CPoly> f;
    for (const auto& gi : g) {
        CPoly c = gi.cleared();
        if (c.is_zero()) throw Error(ErrorCode::PositiveDimensionalInitialLocus, "an initial equation vanishes identically");
        if (c.size() == 1) return out;
        f.push_back(c);
    }
    const std::vector<std::vector<int>> perms{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {1, 0, 2}, {2, 1, 0}};
    const std::vector<std::vector<int>> eq_orders{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
    for (const auto& perm : perms) {
        for (const auto& eo : eq_orders) {
            CPoly a = f[eo[0]].permuted(perm), b = f[eo[1]].permuted(perm), c = f[eo[2]].permuted(perm);
            auto r1 = resultant_last(a, b);
            auto r2 = resultant_last(a, c);
            if (r1.identically_zero || r2.identically_zero) continue;
            CPoly q1 = r1.poly.cleared().pruned(1e-11), q2 = r2.poly.cleared().pruned(1e-11);
            if (q1.size() <= 1 || q2.size() <= 1) continue;
            ResultantResult r;
            try {
                r = resultant_last(q1, q2);
            } catch (const Error&) {
                continue;
            }
            if (r.identically_zero) continue;
            out.eliminant_var = perm[0];
            out.eliminant = poly::monic_nonzero_part(r.poly.univariate());
            std::vector<CPoly> sys{a, b, c};
            std::vector<ComplexVector> found;
            for (auto [x, k] : cluster_roots(poly::roots(out.eliminant))) {
                if (std::abs(x) < 1e-12) continue;
                std::vector<CPoly> sub{a.substitute(0, x).pruned(1e-10), b.substitute(0, x).pruned(1e-10),
                                       c.substitute(0, x).pruned(1e-10)};
                for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
                    InitialSolve two;
                    try {
                        two = solve_two({sub[i], sub[j]}, opt);
                    } catch (const Error&) {
                        continue;
                    }
                    for (const auto& yz : two.points) {
                        ComplexVector y = polish(sys, {x, yz[0], yz[1]});
                        if (relative_residual(sys, y) > opt.accept) continue;
                        bool dup = false;
                        for (const auto& p : found) dup = dup || close(p, y, opt.eps_s);
                        if (!dup) found.push_back(y);
                    }
                }
            }
            for (const auto& y : found) {
                ComplexVector orig(3);
                for (int k = 0; k < 3; ++k) orig[perm[k]] = y[k];
                out.points.push_back(orig);
                bool nd = log_jacobian_measure(g, orig) >= opt.degeneracy;
                out.nondegenerate.push_back(nd);
                out.multiplicity.push_back(nd ? 1 : -1);
            }
            return out;
        }
    }
    throw Error(ErrorCode::PositiveDimensionalInitialLocus, "every elimination order gives a vanishing eliminant");
}

}  // namespace detail

inline bool is_binomial_system(const std::vector<CPoly>& system) {
    for (const auto& g : system)
        if (g.size() != 2) return false;
    return true;
}

/// Solutions of c_i y^{a_i} + d_i y^{b_i} = 0 in closed form: with
/// M = (a_i - b_i) and U M V = D diagonal, z = y^{V^{-1}} satisfies z_l^{D_l} = rho_l.
inline InitialSolve solve_binomial(const std::vector<CPoly>& system, double tol = 1e-9) {
    const std::size_t n = system.size();
    IntegerMatrix m(n, std::vector<Integer>(n));
    ComplexVector rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = system[i].terms().begin();
        const auto& [a, c] = *it++;
        const auto& [b, d] = *it;
        for (std::size_t k = 0; k < n; ++k) m[i][k] = a[k] - b[k];
        rhs[i] = -d / c;
    }
    auto f = lattice::diagonalize(m);
    ComplexVector rho(n, Complex(1.0));
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < n; ++i) {
            long e = f.u[l][i].get_si();
            if (e) rho[l] *= std::pow(rhs[i], static_cast<int>(e));
        }
    InitialSolve out;
    for (std::size_t l = 0; l < n; ++l) {
        if (f.diag[l] == 0) {
            if (std::abs(rho[l] - 1.0) < tol)
                throw Error(ErrorCode::PositiveDimensionalInitialLocus, "binomial system has a degenerate exponent matrix");
            return out;
        }
    }
    // enumerate z_l = |rho_l|^{1/D_l} exp(i (arg rho_l + 2 pi k_l) / D_l)
    std::vector<long> deg(n);
    for (std::size_t l = 0; l < n; ++l) deg[l] = std::abs(f.diag[l].get_si());
    std::vector<long> k(n, 0);
    while (true) {
        ComplexVector z(n);
        for (std::size_t l = 0; l < n; ++l) {
            double sgn = f.diag[l] > 0 ? 1.0 : -1.0;
            Complex r = sgn > 0 ? rho[l] : 1.0 / rho[l];
            z[l] = std::polar(std::pow(std::abs(r), 1.0 / deg[l]), (std::arg(r) + 2.0 * std::numbers::pi * k[l]) / deg[l]);
        }
        ComplexVector y(n, Complex(1.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) {
                long e = f.v[i][l].get_si();
                if (e) y[i] *= std::pow(z[l], static_cast<int>(e));
            }
        out.points.push_back(y);
        out.nondegenerate.push_back(true);
        out.multiplicity.push_back(1);
        std::size_t l = 0;
        while (l < n && ++k[l] == deg[l]) k[l++] = 0;
        if (l == n) break;
    }
    return out;
}

/// All isolated solutions in (C^*)^n of a square system: binomial systems in
/// any dimension, general systems for n <= 3.
inline InitialSolve solve_initial(const std::vector<CPoly>& system, const SolveOptions& opt) {
    const std::size_t n = system.size();
    for (const auto& g : system)
        if (static_cast<std::size_t>(g.nvars()) != n) throw Error(ErrorCode::EliminationFailed, "system is not square");
    InitialSolve out;
    bool binomial = is_binomial_system(system);
    if (n > 3 && !binomial)
        throw Error(ErrorCode::DimensionUnsupported, "solve_initial supports n <= 3 (or binomial systems), got " + std::to_string(n));
    if (n <= 3) {
        switch (n) {
        case 1: out = detail::solve_one(system[0], opt); break;
        case 2: out = detail::solve_two(system, opt); break;
        default: out = detail::solve_three(system, opt); break;
        }
    }
    if (binomial) {
        auto exact = solve_binomial(system, opt.accept);
        out.points = std::move(exact.points);
        out.nondegenerate = std::move(exact.nondegenerate);
        out.multiplicity = std::move(exact.multiplicity);
    }
    return out;
}

}  // namespace toricpo
