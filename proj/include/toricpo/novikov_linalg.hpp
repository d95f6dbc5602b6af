#pragma once

// Linear algebra and univariate polynomials over the Novikov field.

#include <functional>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "novikov.hpp"

namespace toricpo {

using NovikovVector = std::vector<NovikovScalar>;
using NovikovMatrix = std::vector<NovikovVector>;

/// Division-free determinant by Laplace expansion along rows, memoized on the
/// set of columns still available. Works over any commutative ring R.
template <class R, class IsZero>
R laplace_determinant(const std::vector<std::vector<R>>& m, IsZero is_zero) {
    const std::size_t n = m.size();
    if (n == 0) return R(1);
    if (n > 20) throw Error(ErrorCode::EliminationFailed, "Laplace expansion limited to 20x20");
    std::unordered_map<unsigned long, R> memo;
    std::function<R(std::size_t, unsigned long)> rec = [&](std::size_t row, unsigned long used) -> R {
        if (row == n) return R(1);
        auto it = memo.find(used);
        if (it != memo.end()) return it->second;
        R acc(0);
        bool started = false;
        int sign = 1;
        for (std::size_t c = 0; c < n; ++c) {
            if (used & (1UL << c)) continue;
            if (!is_zero(m[row][c])) {
                R minor = rec(row + 1, used | (1UL << c));
                if (!is_zero(minor)) {
                    R term = m[row][c] * minor;
                    if (sign < 0) term = -term;
                    acc = started ? acc + term : term;
                    started = true;
                }
            }
            sign = -sign;
        }
        memo.emplace(used, acc);
        return acc;
    };
    return rec(0, 0);
}

inline NovikovScalar determinant(const NovikovMatrix& m) {
    return laplace_determinant(m, [](const NovikovScalar& s) { return s.is_zero(); });
}

/// Solves A x = b by Gaussian elimination, choosing at each step the pivot of
/// smallest valuation. Inverses are computed to the given order.
inline NovikovVector gauss_solve(NovikovMatrix a, NovikovVector b, const Rational& order) {
    const std::size_t n = a.size();
    std::vector<std::size_t> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = n, pc = n;
        ExtRational best = ExtRational::infinity();
        double best_mag = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            for (std::size_t j = k; j < n; ++j) {
                const auto& x = a[i][col[j]];
                if (x.is_zero()) continue;
                ExtRational v = x.valuation();
                double mag = std::abs(x.leading_coefficient());
                if (pr == n || v < best || (v == best && mag > best_mag)) {
                    best = v;
                    best_mag = mag;
                    pr = i;
                    pc = j;
                }
            }
        }
        if (pr == n) throw Error(ErrorCode::SingularInitialJacobian, "matrix is singular to the working order");
        std::swap(a[k], a[pr]);
        std::swap(b[k], b[pr]);
        std::swap(col[k], col[pc]);
        NovikovScalar inv = invert(a[k][col[k]], order);
        for (std::size_t i = k + 1; i < n; ++i) {
            const NovikovScalar& lead = a[i][col[k]];
            if (lead.is_zero()) continue;
            NovikovScalar f = lead * inv;
            for (std::size_t j = k; j < n; ++j) a[i][col[j]] -= f * a[k][col[j]];
            b[i] -= f * b[k];
        }
    }
    NovikovVector x(n);
    for (std::size_t k = n; k-- > 0;) {
        NovikovScalar s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][col[j]] * x[col[j]];
        x[col[k]] = s * invert(a[k][col[k]], order);
    }
    return x;
}

/// Univariate polynomial sum_k c_k x^k with Novikov coefficients.
class SeriesPoly {
public:
    SeriesPoly() = default;
    SeriesPoly(int c) {  // NOLINT(implicit): ring identity for Laplace expansion
        if (c != 0) c_.push_back(NovikovScalar(c));
    }
    explicit SeriesPoly(std::vector<NovikovScalar> c) : c_(std::move(c)) { trim(); }

    const std::vector<NovikovScalar>& coeffs() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    NovikovScalar coeff(std::size_t k) const { return k < c_.size() ? c_[k] : NovikovScalar(); }

    friend SeriesPoly operator+(const SeriesPoly& a, const SeriesPoly& b) {
        std::vector<NovikovScalar> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = a.coeff(k) + b.coeff(k);
        return SeriesPoly(std::move(r));
    }
    SeriesPoly operator-() const {
        SeriesPoly r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend SeriesPoly operator-(const SeriesPoly& a, const SeriesPoly& b) { return a + (-b); }
    friend SeriesPoly operator*(const SeriesPoly& a, const SeriesPoly& b) {
        if (a.is_zero() || b.is_zero()) return SeriesPoly();
        std::vector<NovikovScalar> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return SeriesPoly(std::move(r));
    }

    NovikovScalar evaluate(const NovikovScalar& x, const Rational& order) const {
        NovikovScalar s;
        for (std::size_t k = c_.size(); k-- > 0;) s = s * x + c_[k];
        return s.truncated(ExtRational(order));
    }

    SeriesPoly derivative() const {
        std::vector<NovikovScalar> r;
        for (std::size_t k = 1; k < c_.size(); ++k) r.push_back(c_[k].scaled(static_cast<double>(k)));
        return SeriesPoly(std::move(r));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    std::vector<NovikovScalar> c_;
};

}  // namespace toricpo
