#pragma once

// Dense exact linear algebra over Q. Matrices are small (n <= 3 in practice,
// m <= 20 rows), so plain Gaussian elimination is enough.

#include <optional>
#include <vector>

#include "rational.hpp"

namespace toricpo {

using RationalMatrix = std::vector<RationalVector>;

namespace linalg {

inline RationalMatrix from_int_rows(const std::vector<std::vector<long>>& rows) {
    RationalMatrix m;
    m.reserve(rows.size());
    for (const auto& r : rows) {
        RationalVector row;
        for (long x : r) row.emplace_back(x);
        m.push_back(std::move(row));
    }
    return m;
}

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref(RationalMatrix& a) {
    std::vector<std::size_t> pivots;
    if (a.empty()) return pivots;
    const std::size_t rows = a.size(), cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Rational inv = 1 / a[r][c];
        for (auto& x : a[r]) x *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(RationalMatrix a) { return rref(a).size(); }

inline Rational determinant(RationalMatrix a) {
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
        }
    }
    return det;
}

/// Solves a x = b for square nonsingular a; nullopt if singular.
inline std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b) {
    const std::size_t n = a.size();
    RationalMatrix aug = a;
    for (std::size_t i = 0; i < n; ++i) aug[i].push_back(b[i]);
    auto piv = rref(aug);
    if (piv.size() < n || piv.back() >= n) return std::nullopt;
    RationalVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = aug[i][n];
    return x;
}

/// Basis of {x : a x = 0}.
inline RationalMatrix nullspace(RationalMatrix a, std::size_t cols) {
    RationalMatrix basis;
    if (a.empty()) {
        for (std::size_t c = 0; c < cols; ++c) {
            RationalVector e(cols, Rational(0));
            e[c] = 1;
            basis.push_back(std::move(e));
        }
        return basis;
    }
    auto piv = rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : piv) is_pivot[c] = true;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        RationalVector v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -a[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Inverse of a square nonsingular matrix.
inline std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
    const std::size_t n = a.size();
    RationalMatrix aug = a;
    for (std::size_t i = 0; i < n; ++i) {
        aug[i].resize(2 * n, Rational(0));
        aug[i][n + i] = 1;
    }
    auto piv = rref(aug);
    if (piv.size() < n || piv[n - 1] >= n) return std::nullopt;
    RationalMatrix inv(n, RationalVector(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    return inv;
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rational dot(const std::vector<long>& a, const RationalVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Calls f on every k-subset of {0..n-1} (lexicographic order).
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(static_cast<const std::vector<std::size_t>&>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace linalg
}  // namespace toricpo
