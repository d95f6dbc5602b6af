#pragma once

// Integer matrix reductions: a diagonal (Smith-type) form with unimodular
// transforms, used to solve binomial systems, Hermite normal form, and
// saturated sublattices with a unimodular completion.

#include <optional>
#include <vector>

#include "error.hpp"
#include "rational.hpp"
#include "rational_linalg.hpp"

namespace toricpo {

using IntegerMatrix = std::vector<std::vector<Integer>>;

namespace lattice {

inline IntegerMatrix identity(std::size_t n) {
    IntegerMatrix m(n, std::vector<Integer>(n, Integer(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline IntegerMatrix multiply(const IntegerMatrix& a, const IntegerMatrix& b) {
    const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    IntegerMatrix c(n, std::vector<Integer>(m, Integer(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l)
            if (a[i][l] != 0)
                for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    return c;
}

struct DiagonalForm {
    IntegerMatrix u, v;          // d = u * a * v, u and v unimodular
    std::vector<Integer> diag;   // entries d_ii (possibly zero)
};

/// Diagonalizes an integer matrix by unimodular row and column operations.
inline DiagonalForm diagonalize(IntegerMatrix a) {
    const std::size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
    DiagonalForm f{identity(m), identity(n), {}};
    const std::size_t r = std::min(m, n);
    for (std::size_t t = 0; t < r; ++t) {
        while (true) {
            std::size_t pi = m, pj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (a[i][j] != 0 && (pi == m || abs(a[i][j]) < abs(a[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == m) break;
            std::swap(a[t], a[pi]);
            std::swap(f.u[t], f.u[pi]);
            if (pj != t) {
                for (std::size_t i = 0; i < m; ++i) std::swap(a[i][t], a[i][pj]);
                for (std::size_t i = 0; i < n; ++i) std::swap(f.v[i][t], f.v[i][pj]);
            }
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (a[i][t] == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
                for (std::size_t j = t; j < n; ++j) a[i][j] -= q * a[t][j];
                for (std::size_t j = 0; j < m; ++j) f.u[i][j] -= q * f.u[t][j];
                clean = clean && a[i][t] == 0;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (a[t][j] == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
                for (std::size_t i = t; i < m; ++i) a[i][j] -= q * a[i][t];
                for (std::size_t i = 0; i < n; ++i) f.v[i][j] -= q * f.v[i][t];
                clean = clean && a[t][j] == 0;
            }
            if (clean) break;
        }
    }
    for (std::size_t t = 0; t < r; ++t) f.diag.push_back(a[t][t]);
    return f;
}

/// Row-style Hermite normal form of the lattice spanned by the rows: echelon,
/// positive pivots, entries above each pivot reduced into [0, pivot). Zero
/// rows are dropped.
inline IntegerMatrix hnf_rows(IntegerMatrix a) {
    const std::size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
    std::size_t row = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        // gcd-reduce column col among rows >= row
        while (true) {
            std::size_t best = m;
            for (std::size_t i = row; i < m; ++i)
                if (a[i][col] != 0 && (best == m || abs(a[i][col]) < abs(a[best][col]))) best = i;
            if (best == m) break;
            std::swap(a[row], a[best]);
            bool done = true;
            for (std::size_t i = row + 1; i < m; ++i) {
                if (a[i][col] == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[row][col].get_mpz_t());
                for (std::size_t j = col; j < n; ++j) a[i][j] -= q * a[row][j];
                done = done && a[i][col] == 0;
            }
            if (done) break;
        }
        if (a[row][col] == 0) continue;
        if (a[row][col] < 0)
            for (auto& x : a[row]) x = -x;
        for (std::size_t i = 0; i < row; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[row][col].get_mpz_t());
            if (q != 0)
                for (std::size_t j = col; j < n; ++j) a[i][j] -= q * a[row][j];
        }
        pivots.push_back(col);
        ++row;
    }
    a.resize(row);
    return a;
}

inline std::optional<IntegerMatrix> unimodular_inverse(const IntegerMatrix& a) {
    RationalMatrix q;
    for (const auto& r : a) {
        RationalVector row;
        for (const auto& x : r) row.emplace_back(x);
        q.push_back(std::move(row));
    }
    auto inv = linalg::inverse(q);
    if (!inv) return std::nullopt;
    IntegerMatrix out;
    for (const auto& r : *inv) {
        std::vector<Integer> row;
        for (const auto& x : r) {
            if (x.get_den() != 1) return std::nullopt;
            row.push_back(x.get_num());
        }
        out.push_back(std::move(row));
    }
    return out;
}

/// A unimodular m x m matrix whose first d rows are the Hermite basis of the
/// saturation of the row lattice of a (d = rank a). The rows of a are then
/// integer combinations of those first d rows.
inline IntegerMatrix saturated_completion(const IntegerMatrix& a, std::size_t m, std::size_t& d) {
    if (a.empty()) {
        d = 0;
        return identity(m);
    }
    auto f = diagonalize(a);
    d = 0;
    for (const auto& x : f.diag)
        if (x != 0) ++d;
    auto vinv = unimodular_inverse(f.v);
    if (!vinv) throw Error(ErrorCode::IntegralityFailure, "column transform is not unimodular");
    IntegerMatrix sat(vinv->begin(), vinv->begin() + static_cast<long>(d));
    sat = hnf_rows(sat);

    IntegerMatrix out = sat;
    bool unit_pivots = true;
    std::vector<bool> pivot_col(m, false);
    for (const auto& r : sat) {
        std::size_t c = 0;
        while (r[c] == 0) ++c;
        pivot_col[c] = true;
        unit_pivots = unit_pivots && r[c] == 1;
    }
    if (unit_pivots) {
        for (std::size_t c = 0; c < m; ++c) {
            if (pivot_col[c]) continue;
            std::vector<Integer> e(m, Integer(0));
            e[c] = 1;
            out.push_back(std::move(e));
        }
    } else {
        for (std::size_t i = d; i < m; ++i) out.push_back((*vinv)[i]);
    }
    if (!unimodular_inverse(out)) throw Error(ErrorCode::IntegralityFailure, "completion of a saturated lattice is not unimodular");
    return out;
}

}  // namespace lattice
}  // namespace toricpo
