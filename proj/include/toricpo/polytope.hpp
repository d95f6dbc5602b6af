#pragma once

// Moment polytopes P = { u : <v_j, u> + lambda_j >= 0 } with integral inward
// normals v_j, plus the combinatorial checks built on them.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "novikov.hpp"
#include "rational.hpp"
#include "rational_linalg.hpp"

namespace toricpo {

struct Facet {
    std::vector<long> normal;
    Rational constant;
    std::string name;
};

/// A correction monomial T^{extra_T} * coeff * prod_j z_j^{monomial_z[j]}.
struct Correction {
    std::vector<int> monomial_z;
    Rational extra_T;
    Complex coeff{1.0, 0.0};
};

class MomentPolytope {
public:
    MomentPolytope() = default;
    MomentPolytope(int dim, std::vector<Facet> facets) : dim_(dim), facets_(std::move(facets)) {
        if (dim_ <= 0) throw Error(ErrorCode::InvalidPolytope, "dimension must be positive");
        for (std::size_t j = 0; j < facets_.size(); ++j) {
            if (facets_[j].normal.size() != static_cast<std::size_t>(dim_))
                throw Error(ErrorCode::InvalidPolytope, "facet " + std::to_string(j) + " has a normal of the wrong length");
            if (facets_[j].name.empty()) facets_[j].name = "l" + std::to_string(j);
        }
    }

    int dim() const noexcept { return dim_; }
    std::size_t num_facets() const noexcept { return facets_.size(); }
    const std::vector<Facet>& facets() const noexcept { return facets_; }
    const Facet& facet(std::size_t j) const {
        if (j >= facets_.size()) throw Error(ErrorCode::IndexOutOfRange, "facet index " + std::to_string(j));
        return facets_[j];
    }

    /// l_j(u) = <v_j, u> + lambda_j.
    Rational ell(std::size_t j, const RationalVector& u) const {
        const auto& f = facet(j);
        return linalg::dot(f.normal, u) + f.constant;
    }

    bool contains(const RationalVector& u) const {
        for (std::size_t j = 0; j < facets_.size(); ++j)
            if (ell(j, u) < 0) return false;
        return true;
    }
    bool is_interior(const RationalVector& u) const {
        for (std::size_t j = 0; j < facets_.size(); ++j)
            if (ell(j, u) <= 0) return false;
        return true;
    }
    bool on_boundary(const RationalVector& u) const { return contains(u) && !is_interior(u); }

    RationalMatrix normal_matrix() const {
        RationalMatrix m;
        for (const auto& f : facets_) {
            RationalVector row;
            for (long x : f.normal) row.emplace_back(x);
            m.push_back(std::move(row));
        }
        return m;
    }

private:
    int dim_ = 0;
    std::vector<Facet> facets_;
};

struct Vertex {
    RationalVector point;
    std::vector<std::size_t> facets;  // every facet tight at the point
};

struct ValidationReport {
    bool valid = true;
    bool bounded = true;
    bool full_dimensional = true;
    std::vector<std::string> violations;
    std::vector<Vertex> vertices;
};

namespace detail {

inline std::string point_str(const RationalVector& u) {
    std::string s = "(";
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i) s += ",";
        s += u[i].get_str();
    }
    return s + ")";
}

/// All feasible intersections of n facet hyperplanes, deduplicated.
inline std::vector<Vertex> enumerate_vertices(const MomentPolytope& p) {
    const std::size_t n = p.dim(), m = p.num_facets();
    std::map<RationalVector, Vertex> found;
    const RationalMatrix normals = p.normal_matrix();
    linalg::for_each_subset(m, n, [&](const std::vector<std::size_t>& idx) {
        RationalMatrix a;
        RationalVector b;
        for (auto j : idx) {
            a.push_back(normals[j]);
            b.push_back(-p.facets()[j].constant);
        }
        auto x = linalg::solve(a, b);
        if (!x || !p.contains(*x) || found.count(*x)) return;
        Vertex v{*x, {}};
        for (std::size_t j = 0; j < m; ++j)
            if (p.ell(j, *x) == 0) v.facets.push_back(j);
        found.emplace(*x, std::move(v));
    });
    std::vector<Vertex> out;
    for (auto& [_, v] : found) out.push_back(std::move(v));
    return out;
}

/// Is the recession cone {d : V d >= 0} trivial?
inline bool recession_cone_trivial(const MomentPolytope& p) {
    const std::size_t n = p.dim(), m = p.num_facets();
    const RationalMatrix normals = p.normal_matrix();
    if (linalg::rank(normals) < n) return false;
    // Pointed cone: nontrivial iff it has an extreme ray, which is cut out by
    // n-1 independent tight rows.
    bool ray = false;
    linalg::for_each_subset(m, n - 1, [&](const std::vector<std::size_t>& idx) {
        if (ray) return;
        RationalMatrix a;
        for (auto j : idx) a.push_back(normals[j]);
        auto ns = linalg::nullspace(a, n);
        if (ns.size() != 1) return;
        for (int sign : {1, -1}) {
            bool ok = true;
            for (std::size_t j = 0; j < m && ok; ++j)
                if (sign * linalg::dot(normals[j], ns[0]) < 0) ok = false;
            if (ok) ray = true;
        }
    });
    return !ray;
}

}  // namespace detail

inline ValidationReport validate(const MomentPolytope& p) {
    ValidationReport r;
    const std::size_t n = p.dim(), m = p.num_facets();
    auto fail = [&](std::string msg) {
        r.valid = false;
        r.violations.push_back(std::move(msg));
    };
    if (m < n + 1) fail("need at least n+1 facets, got " + std::to_string(m));
    for (std::size_t j = 0; j < m; ++j) {
        const auto& v = p.facets()[j].normal;
        if (std::all_of(v.begin(), v.end(), [](long x) { return x == 0; })) fail("facet " + p.facets()[j].name + " has zero normal");
    }
    if (!r.valid) return r;

    if (!detail::recession_cone_trivial(p)) {
        r.bounded = false;
        fail("polytope is unbounded");
        return r;
    }
    r.vertices = detail::enumerate_vertices(p);
    if (r.vertices.empty()) {
        r.full_dimensional = false;
        fail("polytope is empty");
        return r;
    }
    RationalVector centroid(n, Rational(0));
    for (const auto& v : r.vertices)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += v.point[i];
    for (auto& x : centroid) x /= static_cast<long>(r.vertices.size());
    if (!p.is_interior(centroid)) {
        r.full_dimensional = false;
        fail("polytope has empty interior");
        return r;
    }

    for (std::size_t j = 0; j < m; ++j) {
        RationalMatrix diffs;
        const RationalVector* base = nullptr;
        for (const auto& v : r.vertices) {
            if (std::find(v.facets.begin(), v.facets.end(), j) == v.facets.end()) continue;
            if (!base) {
                base = &v.point;
                continue;
            }
            RationalVector d(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = v.point[i] - (*base)[i];
            diffs.push_back(std::move(d));
        }
        std::size_t face_dim = base ? (diffs.empty() ? 0 : linalg::rank(diffs)) : 0;
        if (!base || face_dim + 1 < n) fail("facet " + p.facets()[j].name + " is redundant");
    }

    for (const auto& v : r.vertices) {
        if (v.facets.size() != n) {
            fail("vertex " + detail::point_str(v.point) + " lies on " + std::to_string(v.facets.size()) + " facets");
            continue;
        }
        RationalMatrix a;
        for (auto j : v.facets) {
            RationalVector row;
            for (long x : p.facets()[j].normal) row.emplace_back(x);
            a.push_back(std::move(row));
        }
        Rational det = linalg::determinant(a);
        if (abs(det) != 1) fail("Delzant condition fails at " + detail::point_str(v.point) + " (determinant " + det.get_str() + ")");
    }
    return r;
}

inline void require_valid(const MomentPolytope& p) {
    auto r = validate(p);
    if (!r.valid) throw Error(ErrorCode::InvalidPolytope, r.violations.front());
}

inline std::vector<Vertex> vertices(const MomentPolytope& p) {
    auto r = validate(p);
    if (!r.valid) throw Error(ErrorCode::InvalidPolytope, r.violations.front());
    return r.vertices;
}

/// Total rank of rational cohomology; for a Delzant polytope this is the vertex count.
inline int total_betti(const MomentPolytope& p) { return static_cast<int>(vertices(p).size()); }

enum class FanoType { fano, nef_only, neither };

inline std::string_view to_string(FanoType t) {
    switch (t) {
    case FanoType::fano: return "fano";
    case FanoType::nef_only: return "nef-only";
    case FanoType::neither: return "neither";
    }
    return "neither";
}

/// Convexity of the anticanonical support function across every wall of the
/// normal fan. With inward normals the functional phi_sigma (equal to 1 on the
/// generators of sigma) must be < 1 at the opposite generator of each neighbour.
inline FanoType fano_check(const MomentPolytope& p) {
    auto verts = vertices(p);
    const std::size_t n = p.dim();
    const RationalMatrix normals = p.normal_matrix();
    bool strict = true;
    for (std::size_t a = 0; a < verts.size(); ++a) {
        const auto& fa = verts[a].facets;
        RationalMatrix g;
        for (auto j : fa) g.push_back(normals[j]);
        // phi solves g phi = (1,...,1)
        auto phi = linalg::solve(g, RationalVector(n, Rational(1)));
        if (!phi) throw Error(ErrorCode::InvalidPolytope, "singular cone");
        for (std::size_t b = 0; b < verts.size(); ++b) {
            if (a == b) continue;
            const auto& fb = verts[b].facets;
            std::vector<std::size_t> common;
            std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(common));
            if (common.size() + 1 != n) continue;
            for (auto k : fb) {
                if (std::find(fa.begin(), fa.end(), k) != fa.end()) continue;
                Rational val = linalg::dot(normals[k], *phi);
                if (val > 1) return FanoType::neither;
                if (val == 1) strict = false;
            }
        }
    }
    return strict ? FanoType::fano : FanoType::nef_only;
}

/// Degree-2 bulk parameters c_j = e^{w_j}; each must have valuation 0.
class BulkCoefficients {
public:
    BulkCoefficients() = default;
    explicit BulkCoefficients(std::size_t m) : c_(m, NovikovScalar(1.0)) {}
    explicit BulkCoefficients(std::vector<NovikovScalar> c) : c_(std::move(c)) {
        for (std::size_t j = 0; j < c_.size(); ++j)
            if (c_[j].valuation() != ExtRational(0))
                throw Error(ErrorCode::ParamOutOfRange, "bulk coefficient " + std::to_string(j) + " must have valuation 0");
    }
    /// From bulk classes w_j in Lambda_0: c_j = exp(w_j).
    static BulkCoefficients from_exponents(const std::vector<NovikovScalar>& w, const Rational& order = default_truncation()) {
        std::vector<NovikovScalar> c;
        for (const auto& x : w) c.push_back(exp(x, order));
        return BulkCoefficients(std::move(c));
    }

    bool empty() const noexcept { return c_.empty(); }
    std::size_t size() const noexcept { return c_.size(); }
    const NovikovScalar& operator[](std::size_t j) const { return c_.at(j); }
    const std::vector<NovikovScalar>& values() const noexcept { return c_; }

    /// Exponent-0 part of c_j.
    Complex leading(std::size_t j) const { return c_.empty() ? Complex(1.0) : c_.at(j).coefficient_at(Rational(0)); }

private:
    std::vector<NovikovScalar> c_;
};

}  // namespace toricpo
