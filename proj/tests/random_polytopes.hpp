#pragma once

// Random smooth polygons: start from CP^2 or a Hirzebruch surface and cut
// random corners. A corner cut with normal v_a + v_b keeps the Delzant property.

#include <random>

#include <toricpo/catalog.hpp>

namespace toricpo::testing {

inline MomentPolytope random_delzant_polygon(std::mt19937& rng, int max_cuts = 4) {
    std::uniform_int_distribution<int> base_pick(0, 2);
    std::uniform_int_distribution<int> hn(0, 3);
    std::uniform_int_distribution<int> cuts_pick(0, max_cuts);
    std::uniform_int_distribution<long> frac_num(1, 9);

    MomentPolytope p;
    switch (base_pick(rng)) {
    case 0: p = catalog("simplex", {Rational(2)}).polytope; break;
    case 1: p = catalog("blowup1", {make_rational(frac_num(rng), 10)}).polytope; break;
    default: {
        int n = hn(rng);
        std::vector<Facet> f;
        f.push_back({{1, 0}, Rational(0), ""});
        f.push_back({{0, 1}, Rational(0), ""});
        f.push_back({{-1, -n}, Rational(n + 2), ""});
        f.push_back({{0, -1}, Rational(1), ""});
        p = MomentPolytope(2, std::move(f));
    }
    }

    int cuts = cuts_pick(rng);
    for (int c = 0; c < cuts; ++c) {
        auto verts = vertices(p);
        std::uniform_int_distribution<std::size_t> vpick(0, verts.size() - 1);
        const auto& v = verts[vpick(rng)];
        std::size_t a = v.facets[0], b = v.facets[1];
        const auto& fa = p.facets()[a];
        const auto& fb = p.facets()[b];
        std::vector<long> normal{fa.normal[0] + fb.normal[0], fa.normal[1] + fb.normal[1]};
        Rational room = -1;
        for (const auto& w : verts) {
            if (w.point == v.point) continue;
            Rational s = p.ell(a, w.point) + p.ell(b, w.point);
            if (room < 0 || s < room) room = s;
        }
        Rational eps = room * make_rational(frac_num(rng), 10);
        auto facets = p.facets();
        facets.push_back({normal, fa.constant + fb.constant - eps, ""});
        for (auto& f : facets) f.name.clear();
        p = MomentPolytope(2, std::move(facets));
    }
    return p;
}

}  // namespace toricpo::testing
