#pragma once

// Grid scans of the leading term equation over the interior of P.

#include <atomic>
#include <thread>

#include "lte.hpp"

namespace toricpo {

struct GridSpec {
    RationalVector origin;
    RationalVector step;
    int k = 10;  // points per axis: origin + step * i, i = 1..k
};

/// k points per axis, evenly inside the bounding box of P.
inline GridSpec default_grid(const MomentPolytope& p, int k) {
    auto vs = vertices(p);
    GridSpec g;
    g.k = k;
    for (int i = 0; i < p.dim(); ++i) {
        Rational lo = vs.front().point[i], hi = lo;
        for (const auto& v : vs) {
            lo = std::min(lo, v.point[i]);
            hi = std::max(hi, v.point[i]);
        }
        g.origin.push_back(lo);
        g.step.push_back(Rational((hi - lo) / (k + 1)));
    }
    return g;
}

/// Interior grid points in lexicographic order of their indices.
inline std::vector<RationalVector> grid_points(const MomentPolytope& p, const GridSpec& g) {
    const int n = p.dim();
    if (static_cast<int>(g.origin.size()) != n || static_cast<int>(g.step.size()) != n)
        throw Error(ErrorCode::IndexOutOfRange, "grid origin and step need one entry per coordinate");
    if (g.k < 1) throw Error(ErrorCode::ParamOutOfRange, "grid needs k >= 1");
    std::vector<RationalVector> out;
    std::vector<int> idx(n, 1);
    while (true) {
        RationalVector u(n);
        for (int i = 0; i < n; ++i) u[i] = g.origin[i] + g.step[i] * idx[i];
        if (p.is_interior(u)) out.push_back(std::move(u));
        int i = n - 1;
        while (i >= 0 && idx[i] == g.k) idx[i--] = 1;
        if (i < 0) break;
        ++idx[i];
    }
    return out;
}

struct ScanEntry {
    RationalVector u;
    BalanceVerdict verdict;
    std::string error;  // set when the point could not be decided
};

inline std::vector<ScanEntry> lte_scan(const MomentPolytope& p, const std::vector<RationalVector>& points,
                                       const std::vector<Complex>& coefficients = {}, const LTEOptions& opt = {}, int jobs = 1) {
    std::vector<ScanEntry> out(points.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next++) < points.size();) {
            out[k].u = points[k];
            try {
                out[k].verdict = is_strongly_bulk_balanced(p, points[k], coefficients, opt);
            } catch (const Error& e) {
                out[k].error = e.what();
            }
        }
    };
    if (jobs <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

}  // namespace toricpo
