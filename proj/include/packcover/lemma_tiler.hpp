#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "packcover/errors.hpp"
#include "packcover/inscription.hpp"

namespace packcover {

inline constexpr std::size_t kDefaultTileBudget = 400'000;

/// Oriented line through the original triangle's base. All pending heights
/// are measured against this one line, so they never drift as the recursion
/// deepens: every pocket's base lies on it by construction.
struct BaseLine {
    Point2 origin;
    Vec2 direction;  // unit

    double height_of(Point2 p) const { return cross(direction, p - origin); }
};

struct PendingTriangle {
    Triangle triangle;
    double height;          // apex height over the original base line, fixed at creation
    std::uint64_t created;  // creation index, breaks height ties (earlier wins)
};

namespace detail {

// Max-heap order: taller first, earlier-created first among equals.
struct PendingBefore {
    bool operator()(const PendingTriangle& a, const PendingTriangle& b) const {
        if (a.height != b.height) return a.height < b.height;
        return a.created > b.created;
    }
};

}  // namespace detail

/// Snapshot of the greedy tiling: tiles placed so far plus the pending
/// triangles still to be filled, kept as a max-heap on (height, -created).
struct TilingState {
    std::vector<ProperTile> placed;
    std::vector<PendingTriangle> pending;  // heap order, tallest at front
    BaseLine base;
    std::uint64_t step = 0;
    std::uint64_t next_index = 0;

    double y_max() const { return pending.empty() ? 0.0 : pending.front().height; }
};

inline TilingState start_tiling(const Triangle& t) {
    const Vec2 d = t.base_to() - t.base_from();
    TilingState st;
    st.base = {t.base_from(), d / norm(d)};
    st.pending.push_back({t, st.base.height_of(t.apex()), 0});
    st.next_index = 1;
    return st;
}

/// The 2n-2 uncovered pockets left in t by its inscribed tile. Each pocket
/// stands on t's base line with apex at one chain vertex of the polygon;
/// its slant sides extend the polygon's edges down to the base line, so
/// consecutive pockets share their base corner bitwise. Order: right chain
/// from the apex down, then left chain from the apex down.
inline std::vector<Triangle> pockets(const Triangle& t, const ProperTile& tile,
                                     const RegularGonSpec& spec) {
    const int n = spec.n;
    const std::size_t count = tile.polygon.size();
    const Point2 a = t.base_from(), b = t.base_to();
    const Vec2 base_dir = b - a;

    // Cheap anchor check of proper inscription: apex on apex, bottom vertex
    // at the base midpoint. The full conditions follow from the affine map.
    const double diam = std::max({dist(a, b), dist(b, t.apex()), dist(t.apex(), a)});
    if (dist(tile.polygon[0], t.apex()) > 1e-8 * diam ||
        dist(tile.polygon[static_cast<std::size_t>(n)], 0.5 * (a + b)) > 1e-8 * diam)
        throw InvariantViolation("pockets: tile is not properly inscribed in the triangle");

    const auto intercept = [&](Point2 p, Point2 q) {
        // Intersection of line(p, q) with the base line. Chain edges are
        // never parallel to the base for n >= 2.
        const Vec2 d1 = q - p;
        const double s = cross(a - p, base_dir) / cross(d1, base_dir);
        return p + s * d1;
    };

    std::vector<Triangle> out;
    out.reserve(static_cast<std::size_t>(2 * n - 2));

    // Right chain runs polygon[0], polygon[2n-1], ..., polygon[n].
    const auto right = [&](int j) { return tile.polygon[(count - static_cast<std::size_t>(j)) % count]; };
    std::vector<Point2> q(static_cast<std::size_t>(n));
    q[0] = b;  // edge 0 lies on the slant side through b
    q[static_cast<std::size_t>(n - 1)] = tile.polygon[static_cast<std::size_t>(n)];
    for (int j = 1; j <= n - 2; ++j)
        q[static_cast<std::size_t>(j)] = intercept(right(j), right(j + 1));
    for (int k = 1; k <= n - 1; ++k)
        out.emplace_back(q[static_cast<std::size_t>(k)], q[static_cast<std::size_t>(k - 1)], right(k), 0);

    // Left chain runs polygon[0], polygon[1], ..., polygon[n].
    q[0] = a;
    for (int j = 1; j <= n - 2; ++j)
        q[static_cast<std::size_t>(j)] =
            intercept(tile.polygon[static_cast<std::size_t>(j)], tile.polygon[static_cast<std::size_t>(j + 1)]);
    for (int k = 1; k <= n - 1; ++k)
        out.emplace_back(q[static_cast<std::size_t>(k - 1)], q[static_cast<std::size_t>(k)],
                         tile.polygon[static_cast<std::size_t>(k)], 0);

    return out;
}

/// One greedy step: pop the tallest pending triangle, properly inscribe a
/// tile in it, push its pockets. The tallest pending height never increases.
inline TilingState next_tile(TilingState st, const RegularGonSpec& spec) {
    if (st.pending.empty()) throw std::logic_error("next_tile: no pending triangles");

    std::pop_heap(st.pending.begin(), st.pending.end(), detail::PendingBefore{});
    const PendingTriangle top = st.pending.back();
    st.pending.pop_back();

    ProperTile tile = properly_inscribe(top.triangle, spec);
    std::vector<Triangle> pk = pockets(top.triangle, tile, spec);
    st.placed.push_back(std::move(tile));
    for (Triangle& p : pk) {
        st.pending.push_back({p, st.base.height_of(p.apex()), st.next_index++});
        std::push_heap(st.pending.begin(), st.pending.end(), detail::PendingBefore{});
    }
    ++st.step;

    if (st.y_max() > top.height * (1.0 + 1e-9))
        throw InvariantViolation("next_tile: pending height increased");
    return st;
}

struct TilingResult {
    std::vector<ProperTile> tiles;
    std::vector<Triangle> residual;  // pending triangles, all of height <= delta
    double delta;
};

/// Greedy tiling of t until every pending triangle is at most delta tall.
/// delta >= height(t) stops immediately with t itself as the residual.
inline TilingResult tile_until(const Triangle& t, double delta, const RegularGonSpec& spec,
                               std::size_t budget = kDefaultTileBudget) {
    if (!(delta > 0.0)) throw std::invalid_argument("tile_until: delta must be positive");
    TilingState st = start_tiling(t);
    while (st.y_max() > delta) {
        if (st.placed.size() >= budget) throw TileBudgetExceeded(st.placed.size(), budget);
        st = next_tile(std::move(st), spec);
    }
    std::vector<Triangle> residual;
    residual.reserve(st.pending.size());
    for (const PendingTriangle& p : st.pending) residual.push_back(p.triangle);
    return {std::move(st.placed), std::move(residual), delta};
}

}  // namespace packcover
