#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "packcover/geom.hpp"

namespace packcover {

namespace detail {

/// Uniform grid over ellipse bounding boxes; cell size = the largest box
/// extent, so any box overlaps a bounded number of cells.
class BoxGrid {
public:
    explicit BoxGrid(std::span<const Box2> boxes) : boxes_(boxes.begin(), boxes.end()) {
        double extent = 0.0;
        for (const Box2& b : boxes_) extent = std::max({extent, b.hi.x - b.lo.x, b.hi.y - b.lo.y});
        cell_ = extent > 0.0 ? extent : 1.0;
        for (std::size_t i = 0; i < boxes_.size(); ++i) {
            visit_cells(boxes_[i], [&](std::int64_t ix, std::int64_t iy) {
                grid_[key(ix, iy)].push_back(static_cast<std::uint32_t>(i));
            });
        }
    }

    /// All pairs (i < j) whose boxes intersect, each reported once: a pair is
    /// owned by the grid cell containing the low corner of the overlap box,
    /// and both boxes are registered there.
    template <typename F>
    void for_each_overlapping_pair(F&& f) const {
        for (const auto& [k, bucket] : grid_) {
            const auto ix = static_cast<std::int32_t>(k >> 32);
            const auto iy = static_cast<std::int32_t>(k & 0xffffffffu);
            for (std::size_t s = 0; s < bucket.size(); ++s) {
                for (std::size_t t = s + 1; t < bucket.size(); ++t) {
                    std::uint32_t i = bucket[s], j = bucket[t];
                    if (i > j) std::swap(i, j);
                    const Box2 &bi = boxes_[i], &bj = boxes_[j];
                    const double ox = std::max(bi.lo.x, bj.lo.x), oy = std::max(bi.lo.y, bj.lo.y);
                    if (ox > std::min(bi.hi.x, bj.hi.x) || oy > std::min(bi.hi.y, bj.hi.y)) continue;
                    if (static_cast<std::int64_t>(std::floor(ox / cell_)) != ix ||
                        static_cast<std::int64_t>(std::floor(oy / cell_)) != iy)
                        continue;
                    f(i, j);
                }
            }
        }
    }

private:
    static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
               static_cast<std::uint32_t>(iy);
    }

    template <typename F>
    void visit_cells(const Box2& b, F&& f) const {
        const auto lo_x = static_cast<std::int64_t>(std::floor(b.lo.x / cell_));
        const auto hi_x = static_cast<std::int64_t>(std::floor(b.hi.x / cell_));
        const auto lo_y = static_cast<std::int64_t>(std::floor(b.lo.y / cell_));
        const auto hi_y = static_cast<std::int64_t>(std::floor(b.hi.y / cell_));
        for (std::int64_t ix = lo_x; ix <= hi_x; ++ix)
            for (std::int64_t iy = lo_y; iy <= hi_y; ++iy) f(ix, iy);
    }

    std::vector<Box2> boxes_;
    double cell_ = 1.0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid_;
};

}  // namespace detail

struct PackingReport {
    bool ok = true;
    std::vector<std::pair<std::size_t, std::size_t>> offenders;  // overlapping pairs, i < j
};

/// Check pairwise interior-disjointness (tangency allowed). Only pairs whose
/// bounding boxes intersect are classified exactly.
inline PackingReport verify_packing(std::span<const Ellipse> ellipses, double tol = 1e-9) {
    PackingReport rep;
    if (ellipses.size() < 2) return rep;

    std::vector<Box2> boxes;
    boxes.reserve(ellipses.size());
    for (const Ellipse& e : ellipses) boxes.push_back(bounding_box(e));

    const detail::BoxGrid grid{boxes};
    grid.for_each_overlapping_pair([&](std::uint32_t i, std::uint32_t j) {
        if (interiors_disjoint(ellipses[i], ellipses[j], tol) == Disjointness::overlap)
            rep.offenders.emplace_back(i, j);
    });
    std::sort(rep.offenders.begin(), rep.offenders.end());
    rep.ok = rep.offenders.empty();
    return rep;
}

/// All-pairs reference implementation; quadratic, for cross-checking.
inline PackingReport verify_packing_allpairs(std::span<const Ellipse> ellipses, double tol = 1e-9) {
    PackingReport rep;
    for (std::size_t i = 0; i < ellipses.size(); ++i)
        for (std::size_t j = i + 1; j < ellipses.size(); ++j)
            if (interiors_disjoint(ellipses[i], ellipses[j], tol) == Disjointness::overlap)
                rep.offenders.emplace_back(i, j);
    rep.ok = rep.offenders.empty();
    return rep;
}

struct CoverageStats {
    std::size_t ellipse_count = 0;
    double min_width = 0.0;    // smallest ellipse width (2 * semi-minor)
    double max_diameter = 0.0; // largest ellipse diameter (2 * semi-major)
};

struct CoverageReport {
    Box2 region{};
    double min_cell = 0.0;
    /// Cells at min_cell resolution that could not be certified. Subset
    /// needs_refinement_cells still intersects some enlarged ellipse (finer
    /// subdivision might certify them); the rest witness definitely
    /// uncovered points.
    std::vector<Box2> uncovered_cells;
    std::vector<Box2> needs_refinement_cells;
    bool certified = false;  // true iff uncovered_cells is empty
    CoverageStats stats;
};

/// Adaptive quadtree check that the lambda-enlargements cover the region.
/// A cell is certified when its 4 corners lie in ONE enlarged ellipse (exact
/// by convexity); otherwise it splits until below min_cell.
inline CoverageReport verify_covering(std::span<const Ellipse> ellipses, double lambda,
                                      const Box2& region, double min_cell) {
    if (!(min_cell > 0.0)) throw std::invalid_argument("verify_covering: min_cell must be positive");

    CoverageReport rep;
    rep.region = region;
    rep.min_cell = min_cell;
    rep.stats.ellipse_count = ellipses.size();
    if (!ellipses.empty()) {
        rep.stats.min_width = 1e300;
        for (const Ellipse& e : ellipses) {
            rep.stats.min_width = std::min(rep.stats.min_width, 2.0 * e.semi_minor());
            rep.stats.max_diameter = std::max(rep.stats.max_diameter, 2.0 * e.semi_major());
        }
    }

    std::vector<Ellipse> enlarged;
    enlarged.reserve(ellipses.size());
    std::vector<Box2> boxes;
    boxes.reserve(ellipses.size());
    for (const Ellipse& e : ellipses) {
        enlarged.push_back(enlarge(e, lambda));
        boxes.push_back(bounding_box(enlarged.back()));
    }

    // Candidate index lists are narrowed as cells subdivide, so deep
    // refinement near coverage boundaries touches few ellipses per cell.
    struct Node {
        Box2 cell;
        std::vector<std::uint32_t> cand;
    };
    std::vector<Node> stack;
    {
        Node root{region, {}};
        for (std::size_t i = 0; i < boxes.size(); ++i)
            if (boxes[i].intersects(region)) root.cand.push_back(static_cast<std::uint32_t>(i));
        stack.push_back(std::move(root));
    }
    while (!stack.empty()) {
        const Node node = std::move(stack.back());
        stack.pop_back();
        const Box2& cell = node.cell;

        const std::array<Point2, 4> corners = {{{cell.lo.x, cell.lo.y},
                                                {cell.hi.x, cell.lo.y},
                                                {cell.hi.x, cell.hi.y},
                                                {cell.lo.x, cell.hi.y}}};
        bool covered = false;
        for (const std::uint32_t idx : node.cand) {
            bool all = true;
            for (const Point2& c : corners) {
                if (!contains(enlarged[idx], c, 0.0)) {
                    all = false;
                    break;
                }
            }
            if (all) {
                covered = true;
                break;
            }
        }
        if (covered) continue;

        const double w = std::max(cell.hi.x - cell.lo.x, cell.hi.y - cell.lo.y);
        if (w <= min_cell) {
            bool touches = false;
            for (const std::uint32_t idx : node.cand) {
                if (intersects(enlarged[idx], cell)) {
                    touches = true;
                    break;
                }
            }
            rep.uncovered_cells.push_back(cell);
            if (touches) rep.needs_refinement_cells.push_back(cell);
            continue;
        }

        const double mx = 0.5 * (cell.lo.x + cell.hi.x), my = 0.5 * (cell.lo.y + cell.hi.y);
        const std::array<Box2, 4> quads = {{Box2{cell.lo, {mx, my}},
                                            Box2{{mx, cell.lo.y}, {cell.hi.x, my}},
                                            Box2{{cell.lo.x, my}, {mx, cell.hi.y}},
                                            Box2{{mx, my}, cell.hi}}};
        for (const Box2& q : quads) {
            Node child{q, {}};
            child.cand.reserve(node.cand.size());
            for (const std::uint32_t idx : node.cand)
                if (boxes[idx].intersects(q)) child.cand.push_back(idx);
            stack.push_back(std::move(child));
        }
    }

    rep.certified = rep.uncovered_cells.empty();
    return rep;
}

}  // namespace packcover
