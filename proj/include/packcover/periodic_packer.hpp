#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "packcover/lemma_tiler.hpp"

namespace packcover {

struct PackingConfig {
    double lambda = 1.5;
    std::optional<int> n_override;      // defaults to choose_n(lambda)
    std::optional<double> fixed_delta;  // defaults to choose_delta of the initial tile
    double triangle_side = 1.0;
    std::size_t tile_budget = kDefaultTileBudget;
};

struct PlacedEllipse {
    Ellipse ellipse;
    std::string provenance;  // source triangle chain and tile index, e.g. "up/fan2/tile17"
};

/// Fundamental domain of the periodic packing: the ellipses of one upward and
/// one downward lattice triangle, which together tile the unit cell of the
/// lattice spanned by u1, u2.
struct PeriodicPacking {
    double lambda = 0.0;
    int n = 0;
    double triangle_side = 1.0;
    Vec2 u1, u2;
    std::vector<PlacedEllipse> cell;
};

/// The 2n-2 fan triangles tiling the complement of the initial tile in t.
/// Each has a full polygon edge as its designated base and a corner of t as
/// its apex: on the right chain the triangles (w_k, w_{k+1}, b), symmetric on
/// the left. The two edges adjacent to the polygon's apex lie on the sides of
/// t and get no triangle.
inline std::vector<Triangle> fan_pockets(const Triangle& t, const ProperTile& initial,
                                         const RegularGonSpec& spec) {
    const int n = spec.n;
    const std::size_t count = initial.polygon.size();
    const Point2 a = t.base_from(), b = t.base_to();

    const double diam = std::max({dist(a, b), dist(b, t.apex()), dist(t.apex(), a)});
    if (dist(initial.polygon[0], t.apex()) > 1e-8 * diam ||
        dist(initial.polygon[static_cast<std::size_t>(n)], 0.5 * (a + b)) > 1e-8 * diam)
        throw InvariantViolation("fan_pockets: tile is not properly inscribed in the triangle");

    std::vector<Triangle> out;
    out.reserve(static_cast<std::size_t>(2 * n - 2));
    // Right chain: w_j = polygon[2n - j], fan apex at base corner b.
    const auto right = [&](int j) { return initial.polygon[(count - static_cast<std::size_t>(j)) % count]; };
    for (int k = 1; k <= n - 1; ++k) out.emplace_back(right(k), right(k + 1), b, 0);
    // Left chain: l_j = polygon[j], fan apex at base corner a.
    for (int k = 1; k <= n - 1; ++k)
        out.emplace_back(initial.polygon[static_cast<std::size_t>(k + 1)],
                         initial.polygon[static_cast<std::size_t>(k)], a, 0);
    return out;
}

/// Half the clearance of the tile polygon inside its lambda-enlarged ellipse.
/// This is the strip width the Lemma tiling may leave uncovered along each
/// fan base while the enlarged initial ellipse still covers it.
inline double choose_delta(const ProperTile& tile, double lambda) {
    const double margin = coverage_margin(enlarge(tile.ellipse, lambda), tile.polygon);
    if (!(margin > 0.0))
        throw ConfigurationError(
            "choose_delta: enlarged ellipse does not cover the tile polygon (n too small for lambda)");
    return 0.5 * margin;
}

/// Build the fundamental cell: initial tile in the upward triangle, Lemma
/// tiling of every fan pocket down to a certified strip, then the half-turn
/// image of the whole pattern in the downward triangle. The two initial tiles
/// come out as translates of each other because the polygon is centrally
/// symmetric.
inline PeriodicPacking build_cell(const PackingConfig& cfg) {
    if (!(cfg.lambda > 1.0)) throw ConfigurationError("build_cell: lambda must exceed 1");
    if (!(cfg.triangle_side > 0.0)) throw ConfigurationError("build_cell: triangle side must be positive");

    int n;
    if (cfg.n_override) {
        n = *cfg.n_override;
        if (n < 2) throw ConfigurationError("build_cell: n must be at least 2");
        if (!(1.0 / std::cos(kPi / (2.0 * n)) < cfg.lambda))
            throw ConfigurationError("build_cell: 2n-gon exceeds the lambda-enlarged disc; raise n");
    } else {
        n = choose_n(cfg.lambda);
    }

    const RegularGonSpec spec = reference_polygon(n);
    const double s = cfg.triangle_side;
    const double h = s * std::sqrt(3.0) / 2.0;
    const Triangle up{{0.0, 0.0}, {s, 0.0}, {0.5 * s, h}, 0};
    const ProperTile initial = properly_inscribe(up, spec);
    const Ellipse cover = enlarge(initial.ellipse, cfg.lambda);
    const double delta0 = cfg.fixed_delta ? *cfg.fixed_delta : choose_delta(initial, cfg.lambda);
    if (!(delta0 > 0.0)) throw ConfigurationError("build_cell: delta must be positive");

    PeriodicPacking out;
    out.lambda = cfg.lambda;
    out.n = n;
    out.triangle_side = s;
    out.u1 = {s, 0.0};
    out.u2 = {0.5 * s, h};
    out.cell.push_back({initial.ellipse, "up/initial"});

    const std::vector<Triangle> fans = fan_pockets(up, initial, spec);
    for (std::size_t fi = 0; fi < fans.size(); ++fi) {
        double delta = delta0;
        for (int attempt = 0;; ++attempt) {
            TilingResult res = tile_until(fans[fi], delta, spec, cfg.tile_budget);

            // Certify: every residual triangle must lie inside the enlarged
            // initial ellipse. Three vertices suffice by convexity.
            bool ok = true;
            for (const Triangle& r : res.residual) {
                for (int v = 0; v < 3; ++v) {
                    if (!contains(cover, r.vertex(v), 0.0)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) {
                const std::string prefix = "up/fan" + std::to_string(fi) + "/tile";
                for (std::size_t j = 0; j < res.tiles.size(); ++j)
                    out.cell.push_back({res.tiles[j].ellipse, prefix + std::to_string(j)});
                break;
            }
            if (attempt >= 6)
                throw ConfigurationError("build_cell: residual certification failed after 6 delta halvings");
            delta *= 0.5;
        }
    }

    // Downward triangle: half-turn about the midpoint of the shared slant
    // edge. Centers reflect, linear parts negate (same ellipse shape).
    const Point2 m = 0.5 * (Point2{s, 0.0} + Point2{0.5 * s, h});
    const std::size_t up_count = out.cell.size();
    for (std::size_t i = 0; i < up_count; ++i) {
        const Ellipse& e = out.cell[i].ellipse;
        out.cell.push_back({Ellipse{-1.0 * e.map().linear, 2.0 * m - e.center()},
                            "down/" + out.cell[i].provenance.substr(3)});
    }
    return out;
}

/// Ellipses of the cell plus all lattice translates with |i|, |j| <= ring.
/// ring = 1 gives the cell and its 8 neighbors.
inline std::vector<Ellipse> cell_with_neighbors(const PeriodicPacking& p, int ring = 1) {
    std::vector<Ellipse> out;
    out.reserve(p.cell.size() * static_cast<std::size_t>((2 * ring + 1) * (2 * ring + 1)));
    for (int i = -ring; i <= ring; ++i) {
        for (int j = -ring; j <= ring; ++j) {
            const Vec2 shift = static_cast<double>(i) * p.u1 + static_cast<double>(j) * p.u2;
            for (const PlacedEllipse& pe : p.cell)
                out.push_back(Ellipse{pe.ellipse.map().linear, pe.ellipse.center() + shift});
        }
    }
    return out;
}

}  // namespace packcover
