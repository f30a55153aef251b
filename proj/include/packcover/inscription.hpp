#pragma once

#include <optional>
#include <vector>

#include "packcover/geom.hpp"

namespace packcover {

/// Least n >= 2 whose regular 2n-gon circumscribed about the unit disc lies
/// strictly inside the lambda-enlarged disc, i.e. sec(pi/(2n)) < lambda.
inline int choose_n(double lambda) {
    if (!(lambda > 1.0)) throw std::invalid_argument("choose_n: lambda must exceed 1");
    for (int n = 2; n <= 10'000'000; ++n) {
        if (1.0 / std::cos(kPi / (2.0 * n)) < lambda) return n;
    }
    // sec(pi/(2n)) -> 1, so this is only reachable for lambda - 1 < ~1e-14.
    throw ConfigurationError("choose_n: lambda too close to 1");
}

/// Height fraction mu(n) = (1 + cos(pi/n)) / 2 of the apex-adjacent vertices.
/// Every non-apex vertex of a properly inscribed polygon sits at height
/// <= mu * h over the base line, with equality for the two apex-adjacent ones.
inline double mu(int n) {
    if (n < 2) throw std::invalid_argument("mu: n must be at least 2");
    return 0.5 * (1.0 + std::cos(kPi / n));
}

/// The regular 2n-gon P circumscribed about the unit disc (apothem 1,
/// circumradius sec(pi/(2n))), main diagonal vertical, plus the reference
/// triangle in which P is properly inscribed.
///
/// vertices[k] sits at angle pi/2 + k*pi/n, so vertices[0] is the top vertex,
/// vertices[n] the bottom one, and indices run counterclockwise (1..n-1 is
/// the left chain, n+1..2n-1 the right chain). The construction mirrors the
/// left chain onto the right one so symmetric vertices agree bitwise.
struct RegularGonSpec {
    int n;
    double circumradius;           // sec(pi/(2n))
    double base_half_width;        // 2 / sin(pi/(2n))
    std::vector<Point2> vertices;  // 2n points, counterclockwise
    Triangle reference_triangle;   // base on y = -circumradius, apex = vertices[0]
};

inline RegularGonSpec reference_polygon(int n) {
    if (n < 2) throw std::invalid_argument("reference_polygon: n must be at least 2");
    const double r = 1.0 / std::cos(kPi / (2.0 * n));
    const double b = 2.0 / std::sin(kPi / (2.0 * n));
    std::vector<Point2> v(static_cast<std::size_t>(2 * n));
    v[0] = {0.0, r};
    v[static_cast<std::size_t>(n)] = {0.0, -r};
    for (int k = 1; k < n; ++k) {
        const double ang = k * kPi / n;
        v[static_cast<std::size_t>(k)] = {-r * std::sin(ang), r * std::cos(ang)};
        v[static_cast<std::size_t>(2 * n - k)] = {r * std::sin(ang), r * std::cos(ang)};
    }
    Triangle ref{{-b, -r}, {b, -r}, {0.0, r}, 0};
    return {n, r, b, std::move(v), ref};
}

/// An affine copy of the reference polygon properly inscribed in a triangle,
/// together with its inscribed ellipse (image of the unit disc) and the map
/// that produced both.
struct ProperTile {
    ConvexPolygon polygon;
    Ellipse ellipse;
    Triangle source;
    AffineMap2 map;  // sends the reference configuration onto this tile
};

/// The unique proper inscription of spec's polygon into t: the affine map
/// takes the reference triangle onto t, base endpoints onto base endpoints
/// and apex onto apex.
inline ProperTile properly_inscribe(const Triangle& t, const RegularGonSpec& spec) {
    const Triangle& ref = spec.reference_triangle;
    const AffineMap2 m = AffineMap2::from_points({ref.base_from(), ref.base_to(), ref.apex()},
                                                 {t.base_from(), t.base_to(), t.apex()});
    std::vector<Point2> verts;
    verts.reserve(spec.vertices.size());
    for (const Point2& p : spec.vertices) verts.push_back(m(p));
    // The reference disc is the unit disc at the origin, so the ellipse is
    // the map itself applied to it.
    return {ConvexPolygon{std::move(verts)}, Ellipse{m.linear, m.translation}, t, m};
}

/// Worst violation of the proper-inscription conditions, as a fraction of the
/// triangle's diameter: polygon inside the triangle, bottom vertex at the
/// base midpoint, apex on apex, apex-adjacent edges along the triangle's
/// sides, and the ellipse tangent to every polygon edge.
inline double inscription_violation(const ProperTile& tile, const Triangle& t) {
    const std::size_t count = tile.polygon.size();
    const int n = static_cast<int>(count / 2);
    const Point2 a = t.base_from(), b = t.base_to(), c = t.apex();
    const double diam = std::max({dist(a, b), dist(b, c), dist(c, a)});
    double worst = 0.0;

    // (i) containment: penetration depth of each vertex beyond each side.
    for (std::size_t i = 0; i < count; ++i) {
        const Point2 p = tile.polygon[i];
        for (int s = 0; s < 3; ++s) {
            const Vec2 e = t.vertex(s + 1) - t.vertex(s);
            worst = std::max(worst, -cross(e, p - t.vertex(s)) / norm(e));
        }
    }
    // (iii) anchor points.
    worst = std::max(worst, dist(tile.polygon[static_cast<std::size_t>(n)], 0.5 * (a + b)));
    worst = std::max(worst, dist(tile.polygon[0], c));
    // (iv) apex-adjacent vertices on the triangle's slant side lines.
    const auto line_dist = [](Point2 p, Point2 q0, Point2 q1) {
        const Vec2 e = q1 - q0;
        return std::abs(cross(e, p - q0)) / norm(e);
    };
    worst = std::max(worst, line_dist(tile.polygon[1], c, a));
    worst = std::max(worst, line_dist(tile.polygon[count - 1], c, b));
    // Ellipse tangency to every polygon edge: the support extent of the
    // ellipse along the edge's outward normal must equal the edge offset.
    const Mat2 lt = tile.ellipse.map().linear.transpose();
    for (std::size_t i = 0; i < count; ++i) {
        const Point2 p = tile.polygon[i];
        const Vec2 e = tile.polygon[(i + 1) % count] - p;
        const Vec2 nrm = -perp(e) / norm(e);  // outward for a counterclockwise polygon
        const double extent = dot(nrm, tile.ellipse.center()) + norm(lt.apply(nrm));
        worst = std::max(worst, std::abs(extent - dot(nrm, p)));
    }
    return worst / diam;
}

inline bool is_properly_inscribed(const ProperTile& tile, const Triangle& t, double tol = 1e-10) {
    return inscription_violation(tile, t) <= tol;
}

}  // namespace packcover
