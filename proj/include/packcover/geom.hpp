#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "packcover/errors.hpp"

namespace packcover {

inline constexpr double kPi = std::numbers::pi;

/// Absolute tolerance below which a determinant or area is considered degenerate.
inline constexpr double kDegenTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

using Point2 = Vec2;

inline Vec2 operator+(Vec2 u, Vec2 v) { return {u.x + v.x, u.y + v.y}; }
inline Vec2 operator-(Vec2 u, Vec2 v) { return {u.x - v.x, u.y - v.y}; }
inline Vec2 operator-(Vec2 u) { return {-u.x, -u.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return s * v; }
inline Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }

inline double dot(Vec2 u, Vec2 v) { return u.x * v.x + u.y * v.y; }
inline double cross(Vec2 u, Vec2 v) { return u.x * v.y - u.y * v.x; }
inline double norm_sq(Vec2 v) { return dot(v, v); }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double dist(Point2 p, Point2 q) { return norm(p - q); }

/// Counterclockwise quarter turn.
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

/// 2x2 matrix, row major: [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0;
    double c = 0.0, d = 1.0;

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    double det() const { return a * d - b * c; }
    Mat2 transpose() const { return {a, c, b, d}; }

    Mat2 inverse() const {
        const double dt = det();
        if (std::abs(dt) <= kDegenTol) throw std::invalid_argument("Mat2::inverse: singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    static Mat2 identity() { return {}; }
    static Mat2 rotation(double theta) {
        const double co = std::cos(theta), si = std::sin(theta);
        return {co, -si, si, co};
    }
    static Mat2 diagonal(double sx, double sy) { return {sx, 0.0, 0.0, sy}; }
};

inline Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

inline Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

/// Smaller singular value. Exact closed form, no iteration.
inline double sigma_min(const Mat2& m) {
    const double e = 0.5 * (m.a + m.d), f = 0.5 * (m.a - m.d);
    const double g = 0.5 * (m.c + m.b), h = 0.5 * (m.c - m.b);
    return std::abs(std::hypot(e, h) - std::hypot(f, g));
}

/// Larger singular value.
inline double sigma_max(const Mat2& m) {
    const double e = 0.5 * (m.a + m.d), f = 0.5 * (m.a - m.d);
    const double g = 0.5 * (m.c + m.b), h = 0.5 * (m.c - m.b);
    return std::hypot(e, h) + std::hypot(f, g);
}

/// Affine map p -> linear * p + translation.
struct AffineMap2 {
    Mat2 linear;
    Vec2 translation;

    Point2 apply(Point2 p) const { return linear.apply(p) + translation; }
    Point2 operator()(Point2 p) const { return apply(p); }

    AffineMap2 inverse() const {
        const Mat2 li = linear.inverse();
        return {li, -li.apply(translation)};
    }

    /// The unique affine map sending src[i] to dst[i]. src must be non-degenerate.
    static AffineMap2 from_points(const std::array<Point2, 3>& src, const std::array<Point2, 3>& dst) {
        const Vec2 u1 = src[1] - src[0], u2 = src[2] - src[0];
        const Vec2 w1 = dst[1] - dst[0], w2 = dst[2] - dst[0];
        const Mat2 s{u1.x, u2.x, u1.y, u2.y};
        if (std::abs(s.det()) <= kDegenTol)
            throw std::invalid_argument("AffineMap2::from_points: degenerate source triangle");
        const Mat2 w{w1.x, w2.x, w1.y, w2.y};
        const Mat2 lin = w * s.inverse();
        return {lin, dst[0] - lin.apply(src[0])};
    }
};

/// Composition: (m * n)(p) == m(n(p)).
inline AffineMap2 operator*(const AffineMap2& m, const AffineMap2& n) {
    return {m.linear * n.linear, m.linear.apply(n.translation) + m.translation};
}

/// Axis-aligned box, lo <= hi componentwise.
struct Box2 {
    Point2 lo;
    Point2 hi;

    bool intersects(const Box2& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
    }
    bool contains(Point2 p) const { return lo.x <= p.x && p.x <= hi.x && lo.y <= p.y && p.y <= hi.y; }
};

/// Triangle with a designated base side. Vertices are counterclockwise;
/// side i runs vertex(i) -> vertex(i+1), so the apex of side i is vertex(i+2).
class Triangle {
public:
    Triangle(Point2 a, Point2 b, Point2 c, int base_index = 0) : v_{a, b, c}, base_(base_index) {
        if (base_ < 0 || base_ > 2) throw std::invalid_argument("Triangle: base index out of range");
        if (signed_area() <= kDegenTol)
            throw std::invalid_argument("Triangle: vertices must be counterclockwise and non-degenerate");
    }

    Point2 vertex(int i) const { return v_[static_cast<std::size_t>(i % 3)]; }
    std::span<const Point2, 3> vertices() const { return std::span<const Point2, 3>{v_}; }
    int base_index() const { return base_; }

    Point2 base_from() const { return v_[static_cast<std::size_t>(base_)]; }
    Point2 base_to() const { return v_[static_cast<std::size_t>((base_ + 1) % 3)]; }
    Point2 apex() const { return v_[static_cast<std::size_t>((base_ + 2) % 3)]; }

    double signed_area() const { return 0.5 * cross(v_[1] - v_[0], v_[2] - v_[0]); }

    /// Signed distance of p from the base line; positive on the apex side.
    double base_line_distance(Point2 p) const {
        const Vec2 u = base_to() - base_from();
        return cross(u, p - base_from()) / norm(u);
    }

    /// Perpendicular height of the apex over the base line.
    double height() const { return base_line_distance(apex()); }

    /// True if p lies in the closed triangle, fattened outward by tol.
    bool contains(Point2 p, double tol = 0.0) const {
        for (int i = 0; i < 3; ++i) {
            const Vec2 e = vertex(i + 1) - vertex(i);
            if (cross(e, p - vertex(i)) < -tol * norm(e)) return false;
        }
        return true;
    }

private:
    std::array<Point2, 3> v_;
    int base_;
};

/// Strictly convex polygon, vertices counterclockwise.
class ConvexPolygon {
public:
    explicit ConvexPolygon(std::vector<Point2> vertices) : v_(std::move(vertices)) {
        const std::size_t n = v_.size();
        if (n < 3) throw std::invalid_argument("ConvexPolygon: need at least 3 vertices");
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e0 = v_[(i + 1) % n] - v_[i];
            const Vec2 e1 = v_[(i + 2) % n] - v_[(i + 1) % n];
            if (cross(e0, e1) <= kDegenTol)
                throw std::invalid_argument("ConvexPolygon: vertices must be strictly convex counterclockwise");
        }
    }

    std::size_t size() const { return v_.size(); }
    Point2 operator[](std::size_t i) const { return v_[i]; }
    const std::vector<Point2>& vertices() const { return v_; }

    bool contains(Point2 p, double tol = 0.0) const {
        const std::size_t n = v_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e = v_[(i + 1) % n] - v_[i];
            if (cross(e, p - v_[i]) < -tol * norm(e)) return false;
        }
        return true;
    }

    double area() const {
        double s = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i) s += cross(v_[i], v_[(i + 1) % v_.size()]);
        return 0.5 * s;
    }

    Point2 centroid() const {
        Vec2 acc{};
        double s = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const double w = cross(v_[i], v_[(i + 1) % v_.size()]);
            acc = acc + w * (v_[i] + v_[(i + 1) % v_.size()]);
            s += w;
        }
        return acc / (3.0 * s);
    }

private:
    std::vector<Point2> v_;
};

enum class Location { interior, boundary, exterior };
enum class Disjointness { disjoint, tangent, overlap };

/// Ellipse as the image of the closed unit disc under an affine map.
///
/// The stored linear part always has positive determinant (a negative one is
/// fixed up by flipping a column, which leaves the image set unchanged).
/// The canonical form (center, semi-axes, tilt of the major axis in [0, pi))
/// is cached at construction.
class Ellipse {
public:
    explicit Ellipse(AffineMap2 map) : map_(map) {
        const double dt = map_.linear.det();
        if (std::abs(dt) <= kDegenTol) throw std::invalid_argument("Ellipse: degenerate linear part");
        if (dt < 0.0) {
            map_.linear.b = -map_.linear.b;
            map_.linear.d = -map_.linear.d;
        }
        const Mat2& l = map_.linear;
        const double p = l.a * l.a + l.b * l.b;
        const double q = l.a * l.c + l.b * l.d;
        const double r = l.c * l.c + l.d * l.d;
        const double mean = 0.5 * (p + r), dev = std::hypot(0.5 * (p - r), q);
        semi_major_ = std::sqrt(mean + dev);
        semi_minor_ = std::sqrt(std::max(mean - dev, 0.0));
        angle_ = std::atan2(mean + dev - p, q);
        if (angle_ < 0.0) angle_ += kPi;
        if (angle_ >= kPi) angle_ -= kPi;
    }

    Ellipse(Mat2 linear, Point2 center) : Ellipse(AffineMap2{linear, center}) {}

    static Ellipse from_canonical(Point2 center, double semi_major, double semi_minor, double angle) {
        if (!(semi_major > 0.0) || !(semi_minor > 0.0))
            throw std::invalid_argument("Ellipse::from_canonical: semi-axes must be positive");
        Ellipse e{Mat2::rotation(angle) * Mat2::diagonal(semi_major, semi_minor), center};
        // When the arguments are already canonical, keep them bitwise rather
        // than the recomputed values, so serialization round-trips exactly.
        if (semi_major >= semi_minor && angle >= 0.0 && angle < kPi) {
            e.semi_major_ = semi_major;
            e.semi_minor_ = semi_minor;
            e.angle_ = angle;
        }
        return e;
    }

    const AffineMap2& map() const { return map_; }
    Point2 center() const { return map_.translation; }
    double semi_major() const { return semi_major_; }
    double semi_minor() const { return semi_minor_; }
    /// Tilt of the major axis, in [0, pi). Arbitrary for circles.
    double angle() const { return angle_; }

    /// The positive definite matrix L * L^T describing the shape.
    Mat2 shape() const { return map_.linear * map_.linear.transpose(); }

private:
    AffineMap2 map_;
    double semi_major_, semi_minor_, angle_;
};

struct Disc {
    Point2 center;
    double radius = 1.0;
};

/// Scale about the center by factor > 0.
inline Ellipse enlarge(const Ellipse& e, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("enlarge: factor must be positive");
    return Ellipse{factor * e.map().linear, e.center()};
}

inline Disc enlarge(const Disc& d, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("enlarge: factor must be positive");
    return {d.center, factor * d.radius};
}

inline Ellipse transformed(const AffineMap2& m, const Ellipse& e) { return Ellipse{m * e.map()}; }

/// Transform a triangle by an orientation-preserving affine map.
inline Triangle transformed(const AffineMap2& m, const Triangle& t) {
    if (m.linear.det() <= 0.0)
        throw std::invalid_argument("transformed(Triangle): map must preserve orientation");
    return Triangle{m(t.vertex(0)), m(t.vertex(1)), m(t.vertex(2)), t.base_index()};
}

/// Classify p against the ellipse boundary. tol applies to the pullback norm,
/// i.e. it is measured in units of the unit-disc frame.
inline Location point_location(const Ellipse& e, Point2 p, double tol = 1e-9) {
    const double s = norm(e.map().linear.inverse().apply(p - e.center())) - 1.0;
    if (s > tol) return Location::exterior;
    if (s < -tol) return Location::interior;
    return Location::boundary;
}

/// True if p lies in the closed ellipse (boundary included, within tol).
inline bool contains(const Ellipse& e, Point2 p, double tol = 1e-9) {
    return point_location(e, p, tol) != Location::exterior;
}

namespace detail {

inline double det3(const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace detail

/// Separation value for a pair of ellipses.
///
/// Pull e2 into e1's unit-disc frame and form the homogeneous quadric pencil
/// f(t) = det(t * D + (1 - t) * Q2), t in [0, 1], where D = diag(1, 1, -1) is
/// the unit disc and Q2 is the pulled-back e2, scaled so its quadratic block
/// has unit determinant. The returned value is max f over [0, 1]:
/// positive iff the open interiors are disjoint, zero at exact external
/// tangency, negative iff they overlap. Invariant under rigid motions and
/// joint scaling of the pair.
inline double separation_criterion(const Ellipse& e1, const Ellipse& e2) {
    const Mat2 l1i = e1.map().linear.inverse();
    const Mat2 g = l1i * e2.map().linear;
    const Vec2 t = l1i.apply(e2.center() - e1.center());
    const Mat2 gi = g.inverse();
    const Mat2 s = gi.transpose() * gi;
    const Vec2 h = s.apply(t);
    const double k = std::abs(g.det());
    const std::array<std::array<double, 3>, 3> q2 = {{{k * s.a, k * s.b, -k * h.x},
                                                      {k * s.c, k * s.d, -k * h.y},
                                                      {-k * h.x, -k * h.y, k * (dot(t, h) - 1.0)}}};

    const auto eval = [&](double u) {
        const double w = 1.0 - u;
        const std::array<std::array<double, 3>, 3> m = {
            {{u + w * q2[0][0], w * q2[0][1], w * q2[0][2]},
             {w * q2[1][0], u + w * q2[1][1], w * q2[1][2]},
             {w * q2[2][0], w * q2[2][1], -u + w * q2[2][2]}}};
        return detail::det3(m);
    };

    // f is a cubic; recover coefficients from values at 0..3 by forward differences.
    const double f0 = eval(0.0), f1 = eval(1.0), f2 = eval(2.0), f3 = eval(3.0);
    const double c3 = (f3 - 3.0 * f2 + 3.0 * f1 - f0) / 6.0;
    const double c2 = 0.5 * (f2 - 2.0 * f1 + f0) - 3.0 * c3;
    const double c1 = f1 - f0 - c2 - c3;
    const auto cubic = [&](double u) { return ((c3 * u + c2) * u + c1) * u + f0; };

    double best = std::max(f0, f1);

    // Interior critical points: roots of 3*c3*u^2 + 2*c2*u + c1.
    const double qa = 3.0 * c3, qb = 2.0 * c2, qc = c1;
    const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
    if (scale > 0.0) {
        if (std::abs(qa) <= 1e-14 * scale) {
            if (std::abs(qb) > 1e-14 * scale) {
                const double u = -qc / qb;
                if (u > 0.0 && u < 1.0) best = std::max(best, cubic(u));
            }
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                const double q = -0.5 * (qb + std::copysign(root, qb));
                for (const double u : {qa != 0.0 ? q / qa : -1.0, q != 0.0 ? qc / q : -1.0}) {
                    if (u > 0.0 && u < 1.0) best = std::max(best, cubic(u));
                }
            }
        }
    }
    return best;
}

namespace detail {

/// Least distance from the origin to the boundary {m + g q : |q| = 1}.
///
/// Reduces to the axis-aligned point-to-ellipse problem in the eigenframe of
/// g g^T. The tangency equation in the shifted multiplier u,
///   F(u) = (e0 y0 / (u + e0^2 - e1^2))^2 + (e1 y1 / u)^2 - 1,
/// is strictly decreasing on (0, e0 r + e1^2] and brackets its unique root
/// there, so plain bisection cannot diverge. Stays accurate for aspect
/// ratios around 1e4, where the pencil determinant loses sign accuracy.
inline double origin_to_ellipse_boundary(Vec2 m, const Mat2& g) {
    const double axx = g.a * g.a + g.b * g.b;
    const double axy = g.a * g.c + g.b * g.d;
    const double ayy = g.c * g.c + g.d * g.d;
    const double tr = axx + ayy;
    const double rt = std::hypot(axx - ayy, 2.0 * axy);
    const double l_max = 0.5 * (tr + rt);
    const double det_a = g.det() * g.det();
    const double l_min = det_a / l_max;
    const double e0 = std::sqrt(l_max);
    const double e1 = std::sqrt(l_min);

    // Major-axis direction; the larger-residual row keeps it well defined.
    Vec2 axis = (axx - ayy >= 0.0) ? Vec2{0.5 * (rt + (axx - ayy)), axy}
                                   : Vec2{axy, 0.5 * (rt - (axx - ayy))};
    const double alen = norm(axis);
    if (alen <= 0.0) axis = {1.0, 0.0};  // circle: any frame works
    else axis = (1.0 / alen) * axis;

    // Point coordinates in the ellipse-centered eigenframe, folded into the
    // first quadrant.
    const double y0 = std::abs(axis.x * m.x + axis.y * m.y);
    const double y1 = std::abs(-axis.y * m.x + axis.x * m.y);
    const double r = std::hypot(y0, y1);
    if (r == 0.0) return e1;

    const double gap2 = l_max - l_min;
    // On-axis point: the near tip competes with the off-axis foot.
    const auto major_axis_distance = [&]() {
        double best = std::abs(y0 - e0);
        if (gap2 > 0.0) {
            const double wx = l_max * y0 / gap2;
            if (wx < e0) {
                const double wy2 = l_min * (1.0 - wx * wx / l_max);
                best = std::min(best, std::hypot(wx - y0, std::sqrt(std::max(wy2, 0.0))));
            }
        }
        return best;
    };
    if (y1 == 0.0) return major_axis_distance();
    if (y0 == 0.0) return std::abs(y1 - e1);  // distance to the minor tip is least

    double lo = 0.0, hi = e0 * r + l_min;
    for (int it = 0; it < 110; ++it) {
        const double u = 0.5 * (lo + hi);
        const double fx = e0 * y0 / (u + gap2);
        const double fy = e1 * y1 / u;
        (fx * fx + fy * fy > 1.0 ? lo : hi) = u;
    }
    const double u = 0.5 * (lo + hi);
    const double wx = l_max * y0 / (u + gap2);
    const double wy = l_min * y1 / u;
    double d = std::hypot(wx - y0, wy - y1);
    // Guard against multiplier underflow when the point hugs the major axis:
    // the on-axis value minus y1 is a 1-Lipschitz lower bound.
    if (y1 < 0.01 * r) d = std::max(d, major_axis_distance() - y1);
    return d;
}

/// One-sided classification: e1 becomes the unit disc, e2 is classified by
/// how far its pulled-back boundary stays from the disc center.
inline Disjointness classify_against_unit_disc(const Ellipse& e1, const Ellipse& e2, double tol) {
    const Mat2 l1i = e1.map().linear.inverse();
    const Mat2 g = l1i * e2.map().linear;
    const Vec2 m = l1i.apply(e2.center() - e1.center());
    if (norm(g.inverse().apply(m)) < 1.0 - tol)
        return Disjointness::overlap;  // the disc center lies inside e2
    const double d = origin_to_ellipse_boundary(m, g);
    if (d < 1.0 - tol) return Disjointness::overlap;
    if (d <= 1.0 + tol) return Disjointness::tangent;
    return Disjointness::disjoint;
}

}  // namespace detail

/// Classify a pair of ellipses as overlapping, tangent, or disjoint.
///
/// Each ellipse in turn is mapped to the unit disc and the other's boundary
/// distance to the disc center decides the verdict; tangency is declared
/// within tol of touching, measured in the pullback frame. The two one-sided
/// verdicts can straddle the tangency window when the frames are very
/// anisotropic, in which case the pair is reported tangent, so the result is
/// symmetric in its arguments. The bracketed-bisection distance stays exact
/// for sliver ellipses (aspect ratios beyond 1e4) that drive the cubic
/// separation value below its own rounding noise.
inline Disjointness interiors_disjoint(const Ellipse& e1, const Ellipse& e2, double tol = 1e-9) {
    const Disjointness a = detail::classify_against_unit_disc(e1, e2, tol);
    const Disjointness b = detail::classify_against_unit_disc(e2, e1, tol);
    return a == b ? a : Disjointness::tangent;
}

/// Signed clearance of the convex hull of pts inside the ellipse.
///
/// Returns sigma_min(L) * (1 - max_k |L^-1 (pts[k] - center)|). When positive,
/// every point of the hull is at least that Euclidean distance from the
/// complement of the ellipse (the bound pulls the unit-disc clearance forward
/// through the map, so it is conservative but never unsound). Non-positive
/// values mean containment is not certified.
inline double coverage_margin(const Ellipse& e, std::span<const Point2> pts) {
    if (pts.empty()) throw std::invalid_argument("coverage_margin: empty point set");
    const Mat2 li = e.map().linear.inverse();
    double worst = 0.0;
    for (const Point2& p : pts) worst = std::max(worst, norm(li.apply(p - e.center())));
    return sigma_min(e.map().linear) * (1.0 - worst);
}

inline double coverage_margin(const Ellipse& e, const ConvexPolygon& poly) {
    return coverage_margin(e, std::span<const Point2>{poly.vertices()});
}

inline double coverage_margin(const Ellipse& e, const Triangle& t) {
    return coverage_margin(e, std::span<const Point2>{t.vertices()});
}

/// Tight axis-aligned bounding box.
inline Box2 bounding_box(const Ellipse& e) {
    const Mat2& l = e.map().linear;
    const Vec2 half{std::hypot(l.a, l.b), std::hypot(l.c, l.d)};
    return {e.center() - half, e.center() + half};
}

namespace detail {

/// Distance from the origin to the closed segment [p, q].
inline double segment_distance_to_origin(Point2 p, Point2 q) {
    const Vec2 d = q - p;
    const double len2 = norm_sq(d);
    if (len2 <= kDegenTol * kDegenTol) return norm(p);
    const double u = std::clamp(-dot(p, d) / len2, 0.0, 1.0);
    return norm(p + u * d);
}

}  // namespace detail

/// True if the closed ellipse meets the closed box. Exact up to roundoff.
inline bool intersects(const Ellipse& e, const Box2& box) {
    if (!bounding_box(e).intersects(box)) return false;
    if (box.contains(e.center())) return true;
    const std::array<Point2, 4> corners = {
        {{box.lo.x, box.lo.y}, {box.hi.x, box.lo.y}, {box.hi.x, box.hi.y}, {box.lo.x, box.hi.y}}};
    for (const Point2& c : corners)
        if (contains(e, c, 0.0)) return true;
    const Mat2 li = e.map().linear.inverse();
    for (int i = 0; i < 4; ++i) {
        const Point2 p = li.apply(corners[static_cast<std::size_t>(i)] - e.center());
        const Point2 q = li.apply(corners[static_cast<std::size_t>((i + 1) % 4)] - e.center());
        if (detail::segment_distance_to_origin(p, q) <= 1.0) return true;
    }
    return false;
}

}  // namespace packcover
