#pragma once

// Lower-bound machinery for disc packings: the bite relation between an
// enlarged disc and a probe region, the square/crescent region-shrinking
// chase that certifies a point left uncovered by the enlargement of any
// finite packing of discs with radius at most 1, and the constants
// auditor/calibrator that backs the chase's case analysis.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "packcover/errors.hpp"
#include "packcover/geom.hpp"
#include "packcover/rng.hpp"

namespace packcover {

/// Tunable bundle for the chase. All lengths are fractions of the current
/// region scale r_n. arc_prime (angular width of the fallback probe window)
/// and r_prime_max (radius cap for its biters) start unset and are filled in
/// by calibrate(); audit_constants reports on whatever values are present.
struct Constants {
    double eps = 1e-5;                    ///< enlargement factor is 1 + eps
    double alpha = kPi / 16.0;            ///< angular window of a crescent
    double beta = 1.0 / 16.0;             ///< radial thickness of a crescent
    double ring_frac = 1.0 / 256.0;       ///< radial thickness of the probe band
    double r_small = 1.0 / 1280.0;        ///< below this, a biter triggers the square case
    double r_big = 1.0 / 8.0;             ///< above this, a biter triggers the fallback case
    double arc_prime = 0.0;               ///< calibrated fallback window width
    double r_prime_max = 0.0;             ///< calibrated fallback biter cap
    double sq_side_factor = 1.0 / 320.0;  ///< side of the small-biter square
};

/// Axis-aligned-in-its-own-frame square, side 4r, rotated by angle about
/// its center. Matches the scale convention of the initial 4x4 region.
struct SquareRegion {
    Point2 center;
    double r = 1.0;
    double angle = 0.0;
};

/// Polar box around a base disc: radii in [r_n, (1+ring)*r_n], angles within
/// half_angle of axis. With ring = beta this is a chase region; with
/// ring = ring_frac it is the thin probe band scanned for biters.
struct CrescentRegion {
    Disc base;
    double axis = 0.0;
    double half_angle = 0.0;
    double ring = 0.0;
};

using Region = std::variant<SquareRegion, CrescentRegion>;

/// Circular arc, angles taken counterclockwise from lo to hi.
struct Arc {
    Point2 center;
    double radius = 1.0;
    double phi_lo = 0.0;
    double phi_hi = 0.0;
};

struct DiscPacking {
    std::vector<Disc> discs;
    double eps = 1e-5;
};

/// One audited inequality: pass/fail plus the two sides that were compared.
struct AuditCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool all_pass = false;

    const AuditCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct CalibrationResult {
    Constants constants;  ///< input constants with arc_prime / r_prime_max filled
    double eps_max = 0.0; ///< largest enlargement factor the constants tolerate
};

/// Region sequence of one chase. case_labels[i] names the step applied to
/// regions[i]; composite labels such as "crescent_3/crescent_2" record the
/// fallback rescan and the sub-case it dispatched to.
struct ChaseTrace {
    std::vector<Region> regions;
    std::vector<std::string> case_labels;
};

struct ChaseResult {
    Point2 uncovered;
    ChaseTrace trace;
};

/// Outcome of one shrink step: either the next region (with the packing
/// index of its base disc, -1 for squares) or a certified uncovered point.
struct StepResult {
    std::optional<Region> region;
    std::optional<Point2> uncovered;
    std::string label;
    int region_base = -1;
};

inline double region_scale(const Region& r) {
    if (const auto* s = std::get_if<SquareRegion>(&r)) return s->r;
    return std::get<CrescentRegion>(r).base.radius;
}

namespace detail {

inline Vec2 from_angle(double a) { return {std::cos(a), std::sin(a)}; }

/// Wraps into (-pi, pi].
inline double wrap_pi(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

inline double point_to_segment(Point2 p, Point2 a, Point2 b) {
    const Vec2 ab = b - a;
    const double len2 = norm_sq(ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return dist(p, a + t * ab);
}

/// Distance from p to the closed square (0 inside).
inline double square_distance(const SquareRegion& s, Point2 p) {
    const Vec2 v = Mat2::rotation(-s.angle).apply(p - s.center);
    const double h = 2.0 * s.r;
    const double dx = std::max(std::abs(v.x) - h, 0.0);
    const double dy = std::max(std::abs(v.y) - h, 0.0);
    return std::hypot(dx, dy);
}

/// Distance from p to the closed polar box (0 inside). Inside the angular
/// window the nearest point is the radial clamp onto the band; outside it
/// lies on one of the two straight radial edges.
inline double crescent_distance(const CrescentRegion& c, Point2 p) {
    const double lo = c.base.radius;
    const double hi = (1.0 + c.ring) * c.base.radius;
    const Vec2 v = p - c.base.center;
    const double rho = norm(v);
    const double phi = wrap_pi(std::atan2(v.y, v.x) - c.axis);
    if (std::abs(phi) <= c.half_angle) {
        if (rho < lo) return lo - rho;
        if (rho > hi) return rho - hi;
        return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const double side : {-1.0, 1.0}) {
        const Vec2 e = from_angle(c.axis + side * c.half_angle);
        best = std::min(best, point_to_segment(p, c.base.center + lo * e, c.base.center + hi * e));
    }
    return best;
}

/// Distance from p to the arc curve.
inline double arc_distance(const Arc& a, Point2 p) {
    const Vec2 v = p - a.center;
    const double rho = norm(v);
    const double mid = 0.5 * (a.phi_lo + a.phi_hi);
    const double half = 0.5 * (a.phi_hi - a.phi_lo);
    const double phi = wrap_pi(std::atan2(v.y, v.x) - mid);
    if (std::abs(phi) <= half) return std::abs(rho - a.radius);
    double best = std::numeric_limits<double>::infinity();
    for (const double ang : {a.phi_lo, a.phi_hi})
        best = std::min(best, dist(p, a.center + a.radius * from_angle(ang)));
    return best;
}

}  // namespace detail

/// Whether the (1+eps)-enlargement of c meets the target.
inline bool bites(const Disc& c, Point2 p, double eps) {
    return dist(c.center, p) <= (1.0 + eps) * c.radius;
}

inline bool bites(const Disc& c, const Disc& probe, double eps) {
    return dist(c.center, probe.center) <= (1.0 + eps) * c.radius + probe.radius;
}

inline bool bites(const Disc& c, const SquareRegion& s, double eps) {
    return detail::square_distance(s, c.center) <= (1.0 + eps) * c.radius;
}

inline bool bites(const Disc& c, const CrescentRegion& cr, double eps) {
    return detail::crescent_distance(cr, c.center) <= (1.0 + eps) * c.radius;
}

inline bool bites(const Disc& c, const Arc& a, double eps) {
    return detail::arc_distance(a, c.center) <= (1.0 + eps) * c.radius;
}

namespace detail {

/// Corners in perimeter order: inner-low, outer-low, outer-high, inner-high.
inline std::array<Point2, 4> crescent_corners(const CrescentRegion& c) {
    const double lo = c.base.radius;
    const double hi = (1.0 + c.ring) * c.base.radius;
    const Vec2 el = from_angle(c.axis - c.half_angle);
    const Vec2 eh = from_angle(c.axis + c.half_angle);
    return {c.base.center + lo * el, c.base.center + hi * el,
            c.base.center + hi * eh, c.base.center + lo * eh};
}

inline std::array<Point2, 4> square_corners(const SquareRegion& s) {
    const Mat2 rot = Mat2::rotation(s.angle);
    const double h = 2.0 * s.r;
    return {s.center + rot.apply({-h, -h}), s.center + rot.apply({h, -h}),
            s.center + rot.apply({h, h}), s.center + rot.apply({-h, h})};
}

inline bool crescent_contains(const CrescentRegion& c, Point2 p, double tol = 0.0) {
    const Vec2 v = p - c.base.center;
    const double rho = norm(v);
    if (rho < c.base.radius - tol) return false;
    if (rho > (1.0 + c.ring) * c.base.radius + tol) return false;
    const double ang_tol = tol / std::max(c.base.radius, 1e-300);
    return std::abs(wrap_pi(std::atan2(v.y, v.x) - c.axis)) <= c.half_angle + ang_tol;
}

inline bool square_contains(const SquareRegion& s, Point2 p, double tol = 0.0) {
    const Vec2 v = Mat2::rotation(-s.angle).apply(p - s.center);
    const double h = 2.0 * s.r + tol;
    return std::abs(v.x) <= h && std::abs(v.y) <= h;
}

inline bool region_contains(const Region& r, Point2 p, double tol = 0.0) {
    if (const auto* s = std::get_if<SquareRegion>(&r)) return square_contains(*s, p, tol);
    return crescent_contains(std::get<CrescentRegion>(r), p, tol);
}

/// Containment of one polar box in another, decided on finitely many
/// candidate points. Radius and angle about the outer base are monotone or
/// have interior critical points only where listed: corners always; on the
/// arcs where they cross the line through both centers (radial extrema) and
/// at the tangent sight-lines from the outer center (angular extrema); on
/// the straight edges at the perpendicular foot of the outer center (radial
/// minimum; the angle is monotone along any segment not through the center).
inline bool crescent_in_crescent(const CrescentRegion& in, const CrescentRegion& out) {
    std::vector<Point2> cand;
    cand.reserve(14);
    const auto corners = crescent_corners(in);
    cand.insert(cand.end(), corners.begin(), corners.end());

    const Point2 c = in.base.center;
    const Vec2 d = out.base.center - c;
    const double dd = norm(d);
    const double in_lo = in.base.radius;
    const double in_hi = (1.0 + in.ring) * in.base.radius;
    const auto in_window = [&](Point2 p) {
        const Vec2 v = p - c;
        return std::abs(wrap_pi(std::atan2(v.y, v.x) - in.axis)) <= in.half_angle;
    };
    if (dd > 0.0) {
        const Vec2 u = d / dd;
        for (const double rho : {in_lo, in_hi}) {
            for (const double s : {-1.0, 1.0}) {
                const Point2 p = c + (s * rho) * u;
                if (in_window(p)) cand.push_back(p);
            }
            if (dd > rho) {
                // Sight-line tangency: right triangle with the hypotenuse
                // between the centers, so cos(psi) = rho / dd.
                const double psi = std::acos(std::clamp(rho / dd, -1.0, 1.0));
                const Mat2 rp = Mat2::rotation(psi), rm = Mat2::rotation(-psi);
                for (const Point2 p : {c + rho * rp.apply(u), c + rho * rm.apply(u)})
                    if (in_window(p)) cand.push_back(p);
            }
        }
    }
    for (const double side : {-1.0, 1.0}) {
        const Vec2 e = from_angle(in.axis + side * in.half_angle);
        const Point2 a = c + in_lo * e;
        const double t = dot(out.base.center - a, e);
        if (t > 0.0 && t < in_hi - in_lo) cand.push_back(a + t * e);
    }
    for (const Point2 p : cand)
        if (!crescent_contains(out, p)) return false;
    return true;
}

inline bool square_in_crescent(const SquareRegion& in, const CrescentRegion& out) {
    std::vector<Point2> cand;
    cand.reserve(8);
    const auto corners = square_corners(in);
    cand.insert(cand.end(), corners.begin(), corners.end());
    for (int i = 0; i < 4; ++i) {
        const Point2 a = corners[i], b = corners[(i + 1) % 4];
        const Vec2 ab = b - a;
        const double t = dot(out.base.center - a, ab) / norm_sq(ab);
        if (t > 0.0 && t < 1.0) cand.push_back(a + t * ab);
    }
    for (const Point2 p : cand)
        if (!crescent_contains(out, p)) return false;
    return true;
}

inline bool crescent_in_square(const CrescentRegion& in, const SquareRegion& out) {
    std::vector<Point2> cand;
    cand.reserve(12);
    const auto corners = crescent_corners(in);
    cand.insert(cand.end(), corners.begin(), corners.end());
    // Extremes of the square-frame coordinates over the arcs lie where the
    // arc normal aligns with a frame axis.
    const Mat2 rot = Mat2::rotation(out.angle);
    const double in_lo = in.base.radius;
    const double in_hi = (1.0 + in.ring) * in.base.radius;
    const auto in_window = [&](Point2 p) {
        const Vec2 v = p - in.base.center;
        return std::abs(wrap_pi(std::atan2(v.y, v.x) - in.axis)) <= in.half_angle;
    };
    for (const Vec2 axis : {rot.apply({1.0, 0.0}), rot.apply({0.0, 1.0})}) {
        for (const double rho : {in_lo, in_hi}) {
            for (const double s : {-1.0, 1.0}) {
                const Point2 p = in.base.center + (s * rho) * axis;
                if (in_window(p)) cand.push_back(p);
            }
        }
    }
    for (const Point2 p : cand)
        if (!square_contains(out, p)) return false;
    return true;
}

inline bool square_in_square(const SquareRegion& in, const SquareRegion& out) {
    for (const Point2 p : square_corners(in))
        if (!square_contains(out, p)) return false;
    return true;
}

}  // namespace detail

/// Exact containment test between chase regions.
inline bool region_in_region(const Region& in, const Region& out) {
    return std::visit(
        [](const auto& a, const auto& b) {
            using A = std::decay_t<decltype(a)>;
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<A, SquareRegion> && std::is_same_v<B, SquareRegion>)
                return detail::square_in_square(a, b);
            else if constexpr (std::is_same_v<A, SquareRegion>)
                return detail::square_in_crescent(a, b);
            else if constexpr (std::is_same_v<B, SquareRegion>)
                return detail::crescent_in_square(a, b);
            else
                return detail::crescent_in_crescent(a, b);
        },
        in, out);
}

/// count points spread along the region's boundary, for sampling checks.
inline std::vector<Point2> region_boundary(const Region& r, int count) {
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(count));
    if (const auto* s = std::get_if<SquareRegion>(&r)) {
        const auto corners = detail::square_corners(*s);
        for (int i = 0; i < count; ++i) {
            const double t = 4.0 * i / count;
            const int edge = std::min(static_cast<int>(t), 3);
            const double f = t - edge;
            pts.push_back(corners[edge] + f * (corners[(edge + 1) % 4] - corners[edge]));
        }
        return pts;
    }
    const auto& c = std::get<CrescentRegion>(r);
    const auto corners = detail::crescent_corners(c);
    const double lo = c.base.radius;
    const double hi = (1.0 + c.ring) * c.base.radius;
    const int per_arc = std::max(count * 2 / 5, 2);
    const int per_edge = std::max((count - 2 * per_arc) / 2, 1);
    for (int i = 0; i < per_arc; ++i) {
        const double f = per_arc == 1 ? 0.5 : static_cast<double>(i) / (per_arc - 1);
        const double ang = c.axis - c.half_angle + 2.0 * c.half_angle * f;
        pts.push_back(c.base.center + lo * detail::from_angle(ang));
        pts.push_back(c.base.center + hi * detail::from_angle(ang));
    }
    for (int i = 0; i < per_edge; ++i) {
        const double f = (i + 1.0) / (per_edge + 1.0);
        pts.push_back(corners[0] + f * (corners[1] - corners[0]));
        pts.push_back(corners[3] + f * (corners[2] - corners[3]));
    }
    return pts;
}

namespace detail {

/// Index of the largest-radius disc for which pred holds, ties broken by
/// first index; -1 if none. Skips the excluded indices.
template <typename Pred>
int largest_where(const std::vector<Disc>& discs, Pred&& pred, int skip1 = -1, int skip2 = -1) {
    int best = -1;
    double best_r = 0.0;
    for (int i = 0; i < static_cast<int>(discs.size()); ++i) {
        if (i == skip1 || i == skip2) continue;
        if (discs[i].radius > best_r && pred(discs[i])) {
            best = i;
            best_r = discs[i].radius;
        }
    }
    return best;
}

/// The shrink steps only apply while no disc larger than the region scale
/// bites the region; a violation means a bug or infeasible constants.
template <typename RegionT>
void assert_hypothesis(const RegionT& region, double scale, const std::vector<Disc>& discs,
                       double eps, const char* where) {
    for (std::size_t i = 0; i < discs.size(); ++i) {
        if (discs[i].radius > scale && bites(discs[i], region, eps)) {
            char buf[192];
            std::snprintf(buf, sizeof buf,
                          "%s: disc %zu (radius %.6g) exceeds region scale %.6g and bites the region",
                          where, i, discs[i].radius, scale);
            throw InvariantViolation(buf);
        }
    }
}

/// Square of the small-biter case, sitting radially inside the probe band:
/// margin m on both sides of the band's thickness, centered on the window.
inline SquareRegion band_square(const Disc& base, double center_angle, const Constants& k) {
    const double s = k.sq_side_factor;
    const double m = 0.5 * (k.ring_frac - k.eps - s);
    if (m <= 0.0)
        throw CalibrationError("F", "band square does not fit: ring_frac - eps - side <= 0");
    const double radial = 1.0 + k.eps + m + 0.5 * s;
    const Point2 ctr = base.center + (base.radius * radial) * from_angle(center_angle);
    return SquareRegion{ctr, k.r_small * base.radius, center_angle};
}

/// Crescent of a mid-sized biter. The axis starts on the ray from the biter
/// toward the old base and rotates away from the old window's center side;
/// the first feasible rotation is used, preferring the fixed 5/2 alpha
/// offset, falling back to the smallest rotation that keeps the crescent
/// inside the old region and clear of the excluded discs.
inline StepResult biter_crescent(const Region& old_region, const Disc& old_base, double old_axis,
                                 const std::vector<Disc>& discs, int biter_index,
                                 const Constants& k, int extra_index) {
    const Disc& c = discs[static_cast<std::size_t>(biter_index)];
    const Vec2 to_base = old_base.center - c.center;
    const double base_dir = std::atan2(to_base.y, to_base.x);
    // Rotating the axis counterclockwise swings the crescent clockwise
    // around the biter as seen from the base, so a biter above the window
    // center needs the positive rotation to move toward it.
    const double phi_c = wrap_pi(std::atan2(-to_base.y, -to_base.x) - old_axis);
    const double sigma = phi_c >= 0.0 ? 1.0 : -1.0;

    const auto candidate = [&](double gamma) {
        return CrescentRegion{c, base_dir + sigma * gamma, 0.5 * k.alpha, k.beta};
    };
    const auto feasible = [&](double gamma) {
        const CrescentRegion cr = candidate(gamma);
        if (!region_in_region(cr, old_region)) return false;
        if (bites(old_base, cr, k.eps)) return false;
        if (extra_index >= 0 && bites(discs[static_cast<std::size_t>(extra_index)], cr, k.eps))
            return false;
        return true;
    };

    const double gamma_max = std::max(0.5 * kPi - 3.0 * k.alpha, 0.0);
    const double gamma_preferred = 2.5 * k.alpha;
    double gamma = -1.0;
    if (gamma_preferred <= gamma_max && feasible(gamma_preferred)) {
        gamma = gamma_preferred;
    } else {
        constexpr int kGrid = 128;
        int first = -1;
        for (int i = 0; i <= kGrid; ++i) {
            if (feasible(gamma_max * i / kGrid)) {
                first = i;
                break;
            }
        }
        if (first < 0) {
            throw InvariantViolation(
                "biter crescent: no feasible axis rotation keeps the new region nested");
        }
        if (first == 0) {
            gamma = 0.0;
        } else {
            double lo = gamma_max * (first - 1) / kGrid;
            double hi = gamma_max * first / kGrid;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(mid) ? hi : lo) = mid;
            }
            gamma = hi;
        }
    }
    StepResult out;
    out.region = candidate(gamma);
    out.label = "crescent_2";
    out.region_base = biter_index;
    return out;
}

}  // namespace detail

/// One shrink step from a square region. The largest disc biting the
/// concentric disc of radius 1.5 r either is small enough for a concentric
/// half-size square or becomes the base of a crescent facing the center.
inline StepResult square_step(const SquareRegion& sq, const DiscPacking& packing,
                              const Constants& k) {
    detail::assert_hypothesis(sq, sq.r, packing.discs, packing.eps, "square step");
    const Disc probe{sq.center, 1.5 * sq.r};
    const int bi = detail::largest_where(
        packing.discs, [&](const Disc& c) { return bites(c, probe, packing.eps); });
    if (bi < 0) {
        StepResult out;
        out.uncovered = sq.center;
        out.label = "uncovered";
        return out;
    }
    const Disc& c = packing.discs[static_cast<std::size_t>(bi)];
    if (c.radius > sq.r) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "square step: probe biter radius %.6g exceeds region scale %.6g", c.radius,
                      sq.r);
        throw InvariantViolation(buf);
    }
    StepResult out;
    if (c.radius <= 0.5 * sq.r) {
        out.region = SquareRegion{sq.center, 0.5 * sq.r, sq.angle};
        out.label = "square_a";
        return out;
    }
    const Vec2 d = sq.center - c.center;
    const double axis = norm(d) > 0.0 ? std::atan2(d.y, d.x) : 0.0;
    out.region = CrescentRegion{c, axis, 0.5 * k.alpha, k.beta};
    out.label = "square_b";
    out.region_base = bi;
    return out;
}

/// One shrink step from a crescent region. base_index is the position of
/// the crescent's base disc inside packing.discs (excluded from the probe
/// scans); pass -1 if the base is not part of the packing.
inline StepResult crescent_step(const CrescentRegion& cr, const DiscPacking& packing,
                                const Constants& k, int base_index) {
    const double rn = cr.base.radius;
    detail::assert_hypothesis(cr, rn, packing.discs, packing.eps, "crescent step");

    // The base always bites its own band; locate it if the caller did not.
    if (base_index < 0) {
        for (int i = 0; i < static_cast<int>(packing.discs.size()); ++i) {
            const Disc& d = packing.discs[static_cast<std::size_t>(i)];
            if (d.center.x == cr.base.center.x && d.center.y == cr.base.center.y &&
                d.radius == cr.base.radius) {
                base_index = i;
                break;
            }
        }
    }

    const CrescentRegion band{cr.base, cr.axis, cr.half_angle, k.ring_frac};
    const int bi = detail::largest_where(
        packing.discs, [&](const Disc& c) { return bites(c, band, packing.eps); }, base_index);
    if (bi < 0) {
        StepResult out;
        out.uncovered =
            cr.base.center + (rn * (1.0 + 0.5 * k.ring_frac)) * detail::from_angle(cr.axis);
        out.label = "uncovered";
        return out;
    }
    const Disc& c = packing.discs[static_cast<std::size_t>(bi)];
    if (c.radius <= k.r_small * rn) {
        StepResult out;
        out.region = detail::band_square(cr.base, cr.axis, k);
        out.label = "crescent_1";
        return out;
    }
    if (c.radius <= k.r_big * rn)
        return detail::biter_crescent(cr, cr.base, cr.axis, packing.discs, bi, k, -1);

    // Large biter: its enlargement shadows an angular interval of the band.
    // The window rescans an arc_prime-wide strip adjacent to the shadow,
    // where only small discs can reach.
    if (k.arc_prime <= 0.0 || k.r_prime_max <= 0.0)
        throw ConfigurationError("crescent step needs calibrated constants (run calibrate first)");
    const Vec2 v = c.center - cr.base.center;
    const double rho_c = norm(v) / rn;
    const double psi = detail::wrap_pi(std::atan2(v.y, v.x) - cr.axis);
    const double a_out = 1.0 + k.ring_frac;
    const double reach = (1.0 + packing.eps) * c.radius / rn;
    const double kos = (a_out * a_out + rho_c * rho_c - reach * reach) / (2.0 * a_out * rho_c);
    const double hw = cr.half_angle;
    double sh_lo, sh_hi;
    if (kos >= 1.0) {
        sh_lo = sh_hi = std::clamp(psi, -hw, hw);
    } else if (kos <= -1.0) {
        sh_lo = -hw;
        sh_hi = hw;
    } else {
        const double phi0 = std::acos(kos);
        sh_lo = std::max(-hw, psi - phi0);
        sh_hi = std::min(hw, psi + phi0);
        if (sh_lo > sh_hi) sh_lo = sh_hi = std::clamp(psi, -hw, hw);
    }
    const double free_lo = sh_lo + hw;
    const double free_hi = hw - sh_hi;
    double win_lo;
    if (free_lo >= free_hi) {
        if (free_lo < k.arc_prime)
            throw CalibrationError("D", "free arc beside a large biter is narrower than arc_prime");
        win_lo = sh_lo - k.arc_prime;
    } else {
        if (free_hi < k.arc_prime)
            throw CalibrationError("D", "free arc beside a large biter is narrower than arc_prime");
        win_lo = sh_hi;
    }
    const CrescentRegion strip{cr.base, cr.axis + win_lo + 0.5 * k.arc_prime, 0.5 * k.arc_prime,
                               k.ring_frac};
    const int bj = detail::largest_where(
        packing.discs, [&](const Disc& d2) { return bites(d2, strip, packing.eps); }, base_index,
        bi);
    if (bj < 0) {
        StepResult out;
        out.uncovered =
            cr.base.center + (rn * (1.0 + 0.5 * k.ring_frac)) * detail::from_angle(strip.axis);
        out.label = "crescent_3/uncovered";
        return out;
    }
    const Disc& c2 = packing.discs[static_cast<std::size_t>(bj)];
    if (c2.radius > k.r_prime_max * rn) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "crescent step: strip biter radius %.6g exceeds r_prime_max * r_n = %.6g",
                      c2.radius, k.r_prime_max * rn);
        throw InvariantViolation(buf);
    }
    if (c2.radius <= k.r_small * rn) {
        StepResult out;
        out.region = detail::band_square(cr.base, strip.axis, k);
        out.label = "crescent_3/crescent_1";
        return out;
    }
    StepResult out = detail::biter_crescent(cr, cr.base, cr.axis, packing.discs, bj, k, bi);
    out.label = "crescent_3/crescent_2";
    return out;
}

/// Throws ConfigurationError unless every radius lies in (0, 1] and all
/// disc interiors are pairwise disjoint.
inline void validate_packing(const DiscPacking& packing) {
    const auto& d = packing.discs;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i].radius > 0.0) || d[i].radius > 1.0)
            throw ConfigurationError("disc packing: radius outside (0, 1]");
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const double gap = dist(d[i].center, d[j].center) - (d[i].radius + d[j].radius);
            if (gap < -1e-9)
                throw ConfigurationError("disc packing: overlapping discs");
        }
    }
}

/// Runs the full chase from a 4x4 axis-aligned square centered at center.
/// Returns a point provably missed by the (1+eps)-enlargement of the
/// packing, together with the region trace that found it.
inline ChaseResult chase(const DiscPacking& packing, Point2 center, const Constants& k) {
    if (k.arc_prime <= 0.0 || k.r_prime_max <= 0.0)
        throw ConfigurationError("chase needs calibrated constants (run calibrate first)");
    validate_packing(packing);

    ChaseTrace trace;
    Region cur = SquareRegion{center, 1.0, 0.0};
    int cur_base = -1;
    constexpr int kMaxSteps = 10000;
    for (int step = 0; step < kMaxSteps; ++step) {
        trace.regions.push_back(cur);
        StepResult res;
        if (const auto* sq = std::get_if<SquareRegion>(&cur))
            res = square_step(*sq, packing, k);
        else
            res = crescent_step(std::get<CrescentRegion>(cur), packing, k, cur_base);
        trace.case_labels.push_back(res.label);
        if (res.uncovered) {
            const Point2 p = *res.uncovered;
            for (std::size_t i = 0; i < packing.discs.size(); ++i) {
                const Disc& c = packing.discs[i];
                if (dist(p, c.center) <= (1.0 + packing.eps) * c.radius) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf,
                                  "chase: candidate point is still covered by disc %zu", i);
                    throw InvariantViolation(buf);
                }
            }
            return ChaseResult{p, std::move(trace)};
        }
        cur = *res.region;
        cur_base = res.region_base;
    }
    throw InvariantViolation("chase: step limit exceeded without certifying a point");
}

namespace detail {

/// Angular half-width of the shadow a just-tangent large biter casts on the
/// outer rim of the probe band, at normalized scale r_n = 1.
inline double shadow_halfwidth(double rho_c, double reach, double a_out) {
    const double kos = (a_out * a_out + rho_c * rho_c - reach * reach) / (2.0 * a_out * rho_c);
    if (kos >= 1.0) return 0.0;
    if (kos <= -1.0) return kPi;
    return std::acos(kos);
}

/// Largest radius t for which a disc tangent to both the unit base disc and
/// a just-tangent biter of radius r_hat can bite the rescan strip. Returns 0
/// when no grid point bites. The candidate disc is pinned by the two
/// tangencies, leaving the scan one-dimensional in t.
inline double doubly_tangent_bite_radius(const Constants& k, double arc_prime, double r_hat) {
    const double eps = k.eps;
    const double rho_c = 1.0 + r_hat;
    const double phi0 = shadow_halfwidth(rho_c, (1.0 + eps) * r_hat, 1.0 + k.ring_frac);
    const CrescentRegion strip{Disc{{0.0, 0.0}, 1.0}, phi0 + 0.5 * arc_prime, 0.5 * arc_prime,
                               k.ring_frac};
    const auto bites_strip = [&](double t) {
        const double x =
            ((1.0 + t) * (1.0 + t) + rho_c * rho_c - (r_hat + t) * (r_hat + t)) / (2.0 * rho_c);
        const double y2 = (1.0 + t) * (1.0 + t) - x * x;
        if (y2 < 0.0) return false;
        return bites(Disc{{x, std::sqrt(y2)}, t}, strip, eps);
    };
    constexpr int kGrid = 256;
    const double t_lo = 1e-6, t_hi = k.r_big;
    const double step = std::log(t_hi / t_lo) / (kGrid - 1);
    double found = -1.0, above = t_hi;
    for (int i = kGrid - 1; i >= 0; --i) {
        const double t = t_lo * std::exp(step * i);
        if (bites_strip(t)) {
            found = t;
            break;
        }
        above = t;
    }
    if (found < 0.0) return 0.0;
    double lo = found, hi = above;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bites_strip(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

/// Audits every inequality the chase's case analysis relies on. Constants
/// with arc_prime / r_prime_max still unset fail the checks that need them;
/// calibrate() produces values that pass.
inline AuditReport audit_constants(const Constants& k) {
    AuditReport rep;
    const auto add = [&](std::string name, bool pass, double value, double bound,
                         std::string detail_text) {
        rep.checks.push_back(
            {std::move(name), pass, value, bound, std::move(detail_text)});
    };

    const bool order =
        0.0 < k.eps && k.eps < k.beta && k.beta < k.alpha && k.alpha < 0.5 * kPi;
    add("order", order, k.eps, k.alpha, "0 < eps < beta < alpha < pi/2");

    // (A) a crescent built on a mid-sized biter stays inside the base
    // disc's beta-band: the far corner of the rotated window must not
    // leave radius (1 + beta) r_n. Worst case is the largest such biter.
    {
        const double r = k.r_big;
        const double reach = 1.0 + k.ring_frac + k.eps * r;
        const double lhs = reach * reach +
                           2.0 * (1.0 + k.ring_frac + (1.0 + k.eps) * r) * r *
                               (1.0 - std::cos(3.0 * k.alpha));
        const double rhs = (1.0 + k.beta) * (1.0 + k.beta);
        add("A", lhs < rhs, lhs, rhs, "corner reach of a rotated biter crescent");
    }

    // (B) the band of a small-case square's biter still clears the
    // enlargement: positive angular slack after subtracting beta.
    {
        const double slack = 1.0 - std::cos(2.0 * k.alpha) - k.beta;
        const double lhs = 1.0 + 2.0 * k.r_small * slack;
        const double rhs = (1.0 + k.eps) * (1.0 + k.eps);
        add("B", slack > 0.0 && lhs > rhs, lhs, rhs,
            "small-biter clearance across the band");
    }

    // (C) the crescent window is wide enough that a mid-sized biter cannot
    // shadow all of it.
    {
        const double lhs = std::sin(0.5 * k.alpha);
        const double rhs = (1.0 + k.beta) * k.r_big * std::sin(3.0 * k.alpha);
        add("C", lhs > rhs, lhs, rhs, "window width versus biter shadow");
    }

    // (D) a large biter leaves a free arc on the band: worst case is a
    // just-tangent biter of radius r_n centered mid-window, which minimizes
    // the longer free side.
    double free_worst = 0.0;
    {
        const double phi0 =
            detail::shadow_halfwidth(2.0, 1.0 + k.eps, 1.0 + k.ring_frac);
        free_worst = 0.5 * k.alpha - phi0;
        const bool pass = free_worst > 0.0 && (k.arc_prime <= 0.0 || free_worst >= k.arc_prime);
        add("D", pass, free_worst, k.arc_prime, "free arc beside the widest shadow");
    }

    // (E) discs able to bite the rescan strip while wedged between the base
    // disc and a just-tangent large biter are capped well below r_big.
    {
        const double arc = k.arc_prime > 0.0 ? k.arc_prime : 0.9 * std::max(free_worst, 0.0);
        double bite_cap = 0.0;
        if (arc > 0.0) bite_cap = detail::doubly_tangent_bite_radius(k, arc, k.r_big);
        const bool pass = bite_cap > 0.0 && k.r_prime_max > 0.0 && bite_cap <= k.r_prime_max &&
                          k.r_prime_max < k.r_big;
        add("E", pass, bite_cap, k.r_prime_max, "largest strip biter between two tangent discs");
    }

    // (F) the small-case square fits the probe band radially and angularly.
    {
        const double s = k.sq_side_factor;
        const double m = 0.5 * (k.ring_frac - k.eps - s);
        bool pass = m > 0.0;
        double corner = 0.0;
        const double rim = 1.0 + k.ring_frac;
        if (pass) {
            const double cx = 1.0 + k.eps + m + 0.5 * s;
            corner = std::hypot(cx + 0.5 * s, 0.5 * s);
            pass = corner <= rim;
            const double half_ang = std::atan2(0.5 * s, 1.0 + k.eps);
            pass = pass && half_ang <= 0.5 * k.alpha &&
                   (k.arc_prime <= 0.0 || half_ang <= 0.5 * k.arc_prime);
        }
        add("F", pass, corner, rim, "band square fits inside the probe band");
    }

    rep.all_pass = true;
    for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
    return rep;
}

/// Deterministic plain-text rendering of an audit report.
inline std::string audit_report_text(const AuditReport& rep) {
    std::string out;
    char buf[256];
    for (const auto& c : rep.checks) {
        std::snprintf(buf, sizeof buf, "check (%s): %s  value=%.8g bound=%.8g  %s\n",
                      c.name.c_str(), c.pass ? "PASS" : "FAIL", c.value, c.bound,
                      c.detail.c_str());
        out += buf;
    }
    out += rep.all_pass ? "overall: PASS\n" : "overall: FAIL\n";
    return out;
}

namespace detail {

/// Fills arc_prime and r_prime_max for the given base constants, throwing
/// CalibrationError on the first check that cannot be satisfied.
inline Constants calibrate_fill(Constants k) {
    if (!(0.0 < k.eps && k.eps < k.beta && k.beta < k.alpha && k.alpha < 0.5 * kPi))
        throw CalibrationError("order", "need 0 < eps < beta < alpha < pi/2");
    const double phi0 = shadow_halfwidth(2.0, 1.0 + k.eps, 1.0 + k.ring_frac);
    const double free_worst = 0.5 * k.alpha - phi0;
    if (free_worst <= 0.0)
        throw CalibrationError("D", "the widest shadow leaves no free arc");
    k.arc_prime = 0.9 * free_worst;
    // Surface structural failures before deriving the strip biter cap; only
    // (E) legitimately depends on r_prime_max, which is still unset here.
    {
        const AuditReport pre = audit_constants(k);
        for (const auto& c : pre.checks)
            if (!c.pass && c.name != "E")
                throw CalibrationError(c.name, "audit check failed during calibration");
    }
    const double bite_cap = doubly_tangent_bite_radius(k, k.arc_prime, k.r_big);
    if (bite_cap <= 0.0)
        throw CalibrationError("E", "strip biter scan found no bound");
    k.r_prime_max = 1.1 * bite_cap;
    if (k.r_prime_max >= k.r_big)
        throw CalibrationError("E", "strip biter cap reaches r_big");
    const AuditReport rep = audit_constants(k);
    if (!rep.all_pass) {
        for (const auto& c : rep.checks)
            if (!c.pass) throw CalibrationError(c.name, "audit check failed after calibration");
    }
    return k;
}

}  // namespace detail

/// Derives arc_prime and r_prime_max from the base constants and reports
/// the largest enlargement factor eps_max for which the full audit still
/// passes (with per-trial recalibration). The returned constants keep the
/// input eps.
inline CalibrationResult calibrate(const Constants& base) {
    CalibrationResult out;
    out.constants = detail::calibrate_fill(base);
    const auto feasible = [&](double eps) {
        Constants trial = base;
        trial.eps = eps;
        try {
            detail::calibrate_fill(trial);
            return true;
        } catch (const CalibrationError&) {
            return false;
        }
    };
    double lo = base.eps, hi = base.beta;
    if (feasible(hi)) {
        out.eps_max = hi;
        return out;
    }
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    out.eps_max = lo;
    return out;
}

/// Row-major grid scan for a point missed by the enlarged packing. Slow and
/// exhaustive on purpose: an independent cross-check for chase results.
inline std::optional<Point2> brute_force_uncovered(const DiscPacking& packing, const Box2& box,
                                                   double grid_step) {
    if (!(grid_step > 0.0)) throw ConfigurationError("brute force scan needs a positive step");
    for (double y = box.lo.y; y <= box.hi.y + 0.5 * grid_step; y += grid_step) {
        for (double x = box.lo.x; x <= box.hi.x + 0.5 * grid_step; x += grid_step) {
            const Point2 p{x, y};
            bool covered = false;
            for (const Disc& c : packing.discs) {
                if (dist(p, c.center) <= (1.0 + packing.eps) * c.radius) {
                    covered = true;
                    break;
                }
            }
            if (!covered) return p;
        }
    }
    return std::nullopt;
}

/// Rejection-samples discs with centers in region and radii in
/// [radius_lo, radius_hi], keeping each candidate that stays interior
/// disjoint from all kept discs, until 1000 draws in a row fail.
inline DiscPacking random_greedy_packing(std::uint64_t seed, const Box2& region, double radius_lo,
                                         double radius_hi, double eps) {
    if (!(radius_lo > 0.0) || radius_hi > 1.0 || radius_lo > radius_hi)
        throw ConfigurationError("greedy packing radii must satisfy 0 < lo <= hi <= 1");
    DiscPacking packing;
    packing.eps = eps;
    SplitMix64 rng(seed);
    int rejected = 0;
    while (rejected < 1000) {
        Disc cand;
        cand.center.x = rng.uniform(region.lo.x, region.hi.x);
        cand.center.y = rng.uniform(region.lo.y, region.hi.y);
        cand.radius = rng.uniform(radius_lo, radius_hi);
        bool ok = true;
        for (const Disc& c : packing.discs) {
            if (dist(c.center, cand.center) < c.radius + cand.radius) {
                ok = false;
                break;
            }
        }
        if (ok) {
            packing.discs.push_back(cand);
            rejected = 0;
        } else {
            ++rejected;
        }
    }
    return packing;
}

/// Deterministic plain-text rendering of a chase trace.
inline std::string chase_trace_text(const ChaseTrace& trace) {
    std::string out;
    char buf[256];
    for (std::size_t i = 0; i < trace.regions.size(); ++i) {
        const Region& r = trace.regions[i];
        const char* label = i < trace.case_labels.size() ? trace.case_labels[i].c_str() : "?";
        if (const auto* s = std::get_if<SquareRegion>(&r)) {
            std::snprintf(buf, sizeof buf,
                          "step %3zu: square  r=%-12.6g center=(%.6g, %.6g) angle=%.6g -> %s\n",
                          i + 1, s->r, s->center.x, s->center.y, s->angle, label);
        } else {
            const auto& c = std::get<CrescentRegion>(r);
            std::snprintf(
                buf, sizeof buf,
                "step %3zu: crescent r=%-12.6g center=(%.6g, %.6g) axis=%.6g -> %s\n", i + 1,
                c.base.radius, c.base.center.x, c.base.center.y, c.axis, label);
        }
        out += buf;
    }
    return out;
}

}  // namespace packcover
