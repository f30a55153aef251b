#include <catch2/catch_amalgamated.hpp>

#include "packcover/geom.hpp"
#include "packcover/rng.hpp"

using namespace packcover;
using Catch::Approx;

namespace {

Ellipse random_ellipse(SplitMix64& rng, double pos_scale = 3.0) {
    const double a = rng.uniform(0.3, 2.0);
    const double b = rng.uniform(0.3, a);
    const double ang = rng.uniform(0.0, kPi);
    return Ellipse::from_canonical({rng.uniform(-pos_scale, pos_scale), rng.uniform(-pos_scale, pos_scale)},
                                   a, b, ang);
}

Ellipse unit_disc_at(Point2 c, double r = 1.0) { return Ellipse::from_canonical(c, r, r, 0.0); }

}  // namespace

TEST_CASE("vector and matrix basics") {
    const Vec2 u{3.0, 4.0};
    CHECK(norm(u) == Approx(5.0));
    CHECK(dot(u, perp(u)) == 0.0);
    CHECK(cross(u, perp(u)) == Approx(norm_sq(u)));

    const Mat2 r = Mat2::rotation(kPi / 3);
    CHECK(r.det() == Approx(1.0));
    const Mat2 ri = r.inverse();
    const Mat2 id = r * ri;
    CHECK(id.a == Approx(1.0));
    CHECK(id.b == Approx(0.0).margin(1e-15));
    CHECK(id.c == Approx(0.0).margin(1e-15));
    CHECK(id.d == Approx(1.0));

    CHECK(sigma_min(Mat2::diagonal(2.0, 0.5)) == Approx(0.5));
    CHECK(sigma_max(Mat2::diagonal(2.0, 0.5)) == Approx(2.0));
    CHECK(sigma_min(r * Mat2::diagonal(3.0, 1.5)) == Approx(1.5));
    CHECK(sigma_max(r * Mat2::diagonal(3.0, 1.5)) == Approx(3.0));

    CHECK_THROWS_AS((Mat2{0.0, 0.0, 0.0, 0.0}.inverse()), std::invalid_argument);
}

TEST_CASE("affine maps from point correspondences") {
    const std::array<Point2, 3> src = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    const std::array<Point2, 3> dst = {{{2.0, 1.0}, {3.0, 1.5}, {1.5, 2.0}}};
    const AffineMap2 m = AffineMap2::from_points(src, dst);
    for (int i = 0; i < 3; ++i) {
        const Point2 got = m(src[static_cast<std::size_t>(i)]);
        const Point2 want = dst[static_cast<std::size_t>(i)];
        CHECK(dist(got, want) < 1e-14);
    }
    const AffineMap2 comp = m * m.inverse();
    const Point2 p{0.3, -0.7};
    CHECK(dist(comp(p), p) < 1e-13);

    const std::array<Point2, 3> degenerate = {{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}};
    CHECK_THROWS_AS(AffineMap2::from_points(degenerate, dst), std::invalid_argument);
}

TEST_CASE("triangle invariants and base accessors") {
    CHECK_THROWS_AS(Triangle({0, 0}, {0, 1}, {1, 0}, 0), std::invalid_argument);  // clockwise
    CHECK_THROWS_AS(Triangle({0, 0}, {1, 0}, {2, 0}, 0), std::invalid_argument);  // collinear
    CHECK_THROWS_AS(Triangle({0, 0}, {1, 0}, {0, 1}, 3), std::invalid_argument);

    const Triangle t{{0, 0}, {4, 0}, {1, 3}, 0};
    CHECK(t.base_from().x == 0.0);
    CHECK(t.base_to().x == 4.0);
    CHECK(t.apex().y == 3.0);
    CHECK(t.height() == Approx(3.0));
    CHECK(t.signed_area() == Approx(6.0));
    CHECK(t.contains({1.0, 1.0}));
    CHECK_FALSE(t.contains({3.5, 2.0}));
    CHECK(t.base_line_distance({2.0, -1.5}) == Approx(-1.5));

    const Triangle side1{{0, 0}, {4, 0}, {1, 3}, 1};
    CHECK(side1.base_from().x == 4.0);
    CHECK(side1.apex().x == 0.0);
}

TEST_CASE("enlarge scales about the center") {
    const Ellipse disc = unit_disc_at({0, 0});
    const Ellipse grown = enlarge(disc, 1.1);
    CHECK(grown.semi_major() == Approx(1.1));
    CHECK(grown.semi_minor() == Approx(1.1));
    CHECK(grown.center().x == 0.0);

    const Ellipse e = Ellipse::from_canonical({3, 0}, 2.0, 1.0, 0.0);
    const Ellipse e15 = enlarge(e, 1.5);
    CHECK(e15.center().x == Approx(3.0));
    CHECK(e15.center().y == Approx(0.0));
    CHECK(e15.semi_major() == Approx(3.0));
    CHECK(e15.semi_minor() == Approx(1.5));

    const Ellipse tilted = Ellipse::from_canonical({-1, 2}, 2.0, 1.0, kPi / 6);
    const Ellipse t15 = enlarge(tilted, 1.5);
    CHECK(t15.angle() == Approx(kPi / 6));

    const Ellipse same = enlarge(tilted, 1.0);
    CHECK(same.semi_major() == Approx(tilted.semi_major()).epsilon(1e-13));
    CHECK(same.semi_minor() == Approx(tilted.semi_minor()).epsilon(1e-13));
    CHECK(same.angle() == Approx(tilted.angle()).margin(1e-13));

    CHECK_THROWS_AS(enlarge(disc, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(enlarge(disc, -2.0), std::invalid_argument);

    const Disc d{{1, 1}, 0.5};
    CHECK(enlarge(d, 2.0).radius == Approx(1.0));
    CHECK_THROWS_AS(enlarge(d, 0.0), std::invalid_argument);
}

TEST_CASE("point location against an ellipse") {
    const Ellipse disc = unit_disc_at({0, 0});
    CHECK(point_location(disc, {0, 0}) == Location::interior);
    CHECK(point_location(disc, {1, 0}, 1e-12) == Location::boundary);
    CHECK(point_location(disc, {2, 0}) == Location::exterior);

    const Ellipse e = Ellipse::from_canonical({0, 0}, 2.0, 1.0, 0.0);
    CHECK(point_location(e, {0.0, 1.5}) == Location::exterior);
    CHECK(point_location(e, {1.9, 0.0}) == Location::interior);
    CHECK(point_location(e, {0.0, -1.0}, 1e-12) == Location::boundary);

    CHECK(contains(disc, {0.5, 0.5}));
    CHECK_FALSE(contains(disc, {1.5, 0.0}));
}

TEST_CASE("separation criterion hand values for circle pairs") {
    const Ellipse a = unit_disc_at({0, 0});
    CHECK(separation_criterion(a, unit_disc_at({3, 0})) == Approx(1.25).margin(1e-12));
    CHECK(separation_criterion(a, unit_disc_at({2, 0})) == Approx(0.0).margin(1e-12));
    CHECK(separation_criterion(a, unit_disc_at({1, 0})) == Approx(-0.75).margin(1e-12));
    // Coincident ellipses: the pencil is constant det(diag(1,1,-1)) = -1.
    CHECK(separation_criterion(a, a) == Approx(-1.0).margin(1e-12));
}

TEST_CASE("interiors_disjoint classifies the contract examples") {
    const Ellipse a = unit_disc_at({0, 0});
    CHECK(interiors_disjoint(a, unit_disc_at({2.0, 0.0})) == Disjointness::tangent);
    CHECK(interiors_disjoint(a, unit_disc_at({2.1, 0.0})) == Disjointness::disjoint);

    const Ellipse wide = Ellipse::from_canonical({0, 0}, 2.0, 1.0, 0.0);
    CHECK(interiors_disjoint(wide, unit_disc_at({2.5, 0.0})) == Disjointness::overlap);

    // Containment counts as overlap, including internal tangency.
    CHECK(interiors_disjoint(a, unit_disc_at({0.25, 0.0}, 0.25)) == Disjointness::overlap);
    CHECK(interiors_disjoint(a, unit_disc_at({0.5, 0.0}, 0.5)) == Disjointness::overlap);

    // External tangency of rotated ellipses: two 2x1 ellipses side by side.
    const Ellipse left = Ellipse::from_canonical({-2, 0}, 2.0, 1.0, 0.0);
    const Ellipse right = Ellipse::from_canonical({2, 0}, 2.0, 1.0, 0.0);
    CHECK(interiors_disjoint(left, right) == Disjointness::tangent);
}

TEST_CASE("sliver ellipses are classified reliably") {
    // Deep tilings emit near-segment tiles with aspect ratios around 1e4.
    // Against a fat neighbour those drown the cubic separation value in
    // rounding noise, so the classification must not be built on its sign.
    // The clearances below are exact by construction: the slivers run
    // parallel to the fat ellipse's topmost point.
    const Ellipse fat = Ellipse::from_canonical({0, 0}, 0.4, 0.1, 0.0);
    const auto sliver = [](double clearance, double b) {
        return Ellipse::from_canonical({0.0, 0.1 + clearance + b}, 0.1131, b, 0.0);
    };

    const auto both_ways = [](const Ellipse& e1, const Ellipse& e2) {
        const Disjointness d = interiors_disjoint(e1, e2);
        REQUIRE(interiors_disjoint(e2, e1) == d);
        return d;
    };

    for (const double b : {1e-5, 9.64e-6, 1e-7}) {
        CAPTURE(b);
        CHECK(both_ways(fat, sliver(1e-4, b)) == Disjointness::disjoint);
        CHECK(both_ways(fat, sliver(1e-6, b)) == Disjointness::disjoint);
        CHECK(both_ways(fat, sliver(0.0, b)) == Disjointness::tangent);
        CHECK(both_ways(fat, sliver(-2.0 * b, b)) == Disjointness::overlap);
    }

    // The verdicts survive a rigid motion of the pair.
    const AffineMap2 rigid{Mat2::rotation(0.7), {3.0, -2.0}};
    CHECK(both_ways(transformed(rigid, fat), transformed(rigid, sliver(1e-4, 1e-5))) ==
          Disjointness::disjoint);
    CHECK(both_ways(transformed(rigid, fat), transformed(rigid, sliver(-2e-5, 1e-5))) ==
          Disjointness::overlap);

    // Two parallel slivers with a hair of daylight between them.
    const Ellipse lo = Ellipse::from_canonical({0, 0}, 0.1, 1e-5, 0.0);
    const Ellipse hi = Ellipse::from_canonical({0, 2e-5 + 1e-8}, 0.1, 1e-5, 0.0);
    CHECK(both_ways(lo, hi) == Disjointness::disjoint);
    CHECK(both_ways(lo, Ellipse::from_canonical({0, 1.9e-5}, 0.1, 1e-5, 0.0)) ==
          Disjointness::overlap);
}

TEST_CASE("coverage margin for the circumscribed octagon") {
    const double sec8 = 1.0 / std::cos(kPi / 8);
    std::vector<Point2> verts;
    for (int k = 0; k < 8; ++k) {
        const double ang = kPi / 2 + k * kPi / 4;
        verts.push_back({sec8 * std::cos(ang), sec8 * std::sin(ang)});
    }
    const ConvexPolygon octagon{verts};
    const Ellipse enlarged = enlarge(unit_disc_at({0, 0}), 1.1);

    const double margin = coverage_margin(enlarged, octagon);
    CHECK(margin == Approx(1.1 - sec8).epsilon(1e-12));
    CHECK(margin == Approx(0.017608).margin(1e-6));

    // Not contained: margin goes negative.
    CHECK(coverage_margin(enlarge(unit_disc_at({0, 0}), 1.05), octagon) < 0.0);

    // Degenerate polygon input is rejected by the type invariant.
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);

    CHECK_THROWS_AS(coverage_margin(enlarged, std::span<const Point2>{}), std::invalid_argument);
}

TEST_CASE("coverage margin is a valid Euclidean clearance bound") {
    SplitMix64 rng{2024};
    for (int trial = 0; trial < 200; ++trial) {
        const Ellipse e = random_ellipse(rng);
        // A small triangle near the center is contained with positive margin.
        const Point2 c = e.center();
        const double s = 0.2 * e.semi_minor();
        const Triangle q{c + Vec2{-s, -s}, c + Vec2{s, -s}, c + Vec2{0.0, s}, 0};
        const double m = coverage_margin(e, q);
        REQUIRE(m > 0.0);
        // Any point within m of the triangle must still be inside the ellipse.
        for (int k = 0; k < 8; ++k) {
            const double ang = rng.uniform(0.0, 2 * kPi);
            const Point2 p = q.vertex(k % 3) + 0.999 * m * Vec2{std::cos(ang), std::sin(ang)};
            CHECK(point_location(e, p, 0.0) != Location::exterior);
        }
    }
}

TEST_CASE("enlargement composes multiplicatively") {
    SplitMix64 rng{7};
    for (int trial = 0; trial < 200; ++trial) {
        const Ellipse e = random_ellipse(rng);
        const double l1 = rng.uniform(1.0, 2.0), l2 = rng.uniform(1.0, 2.0);
        const Ellipse two = enlarge(enlarge(e, l1), l2);
        const Ellipse one = enlarge(e, l1 * l2);
        CHECK(two.semi_major() == Approx(one.semi_major()).epsilon(1e-12));
        CHECK(two.semi_minor() == Approx(one.semi_minor()).epsilon(1e-12));
        CHECK(dist(two.center(), one.center()) < 1e-12);
        const Mat2 sa = two.shape(), sb = one.shape();
        const double scale = std::abs(sb.a) + std::abs(sb.d);
        CHECK(std::abs(sa.a - sb.a) < 1e-12 * scale);
        CHECK(std::abs(sa.b - sb.b) < 1e-12 * scale);
        CHECK(std::abs(sa.d - sb.d) < 1e-12 * scale);
    }
}

TEST_CASE("disjointness is symmetric and rigid-motion invariant") {
    SplitMix64 rng{99};
    for (int trial = 0; trial < 500; ++trial) {
        const Ellipse e1 = random_ellipse(rng);
        const Ellipse e2 = random_ellipse(rng);
        CHECK(interiors_disjoint(e1, e2) == interiors_disjoint(e2, e1));

        const AffineMap2 rigid{Mat2::rotation(rng.uniform(0.0, 2 * kPi)),
                               {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)}};
        const double s1 = separation_criterion(e1, e2);
        const double s2 = separation_criterion(transformed(rigid, e1), transformed(rigid, e2));
        CHECK(s2 == Approx(s1).margin(1e-9).epsilon(1e-9));
    }
}

TEST_CASE("enlargement is monotone for point membership") {
    SplitMix64 rng{4242};
    for (int trial = 0; trial < 300; ++trial) {
        const Ellipse e = random_ellipse(rng);
        const Box2 bb = bounding_box(e);
        const Point2 p{rng.uniform(bb.lo.x, bb.hi.x), rng.uniform(bb.lo.y, bb.hi.y)};
        if (point_location(e, p) == Location::exterior) continue;
        for (const double lambda : {1.0001, 1.1, 2.0}) {
            CHECK(point_location(enlarge(e, lambda), p) == Location::interior);
        }
    }
}

TEST_CASE("disjointness agrees with a membership-sampling oracle") {
    SplitMix64 rng{314159};
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Ellipse e1 = random_ellipse(rng, 2.0);
        const Ellipse e2 = random_ellipse(rng, 2.0);
        const double sep = separation_criterion(e1, e2);
        if (std::abs(sep) < 1e-6) continue;  // borderline pair, oracle cannot resolve

        bool found_common = false;
        const auto sample_box = [&](const Ellipse& inner, const Ellipse& other) {
            const Box2 bb = bounding_box(inner);
            for (int k = 0; k < 10'000 && !found_common; ++k) {
                const Point2 p{rng.uniform(bb.lo.x, bb.hi.x), rng.uniform(bb.lo.y, bb.hi.y)};
                if (point_location(inner, p, 1e-9) == Location::interior &&
                    point_location(other, p, 1e-9) == Location::interior)
                    found_common = true;
            }
        };
        sample_box(e1, e2);
        if (!found_common) sample_box(e2, e1);

        const Disjointness verdict = interiors_disjoint(e1, e2);
        if (verdict == Disjointness::overlap) {
            CHECK(found_common);
        } else {
            CHECK_FALSE(found_common);
        }
        ++checked;
    }
    CHECK(checked > 900);
}

TEST_CASE("ellipse canonical form and bounding box") {
    const Ellipse e = Ellipse::from_canonical({1.0, -2.0}, 2.0, 1.0, kPi / 6);
    CHECK(e.semi_major() == Approx(2.0));
    CHECK(e.semi_minor() == Approx(1.0));
    CHECK(e.angle() == Approx(kPi / 6));
    CHECK(e.center().x == Approx(1.0));

    const Box2 bb = bounding_box(e);
    // Half extents: sqrt(a^2 cos^2 t + b^2 sin^2 t) along each axis.
    const double hx = std::sqrt(4.0 * 0.75 + 1.0 * 0.25);
    const double hy = std::sqrt(4.0 * 0.25 + 1.0 * 0.75);
    CHECK(bb.hi.x - 1.0 == Approx(hx));
    CHECK(bb.hi.y + 2.0 == Approx(hy));

    CHECK_THROWS_AS(Ellipse::from_canonical({0, 0}, 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Ellipse(Mat2{1.0, 2.0, 2.0, 4.0}, Point2{0, 0}), std::invalid_argument);

    // A negative-determinant map describes the same point set; the canonical
    // form is unaffected.
    const Ellipse flipped{Mat2{2.0, 0.0, 0.0, -1.0}, Point2{0, 0}};
    CHECK(flipped.map().linear.det() > 0.0);
    CHECK(flipped.semi_major() == Approx(2.0));
    CHECK(flipped.semi_minor() == Approx(1.0));
}

TEST_CASE("ellipse-box intersection") {
    const Ellipse disc = unit_disc_at({0, 0});
    CHECK(intersects(disc, Box2{{-0.1, -0.1}, {0.1, 0.1}}));        // box inside
    CHECK(intersects(disc, Box2{{-3, -3}, {3, 3}}));                // ellipse inside
    CHECK(intersects(disc, Box2{{-2, 0.9}, {2, 2}}));               // edge crossing, no corner inside
    CHECK(intersects(disc, Box2{{1.0, -0.1}, {2.0, 0.1}}));         // touching at x=1
    CHECK_FALSE(intersects(disc, Box2{{1.05, -0.1}, {2.0, 0.1}}));  // just clear
    CHECK_FALSE(intersects(disc, Box2{{5, 5}, {6, 6}}));            // far away

    const Ellipse e = Ellipse::from_canonical({0, 0}, 2.0, 0.2, kPi / 4);
    // Thin tilted ellipse spears a box whose corners are all outside it.
    CHECK(intersects(e, Box2{{0.5, 0.5}, {1.1, 1.1}}));
}
