#include <catch2/catch_amalgamated.hpp>

#include "packcover/inscription.hpp"
#include "packcover/rng.hpp"
#include "test_util.hpp"

using namespace packcover;
using Catch::Approx;

TEST_CASE("choose_n picks the least sufficient n") {
    CHECK(choose_n(1.5) == 2);
    CHECK(choose_n(1.1) == 4);
    CHECK(choose_n(1.01) == 12);
    CHECK(choose_n(1.42) == 2);  // sec(pi/4) = 1.41421 < 1.42
    CHECK_THROWS_AS(choose_n(1.0), std::invalid_argument);
    CHECK_THROWS_AS(choose_n(0.9), std::invalid_argument);

    for (const double lambda : {1.5, 1.1, 1.01, 1.003}) {
        const int n = choose_n(lambda);
        CHECK(1.0 / std::cos(kPi / (2.0 * n)) < lambda);
        if (n > 2) CHECK(1.0 / std::cos(kPi / (2.0 * (n - 1))) >= lambda);
    }
}

TEST_CASE("mu values") {
    CHECK(mu(2) == Approx(0.5));
    CHECK(mu(4) == Approx(0.853553).margin(1e-6));
    double prev = mu(2);
    for (int n = 3; n < 40; ++n) {
        CHECK(mu(n) > prev);
        CHECK(mu(n) < 1.0);
        prev = mu(n);
    }
    CHECK_THROWS_AS(mu(1), std::invalid_argument);
}

TEST_CASE("reference polygon for n=2 is the square") {
    const RegularGonSpec s = reference_polygon(2);
    const double r = std::sqrt(2.0);
    REQUIRE(s.vertices.size() == 4);
    CHECK(dist(s.vertices[0], {0.0, r}) < 1e-15);
    CHECK(dist(s.vertices[1], {-r, 0.0}) < 1e-15);
    CHECK(dist(s.vertices[2], {0.0, -r}) < 1e-15);
    CHECK(dist(s.vertices[3], {r, 0.0}) < 1e-15);
    CHECK(s.circumradius == Approx(r));
    // Base endpoints at x = +-2*sqrt(2), on the horizontal through the bottom vertex.
    CHECK(s.reference_triangle.base_from().x == Approx(-2.0 * r));
    CHECK(s.reference_triangle.base_from().y == Approx(-r));
    CHECK(s.reference_triangle.apex().y == Approx(r));
}

TEST_CASE("reference polygon geometry for general n") {
    const RegularGonSpec oct = reference_polygon(4);
    REQUIRE(oct.vertices.size() == 8);
    CHECK(oct.vertices[0].x == 0.0);
    CHECK(oct.vertices[0].y == Approx(1.082392).margin(1e-6));

    for (const int n : {2, 3, 4, 6, 9}) {
        const RegularGonSpec s = reference_polygon(n);
        const std::size_t count = s.vertices.size();
        REQUIRE(count == static_cast<std::size_t>(2 * n));
        // Vertices at radius sec(pi/(2n)), spaced pi/n, starting at pi/2.
        for (std::size_t k = 0; k < count; ++k) {
            CHECK(norm(s.vertices[k]) == Approx(s.circumradius).epsilon(1e-14));
            const double want = kPi / 2 + static_cast<double>(k) * kPi / n;
            const double got = std::atan2(s.vertices[k].y, s.vertices[k].x);
            const double diff = std::remainder(got - want, 2 * kPi);
            CHECK(std::abs(diff) < 1e-12);
        }
        // Every edge is tangent to the unit disc: distance to the origin is 1.
        for (std::size_t k = 0; k < count; ++k) {
            const Point2 p = s.vertices[k], q = s.vertices[(k + 1) % count];
            const double d = std::abs(cross(q - p, -1.0 * p)) / dist(p, q);
            CHECK(d == Approx(1.0).epsilon(1e-13));
        }
        // Mirror symmetry is exact by construction.
        for (int k = 1; k < n; ++k) {
            const Point2 l = s.vertices[static_cast<std::size_t>(k)];
            const Point2 rgt = s.vertices[static_cast<std::size_t>(2 * n - k)];
            CHECK(l.x == -rgt.x);
            CHECK(l.y == rgt.y);
        }
        // Base endpoints: intersections of the apex-edge lines with the
        // horizontal through the bottom vertex, at x = +-2/sin(pi/(2n)).
        const double b = 2.0 / std::sin(kPi / (2.0 * n));
        CHECK(s.reference_triangle.base_to().x == Approx(b).epsilon(1e-14));
        CHECK(s.reference_triangle.base_to().y == Approx(-s.circumradius));
        CHECK(s.base_half_width == Approx(b));
    }
    CHECK_THROWS_AS(reference_polygon(1), std::invalid_argument);
}

TEST_CASE("inscribing into the reference triangle is the identity") {
    const RegularGonSpec s = reference_polygon(4);
    const ProperTile tile = properly_inscribe(s.reference_triangle, s);
    CHECK(std::abs(tile.map.linear.a - 1.0) < 1e-14);
    CHECK(std::abs(tile.map.linear.b) < 1e-14);
    CHECK(std::abs(tile.map.linear.c) < 1e-14);
    CHECK(std::abs(tile.map.linear.d - 1.0) < 1e-14);
    CHECK(norm(tile.map.translation) < 1e-13);
    for (std::size_t k = 0; k < 8; ++k) CHECK(dist(tile.polygon[k], s.vertices[k]) < 1e-13);
    CHECK(is_properly_inscribed(tile, s.reference_triangle));
}

TEST_CASE("equilateral example: apex-adjacent chord height") {
    const RegularGonSpec s = reference_polygon(4);
    const double h = std::sqrt(3.0) / 2.0;
    const Triangle t{{0, 0}, {1, 0}, {0.5, h}, 0};
    const ProperTile tile = properly_inscribe(t, s);
    CHECK(tile.polygon[1].y == Approx(0.853553 * h).margin(1e-6));
    CHECK(tile.polygon[7].y == Approx(mu(4) * h).epsilon(1e-13));
    CHECK(is_properly_inscribed(tile, t));
}

TEST_CASE("proper inscription conditions hold for random triangles") {
    SplitMix64 rng{561};
    for (const int n : {2, 3, 4, 6}) {
        const RegularGonSpec s = reference_polygon(n);
        for (int trial = 0; trial < 40; ++trial) {
            const Triangle t = testutil::random_triangle(rng);
            const ProperTile tile = properly_inscribe(t, s);

            CHECK(inscription_violation(tile, t) < 1e-12);
            CHECK(is_properly_inscribed(tile, t));

            // Bottom vertex at the base midpoint.
            const Point2 mid = 0.5 * (t.base_from() + t.base_to());
            CHECK(dist(tile.polygon[static_cast<std::size_t>(n)], mid) < 1e-13);

            // Formula for the apex gap: distance from the apex to the chord
            // through the apex-adjacent vertices is (1 - cos(pi/n))/2 of the height.
            const double h = t.height();
            const double chord = t.base_line_distance(tile.polygon[1]);
            const double chord2 = t.base_line_distance(tile.polygon[2 * static_cast<std::size_t>(n) - 1]);
            CHECK(chord == Approx(chord2).epsilon(1e-10));
            CHECK((h - chord) / h == Approx(0.5 * (1.0 - std::cos(kPi / n))).epsilon(1e-10));

            // Height property: non-apex vertices at height <= mu*h, equality
            // exactly for the apex-adjacent pair.
            const double cap = mu(n) * h;
            for (std::size_t k = 1; k < tile.polygon.size(); ++k) {
                const double y = t.base_line_distance(tile.polygon[k]);
                CHECK(y <= cap * (1.0 + 1e-12));
                if (k != 1 && k != tile.polygon.size() - 1) CHECK(y < cap * (1.0 - 1e-6));
            }
        }
    }
}

TEST_CASE("enlarged inscribed ellipse covers the polygon when sec(pi/2n) < lambda") {
    SplitMix64 rng{8080};
    const struct {
        double lambda;
        int n;
    } cases[] = {{1.5, 2}, {1.1, 4}, {1.01, 12}};
    for (const auto& cs : cases) {
        const RegularGonSpec s = reference_polygon(cs.n);
        for (int trial = 0; trial < 25; ++trial) {
            const Triangle t = testutil::random_triangle(rng);
            const ProperTile tile = properly_inscribe(t, s);
            CHECK(coverage_margin(enlarge(tile.ellipse, cs.lambda), tile.polygon) > 0.0);
        }
    }
}
