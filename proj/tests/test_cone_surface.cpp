#include <doctest.h>

#include "support.hpp"

using namespace hypdual;
using namespace hypdual::cone;
using testsupport::kPi;

TEST_SUITE("cone_surface") {
  TEST_CASE("combinatorial validation") {
    const CombSurface s = testsupport::tetra_surface();
    CHECK(s.num_edges() == 6);
    CHECK(s.euler_characteristic() == 2);
    CHECK(s.genus() == 0);
    for (int h = 0; h < s.num_halfedges(); ++h) {
      CHECK(s.twin(s.twin(h)) == h);
      CHECK(s.tail(s.twin(h)) == s.head(h));
    }
    auto expect_invalid = [](auto&& make) {
      try {
        make();
        FAIL("expected InvalidSurface");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidSurface);
      }
    };
    // An open disk.
    expect_invalid([] { CombSurface::from_triangles(3, {{{0, 1, 2}}}); });
    // Inconsistent orientation.
    expect_invalid([] { CombSurface::from_triangles(3, {{{0, 1, 2}}, {{0, 1, 2}}}); });
    // Two spheres sharing a vertex: not a disk neighbourhood.
    expect_invalid([] {
      CombSurface::from_triangles(5, {{{0, 1, 2}}, {{0, 2, 1}}, {{0, 3, 4}}, {{0, 4, 3}}});
    });
  }

  TEST_CASE("cone angles against the spherical law of cosines") {
    // Equilateral spherical triangle with side pi/2: cos a = cos^2 a + sin^2 a cos A gives A = pi/2.
    const ConeMetric m = testsupport::doubled_triangle(Geometry::Spherical, kPi / 2, kPi / 2, kPi / 2);
    for (int v = 0; v < 3; ++v) CHECK(cone_angle(m, v) == doctest::Approx(kPi).epsilon(1e-12));

    // Scalene triangle.
    const double a = 0.9, b = 1.2, c = 1.4;
    const ConeMetric s = testsupport::doubled_triangle(Geometry::Spherical, a, b, c);
    const double A = std::acos((std::cos(a) - std::cos(b) * std::cos(c)) / (std::sin(b) * std::sin(c)));
    const double B = std::acos((std::cos(b) - std::cos(a) * std::cos(c)) / (std::sin(a) * std::sin(c)));
    const double C = std::acos((std::cos(c) - std::cos(a) * std::cos(b)) / (std::sin(a) * std::sin(b)));
    // Vertex 2 faces the edge {0,1} of length c, and so on.
    CHECK(cone_angle(s, 2) == doctest::Approx(2 * C).epsilon(1e-12));
    CHECK(cone_angle(s, 0) == doctest::Approx(2 * A).epsilon(1e-12));
    CHECK(cone_angle(s, 1) == doctest::Approx(2 * B).epsilon(1e-12));
    CHECK(s.total_area() == doctest::Approx(2 * (A + B + C - kPi)).epsilon(1e-12));
  }

  TEST_CASE("hyperbolic double is convex") {
    const double a = 1.0, b = 1.3, c = 0.8;
    const ConeMetric m = testsupport::doubled_triangle(Geometry::Hyperbolic, a, b, c);
    const double A = std::acos((std::cosh(b) * std::cosh(c) - std::cosh(a)) / (std::sinh(b) * std::sinh(c)));
    CHECK(cone_angle(m, 0) == doctest::Approx(2 * A).epsilon(1e-12));
    for (double th : cone_angles(m)) CHECK(th < kTwoPi);
    CHECK(std::abs(gauss_bonnet_residual(m)) < 1e-12);
  }

  TEST_CASE("regular tetrahedron dual metric") {
    for (double theta : {1.06, 1.12, 1.2}) {
      const testsupport::TetraOracle o(theta);
      const auto d = poly::dualize(poly::hull_from_dual_points(poly::regular_tetrahedron_planes(theta)));
      for (double th : cone_angles(d.metric)) CHECK(std::abs(th - o.dual_cone_angle) < 1e-9);
      CHECK(std::abs(gauss_bonnet_residual(d.metric)) < 1e-9);
    }
  }

  TEST_CASE("concavity") {
    const auto d = poly::dualize(poly::hull_from_dual_points(poly::cube_planes(0.5)));
    const auto rep = is_concave(d.metric);
    CHECK(rep.concave);
    CHECK(rep.min_margin > 0);

    const ConeMetric small = testsupport::doubled_triangle(Geometry::Spherical, 0.1, 0.1, 0.1);
    CHECK_FALSE(is_concave(small).concave);

    const auto round = is_concave(testsupport::round_sphere());
    CHECK_FALSE(round.concave);
    CHECK(std::abs(round.min_margin) < 1e-12);
  }

  TEST_CASE("gauss-bonnet") {
    const ConeMetric round = testsupport::round_sphere();
    CHECK(round.total_area() == doctest::Approx(4 * kPi).epsilon(1e-12));
    CHECK(std::abs(gauss_bonnet_residual(round)) < 1e-12);

    // Regular octagon with angles pi/4 and sides glued a b a^-1 b^-1 c d c^-1 d^-1:
    // a smooth hyperbolic genus-2 surface with one marked vertex.
    const double side = 2.0 * std::acosh(std::cos(kPi / 8) / std::sin(kPi / 8));
    GluedPolygon oct;
    oct.corner_vertex.assign(8, 0);
    oct.corner_angle.assign(8, kPi / 4);
    oct.side_length.assign(8, side);
    oct.side_key = {0, 1, 0, 1, 2, 3, 2, 3};
    const auto asm_ = assemble_polygons(Geometry::Hyperbolic, 1, {oct});
    CHECK(asm_.metric.surface().euler_characteristic() == -2);
    CHECK(asm_.metric.surface().num_edges() == 3 * (1 - (-2)));
    CHECK(asm_.max_closure_error < 1e-9);
    CHECK(cone_angle(asm_.metric, 0) == doctest::Approx(kTwoPi).epsilon(1e-9));
    CHECK(std::abs(gauss_bonnet_residual(asm_.metric)) < 1e-9);
  }

  TEST_CASE("scaling") {
    const ConeMetric round = testsupport::round_sphere();
    CHECK(scale(round, 0.0).lengths() == round.lengths());
    try {
      scale(round, 1.0);
      FAIL("expected LengthOverflow");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::LengthOverflow);
    }

    std::mt19937_64 rng(11);
    const auto metrics = testsupport::random_concave_metrics(rng, 10, 0.02, 0.05);
    for (const auto& m : metrics) {
      const double a = testsupport::uniform(rng, -0.05, 0.02), b = testsupport::uniform(rng, -0.05, 0.02);
      const auto two = scale(scale(m, a), b).lengths();
      const auto one = scale(m, a + b).lengths();
      for (std::size_t e = 0; e < one.size(); ++e) {
        // exp(a) exp(b) and exp(a + b) agree to a few ulps.
        CHECK(std::abs(two[e] - one[e]) <= 4 * std::numeric_limits<double>::epsilon() * one[e]);
      }
      const auto before = is_concave(m);
      const auto after = is_concave(scale(m, 0.01));
      CHECK(after.concave);
      for (std::size_t v = 0; v < before.margins.size(); ++v) CHECK(after.margins[v] > before.margins[v]);
    }
  }

  TEST_CASE("flip is an involution and preserves cone angles") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const auto d = poly::dualize(poly::random_polyhedron(rng));
      const auto angles = cone_angles(d.metric);
      int flipped = 0;
      for (int e = 0; e < d.metric.surface().num_edges(); ++e) {
        try {
          const ConeMetric f = flip_edge(d.metric, e);
          ++flipped;
          const auto fa = cone_angles(f);
          for (std::size_t v = 0; v < fa.size(); ++v) CHECK(std::abs(fa[v] - angles[v]) < 1e-9);
          CHECK(std::abs(gauss_bonnet_residual(f)) < 1e-8);
          CHECK(f.surface().num_edges() == 3 * f.surface().num_vertices() - 6);
          const ConeMetric back = flip_edge(f, e);
          for (int k = 0; k < back.surface().num_edges(); ++k) {
            CHECK(std::abs(back.length(k) - d.metric.length(k)) < 1e-10);
          }
        } catch (const Error& err) {
          CHECK(err.kind() == ErrorKind::FlipBlocked);
        }
      }
      CHECK(flipped > 0);
    }
  }

  TEST_CASE("flip in a symmetric rhombus") {
    // Tetrahedral sphere with all edges a; the two triangles on an edge form a
    // rhombus with angle 2A at the ends of that edge.
    const double a = 1.0;
    const CombSurface s = testsupport::tetra_surface();
    const ConeMetric m(s, Geometry::Spherical, std::vector<double>(6, a));
    const double A = testsupport::equilateral_angle(a);
    const double expected = std::acos(std::cos(a) * std::cos(a) + std::sin(a) * std::sin(a) * std::cos(2 * A));
    const int e = testsupport::edge_between(s, 0, 1);
    const ConeMetric f = flip_edge(m, e);
    CHECK(f.length(e) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("flip across a reflex quadrilateral is blocked") {
    // Angles at vertex 0 on both sides of edge {0,1} are obtuse, so the
    // quadrilateral is not convex there.
    const CombSurface s = testsupport::tetra_surface();
    std::vector<double> l(6);
    auto set = [&](int u, int v, double x) { l[testsupport::edge_between(s, u, v)] = x; };
    set(0, 1, 0.5);
    set(0, 2, 0.5);
    set(0, 3, 0.5);
    set(1, 2, 0.9);
    set(1, 3, 0.9);
    set(2, 3, 0.6);
    const ConeMetric m(s, Geometry::Spherical, l);
    try {
      flip_edge(m, testsupport::edge_between(s, 0, 1));
      FAIL("expected FlipBlocked");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FlipBlocked);
    }
  }

  TEST_CASE("invalid metrics are rejected") {
    const CombSurface s = testsupport::tetra_surface();
    auto kind_of = [&](std::vector<double> l) {
      try {
        ConeMetric(s, Geometry::Spherical, std::move(l));
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::ParseError;
    };
    CHECK(kind_of({1, 1, 1, 1, 1, 3.5}) == ErrorKind::InvalidMetric);
    std::vector<double> l(6, 0.5);
    l[testsupport::edge_between(s, 0, 1)] = 1.2;  // violates the triangle inequality
    CHECK(kind_of(l) == ErrorKind::InvalidMetric);
    CHECK(kind_of({1, 1, 1}) == ErrorKind::InvalidMetric);
  }

  TEST_CASE("distortion bound") {
    const auto m1 = poly::dualize(poly::hull_from_dual_points(poly::regular_tetrahedron_planes(1.1))).metric;
    CHECK(distortion_bound(m1, m1) == 0.0);
    CHECK(distortion_bound(m1, scale(m1, -0.07)) == doctest::Approx(0.07).epsilon(1e-12));
    const auto m2 = poly::dualize(poly::hull_from_dual_points(poly::regular_tetrahedron_planes(1.11))).metric;
    const double expected = std::abs(std::log((kPi - 1.11) / (kPi - 1.1)));
    CHECK(distortion_bound(m1, m2) == doctest::Approx(expected).epsilon(1e-9));
  }

  TEST_CASE("chart dimension on constructed triangulations") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
      const auto s = poly::dualize(poly::random_polyhedron(rng)).metric.surface();
      CHECK(s.num_edges() == 3 * (s.num_vertices() - s.euler_characteristic()));
      CHECK(s.num_edges() == 3 * s.num_vertices() - 6);
    }
  }
}
