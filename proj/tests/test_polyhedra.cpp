#include <doctest.h>

#include "support.hpp"

using namespace hypdual;
using namespace hypdual::poly;
using testsupport::kPi;

namespace {

ErrorKind hull_error(const std::vector<DSPoint>& planes) {
  try {
    hull_from_dual_points(planes);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::ParseError;
}

}  // namespace

TEST_SUITE("polyhedra") {
  TEST_CASE("fixture combinatorics") {
    const auto tet = hull_from_dual_points(regular_tetrahedron_planes(1.1));
    CHECK(tet.num_faces() == 4);
    CHECK(tet.num_edges() == 6);
    CHECK(tet.num_vertices() == 4);
    const auto cube = hull_from_dual_points(cube_planes(0.5));
    CHECK(cube.num_faces() == 6);
    CHECK(cube.num_edges() == 12);
    CHECK(cube.num_vertices() == 8);
    const auto oct = hull_from_dual_points(octahedron_planes(0.3));
    CHECK(oct.num_faces() == 8);
    CHECK(oct.num_edges() == 12);
    CHECK(oct.num_vertices() == 6);
    for (const auto& vf : oct.vertex_faces) CHECK(vf.size() == 4);
  }

  TEST_CASE("degenerate inputs") {
    auto tp = regular_tetrahedron_planes(1.1);
    std::vector<DSPoint> flipped;
    for (const auto& n : tp) flipped.push_back(n.flipped());
    CHECK(hull_error(flipped) == ErrorKind::EmptyInterior);
    tp.pop_back();
    CHECK(hull_error(tp) == ErrorKind::UnboundedPolyhedron);
    // Four planes whose dual points lie almost on one plane of dS^3 bound a
    // prism reaching the sphere at infinity.
    std::vector<DSPoint> flat;
    for (int k = 0; k < 4; ++k) {
      const double ph = k * kPi / 2 + 0.1;
      flat.push_back(DSPoint::normalize(geom::Vec4(0.3, std::cos(ph), std::sin(ph), (k % 2 ? 1 : -1) * 1e-7)));
    }
    CHECK(hull_error(flat) == ErrorKind::UnboundedPolyhedron);
  }

  TEST_CASE("redundant planes are reported") {
    auto planes = cube_planes(0.5);
    planes.push_back(DSPoint::plane_at_distance(Eigen::Vector3d(1, 0, 0), 0.9));
    const auto p = hull_from_dual_points(planes);
    CHECK(p.num_faces() == 6);
    REQUIRE(p.redundant.size() == 1);
    CHECK(p.redundant[0] == 6);
  }

  TEST_CASE("regular tetrahedron against the closed form") {
    for (int i = 0; i < 10; ++i) {
      const double theta = kPi / 3 + (std::acos(1.0 / 3.0) - kPi / 3) * (i + 0.5) / 10;
      const testsupport::TetraOracle o(theta);
      const auto p = hull_from_dual_points(regular_tetrahedron_planes(theta));
      for (int e = 0; e < p.num_edges(); ++e) {
        CHECK(std::abs(dihedral_angle(p, e) - theta) < 1e-9);
        CHECK(std::abs(edge_length(p, e) - o.edge_length) < 1e-9);
        const auto [f, g] = p.edge_faces[e];
        CHECK(std::abs(geom::ds_distance(p.planes[f], p.planes[g]) + dihedral_angle(p, e) - kPi) < 1e-10);
      }
      for (int f = 0; f < p.num_faces(); ++f) {
        CHECK(std::abs(face_area(p, f) - o.face_area) < 1e-9);
        for (int v : p.face_vertices[f]) CHECK(std::abs(face_angle(p, f, v) - o.alpha) < 1e-9);
      }
      for (int v = 0; v < p.num_vertices(); ++v) {
        const auto link = vertex_link(p, v);
        for (double a : link.polygon.angles) CHECK(std::abs(a - theta) < 1e-9);
        for (double s : link.polygon.sides) CHECK(std::abs(s - o.alpha) < 1e-9);
        const auto dual = polar_dual_polygon(link.polygon);
        for (double s : dual.sides) CHECK(std::abs(s - o.dual_edge) < 1e-9);
      }
      const auto d = dualize(p);
      CHECK(d.metric.surface().num_vertices() == 4);
      CHECK(d.metric.surface().num_edges() == 6);
      for (double l : d.metric.lengths()) CHECK(std::abs(l - o.dual_edge) < 1e-9);
      for (double a : cone::cone_angles(d.metric)) CHECK(std::abs(a - o.dual_cone_angle) < 1e-9);
    }
  }

  TEST_CASE("cube corner links") {
    // As rho shrinks the cube tends to a Euclidean cube: right-angled corners.
    const auto p = hull_from_dual_points(cube_planes(0.01));
    for (int v = 0; v < p.num_vertices(); ++v) {
      const auto link = vertex_link(p, v);
      REQUIRE(link.polygon.angles.size() == 3);
      for (double a : link.polygon.angles) CHECK(a == doctest::Approx(kPi / 2).epsilon(1e-3));
      for (double s : link.polygon.sides) CHECK(s == doctest::Approx(kPi / 2).epsilon(1e-3));
    }
    // Adjacent outward normals (sinh r, cosh r, 0, 0) and (sinh r, 0, cosh r, 0)
    // have Minkowski product -sinh^2 r = -cos(theta).
    const double rho = 0.5;
    const auto cube = hull_from_dual_points(cube_planes(rho));
    for (int e = 0; e < cube.num_edges(); ++e) {
      CHECK(std::abs(dihedral_angle(cube, e) - std::acos(std::sinh(rho) * std::sinh(rho))) < 1e-9);
    }
  }

  TEST_CASE("polar dual polygon") {
    const SphericalPolygon octant{{kPi / 2, kPi / 2, kPi / 2}, {kPi / 2, kPi / 2, kPi / 2}};
    const auto d = polar_dual_polygon(octant);
    for (double s : d.sides) CHECK(s == doctest::Approx(kPi / 2));
    for (double a : d.angles) CHECK(a == doctest::Approx(kPi / 2));

    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
      const auto p = random_polyhedron(rng);
      for (int v = 0; v < p.num_vertices(); ++v) {
        const auto link = vertex_link(p, v).polygon;
        double perimeter = 0;
        for (double s : link.sides) perimeter += s;
        CHECK(perimeter < 2 * kPi);
        const auto back = polar_dual_polygon(polar_dual_polygon(link));
        CHECK(testsupport::max_gap(back.sides, link.sides) < 1e-15);
        CHECK(testsupport::max_gap(back.angles, link.angles) < 1e-15);
      }
    }
  }

  TEST_CASE("dual metric properties on random polyhedra") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 20; ++i) {
      const auto p = random_polyhedron(rng);
      const auto d = dualize(p);
      const auto& m = d.metric;
      CHECK(m.surface().num_vertices() == p.num_faces());
      CHECK(m.surface().num_edges() == 3 * m.surface().num_vertices() - 6);
      CHECK(std::abs(cone::gauss_bonnet_residual(m)) < 1e-8);
      CHECK(cone::is_concave(m).concave);
      for (double l : m.lengths()) CHECK((l > 0 && l < kPi));
      for (int v = 0; v < m.surface().num_vertices(); ++v) {
        CHECK(std::abs(cone::cone_angle(m, v) - 2 * kPi - face_area(p, d.face_of_vertex[v])) < 1e-9);
      }
      const auto ext = extrinsic_dual_lengths(p, d);
      for (int e = 0; e < m.surface().num_edges(); ++e) CHECK(std::abs(ext[e] - m.length(e)) < 1e-9);
      for (int e = 0; e < m.surface().num_edges(); ++e) {
        if (d.edge_sources[e].kind == DualEdgeSource::Kind::PrimalEdge) {
          CHECK(std::abs(m.length(e) - (kPi - dihedral_angle(p, d.edge_sources[e].index))) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("dualization is isometry invariant") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 10; ++i) {
      const auto p = random_polyhedron(rng);
      const auto q = apply(testsupport::random_isometry(rng), p);
      const auto lp = dualize(p).metric.lengths(), lq = dualize(q).metric.lengths();
      REQUIRE(lp.size() == lq.size());
      for (std::size_t e = 0; e < lp.size(); ++e) CHECK(std::abs(lp[e] - lq[e]) < 1e-10);
    }
  }

  TEST_CASE("hull of points and hull of planes agree") {
    std::mt19937_64 rng(34);
    for (int i = 0; i < 20; ++i) {
      const auto p = random_polyhedron(rng);
      const auto from_points = hull_from_points(p.vertices);
      CHECK(testsupport::plane_set_gap(from_points.planes, p.planes) < 1e-9);
      const auto again = hull_from_dual_points(from_points.planes);
      CHECK(testsupport::vertex_set_gap(again.vertices, p.vertices) < 1e-9);
    }
    // Interior points are discarded.
    auto pts = hull_from_dual_points(cube_planes(0.5)).vertices;
    pts.push_back(geom::HPoint::origin());
    CHECK(hull_from_points(pts).num_vertices() == 8);
  }

  TEST_CASE("octahedron dual uses fan diagonals") {
    const auto p = hull_from_dual_points(octahedron_planes(0.3));
    const auto d = dualize(p);
    int diagonals = 0;
    for (const auto& s : d.edge_sources) diagonals += s.kind == DualEdgeSource::Kind::Diagonal;
    CHECK(diagonals == p.num_vertices());
    CHECK(d.metric.surface().num_edges() == 18);
    CHECK(d.closure_error < 1e-9);
  }
}
