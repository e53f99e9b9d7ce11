#pragma once

// Generators and closed-form oracles shared by the tests. Oracles here are
// derived from textbook trigonometry and never call into the library's own
// angle or length routines.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hypdual/cone_surface.hpp"
#include "hypdual/geom_kernel.hpp"
#include "hypdual/polyhedra.hpp"

namespace testsupport {

using namespace hypdual;
constexpr double kPi = std::numbers::pi;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::Vector3d random_unit3(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-3);
  return v.normalized();
}

inline geom::HPoint random_hpoint(std::mt19937_64& rng, double max_dist = 2.0) {
  return geom::HPoint::from_polar(random_unit3(rng), uniform(rng, 0.0, max_dist));
}

/// Random spacelike unit vector: a plane at signed distance in [-2, 2].
inline geom::DSPoint random_dspoint(std::mt19937_64& rng) {
  return geom::DSPoint::plane_at_distance(random_unit3(rng), uniform(rng, -2.0, 2.0));
}

/// Random isometry: a rotation followed by a translation of length <= 1.5.
inline geom::Isometry random_isometry(std::mt19937_64& rng) {
  using geom::Isometry;
  Isometry g = Isometry::rotation(1, 2, uniform(rng, 0, 2 * kPi)) * Isometry::rotation(2, 3, uniform(rng, 0, kPi)) *
               Isometry::rotation(1, 2, uniform(rng, 0, 2 * kPi));
  const Isometry t = Isometry::translation(1 + static_cast<int>(rng() % 3), uniform(rng, -1.5, 1.5));
  return t * g;
}

// Regular tetrahedron with dihedral angle theta. The vertex link is an
// equilateral spherical triangle with angles theta, whose side is the face
// angle alpha; the face is an equilateral hyperbolic triangle with angles alpha.
struct TetraOracle {
  double theta, alpha, face_area, edge_length, dual_edge, dual_cone_angle;
  explicit TetraOracle(double th) : theta(th) {
    // cos A = -cos^2 A + sin^2 A cos a for an equilateral spherical triangle.
    alpha = std::acos(std::cos(th) / (1.0 - std::cos(th)));
    face_area = kPi - 3.0 * alpha;
    // cos A = -cos^2 A + sin^2 A cosh a for an equilateral hyperbolic triangle.
    edge_length = std::acosh(std::cos(alpha) / (1.0 - std::cos(alpha)));
    dual_edge = kPi - th;
    dual_cone_angle = 2.0 * kPi + face_area;
  }
};

/// Angle of an equilateral spherical triangle with side a (law of cosines).
inline double equilateral_angle(double a) { return std::acos(std::cos(a) / (1.0 + std::cos(a))); }

/// Boundary of a tetrahedron as a combinatorial sphere.
inline cone::CombSurface tetra_surface() {
  return cone::CombSurface::from_triangles(4, {{{0, 2, 1}}, {{0, 1, 3}}, {{0, 3, 2}}, {{1, 2, 3}}});
}

/// Boundary of the octahedron with vertices +-x, +-y, +-z (ids 0..5).
inline cone::CombSurface octahedron_surface() {
  return cone::CombSurface::from_triangles(6, {{{0, 2, 4}},
                                               {{2, 1, 4}},
                                               {{1, 3, 4}},
                                               {{3, 0, 4}},
                                               {{2, 0, 5}},
                                               {{1, 2, 5}},
                                               {{3, 1, 5}},
                                               {{0, 3, 5}}});
}

inline cone::ConeMetric round_sphere() {
  const auto s = octahedron_surface();
  return cone::ConeMetric(s, cone::Geometry::Spherical, std::vector<double>(s.num_edges(), kPi / 2));
}

/// Two copies of a triangle glued along their boundary.
inline cone::ConeMetric doubled_triangle(cone::Geometry g, double a, double b, double c) {
  auto s = cone::CombSurface::from_triangles(3, {{{0, 1, 2}}, {{0, 2, 1}}});
  std::vector<double> l(3);
  for (int h = 0; h < 3; ++h) {
    const int u = s.tail(h), v = s.head(h);
    const double len = (u + v == 1) ? c : (u + v == 3 ? a : b);  // {0,1}->c, {1,2}->a, {0,2}->b
    l[s.edge(h)] = len;
  }
  return cone::ConeMetric(s, g, l);
}

inline int edge_between(const cone::CombSurface& s, int u, int v) {
  for (int h = 0; h < s.num_halfedges(); ++h) {
    if (s.tail(h) == u && s.head(h) == v) return s.edge(h);
  }
  return -1;
}

inline std::vector<double> sorted_dihedrals(const poly::ConvexPolyhedronH3& p) {
  std::vector<double> out;
  for (int e = 0; e < p.num_edges(); ++e) out.push_back(poly::dihedral_angle(p, e));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<double> sorted_edge_lengths(const poly::ConvexPolyhedronH3& p) {
  std::vector<double> out;
  for (int e = 0; e < p.num_edges(); ++e) out.push_back(poly::edge_length(p, e));
  std::sort(out.begin(), out.end());
  return out;
}

inline double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double g = 0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

/// Largest distance from a point of `a` to its nearest point of `b`, in both
/// directions, measured in the Klein chart.
inline double vertex_set_gap(const std::vector<geom::HPoint>& a, const std::vector<geom::HPoint>& b) {
  if (a.size() != b.size()) return INFINITY;
  auto one_way = [](const auto& x, const auto& y) {
    double worst = 0;
    for (const auto& p : x) {
      double best = INFINITY;
      for (const auto& q : y) best = std::min(best, (p.klein() - q.klein()).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

inline double plane_set_gap(const std::vector<geom::DSPoint>& a, const std::vector<geom::DSPoint>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0;
  for (const auto& p : a) {
    double best = INFINITY;
    for (const auto& q : b) best = std::min(best, (p.v() - q.v()).cwiseAbs().maxCoeff());
    worst = std::max(worst, best);
  }
  return worst;
}

/// Largest lambda for which scale(m, lambda) stays in the spherical chart.
inline double scaling_headroom(const cone::ConeMetric& m) {
  double room = INFINITY;
  const auto& s = m.surface();
  for (double l : m.lengths()) room = std::min(room, std::log(kPi / l));
  for (int t = 0; t < s.num_faces(); ++t) {
    const double perimeter = m.halfedge_length(3 * t) + m.halfedge_length(3 * t + 1) + m.halfedge_length(3 * t + 2);
    room = std::min(room, std::log(2 * kPi / perimeter));
  }
  return room;
}

/// Dual metrics of random polyhedra with every length multiplied by a random
/// factor in [1 - jitter, 1 + jitter], then shrunk if needed so that scaling
/// by e^headroom stays valid. Only concave results are kept.
inline std::vector<cone::ConeMetric> random_concave_metrics(std::mt19937_64& rng, int count, double jitter,
                                                            double headroom) {
  std::vector<cone::ConeMetric> out;
  while (static_cast<int>(out.size()) < count) {
    const auto d = poly::dualize(poly::random_polyhedron(rng));
    std::vector<double> l = d.metric.lengths();
    for (double& x : l) x *= uniform(rng, 1.0 - jitter, 1.0 + jitter);
    try {
      cone::ConeMetric m(d.metric.surface(), cone::Geometry::Spherical, l);
      const double room = scaling_headroom(m);
      if (room < headroom + 1e-3) m = cone::scale(m, room - headroom - 1e-3);
      if (cone::is_concave(m, 1e-6).concave) out.push_back(std::move(m));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace testsupport
