#pragma once

// S^2 and H^2 as quadrics in R^3, used to develop triangles and polygons.
// Base point (1,0,0); the counterclockwise side of a tangent t at p is
// p x t on the sphere and J(p x t) on the hyperboloid, so in both models a
// point x lies left of the oriented geodesic a->b iff det(a, b, x) > 0.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "hypdual/cone_surface.hpp"

namespace hypdual::cone::detail {

using Vec3 = Eigen::Vector3d;

struct Model {
  Geometry g;

  bool spherical() const { return g == Geometry::Spherical; }

  double inner(const Vec3& a, const Vec3& b) const {
    return spherical() ? a.dot(b) : -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  }

  Vec3 base() const { return Vec3(1.0, 0.0, 0.0); }

  double dist(const Vec3& a, const Vec3& b) const {
    if (spherical()) return std::atan2(a.cross(b).norm(), a.dot(b));
    const Vec3 d = a - b;
    const double chord2 = std::max(0.0, inner(d, d));
    return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
  }

  Vec3 along(const Vec3& p, const Vec3& t, double d) const {
    return spherical() ? Vec3(std::cos(d) * p + std::sin(d) * t)
                       : Vec3(std::cosh(d) * p + std::sinh(d) * t);
  }

  /// Unit tangent of the geodesic `along(p, t, .)` after distance d.
  Vec3 transport(const Vec3& p, const Vec3& t, double d) const {
    return spherical() ? Vec3(-std::sin(d) * p + std::cos(d) * t)
                       : Vec3(std::sinh(d) * p + std::cosh(d) * t);
  }

  Vec3 left(const Vec3& p, const Vec3& t) const {
    Vec3 c = p.cross(t);
    if (!spherical()) c[0] = -c[0];
    return c;
  }

  Vec3 rotate(const Vec3& p, const Vec3& t, double angle) const {
    return std::cos(angle) * t + std::sin(angle) * left(p, t);
  }

  Vec3 unit_tangent(const Vec3& p, const Vec3& q) const {
    const double pp = inner(p, p);
    Vec3 t = q - (inner(p, q) / pp) * p;
    return t / std::sqrt(std::max(inner(t, t), 1e-300));
  }

  Vec3 normalize(const Vec3& x) const {
    const double q = inner(x, x);
    return x / std::sqrt(std::abs(q));
  }

  /// Third vertex c of the triangle with |ac| = l_ac, |bc| = l_bc lying to
  /// the left of a->b.
  Vec3 develop_third(const Vec3& a, const Vec3& b, double l_ac, double l_bc) const {
    const double l_ab = dist(a, b);
    const double angle_a = triangle_angle(g, l_bc, l_ab, l_ac);
    const Vec3 t = unit_tangent(a, b);
    return along(a, rotate(a, t, angle_a), l_ac);
  }
};

inline double orient(const Vec3& a, const Vec3& b, const Vec3& x) { return a.dot(b.cross(x)); }

}  // namespace hypdual::cone::detail
