#pragma once

// Minkowski space R^{1,3}, the hyperboloid model of H^3, the de Sitter quadric
// dS^3 and the point/plane polarity between them.
//
// Sign convention: the dual point of a face plane is its unit normal pointing
// OUT of the body, so interior points x satisfy <n, x>_M < 0.

#include <Eigen/Dense>

#include <array>
#include <optional>

#include "hypdual/errors.hpp"

namespace hypdual::geom {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kClampSlack = 1e-12;
inline constexpr double kIsometryTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;

/// A point of R^4 with finite coordinates.
class MVec4 {
 public:
  MVec4() : c_(Vec4::Zero()) {}
  MVec4(double x0, double x1, double x2, double x3);
  explicit MVec4(const Vec4& c);

  const Vec4& coords() const { return c_; }
  double operator[](int i) const { return c_[i]; }

  MVec4 operator+(const MVec4& o) const { return MVec4(Vec4(c_ + o.c_)); }
  MVec4 operator-(const MVec4& o) const { return MVec4(Vec4(c_ - o.c_)); }
  MVec4 operator*(double s) const { return MVec4(Vec4(c_ * s)); }

 private:
  Vec4 c_;
};

double minkowski_inner(const MVec4& a, const MVec4& b);
double euclidean_inner(const MVec4& a, const MVec4& b);

inline double mink(const Vec4& a, const Vec4& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// Point of H^3 on the upper sheet, <v,v>_M = -1.
class HPoint {
 public:
  /// Rescales a future timelike vector onto the hyperboloid.
  static HPoint normalize(const Vec4& v);
  static HPoint origin() { return HPoint(Vec4(1, 0, 0, 0)); }
  /// The point at hyperbolic distance `dist` from the origin in direction `dir`.
  static HPoint from_polar(const Eigen::Vector3d& dir, double dist);

  const Vec4& v() const { return v_; }
  MVec4 vec() const { return MVec4(v_); }
  /// Klein (projective ball) coordinates.
  Eigen::Vector3d klein() const { return v_.tail<3>() / v_[0]; }

 private:
  explicit HPoint(const Vec4& v) : v_(v) {}
  Vec4 v_;
};

/// Point of dS^3, <v,v>_M = +1. Doubles as an oriented plane of H^3.
class DSPoint {
 public:
  static DSPoint normalize(const Vec4& v);
  /// Outward normal of the plane at distance `rho` from the origin whose
  /// closest point lies in direction `dir`; the origin is on its negative side.
  static DSPoint plane_at_distance(const Eigen::Vector3d& dir, double rho);

  const Vec4& v() const { return v_; }
  MVec4 vec() const { return MVec4(v_); }
  DSPoint flipped() const { return DSPoint(-v_); }

 private:
  explicit DSPoint(const Vec4& v) : v_(v) {}
  Vec4 v_;
};

/// A totally geodesic plane of H^3 given by a spacelike Minkowski normal.
/// The normal need not be unit length; only its direction matters.
class HPlane {
 public:
  explicit HPlane(const Vec4& normal);
  /// Plane through three points; orientation follows the determinant sign.
  static HPlane through(const HPoint& a, const HPoint& b, const HPoint& c);

  const Vec4& normal() const { return n_; }

 private:
  Vec4 n_;
};

DSPoint plane_dual(const HPlane& plane);
HPlane point_dual(const DSPoint& n);

/// Sign of <n, x>_M: +1 positive (outer) side, 0 on the plane, -1 negative side.
int side_of(const DSPoint& n, const HPoint& x, double tol = kNormTol);

double h_distance(const HPoint& p, const HPoint& q);
/// Length of the spacelike de Sitter geodesic between p and q, in (0, pi).
double ds_distance(const DSPoint& p, const DSPoint& q);
/// Solves cos b = cos c * cosh a for b (de Sitter right triangle with a
/// timelike leg of length a). Even in a, so a signed leg is accepted.
double mixed_triangle_b(double a, double c);

/// Central projection of a nonzero vector onto the Euclidean unit sphere S^3.
Vec4 spherical_project(const MVec4& v);

/// Minkowski-orthogonal complement direction of three vectors (a 4D cross
/// product raised by J). Zero when the inputs are dependent.
Vec4 minkowski_cross(const Vec4& a, const Vec4& b, const Vec4& c);

/// Projection of x onto the tangent space of the quadric at p (p spacelike or
/// timelike with <p,p>_M = +-1).
Vec4 tangent_projection(const Vec4& p, const Vec4& x);

/// The H^3 point Minkowski-orthogonal to three dS^3 points, if their span is
/// a spacelike plane (i.e. the three face planes meet inside H^3).
std::optional<HPoint> common_point(const Vec4& a, const Vec4& b, const Vec4& c);

/// Positive-definite inner product that agrees with the Euclidean one in any
/// Lorentz frame whose time axis is the unit timelike vector `frame`.
inline double frame_inner(const Vec4& x, const Vec4& y, const Vec4& frame) {
  return mink(x, y) + 2.0 * mink(x, frame) * mink(y, frame);
}

/// Orientation- and time-preserving isometry of H^3, acting as an element of
/// SO^+(3,1) on R^4.
class Isometry {
 public:
  Isometry() : m_(Mat4::Identity()) {}
  /// Validates m^T J m = J (relative to |m|^2), det m = +1 and time orientation.
  static Isometry from_matrix(const Mat4& m);
  /// Rotation by `angle` in the (x_i, x_j) coordinate plane, 1 <= i,j <= 3.
  static Isometry rotation(int i, int j, double angle);
  /// Translation of hyperbolic length `length` along the x_axis coordinate axis.
  static Isometry translation(int axis, double length);

  const Mat4& matrix() const { return m_; }

  Isometry operator*(const Isometry& o) const;
  Isometry inverse() const;

  HPoint apply(const HPoint& p) const;
  DSPoint apply(const DSPoint& p) const;
  Vec4 apply(const Vec4& v) const { return m_ * v; }

  bool is_identity(double tol = kIsometryTol) const;

 private:
  explicit Isometry(const Mat4& m) : m_(m) {}
  Mat4 m_;
};

struct IsometryClass {
  enum class Kind { Identity, Elliptic, Parabolic, Loxodromic };
  Kind kind = Kind::Identity;
  // Unsigned rotation angle in [0, pi]; the sense of rotation needs an
  // oriented axis, which a bare matrix does not provide.
  double rotation_angle = 0.0;
  double translation_length = 0.0;
};

IsometryClass classify_isometry(const Isometry& g);

}  // namespace hypdual::geom
