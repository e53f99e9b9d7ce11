#include "hypdual/geom_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hypdual {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotOnModel: return "NotOnModel";
    case ErrorKind::NotSpacelikeSeparated: return "NotSpacelikeSeparated";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::InvalidIsometry: return "InvalidIsometry";
    case ErrorKind::InvalidSurface: return "InvalidSurface";
    case ErrorKind::InvalidMetric: return "InvalidMetric";
    case ErrorKind::LengthOverflow: return "LengthOverflow";
    case ErrorKind::FlipBlocked: return "FlipBlocked";
    case ErrorKind::UnboundedPolyhedron: return "UnboundedPolyhedron";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::OrbitBoundTooSmall: return "OrbitBoundTooSmall";
    case ErrorKind::StepStalled: return "StepStalled";
    case ErrorKind::FeasibilityLost: return "FeasibilityLost";
    case ErrorKind::HomotopyBlocked: return "HomotopyBlocked";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace geom {

namespace {

const Vec4 kJdiag(-1.0, 1.0, 1.0, 1.0);

void require_finite(const Vec4& c) {
  if (!c.allFinite()) {
    throw Error(ErrorKind::NonFinite, "vector has non-finite coordinates");
  }
}

Mat4 jmat() { return kJdiag.asDiagonal(); }

}  // namespace

MVec4::MVec4(double x0, double x1, double x2, double x3) : c_(x0, x1, x2, x3) {
  require_finite(c_);
}

MVec4::MVec4(const Vec4& c) : c_(c) { require_finite(c_); }

double minkowski_inner(const MVec4& a, const MVec4& b) { return mink(a.coords(), b.coords()); }

double euclidean_inner(const MVec4& a, const MVec4& b) { return a.coords().dot(b.coords()); }

HPoint HPoint::normalize(const Vec4& v) {
  require_finite(v);
  const double q = mink(v, v);
  if (!(q < 0.0) || v[0] <= 0.0) {
    throw Error(ErrorKind::NotOnModel, "vector is not future timelike");
  }
  return HPoint(v / std::sqrt(-q));
}

HPoint HPoint::from_polar(const Eigen::Vector3d& dir, double dist) {
  const Eigen::Vector3d u = dir.normalized();
  Vec4 v;
  v << std::cosh(dist), std::sinh(dist) * u;
  return HPoint(v);
}

DSPoint DSPoint::normalize(const Vec4& v) {
  require_finite(v);
  const double q = mink(v, v);
  if (!(q > 0.0)) {
    throw Error(ErrorKind::NotOnModel, "vector is not spacelike");
  }
  return DSPoint(v / std::sqrt(q));
}

DSPoint DSPoint::plane_at_distance(const Eigen::Vector3d& dir, double rho) {
  const Eigen::Vector3d u = dir.normalized();
  Vec4 v;
  v << std::sinh(rho), std::cosh(rho) * u;
  return DSPoint(v);
}

HPlane::HPlane(const Vec4& normal) : n_(normal) {
  require_finite(n_);
  if (!(mink(n_, n_) > 0.0)) {
    throw Error(ErrorKind::NotOnModel, "plane normal is not spacelike");
  }
}

HPlane HPlane::through(const HPoint& a, const HPoint& b, const HPoint& c) {
  return HPlane(minkowski_cross(a.v(), b.v(), c.v()));
}

DSPoint plane_dual(const HPlane& plane) { return DSPoint::normalize(plane.normal()); }

HPlane point_dual(const DSPoint& n) { return HPlane(n.v()); }

int side_of(const DSPoint& n, const HPoint& x, double tol) {
  const double ip = mink(n.v(), x.v());
  const double scale = n.v().norm() * x.v().norm();
  if (ip > tol * scale) return 1;
  if (ip < -tol * scale) return -1;
  return 0;
}

double h_distance(const HPoint& p, const HPoint& q) {
  double c = -mink(p.v(), q.v());
  c = std::max(c, 1.0);
  // Near the diagonal acosh loses half the digits; the chord form does not.
  const Vec4 d = p.v() - q.v();
  const double chord2 = mink(d, d);
  if (chord2 < 1.0) {
    return 2.0 * std::asinh(0.5 * std::sqrt(std::max(chord2, 0.0)));
  }
  return std::acosh(c);
}

double ds_distance(const DSPoint& p, const DSPoint& q) {
  double ip = mink(p.v(), q.v());
  if (ip > 1.0 + kClampSlack || ip < -1.0 - kClampSlack) {
    std::ostringstream os;
    os << "<p,q>_M = " << ip << " lies outside (-1, 1)";
    throw Error(ErrorKind::NotSpacelikeSeparated, os.str());
  }
  ip = std::clamp(ip, -1.0, 1.0);
  return std::acos(ip);
}

double mixed_triangle_b(double a, double c) {
  if (!std::isfinite(a) || !(c > 0.0 && c < std::numbers::pi)) {
    throw Error(ErrorKind::DomainExceeded, "mixed triangle legs out of range");
  }
  double x = std::cos(c) * std::cosh(a);
  if (x >= 1.0 + kClampSlack || x <= -1.0 - kClampSlack) {
    throw Error(ErrorKind::DomainExceeded, "cos(c) cosh(a) outside (-1, 1)");
  }
  x = std::clamp(x, -1.0, 1.0);
  return std::acos(x);
}

Vec4 spherical_project(const MVec4& v) {
  const double n = v.coords().norm();
  if (n == 0.0) {
    throw Error(ErrorKind::ZeroVector, "cannot project the zero vector");
  }
  return v.coords() / n;
}

Vec4 minkowski_cross(const Vec4& a, const Vec4& b, const Vec4& c) {
  Eigen::Matrix<double, 3, 4> rows;
  rows.row(0) = a.transpose();
  rows.row(1) = b.transpose();
  rows.row(2) = c.transpose();
  Vec4 w;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix3d minor;
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      minor.col(col++) = rows.col(j);
    }
    w[i] = ((i % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
  }
  // w is Euclidean-orthogonal to a, b, c; J w is Minkowski-orthogonal.
  return kJdiag.cwiseProduct(w);
}

Vec4 tangent_projection(const Vec4& p, const Vec4& x) { return x - (mink(x, p) / mink(p, p)) * p; }

std::optional<HPoint> common_point(const Vec4& a, const Vec4& b, const Vec4& c) {
  Vec4 y = minkowski_cross(a, b, c);
  const double q = mink(y, y);
  if (!(q < -1e-14 * y.squaredNorm())) return std::nullopt;
  if (y[0] < 0.0) y = -y;
  return HPoint::normalize(y);
}

Isometry Isometry::from_matrix(const Mat4& m) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidIsometry, "matrix has non-finite entries");
  }
  const Mat4 J = jmat();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff());
  const double dev = (m.transpose() * J * m - J).cwiseAbs().maxCoeff();
  if (dev > kIsometryTol * scale) {
    throw Error(ErrorKind::InvalidIsometry, "matrix does not preserve the Minkowski form");
  }
  if (m.determinant() < 0.0 || m(0, 0) < 1.0 - kIsometryTol * scale) {
    throw Error(ErrorKind::InvalidIsometry, "matrix reverses orientation or time");
  }
  return Isometry(m);
}

Isometry Isometry::rotation(int i, int j, double angle) {
  if (i < 1 || i > 3 || j < 1 || j > 3 || i == j) {
    throw Error(ErrorKind::InvalidIsometry, "rotation plane must use two spatial axes");
  }
  Mat4 m = Mat4::Identity();
  const double c = std::cos(angle), s = std::sin(angle);
  m(i, i) = c;
  m(i, j) = -s;
  m(j, i) = s;
  m(j, j) = c;
  return Isometry(m);
}

Isometry Isometry::translation(int axis, double length) {
  if (axis < 1 || axis > 3) {
    throw Error(ErrorKind::InvalidIsometry, "translation axis must be spatial");
  }
  Mat4 m = Mat4::Identity();
  m(0, 0) = m(axis, axis) = std::cosh(length);
  m(0, axis) = m(axis, 0) = std::sinh(length);
  return Isometry(m);
}

Isometry Isometry::operator*(const Isometry& o) const { return Isometry(m_ * o.m_); }

Isometry Isometry::inverse() const {
  const Mat4 J = jmat();
  return Isometry(J * m_.transpose() * J);
}

HPoint Isometry::apply(const HPoint& p) const { return HPoint::normalize(m_ * p.v()); }

DSPoint Isometry::apply(const DSPoint& p) const { return DSPoint::normalize(m_ * p.v()); }

bool Isometry::is_identity(double tol) const { return (m_ - Mat4::Identity()).cwiseAbs().maxCoeff() < tol; }

IsometryClass classify_isometry(const Isometry& g) {
  IsometryClass out;
  if (g.is_identity()) return out;

  // In SO^+(3,1) the eigenvalues are e^{+-l}, e^{+-i phi}, so
  // tr g = 2 cosh l + 2 cos phi and tr g^2 = 2 cosh 2l + 2 cos 2phi.
  const Mat4& m = g.matrix();
  const double s = 0.5 * m.trace();
  const double sq = 0.5 * (0.5 * (m * m).trace() + 2.0);
  const double gap = std::sqrt(std::max(0.0, 2.0 * sq - s * s));
  const double cosh_l = std::max(1.0, 0.5 * (s + gap));
  const double cos_phi = std::clamp(s - cosh_l, -1.0, 1.0);

  constexpr double kParabolicTol = 1e-6;
  if (cosh_l - 1.0 < kParabolicTol && 1.0 - cos_phi < kParabolicTol) {
    out.kind = IsometryClass::Kind::Parabolic;
    return out;
  }
  out.rotation_angle = std::acos(cos_phi);
  if (cosh_l - 1.0 < kTraceTol) {
    out.kind = IsometryClass::Kind::Elliptic;
  } else {
    out.kind = IsometryClass::Kind::Loxodromic;
    out.translation_length = std::acosh(cosh_l);
  }
  return out;
}

}  // namespace geom
}  // namespace hypdual
