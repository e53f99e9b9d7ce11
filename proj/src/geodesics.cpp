#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hypdual/cone_surface.hpp"
#include "model2.hpp"

namespace hypdual::cone {

namespace {

using detail::Model;
using detail::orient;
using detail::Vec3;
using Corners = std::array<Vec3, 3>;

constexpr double kPi = std::numbers::pi;
constexpr double kConeHitTol = 1e-9;
constexpr std::size_t kMaxCrossings = 1'000'000;

Corners develop_triangle(const ConeMetric& m, int t) {
  const Model model{m.geometry()};
  Corners q;
  q[0] = model.base();
  q[1] = model.along(q[0], Vec3(0.0, 1.0, 0.0), m.halfedge_length(3 * t));
  q[2] = model.develop_third(q[0], q[1], m.halfedge_length(3 * t + 2), m.halfedge_length(3 * t + 1));
  return q;
}

/// Develops the neighbour across half-edge h (a side of the triangle with
/// developed corners q) so that it shares the crossed side.
Corners develop_across(const ConeMetric& m, const Corners& q, int h) {
  const Model model{m.geometry()};
  const CombSurface& s = m.surface();
  const int k = h % 3;
  const int g = s.twin(h);
  const int t2 = CombSurface::face(g), j = g % 3;
  Corners out;
  out[j] = q[(k + 1) % 3];
  out[(j + 1) % 3] = q[k];
  out[(j + 2) % 3] = model.develop_third(out[j], out[(j + 1) % 3], m.halfedge_length(3 * t2 + (j + 2) % 3),
                                         m.halfedge_length(3 * t2 + (j + 1) % 3));
  return out;
}

Vec3 barycentric(const Corners& q, const Vec3& x) {
  Eigen::Matrix3d a;
  a << q[0], q[1], q[2];
  Vec3 b = a.colPivHouseholderQr().solve(x);
  return b / b.sum();
}

Vec3 point_from_bary(const Model& model, const Corners& q, const Vec3& bary) {
  return model.normalize(bary[0] * q[0] + bary[1] * q[1] + bary[2] * q[2]);
}

/// Smallest s > s_min at which alpha c(s) + beta s(s) turns negative, where
/// (c, s) = (cos, sin) or (cosh, sinh). Infinity if it never does.
double exit_parameter(const Model& model, double alpha, double beta, double s_min) {
  if (model.spherical()) {
    const double phi = std::atan2(beta, alpha);
    double s = phi + 0.5 * kPi;
    s += kTwoPi * std::ceil((s_min - s) / kTwoPi);
    if (s <= s_min) s += kTwoPi;
    return s;
  }
  if (beta == 0.0) return std::numeric_limits<double>::infinity();
  const double r = -alpha / beta;
  if (!(std::abs(r) < 1.0)) return std::numeric_limits<double>::infinity();
  const double s = std::atanh(r);
  if (alpha * std::sinh(s) + beta * std::cosh(s) >= 0.0 || s <= s_min) {
    return std::numeric_limits<double>::infinity();
  }
  return s;
}

}  // namespace

GeodesicTrace trace_geodesic(const ConeMetric& m, const SurfacePoint& start, double direction,
                             double max_length) {
  if (!std::isfinite(max_length) || max_length < 0.0) {
    throw Error(ErrorKind::DomainExceeded, "geodesic length must be finite and non-negative");
  }
  if (start.triangle < 0 || start.triangle >= m.surface().num_faces() || (start.bary.array() <= 0.0).any()) {
    throw Error(ErrorKind::DomainExceeded, "start must lie strictly inside a triangle");
  }
  const Model model{m.geometry()};
  const CombSurface& s = m.surface();

  GeodesicTrace tr;
  tr.start = start;
  tr.direction = direction;
  int t = start.triangle;
  Corners q = develop_triangle(m, t);
  tr.origin = point_from_bary(model, q, start.bary / start.bary.sum());
  tr.tangent = model.rotate(tr.origin, model.unit_tangent(tr.origin, q[0]), direction);

  auto point_at = [&](double arc) { return model.along(tr.origin, tr.tangent, arc); };

  int entry_side = -1;
  double s_cur = 0.0;
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    int best_side = -1;
    for (int k = 0; k < 3; ++k) {
      if (k == entry_side) continue;
      const double alpha = orient(q[k], q[(k + 1) % 3], tr.origin);
      const double beta = orient(q[k], q[(k + 1) % 3], tr.tangent);
      const double ex = exit_parameter(model, alpha, beta, s_cur);
      if (ex < best) {
        best = ex;
        best_side = k;
      }
    }
    if (best_side < 0 || best >= max_length) {
      tr.length = max_length;
      tr.end = SurfacePoint{t, barycentric(q, point_at(max_length))};
      tr.status = GeodesicTrace::Status::ReachedLength;
      return tr;
    }
    const Vec3 y = point_at(best);
    const Vec3& a = q[best_side];
    const Vec3& b = q[(best_side + 1) % 3];
    if (model.dist(y, a) < kConeHitTol || model.dist(y, b) < kConeHitTol) {
      tr.length = best;
      tr.end = SurfacePoint{t, barycentric(q, y)};
      tr.status = GeodesicTrace::Status::HitConePoint;
      return tr;
    }
    const int h = 3 * t + best_side;
    tr.crossings.push_back(h);
    tr.crossing_points.push_back(y);
    tr.crossed_edges.push_back({a, b});
    if (tr.crossings.size() > kMaxCrossings) {
      throw Error(ErrorKind::DomainExceeded, "geodesic crosses too many edges");
    }
    q = develop_across(m, q, h);
    const int g = s.twin(h);
    t = CombSurface::face(g);
    entry_side = g % 3;
    s_cur = best;
  }
}

namespace {

struct CycleGeodesic {
  bool ok = false;
  double length = 0.0;
};

Vec3 normalized_or_zero(const Vec3& v) {
  const double n = v.norm();
  return n > 1e-300 ? Vec3(v / n) : Vec3::Zero();
}

/// A pole n with <n,u> > 0 for every constraint u, if the open intersection
/// of hemispheres is nonempty.
std::optional<Vec3> interior_pole(const std::vector<Vec3>& cons) {
  auto feasible = [&](const Vec3& n, double tol) {
    for (const Vec3& u : cons) {
      if (n.dot(u) <= tol) return false;
    }
    return true;
  };
  // Vertices of the feasible spherical polygon lie among the pairwise cross
  // products; their mean is interior when the polygon has interior.
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < cons.size(); ++i) {
    for (std::size_t j = i + 1; j < cons.size(); ++j) {
      const Vec3 c = normalized_or_zero(cons[i].cross(cons[j]));
      if (c.isZero()) continue;
      for (const Vec3& cand : {c, Vec3(-c)}) {
        if (feasible(cand, -1e-12)) sum += cand;
      }
    }
  }
  Vec3 all = Vec3::Zero();
  for (const Vec3& u : cons) all += u;
  for (const Vec3& cand : {normalized_or_zero(sum), normalized_or_zero(all)}) {
    if (!cand.isZero() && feasible(cand, 1e-12)) return cand;
  }
  for (const Vec3& u : cons) {
    if (feasible(u, 1e-12)) return u;
  }
  return std::nullopt;
}

CycleGeodesic solve_cycle(const ConeMetric& m, const std::vector<int>& cycle) {
  const int first_face = CombSurface::face(cycle.front());
  Corners q = develop_triangle(m, first_face);
  const Corners q0 = q;
  const std::size_t len = cycle.size();
  std::vector<Vec3> left(len + 1), right(len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    const int k = cycle[i] % 3;
    right[i] = q[k];
    left[i] = q[(k + 1) % 3];
    q = develop_across(m, q, cycle[i]);
  }
  Eigen::Matrix3d v0, v1;
  v0 << q0[0], q0[1], q0[2];
  v1 << q[0], q[1], q[2];
  const Eigen::Matrix3d hol = v1 * v0.inverse();
  {
    const int k = cycle.front() % 3;
    right[len] = q[k];
    left[len] = q[(k + 1) % 3];
  }

  std::vector<Vec3> poles;
  if ((hol - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9) {
    std::vector<Vec3> cons;
    for (std::size_t i = 0; i < len; ++i) {
      cons.push_back(left[i]);
      cons.push_back(-right[i]);
    }
    if (auto n = interior_pole(cons)) poles.push_back(*n);
  } else {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(hol - Eigen::Matrix3d::Identity(), Eigen::ComputeFullV);
    const Vec3 axis = svd.matrixV().col(2).normalized();
    poles = {axis, -axis};
  }

  CycleGeodesic best;
  for (const Vec3& n : poles) {
    bool ok = true;
    std::vector<Vec3> cross(len + 1);
    for (std::size_t i = 0; i <= len && ok; ++i) {
      const double nl = n.dot(left[i]), nr = n.dot(right[i]);
      if (!(nl > 1e-12 && nr < -1e-12)) {
        ok = false;
        break;
      }
      cross[i] = (nl * right[i] - nr * left[i]).normalized();
      if (std::min(std::acos(std::clamp(cross[i].dot(left[i]), -1.0, 1.0)),
                   std::acos(std::clamp(cross[i].dot(right[i]), -1.0, 1.0))) < kConeHitTol) {
        ok = false;
      }
    }
    if (!ok) continue;
    double total = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double inc = std::atan2(n.dot(cross[i].cross(cross[i + 1])), cross[i].dot(cross[i + 1]));
      if (!(inc > 1e-12 && inc < kPi)) {
        ok = false;
        break;
      }
      total += inc;
    }
    if (ok && (!best.ok || total < best.length)) best = {true, total};
  }
  return best;
}

}  // namespace

GeodesicSearchReport shortest_closed_geodesic_search(const ConeMetric& m, const GeodesicSearchOptions& opts) {
  if (m.geometry() != Geometry::Spherical) {
    throw Error(ErrorKind::InvalidMetric, "closed geodesic search needs a spherical metric");
  }
  const CombSurface& s = m.surface();
  if (opts.deck && static_cast<int>(opts.deck->size()) != s.num_halfedges()) {
    throw Error(ErrorKind::InvalidMetric, "need one deck transformation per half-edge");
  }
  GeodesicSearchReport report;
  report.depth = opts.depth;

  std::vector<int> path;
  std::function<void(int)> extend = [&](int h1) {
    const int g = s.twin(path.back());
    const std::array<int, 2> options{CombSurface::next(g), CombSurface::prev(g)};
    if (options[0] == h1 || options[1] == h1) {
      ++report.cycles_examined;
      bool contractible = true;
      if (opts.deck) {
        geom::Isometry word;
        for (int h : path) word = word * (*opts.deck)[h];
        contractible = (word.matrix() - geom::Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-8;
      }
      if (contractible) {
        const CycleGeodesic c = solve_cycle(m, path);
        if (c.ok && c.length <= opts.length_cap) {
          ++report.geodesics_found;
          if (c.length < report.min_length) {
            report.found = true;
            report.min_length = c.length;
            report.cycle = path;
          }
        }
      }
    }
    if (static_cast<int>(path.size()) >= opts.depth) return;
    for (int h : options) {
      if (h < h1) continue;
      path.push_back(h);
      extend(h1);
      path.pop_back();
    }
  };
  for (int h1 = 0; h1 < s.num_halfedges(); ++h1) {
    path = {h1};
    extend(h1);
  }
  return report;
}

}  // namespace hypdual::cone
