#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypdual/polyhedra.hpp"

namespace hypdual::poly {

namespace {

using geom::Isometry;
using geom::mink;
using geom::Vec4;

constexpr double kPi = std::numbers::pi;

int inverse_index(int i) { return i < 4 ? i + 4 : i - 4; }

struct OrbitPoint {
  Isometry g;
  Vec4 q;
};

std::vector<OrbitPoint> orbit(const FuchsianData& data, const Vec4& p, int bound) {
  struct Word {
    Isometry g;
    int last;
  };
  std::vector<OrbitPoint> out;
  std::vector<Word> layer{{Isometry(), -1}};
  for (int len = 1; len <= bound; ++len) {
    std::vector<Word> next;
    next.reserve(layer.size() * 7);
    for (const Word& w : layer) {
      for (int i = 0; i < 8; ++i) {
        if (w.last >= 0 && i == inverse_index(w.last)) continue;
        const Isometry g = w.g * data.generators[i];
        next.push_back({g, i});
        out.push_back({g, g.apply(p)});
      }
    }
    layer = std::move(next);
  }
  return out;
}

struct Link {
  std::vector<int> extreme;  // orbit indices, counterclockwise seen from above
  std::vector<Eigen::Vector2d> proj;
};

// Directions from the apex to the other orbit points, centrally projected to
// the plane below the apex; the tangent cone of the hull at the apex is the
// cone over their convex hull.
Link apex_link(const std::vector<OrbitPoint>& pts, const Vec4& p, double h) {
  const Vec4 normal(std::sinh(h), 0.0, 0.0, std::cosh(h));
  std::vector<std::pair<Eigen::Vector2d, int>> proj;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec4 t = pts[i].q + mink(p, pts[i].q) * p;
    const double c = mink(t, normal);
    if (t.tail<3>().norm() < 1e-9 * pts[i].q[0]) continue;  // the apex itself
    if (!(c < 0.0)) throw Error(ErrorKind::OrbitBoundTooSmall, "orbit point above the apex tangent plane");
    proj.emplace_back(Eigen::Vector2d(t[1] / -c, t[2] / -c), static_cast<int>(i));
  }
  std::sort(proj.begin(), proj.end(), [](const auto& a, const auto& b) {
    return a.first[0] < b.first[0] || (a.first[0] == b.first[0] && a.first[1] < b.first[1]);
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const Eigen::Vector2d u = a - o, v = b - o;
    return std::pair(u[0] * v[1] - u[1] * v[0], u.norm() * v.norm());
  };
  auto keep_turn = [&](const std::vector<int>& hull, int k) {
    const auto [c, scale] = cross(proj[hull[hull.size() - 2]].first, proj[hull.back()].first, proj[k].first);
    return c > 1e-10 * scale;
  };
  std::vector<int> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (std::size_t j = 0; j < proj.size(); ++j) {
      const int k = pass == 0 ? static_cast<int>(j) : static_cast<int>(proj.size() - 1 - j);
      while (hull.size() >= base + 2 && !keep_turn(hull, k)) hull.pop_back();
      hull.push_back(k);
    }
    hull.pop_back();
  }
  Link link;
  std::vector<std::pair<double, int>> by_angle;
  for (int k : hull) by_angle.emplace_back(std::atan2(proj[k].first[1], proj[k].first[0]), k);
  std::sort(by_angle.begin(), by_angle.end());
  for (const auto& [a, k] : by_angle) {
    link.extreme.push_back(proj[k].second);
    link.proj.push_back(proj[k].first);
  }
  return link;
}

bool same_link(const Link& a, const Link& b) {
  if (a.proj.size() != b.proj.size()) return false;
  for (std::size_t i = 0; i < a.proj.size(); ++i) {
    if ((a.proj[i] - b.proj[i]).norm() > 1e-9 * std::max(1.0, a.proj[i].norm())) return false;
  }
  return true;
}

double tangent_angle(const Vec4& p, const Vec4& a, const Vec4& b) {
  const Vec4 u = geom::tangent_projection(p, a), v = geom::tangent_projection(p, b);
  return std::acos(std::clamp(mink(u, v) / std::sqrt(mink(u, u) * mink(v, v)), -1.0, 1.0));
}

}  // namespace

FuchsianData fuchsian_octagon_group(int word_bound) {
  if (word_bound < 1) throw Error(ErrorKind::OrbitBoundTooSmall, "word bound must be positive");
  FuchsianData data;
  data.word_bound = word_bound;
  // Inradius of the regular octagon with interior angles pi/4.
  const double r = std::acosh(1.0 + std::sqrt(2.0));
  for (int k = 0; k < 4; ++k) {
    const Isometry rot = Isometry::rotation(1, 2, k * kPi / 4.0);
    data.generators.push_back(rot * Isometry::translation(1, 2.0 * r) * rot.inverse());
  }
  for (int k = 0; k < 4; ++k) data.generators.push_back(data.generators[k].inverse());
  return data;
}

double relation_residual(const FuchsianData& data) {
  const auto& g = data.generators;
  const Isometry rel = g[0] * g[5] * g[2] * g[7] * g[4] * g[1] * g[6] * g[3];
  return (rel.matrix() - geom::Mat4::Identity()).cwiseAbs().maxCoeff();
}

FuchsianDual fuchsian_dualize(const FuchsianData& data, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::DomainExceeded, "apex height must be positive");
  const Vec4 p(std::cosh(h), 0.0, 0.0, std::sinh(h));

  const auto pts = orbit(data, p, data.word_bound);
  const Link link = apex_link(pts, p, h);
  const Link check = apex_link(orbit(data, p, data.word_bound + 1), p, h);
  if (!same_link(link, check)) {
    throw Error(ErrorKind::OrbitBoundTooSmall,
                "apex link changes between word bounds " + std::to_string(data.word_bound) + " and " +
                    std::to_string(data.word_bound + 1));
  }

  const std::size_t d = link.extreme.size();
  std::vector<Vec4> q(d);
  std::vector<Isometry> g(d);
  for (std::size_t i = 0; i < d; ++i) {
    q[i] = pts[link.extreme[i]].q;
    g[i] = pts[link.extreme[i]].g;
  }

  // Face i of the link spans the directions to q[i] and q[i+1].
  std::vector<DSPoint> planes;
  std::vector<double> face_angles(d);
  double angle_sum = 0.0;
  double core = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) {
    Vec4 n = geom::minkowski_cross(p, q[i], q[(i + 1) % d]);
    if (n[0] < 0.0) n = -n;  // the invariant plane's points lie inside
    const DSPoint plane = DSPoint::normalize(n);
    for (const OrbitPoint& o : pts) {
      if (mink(plane.v(), o.q) > 1e-9 * o.q[0]) {
        throw Error(ErrorKind::OrbitBoundTooSmall, "orbit point outside a face plane at the apex");
      }
    }
    planes.push_back(plane);
    face_angles[i] = tangent_angle(p, q[i], q[(i + 1) % d]);
    angle_sum += face_angles[i];
    const double c = std::abs(mink(plane.v(), data.invariant_plane.v()));
    core = std::min(core, c > 1.0 ? std::acosh(c) : 0.0);
  }

  // Link corner i is the edge toward q[i], between faces i-1 and i.
  std::vector<double> dihedral(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double ip = mink(planes[(i + d - 1) % d].v(), planes[i].v());
    dihedral[i] = kPi - std::acos(std::clamp(ip, -1.0, 1.0));
  }
  VertexLink apex;
  apex.vertex = 0;
  for (std::size_t i = 0; i < d; ++i) {
    apex.polygon.sides.push_back(face_angles[i]);
    apex.polygon.angles.push_back(dihedral[i]);
  }

  // The edges toward g p and g^-1 p are the same edge of the quotient.
  std::vector<int> key(d, -1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const geom::Mat4 prod = g[i].matrix() * g[j].matrix();
      if ((prod - geom::Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-8 * g[i].matrix().cwiseAbs().maxCoeff()) {
        key[i] = static_cast<int>(std::min(i, j));
      }
    }
    if (key[i] < 0) throw Error(ErrorKind::OrbitBoundTooSmall, "apex edge without a partner edge");
  }

  cone::GluedPolygon poly;
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t e = (j + 1) % d;  // edge between faces j and j+1
    poly.corner_vertex.push_back(0);
    poly.corner_angle.push_back(kPi - face_angles[j]);
    poly.side_length.push_back(kPi - dihedral[e]);
    poly.side_key.push_back(key[e]);
  }
  cone::PolygonAssembly asm_ = cone::assemble_polygons(cone::Geometry::Spherical, 1, {poly});

  std::vector<Isometry> deck;
  for (const auto& [polygon, side] : asm_.halfedge_side) {
    deck.push_back(side >= 0 ? g[(side + 1) % d] : Isometry());
  }
  std::vector<DualEdgeSource> sources;
  for (std::size_t e = 0; e < asm_.edge_key.size(); ++e) {
    if (asm_.edge_key[e] >= 0) {
      sources.push_back({DualEdgeSource::Kind::PrimalEdge, asm_.edge_key[e]});
    } else {
      sources.push_back({DualEdgeSource::Kind::Diagonal, 0});
    }
  }
  return FuchsianDual{DualMetricOutput{std::move(asm_.metric), {0}, std::move(sources), std::move(deck),
                                       asm_.max_closure_error},
                      std::move(apex),
                      std::move(planes),
                      (static_cast<double>(d) - 2.0) * kPi - angle_sum,
                      core,
                      pts.size()};
}

}  // namespace hypdual::poly
