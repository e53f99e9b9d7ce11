#include "hypdual/cone_surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include "model2.hpp"

namespace hypdual::cone {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinArea = 1e-12;

[[noreturn]] void bad_surface(const std::string& what) { throw Error(ErrorKind::InvalidSurface, what); }

}  // namespace

CombSurface::CombSurface(int num_vertices, std::vector<Tri> triangles, std::vector<int> edge_of_halfedge)
    : num_vertices_(num_vertices), triangles_(std::move(triangles)), edge_of_(std::move(edge_of_halfedge)) {
  if (num_vertices_ <= 0 || triangles_.empty()) bad_surface("empty surface");
  if (edge_of_.size() != 3 * triangles_.size()) bad_surface("need one edge id per half-edge");
  for (const Tri& t : triangles_) {
    for (int v : t) {
      if (v < 0 || v >= num_vertices_) bad_surface("vertex id out of range");
    }
  }
  const int num_edges = edge_of_.empty() ? 0 : *std::max_element(edge_of_.begin(), edge_of_.end()) + 1;
  edge_halfedges_.assign(num_edges, {-1, -1});
  for (int h = 0; h < static_cast<int>(edge_of_.size()); ++h) {
    const int e = edge_of_[h];
    if (e < 0) bad_surface("negative edge id");
    auto& slot = edge_halfedges_[e];
    if (slot[0] < 0) {
      slot[0] = h;
    } else if (slot[1] < 0) {
      slot[1] = h;
    } else {
      bad_surface("edge " + std::to_string(e) + " glued more than twice");
    }
  }
  twin_.assign(edge_of_.size(), -1);
  for (int e = 0; e < num_edges; ++e) {
    const auto [a, b] = edge_halfedges_[e];
    if (a < 0 || b < 0) bad_surface("edge " + std::to_string(e) + " is not glued twice");
    if (tail(a) != head(b) || head(a) != tail(b)) {
      bad_surface("edge " + std::to_string(e) + " glues half-edges with inconsistent orientation");
    }
    twin_[a] = b;
    twin_[b] = a;
  }

  // The rotation h -> twin(prev(h)) cycles through the outgoing half-edges of
  // one vertex; a closed surface has exactly one cycle per vertex.
  std::vector<char> seen(edge_of_.size(), 0);
  std::vector<int> cycles_at(num_vertices_, 0);
  for (int h0 = 0; h0 < num_halfedges(); ++h0) {
    if (seen[h0]) continue;
    int h = h0;
    do {
      seen[h] = 1;
      h = twin_[prev(h)];
    } while (h != h0);
    ++cycles_at[tail(h0)];
  }
  for (int v = 0; v < num_vertices_; ++v) {
    if (cycles_at[v] != 1) bad_surface("vertex " + std::to_string(v) + " is not a disk neighbourhood");
  }

  std::vector<char> reached(triangles_.size(), 0);
  std::vector<int> stack{0};
  reached[0] = 1;
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int k = 0; k < 3; ++k) {
      const int u = face(twin_[3 * t + k]);
      if (!reached[u]) {
        reached[u] = 1;
        stack.push_back(u);
      }
    }
  }
  if (std::find(reached.begin(), reached.end(), 0) != reached.end()) bad_surface("surface is disconnected");
  if (euler_characteristic() % 2 != 0) bad_surface("odd Euler characteristic");
}

CombSurface CombSurface::from_triangles(int num_vertices, std::vector<Tri> triangles) {
  std::map<std::pair<int, int>, int> edge_ids;
  std::vector<int> edge_of(3 * triangles.size(), -1);
  int next_id = 0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles[t][k], b = triangles[t][(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_ids.try_emplace({key.first, key.second}, next_id);
      if (inserted) ++next_id;
      edge_of[3 * t + k] = it->second;
    }
  }
  return CombSurface(num_vertices, std::move(triangles), std::move(edge_of));
}

CombSurface CombSurface::flipped(int e) const {
  const auto [h, g] = edge_halfedges_.at(e);
  const int t1 = face(h), t2 = face(g);
  if (t1 == t2) throw Error(ErrorKind::FlipBlocked, "edge borders a single triangle twice");
  const int a = tail(h), b = head(h), c = tail(prev(h)), d = tail(prev(g));
  const int h_bc = next(h), h_ca = prev(h), g_ad = next(g), g_db = prev(g);

  std::vector<Tri> tris = triangles_;
  std::vector<int> edges = edge_of_;
  tris[t1] = {c, a, d};
  tris[t2] = {d, b, c};
  edges[3 * t1 + 0] = edge_of_[h_ca];
  edges[3 * t1 + 1] = edge_of_[g_ad];
  edges[3 * t1 + 2] = e;
  edges[3 * t2 + 0] = edge_of_[g_db];
  edges[3 * t2 + 1] = edge_of_[h_bc];
  edges[3 * t2 + 2] = e;
  return CombSurface(num_vertices_, std::move(tris), std::move(edges));
}

double triangle_angle(Geometry g, double opposite, double side1, double side2) {
  // Half-angle form; stays accurate for thin triangles where the plain law of
  // cosines cancels.
  const double s = 0.5 * (opposite + side1 + side2);
  double num, den;
  if (g == Geometry::Spherical) {
    num = std::sin(s - side1) * std::sin(s - side2);
    den = std::sin(s) * std::sin(s - opposite);
  } else {
    num = std::sinh(s - side1) * std::sinh(s - side2);
    den = std::sinh(s) * std::sinh(s - opposite);
  }
  num = std::max(num, 0.0);
  if (den <= 0.0) return kPi;
  return 2.0 * std::atan(std::sqrt(num / den));
}

double triangle_area(Geometry g, double a, double b, double c) {
  const double A = triangle_angle(g, a, b, c);
  const double B = triangle_angle(g, b, c, a);
  const double C = triangle_angle(g, c, a, b);
  return g == Geometry::Spherical ? A + B + C - kPi : kPi - (A + B + C);
}

std::optional<ChartViolation> chart_violation(const CombSurface& s, Geometry g,
                                              const std::vector<double>& lengths, double margin) {
  for (int e = 0; e < s.num_edges(); ++e) {
    const double l = lengths[e];
    if (!std::isfinite(l) || l <= margin) return ChartViolation{e, -1, l};
    if (g == Geometry::Spherical && l >= kPi - margin) return ChartViolation{e, -1, kPi - l};
  }
  for (int t = 0; t < s.num_faces(); ++t) {
    std::array<double, 3> l;
    for (int k = 0; k < 3; ++k) l[k] = lengths[s.edge(3 * t + k)];
    for (int k = 0; k < 3; ++k) {
      const double slack = l[(k + 1) % 3] + l[(k + 2) % 3] - l[k];
      if (slack <= margin) return ChartViolation{s.edge(3 * t + k), t, slack};
    }
    if (g == Geometry::Spherical) {
      const double slack = 2.0 * kPi - (l[0] + l[1] + l[2]);
      if (slack <= margin) {
        const int k = static_cast<int>(std::max_element(l.begin(), l.end()) - l.begin());
        return ChartViolation{s.edge(3 * t + k), t, slack};
      }
    }
  }
  return std::nullopt;
}

ConeMetric::ConeMetric(CombSurface surface, Geometry geometry, std::vector<double> lengths)
    : surface_(std::move(surface)), geometry_(geometry), lengths_(std::move(lengths)) {
  if (static_cast<int>(lengths_.size()) != surface_.num_edges()) {
    throw Error(ErrorKind::InvalidMetric, "need exactly one length per edge");
  }
  if (auto bad = chart_violation(surface_, geometry_, lengths_)) {
    std::ostringstream os;
    os << "edge " << bad->edge;
    if (bad->triangle >= 0) os << " of triangle " << bad->triangle;
    os << " violates the chart conditions";
    throw Error(ErrorKind::InvalidMetric, os.str());
  }
  for (int t = 0; t < surface_.num_faces(); ++t) {
    if (std::abs(area(t)) < kMinArea) {
      throw Error(ErrorKind::InvalidMetric, "triangle " + std::to_string(t) + " is degenerate");
    }
  }
}

std::array<double, 3> ConeMetric::corner_angles(int t) const {
  const double l0 = halfedge_length(3 * t), l1 = halfedge_length(3 * t + 1), l2 = halfedge_length(3 * t + 2);
  // Corner k sits between sides k and k+2 and faces side k+1.
  return {triangle_angle(geometry_, l1, l0, l2), triangle_angle(geometry_, l2, l1, l0),
          triangle_angle(geometry_, l0, l2, l1)};
}

double ConeMetric::area(int t) const {
  const auto a = corner_angles(t);
  const double sum = a[0] + a[1] + a[2];
  return geometry_ == Geometry::Spherical ? sum - kPi : kPi - sum;
}

double ConeMetric::total_area() const {
  double total = 0.0;
  for (int t = 0; t < surface_.num_faces(); ++t) total += area(t);
  return total;
}

std::vector<double> cone_angles(const ConeMetric& m) {
  std::vector<double> out(m.surface().num_vertices(), 0.0);
  for (int t = 0; t < m.surface().num_faces(); ++t) {
    const auto a = m.corner_angles(t);
    for (int k = 0; k < 3; ++k) out[m.surface().triangles()[t][k]] += a[k];
  }
  return out;
}

double cone_angle(const ConeMetric& m, int v) { return cone_angles(m).at(v); }

ConcavityReport is_concave(const ConeMetric& m, double tol) {
  ConcavityReport r;
  const auto angles = cone_angles(m);
  r.margins.reserve(angles.size());
  r.min_margin = std::numeric_limits<double>::infinity();
  for (double a : angles) {
    r.margins.push_back(a - kTwoPi);
    r.min_margin = std::min(r.min_margin, a - kTwoPi);
  }
  r.concave = m.geometry() == Geometry::Spherical && r.min_margin > tol;
  return r;
}

double gauss_bonnet_residual(const ConeMetric& m) {
  const double curvature = m.geometry() == Geometry::Spherical ? 1.0 : -1.0;
  double defect = 0.0;
  for (double a : cone_angles(m)) defect += kTwoPi - a;
  return curvature * m.total_area() + defect - kTwoPi * m.surface().euler_characteristic();
}

ConeMetric scale(const ConeMetric& m, double lambda) {
  const double factor = std::exp(lambda);
  std::vector<double> lengths = m.lengths();
  for (std::size_t e = 0; e < lengths.size(); ++e) {
    lengths[e] *= factor;
    if (m.geometry() == Geometry::Spherical && lengths[e] >= kPi) {
      throw Error(ErrorKind::LengthOverflow, "edge " + std::to_string(e) + " reaches pi after scaling");
    }
  }
  if (const auto v = chart_violation(m.surface(), m.geometry(), lengths, 0.0)) {
    throw Error(ErrorKind::LengthOverflow, "triangle " + std::to_string(v->triangle) + " leaves the chart after scaling");
  }
  return ConeMetric(m.surface(), m.geometry(), std::move(lengths));
}

ConeMetric flip_edge(const ConeMetric& m, int e) {
  using detail::Vec3;
  const CombSurface& s = m.surface();
  if (e < 0 || e >= s.num_edges()) throw Error(ErrorKind::FlipBlocked, "no such edge");
  const auto [h, g] = s.edge_halfedges(e);
  if (CombSurface::face(h) == CombSurface::face(g)) {
    throw Error(ErrorKind::FlipBlocked, "edge borders a single triangle twice");
  }
  const detail::Model model{m.geometry()};

  // Triangle (a,b,c) on the left of a->b, triangle (b,a,d) on the right.
  const double l_ab = m.length(e);
  const double l_bc = m.halfedge_length(CombSurface::next(h));
  const double l_ca = m.halfedge_length(CombSurface::prev(h));
  const double l_ad = m.halfedge_length(CombSurface::next(g));
  const double l_db = m.halfedge_length(CombSurface::prev(g));

  const double angle_a = triangle_angle(m.geometry(), l_bc, l_ab, l_ca) +
                         triangle_angle(m.geometry(), l_db, l_ab, l_ad);
  const double angle_b = triangle_angle(m.geometry(), l_ca, l_ab, l_bc) +
                         triangle_angle(m.geometry(), l_ad, l_ab, l_db);
  constexpr double kConvexMargin = 1e-9;
  if (angle_a >= kPi - kConvexMargin || angle_b >= kPi - kConvexMargin) {
    throw Error(ErrorKind::FlipBlocked, "quadrilateral is not strictly convex at the diagonal");
  }

  const Vec3 a = model.base();
  const Vec3 b = model.along(a, Vec3(0.0, 1.0, 0.0), l_ab);
  const Vec3 c = model.develop_third(a, b, l_ca, l_bc);
  const Vec3 d = model.develop_third(b, a, l_db, l_ad);
  const double l_cd = model.dist(c, d);
  if (m.geometry() == Geometry::Spherical && l_cd >= kPi) {
    throw Error(ErrorKind::FlipBlocked, "new diagonal would not be shorter than pi");
  }

  std::vector<double> lengths = m.lengths();
  lengths[e] = l_cd;
  try {
    return ConeMetric(s.flipped(e), m.geometry(), std::move(lengths));
  } catch (const Error& err) {
    throw Error(ErrorKind::FlipBlocked, std::string("flipped metric is invalid: ") + err.what());
  }
}

double distortion_bound(const ConeMetric& m1, const ConeMetric& m2) {
  if (m1.surface().edge_of_halfedge() != m2.surface().edge_of_halfedge() ||
      m1.surface().triangles() != m2.surface().triangles()) {
    throw Error(ErrorKind::InvalidMetric, "metrics are not on the same triangulation");
  }
  double worst = 0.0;
  for (int e = 0; e < m1.surface().num_edges(); ++e) {
    worst = std::max(worst, std::abs(std::log(m2.length(e) / m1.length(e))));
  }
  return worst;
}

std::vector<Eigen::Vector3d> develop_polygon(Geometry g, const std::vector<double>& sides,
                                             const std::vector<double>& angles) {
  using detail::Vec3;
  const detail::Model model{g};
  const std::size_t n = sides.size();
  std::vector<Vec3> pts;
  pts.reserve(n + 1);
  Vec3 p = model.base();
  Vec3 t(0.0, 1.0, 0.0);
  pts.push_back(p);
  for (std::size_t i = 0; i < n; ++i) {
    // Re-project onto the model at every corner; hyperbolic development
    // otherwise amplifies roundoff by cosh(side) per step.
    const Vec3 q = model.normalize(model.along(p, t, sides[i]));
    Vec3 arriving = model.transport(p, t, sides[i]);
    arriving = model.normalize(Vec3(arriving - (model.inner(arriving, q) / model.inner(q, q)) * q));
    pts.push_back(q);
    // Counterclockwise boundary: turn left by the exterior angle.
    t = model.rotate(q, arriving, kPi - angles[(i + 1) % n]);
    p = q;
  }
  return pts;
}

PolygonAssembly assemble_polygons(Geometry g, int num_vertices, const std::vector<GluedPolygon>& polygons) {
  const detail::Model model{g};
  std::vector<Tri> tris;
  std::vector<int> halfedge_key;  // side key per half-edge, or -(diag id + 2)
  std::vector<std::array<int, 2>> halfedge_side;
  std::vector<int> face_polygon;
  std::vector<double> diag_length;
  std::vector<int> diag_polygon;
  double closure = 0.0;

  for (std::size_t p = 0; p < polygons.size(); ++p) {
    const GluedPolygon& poly = polygons[p];
    const int m = static_cast<int>(poly.corner_vertex.size());
    if (m < 3 || static_cast<int>(poly.side_length.size()) != m ||
        static_cast<int>(poly.corner_angle.size()) != m || static_cast<int>(poly.side_key.size()) != m) {
      throw Error(ErrorKind::InvalidSurface, "malformed polygon " + std::to_string(p));
    }
    const auto pts = develop_polygon(g, poly.side_length, poly.corner_angle);
    closure = std::max(closure, model.dist(pts[0], pts[m]));

    const int c0 = static_cast<int>(std::min_element(poly.corner_vertex.begin(), poly.corner_vertex.end()) -
                                    poly.corner_vertex.begin());
    auto corner = [&](int i) { return (c0 + i) % m; };
    // Fan triangle i uses corners c0, c0+i, c0+i+1; diagonal j joins c0 to c0+j.
    std::vector<int> diag_ids(m, -1);
    for (int j = 2; j <= m - 2; ++j) {
      diag_ids[j] = static_cast<int>(diag_length.size());
      diag_length.push_back(model.dist(pts[corner(0)], pts[corner(j)]));
      diag_polygon.push_back(static_cast<int>(p));
    }
    for (int i = 1; i <= m - 2; ++i) {
      tris.push_back({poly.corner_vertex[corner(0)], poly.corner_vertex[corner(i)],
                      poly.corner_vertex[corner(i + 1)]});
      face_polygon.push_back(static_cast<int>(p));
      // corner0 -> corner i
      if (i == 1) {
        halfedge_key.push_back(poly.side_key[corner(0)]);
        halfedge_side.push_back({static_cast<int>(p), corner(0)});
      } else {
        halfedge_key.push_back(-(diag_ids[i] + 2));
        halfedge_side.push_back({static_cast<int>(p), -1});
      }
      // corner i -> corner i+1 is always a polygon side
      halfedge_key.push_back(poly.side_key[corner(i)]);
      halfedge_side.push_back({static_cast<int>(p), corner(i)});
      // corner i+1 -> corner0
      if (i == m - 2) {
        halfedge_key.push_back(poly.side_key[corner(m - 1)]);
        halfedge_side.push_back({static_cast<int>(p), corner(m - 1)});
      } else {
        halfedge_key.push_back(-(diag_ids[i + 1] + 2));
        halfedge_side.push_back({static_cast<int>(p), -1});
      }
    }
  }

  // Number edges: glued sides first in key order, then diagonals.
  std::map<int, int> side_edge;
  std::vector<int> edge_of(halfedge_key.size());
  std::vector<int> edge_key, edge_polygon;
  std::vector<double> lengths;
  std::map<int, double> side_len;
  for (std::size_t p = 0; p < polygons.size(); ++p) {
    for (std::size_t i = 0; i < polygons[p].side_key.size(); ++i) {
      const int key = polygons[p].side_key[i];
      const double l = polygons[p].side_length[i];
      auto [it, inserted] = side_len.try_emplace(key, l);
      if (!inserted && std::abs(it->second - l) > 1e-9 * std::max(1.0, l)) {
        throw Error(ErrorKind::InvalidSurface, "glued sides with key " + std::to_string(key) + " differ in length");
      }
    }
  }
  for (const auto& [key, l] : side_len) {
    side_edge[key] = static_cast<int>(lengths.size());
    lengths.push_back(l);
    edge_key.push_back(key);
    edge_polygon.push_back(-1);
  }
  const int first_diag = static_cast<int>(lengths.size());
  for (std::size_t j = 0; j < diag_length.size(); ++j) {
    lengths.push_back(diag_length[j]);
    edge_key.push_back(-1);
    edge_polygon.push_back(diag_polygon[j]);
  }
  for (std::size_t h = 0; h < halfedge_key.size(); ++h) {
    const int k = halfedge_key[h];
    edge_of[h] = k >= 0 ? side_edge.at(k) : first_diag + (-k - 2);
  }

  CombSurface surface(num_vertices, std::move(tris), std::move(edge_of));
  return PolygonAssembly{ConeMetric(std::move(surface), g, std::move(lengths)),
                         std::move(edge_key),
                         std::move(edge_polygon),
                         std::move(face_polygon),
                         std::move(halfedge_side),
                         closure};
}

}  // namespace hypdual::cone
