#include "hypdual/polyhedra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace hypdual::poly {

namespace {

using Vec3 = Eigen::Vector3d;
using geom::mink;
using geom::Vec4;

constexpr double kPi = std::numbers::pi;

struct KleinPlane {
  Vec3 a;  // a . y <= b
  double b;
};

KleinPlane klein_plane(const DSPoint& n) {
  const Vec3 a = n.v().tail<3>();
  const double s = a.norm();  // >= 1 for a unit spacelike vector
  return {a / s, n.v()[0] / s};
}

HPoint from_klein(const Vec3& y) {
  Vec4 v;
  v << 1.0, y;
  return HPoint::normalize(v);
}

[[noreturn]] void unbounded(const std::string& what) { throw Error(ErrorKind::UnboundedPolyhedron, what); }
[[noreturn]] void empty(const std::string& what) { throw Error(ErrorKind::EmptyInterior, what); }

void check_recession(const std::vector<KleinPlane>& planes) {
  Eigen::MatrixXd a(planes.size(), 3);
  for (std::size_t i = 0; i < planes.size(); ++i) a.row(i) = planes[i].a.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  if (svd.singularValues()[2] < 1e-12) unbounded("face normals do not span space");
  // A nonzero recession direction exists iff one lies on an extreme ray,
  // i.e. on the line where two constraint planes meet.
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      const Vec3 d = planes[i].a.cross(planes[j].a);
      const double dn = d.norm();
      if (dn < 1e-12) continue;
      for (double sign : {1.0, -1.0}) {
        bool recedes = true;
        for (const KleinPlane& p : planes) {
          if (sign * p.a.dot(d) > 1e-12 * dn) {
            recedes = false;
            break;
          }
        }
        if (recedes) unbounded("intersection of half-spaces is unbounded");
      }
    }
  }
}

std::vector<int> order_face(const std::vector<Vec3>& klein, const std::vector<int>& ids, const Vec3& outward) {
  Vec3 c = Vec3::Zero();
  for (int v : ids) c += klein[v];
  c /= static_cast<double>(ids.size());
  const Vec3 n = outward.normalized();
  Vec3 u = (klein[ids[0]] - c);
  u = (u - u.dot(n) * n).normalized();
  const Vec3 w = n.cross(u);
  std::vector<std::pair<double, int>> keyed;
  for (int v : ids) {
    const Vec3 d = klein[v] - c;
    keyed.emplace_back(std::atan2(d.dot(w), d.dot(u)), v);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> out;
  for (const auto& [angle, v] : keyed) out.push_back(v);
  return out;
}

void build_lattice(ConvexPolyhedronH3& p) {
  const int nf = p.num_faces();
  std::map<std::pair<int, int>, int> edge_id;
  std::vector<std::array<int, 2>> dir_face;  // per edge: face with a->b, face with b->a
  for (int f = 0; f < nf; ++f) {
    const auto& cyc = p.face_vertices[f];
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto [it, inserted] = edge_id.try_emplace(key, static_cast<int>(p.edges.size()));
      if (inserted) {
        p.edges.push_back({a, b});
        dir_face.push_back({-1, -1});
      }
      const int e = it->second;
      const int slot = p.edges[e][0] == a ? 0 : 1;
      if (dir_face[e][slot] >= 0) empty("face lattice is not a closed surface");
      dir_face[e][slot] = f;
    }
  }
  for (std::size_t e = 0; e < p.edges.size(); ++e) {
    if (dir_face[e][0] < 0 || dir_face[e][1] < 0) empty("face lattice is not a closed surface");
  }
  p.edge_faces = dir_face;
  if (p.num_vertices() - p.num_edges() + nf != 2) empty("face lattice is not a sphere");

  auto next_in = [&](int f, int v) {
    const auto& cyc = p.face_vertices[f];
    const auto it = std::find(cyc.begin(), cyc.end(), v);
    return cyc[(it - cyc.begin() + 1) % cyc.size()];
  };
  auto prev_in = [&](int f, int v) {
    const auto& cyc = p.face_vertices[f];
    const auto it = std::find(cyc.begin(), cyc.end(), v);
    return cyc[(it - cyc.begin() + cyc.size() - 1) % cyc.size()];
  };

  std::vector<std::vector<int>> faces_at(p.num_vertices());
  for (int f = 0; f < nf; ++f) {
    for (int v : p.face_vertices[f]) faces_at[v].push_back(f);
  }
  p.vertex_faces.assign(p.num_vertices(), {});
  p.vertex_edges.assign(p.num_vertices(), {});
  for (int v = 0; v < p.num_vertices(); ++v) {
    const auto& around = faces_at[v];
    if (around.size() < 3) empty("vertex with fewer than three faces");
    std::vector<int> order{*std::min_element(around.begin(), around.end())};
    std::vector<int> edges_here;
    while (true) {
      const int f = order.back();
      const int w = prev_in(f, v);
      edges_here.push_back(edge_id.at({std::min(v, w), std::max(v, w)}));
      int g = -1;
      for (int cand : around) {
        if (cand != f && next_in(cand, v) == w) g = cand;
      }
      if (g < 0) empty("broken face cycle around a vertex");
      if (g == order.front()) break;
      order.push_back(g);
      if (order.size() > around.size()) empty("broken face cycle around a vertex");
    }
    if (order.size() != around.size()) empty("vertex is not a manifold point");
    p.vertex_faces[v] = std::move(order);
    p.vertex_edges[v] = std::move(edges_here);
  }
}

}  // namespace

ConvexPolyhedronH3 hull_from_dual_points(const std::vector<DSPoint>& duals) {
  std::vector<KleinPlane> planes;
  for (const DSPoint& d : duals) planes.push_back(klein_plane(d));
  if (planes.size() < 3) unbounded("face normals do not span space");
  check_recession(planes);
  if (planes.size() < 4) empty("need at least four planes");

  const int m = static_cast<int>(planes.size());
  std::vector<Vec3> verts;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        Eigen::Matrix3d a;
        a << planes[i].a.transpose(), planes[j].a.transpose(), planes[k].a.transpose();
        if (std::abs(a.determinant()) < 1e-12) continue;
        const Vec3 y = a.partialPivLu().solve(Vec3(planes[i].b, planes[j].b, planes[k].b));
        bool inside = true;
        for (const KleinPlane& p : planes) {
          if (p.a.dot(y) - p.b > kIncidenceTol) {
            inside = false;
            break;
          }
        }
        if (!inside) continue;
        const bool dup = std::any_of(verts.begin(), verts.end(),
                                     [&](const Vec3& v) { return (v - y).norm() < kMergeTol; });
        if (!dup) verts.push_back(y);
      }
    }
  }
  if (verts.size() < 4) empty("half-spaces meet in fewer than four vertices");

  // Refine each vertex against all planes through it.
  std::vector<std::vector<int>> incident(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v) {
    for (int i = 0; i < m; ++i) {
      if (std::abs(planes[i].a.dot(verts[v]) - planes[i].b) <= kMergeTol) incident[v].push_back(i);
    }
    Eigen::MatrixXd a(incident[v].size(), 3);
    Eigen::VectorXd b(incident[v].size());
    for (std::size_t r = 0; r < incident[v].size(); ++r) {
      a.row(r) = planes[incident[v][r]].a.transpose();
      b[r] = planes[incident[v][r]].b;
    }
    verts[v] = a.colPivHouseholderQr().solve(b);
    if (verts[v].norm() >= 1.0 - 1e-12) unbounded("a vertex lies on or beyond the sphere at infinity");
  }
  {
    Eigen::MatrixXd spread(verts.size(), 3);
    for (std::size_t v = 0; v < verts.size(); ++v) spread.row(v) = (verts[v] - verts[0]).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(spread);
    if (svd.singularValues()[2] < 1e-9) empty("vertices are coplanar");
  }

  ConvexPolyhedronH3 p;
  for (const Vec3& y : verts) p.vertices.push_back(from_klein(y));
  std::set<std::vector<int>> seen_faces;
  for (int i = 0; i < m; ++i) {
    std::vector<int> on;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      if (std::find(incident[v].begin(), incident[v].end(), i) != incident[v].end()) on.push_back(static_cast<int>(v));
    }
    bool face = on.size() >= 3;
    if (face) {
      Eigen::MatrixXd spread(on.size(), 3);
      for (std::size_t r = 0; r < on.size(); ++r) spread.row(r) = (verts[on[r]] - verts[on[0]]).transpose();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(spread);
      face = svd.singularValues()[1] > 1e-9 && seen_faces.insert(on).second;
    }
    if (!face) {
      p.redundant.push_back(i);
      continue;
    }
    p.planes.push_back(duals[i]);
    p.plane_source.push_back(i);
    p.face_vertices.push_back(order_face(verts, on, planes[i].a));
  }
  build_lattice(p);
  return p;
}

ConvexPolyhedronH3 hull_from_points(const std::vector<HPoint>& points) {
  const int m = static_cast<int>(points.size());
  if (m < 4) empty("need at least four points");
  std::vector<Vec3> y;
  for (const HPoint& q : points) y.push_back(q.klein());
  std::vector<DSPoint> planes;
  std::vector<Vec3> normals;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        Vec3 n = (y[j] - y[i]).cross(y[k] - y[i]);
        const double nn = n.norm();
        if (nn < 1e-12) continue;
        n /= nn;
        const double b = n.dot(y[i]);
        double lo = 0.0, hi = 0.0;
        for (const Vec3& q : y) {
          lo = std::min(lo, n.dot(q) - b);
          hi = std::max(hi, n.dot(q) - b);
        }
        if (lo < -kIncidenceTol && hi > kIncidenceTol) continue;
        if (hi > kIncidenceTol) n = -n;
        const double bb = n.dot(y[i]);
        const bool dup = std::any_of(normals.begin(), normals.end(), [&](const Vec3& o) {
          return (o - n).norm() < kMergeTol;
        });
        if (dup) continue;
        normals.push_back(n);
        Vec4 v;
        v << bb, n;
        planes.push_back(DSPoint::normalize(v));
      }
    }
  }
  return hull_from_dual_points(planes);
}

double dihedral_angle(const ConvexPolyhedronH3& p, int e) {
  const auto [f, g] = p.edge_faces.at(e);
  const double ip = std::clamp(mink(p.planes[f].v(), p.planes[g].v()), -1.0, 1.0);
  return kPi - std::acos(ip);
}

double face_angle(const ConvexPolyhedronH3& p, int f, int v) {
  const auto& cyc = p.face_vertices.at(f);
  const auto it = std::find(cyc.begin(), cyc.end(), v);
  if (it == cyc.end()) throw Error(ErrorKind::DomainExceeded, "vertex is not on the face");
  const std::size_t i = it - cyc.begin();
  const Vec4& x = p.vertices[v].v();
  const Vec4 a = geom::tangent_projection(x, p.vertices[cyc[(i + 1) % cyc.size()]].v());
  const Vec4 b = geom::tangent_projection(x, p.vertices[cyc[(i + cyc.size() - 1) % cyc.size()]].v());
  const double c = mink(a, b) / std::sqrt(mink(a, a) * mink(b, b));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double face_area(const ConvexPolyhedronH3& p, int f) {
  const auto& cyc = p.face_vertices.at(f);
  double sum = 0.0;
  for (int v : cyc) sum += face_angle(p, f, v);
  return (static_cast<double>(cyc.size()) - 2.0) * kPi - sum;
}

double edge_length(const ConvexPolyhedronH3& p, int e) {
  return geom::h_distance(p.vertices[p.edges.at(e)[0]], p.vertices[p.edges.at(e)[1]]);
}

VertexLink vertex_link(const ConvexPolyhedronH3& p, int v) {
  const auto& faces = p.vertex_faces.at(v);
  const auto& edges = p.vertex_edges.at(v);
  const std::size_t d = faces.size();
  VertexLink link;
  link.vertex = v;
  for (std::size_t i = 0; i < d; ++i) {
    link.polygon.sides.push_back(face_angle(p, faces[(i + 1) % d], v));
    link.polygon.angles.push_back(dihedral_angle(p, edges[i]));
  }
  return link;
}

SphericalPolygon polar_dual_polygon(const SphericalPolygon& poly) {
  SphericalPolygon out;
  for (double a : poly.angles) out.sides.push_back(kPi - a);
  for (double s : poly.sides) out.angles.push_back(kPi - s);
  return out;
}

DualMetricOutput dualize(const ConvexPolyhedronH3& p) {
  std::vector<cone::GluedPolygon> polys;
  for (int v = 0; v < p.num_vertices(); ++v) {
    const auto& faces = p.vertex_faces[v];
    const std::size_t d = faces.size();
    const SphericalPolygon dual = polar_dual_polygon(vertex_link(p, v).polygon);
    // Polar corner i sits at face i+1 and polar side i is dual to edge i, so
    // walking the faces counterclockwise reads the polar polygon backwards.
    cone::GluedPolygon g;
    for (std::size_t j = 0; j < d; ++j) {
      g.corner_vertex.push_back(faces[j]);
      g.corner_angle.push_back(dual.angles[(j + d - 1) % d]);
      g.side_length.push_back(dual.sides[j]);
      g.side_key.push_back(p.vertex_edges[v][j]);
    }
    polys.push_back(std::move(g));
  }
  cone::PolygonAssembly asm_ = cone::assemble_polygons(cone::Geometry::Spherical, p.num_faces(), polys);
  std::vector<DualEdgeSource> sources;
  for (std::size_t e = 0; e < asm_.edge_key.size(); ++e) {
    if (asm_.edge_key[e] >= 0) {
      sources.push_back({DualEdgeSource::Kind::PrimalEdge, asm_.edge_key[e]});
    } else {
      sources.push_back({DualEdgeSource::Kind::Diagonal, asm_.edge_polygon[e]});
    }
  }
  std::vector<int> marking(p.num_faces());
  for (int f = 0; f < p.num_faces(); ++f) marking[f] = f;
  return DualMetricOutput{std::move(asm_.metric), std::move(marking), std::move(sources), {},
                          asm_.max_closure_error};
}

std::vector<double> extrinsic_dual_lengths(const ConvexPolyhedronH3& p, const DualMetricOutput& d) {
  const cone::CombSurface& s = d.metric.surface();
  std::vector<double> out;
  for (int e = 0; e < s.num_edges(); ++e) {
    const int h = s.edge_halfedges(e)[0];
    const int a = d.face_of_vertex[s.tail(h)], b = d.face_of_vertex[s.head(h)];
    out.push_back(geom::ds_distance(p.planes[a], p.planes[b]));
  }
  return out;
}

ConvexPolyhedronH3 apply(const geom::Isometry& g, const ConvexPolyhedronH3& p) {
  ConvexPolyhedronH3 out = p;
  for (auto& n : out.planes) n = g.apply(n);
  for (auto& v : out.vertices) v = g.apply(v);
  return out;
}

std::vector<DSPoint> regular_tetrahedron_planes(double theta) {
  const double c = std::cos(theta);
  if (!(theta > kPi / 3.0 && c > 1.0 / 3.0)) {
    throw Error(ErrorKind::DomainExceeded, "regular tetrahedron needs theta in (pi/3, arccos(1/3))");
  }
  const double rho = std::acosh(std::sqrt(0.75 * (c + 1.0)));
  std::vector<DSPoint> out;
  for (const Vec3& u : {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)}) {
    out.push_back(DSPoint::plane_at_distance(u, rho));
  }
  return out;
}

std::vector<DSPoint> cube_planes(double rho) {
  if (!(rho > 0.0 && std::sinh(rho) * std::sinh(rho) < 0.5)) {
    throw Error(ErrorKind::DomainExceeded, "cube needs 0 < sinh^2 rho < 1/2");
  }
  std::vector<DSPoint> out;
  for (int k = 0; k < 3; ++k) {
    for (double s : {1.0, -1.0}) {
      Vec3 u = Vec3::Zero();
      u[k] = s;
      out.push_back(DSPoint::plane_at_distance(u, rho));
    }
  }
  return out;
}

std::vector<DSPoint> octahedron_planes(double rho) {
  if (!(rho > 0.0 && std::sqrt(3.0) * std::tanh(rho) < 1.0)) {
    throw Error(ErrorKind::DomainExceeded, "octahedron needs 0 < sqrt(3) tanh rho < 1");
  }
  std::vector<DSPoint> out;
  for (double x : {1.0, -1.0}) {
    for (double y : {1.0, -1.0}) {
      for (double z : {1.0, -1.0}) out.push_back(DSPoint::plane_at_distance(Vec3(x, y, z), rho));
    }
  }
  return out;
}

ConvexPolyhedronH3 random_polyhedron(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(5, 10);
  std::uniform_real_distribution<double> dist(0.3, 0.8);
  std::normal_distribution<double> gauss;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const int m = count(rng);
    std::vector<DSPoint> planes;
    for (int i = 0; i < m; ++i) {
      const Vec3 u(gauss(rng), gauss(rng), gauss(rng));
      if (u.norm() < 1e-3) continue;
      planes.push_back(DSPoint::plane_at_distance(u, dist(rng)));
    }
    try {
      ConvexPolyhedronH3 p = hull_from_dual_points(planes);
      if (p.num_faces() < 4) continue;
      // Reject near-degenerate configurations: short edges, flat dihedrals,
      // vertices barely off a non-incident plane.
      bool good = true;
      for (int e = 0; e < p.num_edges() && good; ++e) {
        const double th = dihedral_angle(p, e);
        good = edge_length(p, e) > 0.1 && th > 0.05 && th < kPi - 0.05;
      }
      for (int v = 0; v < p.num_vertices() && good; ++v) {
        good = p.vertex_faces[v].size() == 3;
        for (int f = 0; f < p.num_faces() && good; ++f) {
          const auto& cyc = p.face_vertices[f];
          if (std::find(cyc.begin(), cyc.end(), v) != cyc.end()) continue;
          good = mink(p.planes[f].v(), p.vertices[v].v()) < -1e-2;
        }
      }
      for (int f = 0; f < p.num_faces() && good; ++f) {
        for (int v : p.face_vertices[f]) good = good && face_angle(p, f, v) > 0.05;
      }
      if (good) return p;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorKind::EmptyInterior, "could not sample a random polyhedron");
}

}  // namespace hypdual::poly
