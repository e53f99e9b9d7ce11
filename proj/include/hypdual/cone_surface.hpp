#pragma once

// Triangulated closed oriented surfaces carrying spherical or hyperbolic
// cone-metrics, given by one length per edge.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "hypdual/errors.hpp"
#include "hypdual/geom_kernel.hpp"

namespace hypdual::cone {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Tri = std::array<int, 3>;

// Half-edge h = 3*t + k runs from corner k to corner (k+1)%3 of triangle t.
// Triangles are listed counterclockwise. Vertices may repeat inside a
// triangle and two triangles may share several edges, so gluings are stored
// explicitly as an edge id per half-edge.
class CombSurface {
 public:
  CombSurface() = default;
  CombSurface(int num_vertices, std::vector<Tri> triangles, std::vector<int> edge_of_halfedge);

  /// Pairs half-edges by their endpoint pairs; needs a simplicial input.
  static CombSurface from_triangles(int num_vertices, std::vector<Tri> triangles);

  int num_vertices() const { return num_vertices_; }
  int num_faces() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edge_halfedges_.size()); }
  int num_halfedges() const { return 3 * num_faces(); }

  const std::vector<Tri>& triangles() const { return triangles_; }
  const std::vector<int>& edge_of_halfedge() const { return edge_of_; }

  int edge(int h) const { return edge_of_[h]; }
  int twin(int h) const { return twin_[h]; }
  static int face(int h) { return h / 3; }
  static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  int tail(int h) const { return triangles_[h / 3][h % 3]; }
  int head(int h) const { return triangles_[h / 3][(h % 3 + 1) % 3]; }
  const std::array<int, 2>& edge_halfedges(int e) const { return edge_halfedges_[e]; }

  int euler_characteristic() const { return num_vertices_ - num_edges() + num_faces(); }
  int genus() const { return (2 - euler_characteristic()) / 2; }

  /// Retriangulates across edge e, keeping every edge id. Throws FlipBlocked
  /// when both sides of e lie in the same triangle.
  CombSurface flipped(int e) const;

 private:
  int num_vertices_ = 0;
  std::vector<Tri> triangles_;
  std::vector<int> edge_of_;
  std::vector<int> twin_;
  std::vector<std::array<int, 2>> edge_halfedges_;
};

enum class Geometry { Spherical, Hyperbolic };

/// Interior angle opposite `opposite` in a triangle with the given sides.
double triangle_angle(Geometry g, double opposite, double side1, double side2);
/// Spherical excess or hyperbolic defect.
double triangle_area(Geometry g, double a, double b, double c);

struct ChartViolation {
  int edge = -1;
  int triangle = -1;
  double margin = 0.0;
};

/// First violation of the chart conditions (lengths in (0, pi) for spherical
/// metrics, strict triangle inequalities and spherical perimeter < 2 pi),
/// with `margin` slack on every inequality.
std::optional<ChartViolation> chart_violation(const CombSurface& s, Geometry g,
                                              const std::vector<double>& lengths,
                                              double margin = 0.0);

class ConeMetric {
 public:
  ConeMetric(CombSurface surface, Geometry geometry, std::vector<double> lengths);

  const CombSurface& surface() const { return surface_; }
  Geometry geometry() const { return geometry_; }
  const std::vector<double>& lengths() const { return lengths_; }
  double length(int e) const { return lengths_[e]; }
  double halfedge_length(int h) const { return lengths_[surface_.edge(h)]; }

  /// Angle at each corner of triangle t.
  std::array<double, 3> corner_angles(int t) const;
  double area(int t) const;
  double total_area() const;

 private:
  CombSurface surface_;
  Geometry geometry_;
  std::vector<double> lengths_;
};

double cone_angle(const ConeMetric& m, int v);
std::vector<double> cone_angles(const ConeMetric& m);

struct ConcavityReport {
  bool concave = false;
  double min_margin = 0.0;
  std::vector<double> margins;  // cone angle minus 2 pi, per vertex
};

/// Every vertex is treated as marked. Concave iff every margin exceeds `tol`.
ConcavityReport is_concave(const ConeMetric& m, double tol = 1e-12);

/// Area + sum(2 pi - cone angle) - 2 pi chi (with the sign flipped for the
/// hyperbolic curvature), zero for every valid metric.
double gauss_bonnet_residual(const ConeMetric& m);

/// Multiplies every length by e^lambda.
ConeMetric scale(const ConeMetric& m, double lambda);

ConeMetric flip_edge(const ConeMetric& m, int e);

/// Convex polygon with glued sides. Corners are counterclockwise; side i
/// joins corner i to corner i+1 and is glued to the one other side carrying
/// the same key (possibly in the same polygon).
struct GluedPolygon {
  std::vector<int> corner_vertex;
  std::vector<double> corner_angle;
  std::vector<double> side_length;
  std::vector<int> side_key;
};

struct PolygonAssembly {
  ConeMetric metric;
  std::vector<int> edge_key;        // glued-side key, or -1 for a fan diagonal
  std::vector<int> edge_polygon;    // owning polygon of a fan diagonal, else -1
  std::vector<int> face_polygon;    // polygon each triangle came from
  std::vector<std::array<int, 2>> halfedge_side;  // (polygon, side) or (polygon, -1)
  double max_closure_error = 0.0;   // development gap of the worst polygon
};

/// Fan-triangulates every polygon from its lowest-vertex-id corner (first
/// such corner on ties), computing diagonals by developing the polygon.
PolygonAssembly assemble_polygons(Geometry g, int num_vertices,
                                  const std::vector<GluedPolygon>& polygons);

/// Vertex positions of a polygon developed into the model plane from its
/// side lengths and interior angles; entry m closes back onto entry 0.
std::vector<Eigen::Vector3d> develop_polygon(Geometry g, const std::vector<double>& sides,
                                             const std::vector<double>& angles);

/// max_e |ln(l2_e / l1_e)| over identically triangulated metrics.
double distortion_bound(const ConeMetric& m1, const ConeMetric& m2);

struct SurfacePoint {
  int triangle = 0;
  Eigen::Vector3d bary = Eigen::Vector3d::Constant(1.0 / 3.0);
};

/// A geodesic developed into the model plane (S^2 or H^2 as a quadric in R^3).
struct GeodesicTrace {
  enum class Status { ReachedLength, HitConePoint };

  SurfacePoint start;
  double direction = 0.0;
  std::vector<int> crossings;  // half-edges exited through, in order
  std::vector<Eigen::Vector3d> crossing_points;
  std::vector<std::array<Eigen::Vector3d, 2>> crossed_edges;
  Eigen::Vector3d origin;   // developed start point
  Eigen::Vector3d tangent;  // developed unit start direction
  double length = 0.0;
  SurfacePoint end;
  Status status = Status::ReachedLength;
};

/// Straight-line continuation from `start`. `direction` is measured
/// counterclockwise from the geodesic leaving `start` toward corner 0 of the
/// start triangle.
GeodesicTrace trace_geodesic(const ConeMetric& m, const SurfacePoint& start, double direction,
                             double max_length);

struct GeodesicSearchOptions {
  int depth = 8;
  double length_cap = std::numeric_limits<double>::infinity();
  // Per half-edge deck transformation picked up when crossing it. When set,
  // only cycles whose holonomy word is trivial (contractible classes) count.
  const std::vector<geom::Isometry>* deck = nullptr;
};

struct GeodesicSearchReport {
  bool found = false;
  double min_length = std::numeric_limits<double>::infinity();
  std::vector<int> cycle;  // half-edges of the shortest geodesic found
  int depth = 0;
  std::size_t cycles_examined = 0;
  std::size_t geodesics_found = 0;
};

/// Bounded search: every closed geodesic avoiding cone points that crosses at
/// most `depth` edges is found. Not a certificate beyond that depth.
GeodesicSearchReport shortest_closed_geodesic_search(const ConeMetric& m,
                                                     const GeodesicSearchOptions& opts = {});

}  // namespace hypdual::cone
