#pragma once

// Compact convex polyhedra in H^3, their face lattices and the dual spherical
// cone-metric glued from the polar duals of their vertex links. Also the
// symmetric genus-2 Fuchsian case.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hypdual/cone_surface.hpp"
#include "hypdual/geom_kernel.hpp"

namespace hypdual::poly {

using geom::DSPoint;
using geom::HPoint;

inline constexpr double kIncidenceTol = 1e-9;  // Klein chart, plane residual
inline constexpr double kMergeTol = 1e-8;      // Klein chart, vertex clustering

struct ConvexPolyhedronH3 {
  std::vector<DSPoint> planes;                 // outward face normals
  std::vector<int> plane_source;               // index of each face in the input list
  std::vector<int> redundant;                  // input indices not supporting a face
  std::vector<HPoint> vertices;
  std::vector<std::vector<int>> face_vertices;  // counterclockwise seen from outside
  std::vector<std::array<int, 2>> edges;        // (a, b) with face a->b on the left
  std::vector<std::array<int, 2>> edge_faces;   // (left face, right face)
  std::vector<std::vector<int>> vertex_faces;   // counterclockwise seen from outside
  std::vector<std::vector<int>> vertex_edges;   // edge between vertex_faces[i], [i+1]

  int num_faces() const { return static_cast<int>(planes.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
};

/// Intersection of the negative half-spaces of the given planes, computed in
/// the Klein chart. Planes that do not support a face are dropped and listed
/// in `redundant`.
ConvexPolyhedronH3 hull_from_dual_points(const std::vector<DSPoint>& duals);

/// Convex hull of finitely many points of H^3 (in convex position or not).
ConvexPolyhedronH3 hull_from_points(const std::vector<HPoint>& points);

/// Interior dihedral angle at edge e.
double dihedral_angle(const ConvexPolyhedronH3& p, int e);
/// Interior angle of face f at its vertex v.
double face_angle(const ConvexPolyhedronH3& p, int f, int v);
double face_area(const ConvexPolyhedronH3& p, int f);
/// Hyperbolic length of edge e.
double edge_length(const ConvexPolyhedronH3& p, int e);

// Spherical polygon with angles[i] at the corner where side i starts.
struct SphericalPolygon {
  std::vector<double> sides;
  std::vector<double> angles;
};

// Link of a vertex: corner i is the direction of vertex_edges[v][i] (angle =
// its dihedral angle), side i runs inside face vertex_faces[v][i+1].
struct VertexLink {
  int vertex = -1;
  SphericalPolygon polygon;
};

VertexLink vertex_link(const ConvexPolyhedronH3& p, int v);

/// Polar dual: sides pi - angles, angles pi - sides, traversed in the
/// opposite sense so that applying it twice is the identity.
SphericalPolygon polar_dual_polygon(const SphericalPolygon& poly);

struct DualEdgeSource {
  enum class Kind { PrimalEdge, Diagonal };
  Kind kind = Kind::PrimalEdge;
  int index = -1;  // primal edge, or primal vertex whose polygon holds the diagonal
};

struct DualMetricOutput {
  cone::ConeMetric metric;
  std::vector<int> face_of_vertex;  // dual vertex -> primal face
  std::vector<DualEdgeSource> edge_sources;
  // Deck transformation per half-edge (genus > 0 only, otherwise empty).
  std::vector<geom::Isometry> deck;
  double closure_error = 0.0;
};

DualMetricOutput dualize(const ConvexPolyhedronH3& p);

/// Dual edge lengths recomputed extrinsically as de Sitter distances between
/// the dual points, for fan diagonals as well as primal edges.
std::vector<double> extrinsic_dual_lengths(const ConvexPolyhedronH3& p, const DualMetricOutput& d);

ConvexPolyhedronH3 apply(const geom::Isometry& g, const ConvexPolyhedronH3& p);

// Fixtures.
/// Regular tetrahedron centred at the origin with dihedral angle theta in
/// (pi/3, arccos(1/3)).
std::vector<DSPoint> regular_tetrahedron_planes(double theta);
/// Cube with faces at distance rho from the origin, sinh^2 rho < 1/2.
std::vector<DSPoint> cube_planes(double rho);
/// Octahedron with faces at distance rho; its vertices have valence 4.
std::vector<DSPoint> octahedron_planes(double rho);
/// 5 to 10 random planes at distance in [0.3, 0.8] bounding a compact
/// polyhedron with well-separated vertices.
ConvexPolyhedronH3 random_polyhedron(std::mt19937_64& rng);

struct FuchsianData {
  std::vector<geom::Isometry> generators;  // a1, a2, a3, a4, then their inverses
  DSPoint invariant_plane = DSPoint::normalize(geom::Vec4(0.0, 0.0, 0.0, 1.0));
  int word_bound = 5;
};

/// Surface group of the regular hyperbolic octagon with angles pi/4, acting
/// on the plane x3 = 0.
FuchsianData fuchsian_octagon_group(int word_bound = 5);
/// Max entry of (relator - I).
double relation_residual(const FuchsianData& data);

struct FuchsianDual {
  DualMetricOutput dual;
  VertexLink apex_link;
  std::vector<DSPoint> apex_face_planes;
  double face_area = 0.0;      // area of the single quotient face
  double core_distance = 0.0;  // boundary planes to the invariant plane
  std::size_t orbit_size = 0;
};

/// Dual metric on the genus-2 boundary of the hull of one orbit of the point
/// at height h above the invariant plane. Throws OrbitBoundTooSmall when the
/// apex link differs between word bounds W and W + 1.
FuchsianDual fuchsian_dualize(const FuchsianData& data, double h);

}  // namespace hypdual::poly
