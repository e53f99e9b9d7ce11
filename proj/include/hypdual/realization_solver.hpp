#pragma once

// Recovers a compact convex polyhedron from a concave spherical cone-metric on
// the sphere by moving its dual points in de Sitter space until their mutual
// distances match the target edge lengths.

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

#include "hypdual/cone_surface.hpp"
#include "hypdual/geom_kernel.hpp"
#include "hypdual/polyhedra.hpp"

namespace hypdual::solve {

using geom::DSPoint;

struct SolverState {
  std::vector<DSPoint> positions;  // one per dual vertex
  cone::CombSurface triangulation;
  std::vector<double> target;      // per edge of the triangulation
  double s = 1.0;                  // homotopy parameter

  int num_vertices() const { return static_cast<int>(positions.size()); }
  /// Dual vertices pinned by the gauge: the corners of triangle 0. The first
  /// is fixed, the second moves along one direction, the third along two.
  std::array<int, 3> gauge() const { return triangulation.triangles().front(); }
};

/// State whose positions are the face normals of p and whose target is the
/// dual metric d (normally dualize(p)).
SolverState state_from_polyhedron(const poly::ConvexPolyhedronH3& p, const poly::DualMetricOutput& d);

/// de Sitter distances between the endpoints of every edge.
std::vector<double> current_lengths(const SolverState& st);
Eigen::VectorXd residual(const SolverState& st);

/// Number of free coordinates after the gauge, 3n - 6.
int num_unknowns(const SolverState& st);
/// Moves every position along its gauge-reduced tangent coordinates.
SolverState displaced(const SolverState& st, const Eigen::VectorXd& delta);
/// Central differences in the gauge-reduced tangent coordinates.
Eigen::MatrixXd jacobian(const SolverState& st, double step = 1e-6);

struct Feasibility {
  bool ok = false;
  std::string reason;
};
/// Spacelike dual edges and triangles, and every position a face of a
/// bounded hull.
Feasibility check_feasible(const SolverState& st);
/// Every triangle's three faces share a vertex of the hull.
bool realizes_triangulation(const SolverState& st);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double damping_floor = 1e-12;
  double fd_step = 1e-6;
  double polish_tol = 1e-13;  // keeps iterating past tol while this still improves
};

struct NewtonResult {
  SolverState state;
  int iterations = 0;
  std::vector<double> residual_norms;
};

/// Damped Newton iteration; the step is halved until the residual norm drops
/// and the state stays feasible. Throws StepStalled or FeasibilityLost.
NewtonResult newton_solve(const SolverState& st, const NewtonOptions& opts = {});

struct RigidityReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double condition = 0.0;
  int dimension = 0;
};
RigidityReport rigidity_report(const SolverState& st);

struct ContinuationStep {
  double s = 0.0;
  int newton_iterations = 0;
  double residual_norm = 0.0;
  double min_concavity_margin = 0.0;
};

struct FlipEvent {
  double s = 0.0;
  int edge = -1;
};

struct ContinuationResult {
  SolverState state;
  std::vector<ContinuationStep> steps;
  std::vector<FlipEvent> flips;
  double scaling_bump = 0.0;  // c in the fallback path exp(c 4s(1-s)) l(s)
};

/// Follows l(s) = (1-s) l_start + s l_target from the state's own lengths to
/// the target, which must share the state's triangulation. Throws
/// HomotopyBlocked when neither a flip nor the scaled fallback path keeps the
/// interpolated metric valid and concave, or Newton cannot follow it.
ContinuationResult continuation(const SolverState& start, const cone::ConeMetric& target, int steps,
                                const NewtonOptions& opts = {});

poly::ConvexPolyhedronH3 realized_polyhedron(const SolverState& st);

/// Moves every position by a random tangent vector of frame norm `eps`,
/// redrawing until every dual point still supports a face; the
/// target is reset to the displaced state's own lengths.
SolverState perturbed(const SolverState& st, double eps, std::mt19937_64& rng);

SolverState apply(const geom::Isometry& g, const SolverState& st);

struct AutoStart {
  SolverState state;  // on the target's triangulation, target = own lengths
  std::string fixture;
  int flips = 0;
  bool mirrored = false;
};

/// Start at the dual points of p, relabelled (and mirrored if needed) so that
/// its dual triangulation, after flipping some fan diagonals, is the
/// target's. Throws HomotopyBlocked if no such relabelling exists.
AutoStart start_from_polyhedron(const poly::ConvexPolyhedronH3& p, const cone::ConeMetric& target);

/// start_from_polyhedron with a symmetric tetrahedron, cube or octahedron
/// having as many faces as the target has vertices.
AutoStart auto_start(const cone::ConeMetric& target);

}  // namespace hypdual::solve
