#include "hypdual/realization_solver.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace hypdual::solve {

namespace {

using geom::mink;
using geom::Vec4;
using Basis = Eigen::Matrix<double, 4, Eigen::Dynamic>;

constexpr double kPi = std::numbers::pi;

// Tangent coordinates at every position. Bases are orthonormal for the frame
// inner product centred at a point determined by the configuration itself,
// and built from neighbouring positions, so a global isometry carries the
// chart of a state to the chart of its image.
struct Chart {
  Vec4 frame;
  std::vector<Basis> basis;
  std::vector<int> offset;
  int dim = 0;
};

Vec4 configuration_frame(const SolverState& st) {
  Vec4 sum = Vec4::Zero();
  for (const auto& t : st.triangulation.triangles()) {
    if (auto c = geom::common_point(st.positions[t[0]].v(), st.positions[t[1]].v(), st.positions[t[2]].v())) {
      sum += c->v();
    }
  }
  if (!(mink(sum, sum) < 0.0) || sum[0] <= 0.0) return Vec4(1.0, 0.0, 0.0, 0.0);
  return geom::HPoint::normalize(sum).v();
}

Basis gram_schmidt(const Vec4& p, const std::vector<Vec4>& candidates, int want, const Vec4& frame) {
  Basis out(4, want);
  int got = 0;
  for (const Vec4& raw : candidates) {
    if (got == want) break;
    Vec4 t = geom::tangent_projection(p, raw);
    const double before = std::sqrt(std::max(0.0, geom::frame_inner(t, t, frame)));
    if (before < 1e-12) continue;
    for (int j = 0; j < got; ++j) t -= geom::frame_inner(t, out.col(j), frame) * out.col(j);
    const double after = std::sqrt(std::max(0.0, geom::frame_inner(t, t, frame)));
    if (after < 1e-6 * before) continue;
    out.col(got++) = t / after;
  }
  if (got < want) throw Error(ErrorKind::FeasibilityLost, "degenerate tangent basis");
  return out;
}

Chart build_chart(const SolverState& st, bool full) {
  const int n = st.num_vertices();
  const cone::CombSurface& s = st.triangulation;
  Chart chart;
  chart.frame = configuration_frame(st);
  std::vector<std::set<int>> nbrs(n);
  for (int h = 0; h < s.num_halfedges(); ++h) {
    if (s.tail(h) != s.head(h)) nbrs[s.tail(h)].insert(s.head(h));
  }
  const auto g = st.gauge();
  for (int v = 0; v < n; ++v) {
    const Vec4& p = st.positions[v].v();
    std::vector<Vec4> cands;
    int want = 3;
    if (!full && v == g[0]) {
      want = 0;
    } else if (!full && v == g[1]) {
      want = 1;
      cands = {st.positions[g[0]].v()};
    } else if (!full && v == g[2]) {
      want = 2;
      cands = {st.positions[g[0]].v(), st.positions[g[1]].v()};
    } else {
      for (int w : nbrs[v]) cands.push_back(st.positions[w].v());
      for (int w = 0; w < n; ++w) {
        if (w != v && !nbrs[v].count(w)) cands.push_back(st.positions[w].v());
      }
      for (int k = 0; k < 4; ++k) cands.push_back(Vec4::Unit(k));
    }
    chart.offset.push_back(chart.dim);
    chart.basis.push_back(want > 0 ? gram_schmidt(p, cands, want, chart.frame) : Basis(4, 0));
    chart.dim += want;
  }
  return chart;
}

SolverState displaced_in(const SolverState& st, const Chart& chart, const Eigen::VectorXd& delta) {
  SolverState out = st;
  for (int v = 0; v < st.num_vertices(); ++v) {
    const int k = static_cast<int>(chart.basis[v].cols());
    if (k == 0) continue;
    const Vec4 t = chart.basis[v] * delta.segment(chart.offset[v], k);
    out.positions[v] = DSPoint::normalize(st.positions[v].v() + t);
  }
  return out;
}

Eigen::MatrixXd jacobian_in(const SolverState& st, const Chart& chart, double step) {
  const int m = st.triangulation.num_edges();
  Eigen::MatrixXd jac(m, chart.dim);
  for (int j = 0; j < chart.dim; ++j) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(chart.dim);
    d[j] = step;
    const Eigen::VectorXd plus = residual(displaced_in(st, chart, d));
    const Eigen::VectorXd minus = residual(displaced_in(st, chart, -d));
    jac.col(j) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

[[noreturn]] void blocked(double s, int edge, const std::string& what) {
  std::ostringstream os;
  os << what << " (s = " << s;
  if (edge >= 0) os << ", edge " << edge;
  os << ")";
  throw Error(ErrorKind::HomotopyBlocked, os.str());
}

bool same_triangulation(const cone::CombSurface& a, const cone::CombSurface& b) {
  return a.num_vertices() == b.num_vertices() && a.triangles() == b.triangles() &&
         a.edge_of_halfedge() == b.edge_of_halfedge();
}

constexpr double kFlipLengthMargin = 1e-6;
constexpr double kFlipTriangleMargin = 1e-8;

std::optional<int> path_violation(const cone::CombSurface& s, const std::vector<double>& l) {
  for (int e = 0; e < s.num_edges(); ++e) {
    if (l[e] >= kPi - kFlipLengthMargin) return e;
  }
  if (auto v = cone::chart_violation(s, cone::Geometry::Spherical, l, kFlipTriangleMargin)) return v->edge;
  return std::nullopt;
}

struct Segment {
  double s0 = 0.0;
  std::vector<double> a, b;
  double bump = 0.0;

  std::vector<double> at(double s) const {
    const double tau = s0 >= 1.0 ? 1.0 : (s - s0) / (1.0 - s0);
    const double f = std::exp(bump * 4.0 * tau * (1.0 - tau));
    std::vector<double> out(a.size());
    for (std::size_t e = 0; e < a.size(); ++e) out[e] = f * ((1.0 - tau) * a[e] + tau * b[e]);
    return out;
  }
};

bool segment_valid(const cone::CombSurface& s, const Segment& seg, int samples) {
  for (int i = 1; i <= samples; ++i) {
    const double sv = seg.s0 + (1.0 - seg.s0) * i / samples;
    const auto l = seg.at(sv);
    if (path_violation(s, l)) return false;
    try {
      if (!cone::is_concave(cone::ConeMetric(s, cone::Geometry::Spherical, l)).concave) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

void choose_bump(const cone::CombSurface& s, Segment& seg, int samples) {
  for (double c : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) {
    seg.bump = c;
    if (segment_valid(s, seg, samples)) return;
  }
  seg.bump = 0.0;
}

struct Iso {
  std::vector<int> vertex;    // A vertex -> B vertex
  std::vector<int> halfedge;  // A half-edge -> B half-edge
};

std::optional<Iso> find_isomorphism(const cone::CombSurface& a, const cone::CombSurface& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_faces() != b.num_faces() || a.num_edges() != b.num_edges()) {
    return std::nullopt;
  }
  for (int start = 0; start < b.num_halfedges(); ++start) {
    Iso iso{std::vector<int>(a.num_vertices(), -1), std::vector<int>(a.num_halfedges(), -1)};
    std::vector<int> used_v(b.num_vertices(), -1), used_h(b.num_halfedges(), -1);
    std::deque<std::pair<int, int>> queue{{0, start}};
    bool ok = true;
    while (!queue.empty() && ok) {
      const auto [x, y] = queue.front();
      queue.pop_front();
      if (iso.halfedge[x] >= 0) {
        ok = iso.halfedge[x] == y;
        continue;
      }
      if (used_h[y] >= 0) {
        ok = false;
        break;
      }
      iso.halfedge[x] = y;
      used_h[y] = x;
      const int va = a.tail(x), vb = b.tail(y);
      if (iso.vertex[va] < 0 && used_v[vb] < 0) {
        iso.vertex[va] = vb;
        used_v[vb] = va;
      } else if (iso.vertex[va] != vb) {
        ok = false;
        break;
      }
      queue.emplace_back(cone::CombSurface::next(x), cone::CombSurface::next(y));
      queue.emplace_back(a.twin(x), b.twin(y));
    }
    if (ok) return iso;
  }
  return std::nullopt;
}

cone::CombSurface mirrored(const cone::CombSurface& s) {
  std::vector<cone::Tri> tris;
  std::vector<int> edges(s.num_halfedges());
  for (int t = 0; t < s.num_faces(); ++t) {
    const auto& tri = s.triangles()[t];
    tris.push_back({tri[0], tri[2], tri[1]});
    edges[3 * t + 0] = s.edge(3 * t + 2);
    edges[3 * t + 1] = s.edge(3 * t + 1);
    edges[3 * t + 2] = s.edge(3 * t + 0);
  }
  return cone::CombSurface(s.num_vertices(), std::move(tris), std::move(edges));
}

}  // namespace

SolverState state_from_polyhedron(const poly::ConvexPolyhedronH3& p, const poly::DualMetricOutput& d) {
  SolverState st;
  for (int f : d.face_of_vertex) st.positions.push_back(p.planes.at(f));
  st.triangulation = d.metric.surface();
  st.target = d.metric.lengths();
  return st;
}

std::vector<double> current_lengths(const SolverState& st) {
  const cone::CombSurface& s = st.triangulation;
  std::vector<double> out(s.num_edges());
  for (int e = 0; e < s.num_edges(); ++e) {
    const int h = s.edge_halfedges(e)[0];
    out[e] = geom::ds_distance(st.positions[s.tail(h)], st.positions[s.head(h)]);
  }
  return out;
}

Eigen::VectorXd residual(const SolverState& st) {
  const auto l = current_lengths(st);
  Eigen::VectorXd r(l.size());
  for (std::size_t e = 0; e < l.size(); ++e) r[e] = l[e] - st.target[e];
  return r;
}

int num_unknowns(const SolverState& st) { return 3 * st.num_vertices() - 6; }

SolverState displaced(const SolverState& st, const Eigen::VectorXd& delta) {
  return displaced_in(st, build_chart(st, false), delta);
}

Eigen::MatrixXd jacobian(const SolverState& st, double step) {
  return jacobian_in(st, build_chart(st, false), step);
}

Feasibility check_feasible(const SolverState& st) {
  const cone::CombSurface& s = st.triangulation;
  for (int e = 0; e < s.num_edges(); ++e) {
    const int h = s.edge_halfedges(e)[0];
    const double ip = mink(st.positions[s.tail(h)].v(), st.positions[s.head(h)].v());
    if (!(ip > -1.0 && ip < 1.0)) return {false, "dual edge " + std::to_string(e) + " is not spacelike"};
  }
  for (int t = 0; t < s.num_faces(); ++t) {
    const auto& tri = s.triangles()[t];
    if (!geom::common_point(st.positions[tri[0]].v(), st.positions[tri[1]].v(), st.positions[tri[2]].v())) {
      return {false, "dual triangle " + std::to_string(t) + " is not spacelike"};
    }
  }
  try {
    const poly::ConvexPolyhedronH3 p = poly::hull_from_dual_points(st.positions);
    if (p.num_faces() != st.num_vertices()) return {false, "a dual point does not support a face"};
  } catch (const Error& e) {
    return {false, e.what()};
  }
  return {true, ""};
}

poly::ConvexPolyhedronH3 realized_polyhedron(const SolverState& st) { return poly::hull_from_dual_points(st.positions); }

bool realizes_triangulation(const SolverState& st) {
  poly::ConvexPolyhedronH3 p;
  try {
    p = realized_polyhedron(st);
  } catch (const Error&) {
    return false;
  }
  if (p.num_faces() != st.num_vertices()) return false;
  std::vector<int> face_of(st.num_vertices(), -1);
  for (int f = 0; f < p.num_faces(); ++f) face_of[p.plane_source[f]] = f;
  std::vector<std::set<int>> at_vertex(p.num_vertices());
  for (int v = 0; v < p.num_vertices(); ++v) at_vertex[v] = {p.vertex_faces[v].begin(), p.vertex_faces[v].end()};
  for (const auto& tri : st.triangulation.triangles()) {
    const bool shared = std::any_of(at_vertex.begin(), at_vertex.end(), [&](const std::set<int>& fs) {
      return fs.count(face_of[tri[0]]) && fs.count(face_of[tri[1]]) && fs.count(face_of[tri[2]]);
    });
    if (!shared) return false;
  }
  return true;
}

NewtonResult newton_solve(const SolverState& st, const NewtonOptions& opts) {
  NewtonResult res{st, 0, {}};
  double norm = residual(st).norm();
  res.residual_norms.push_back(norm);
  while (norm >= opts.polish_tol) {
    if (res.iterations >= opts.max_iter) {
      if (norm < opts.tol) break;
      throw Error(ErrorKind::StepStalled, "no convergence within the iteration limit");
    }
    const Chart chart = build_chart(res.state, false);
    const Eigen::VectorXd r = residual(res.state);
    const Eigen::MatrixXd jac = jacobian_in(res.state, chart, opts.fd_step);
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);

    bool accepted = false, any_feasible = false;
    for (double alpha = 1.0; alpha >= opts.damping_floor; alpha *= 0.5) {
      try {
        SolverState cand = displaced_in(res.state, chart, alpha * step);
        const double cand_norm = residual(cand).norm();
        if (!check_feasible(cand).ok) continue;
        any_feasible = true;
        if (cand_norm < norm) {
          res.state = std::move(cand);
          norm = cand_norm;
          accepted = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) {
      if (norm < opts.tol) break;  // converged; further polishing is below roundoff
      if (any_feasible) throw Error(ErrorKind::StepStalled, "damping floor reached without decrease");
      throw Error(ErrorKind::FeasibilityLost, "every damped step leaves the feasible set");
    }
    ++res.iterations;
    res.residual_norms.push_back(norm);
  }
  return res;
}

RigidityReport rigidity_report(const SolverState& st) {
  const Eigen::MatrixXd jac = jacobian(st);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& sv = svd.singularValues();
  RigidityReport r;
  r.dimension = static_cast<int>(jac.cols());
  r.sigma_max = sv[0];
  r.sigma_min = sv[sv.size() - 1];
  r.condition = r.sigma_max / r.sigma_min;
  return r;
}

ContinuationResult continuation(const SolverState& start, const cone::ConeMetric& target, int steps,
                                const NewtonOptions& opts) {
  if (steps < 1) throw Error(ErrorKind::DomainExceeded, "need at least one continuation step");
  if (target.geometry() != cone::Geometry::Spherical) {
    throw Error(ErrorKind::InvalidMetric, "target must be spherical");
  }
  if (!same_triangulation(start.triangulation, target.surface())) {
    throw Error(ErrorKind::InvalidMetric, "start and target use different triangulations");
  }
  if (!cone::is_concave(target).concave) throw Error(ErrorKind::InvalidMetric, "target is not concave");

  ContinuationResult out{start, {}, {}, 0.0};
  SolverState& st = out.state;
  cone::ConeMetric goal = target;
  const int samples = 4 * steps;
  Segment seg{0.0, current_lengths(start), target.lengths(), 0.0};
  choose_bump(st.triangulation, seg, samples);
  out.scaling_bump = seg.bump;

  const double nominal = 1.0 / steps;
  double h = nominal;
  double s_prev = 0.0;
  st.s = 0.0;
  while (s_prev < 1.0) {
    const double s_next = std::min(1.0, s_prev + h);
    const auto l = seg.at(s_next);
    if (const auto bad = path_violation(st.triangulation, l)) {
      if (out.flips.size() >= 32) blocked(s_next, *bad, "too many flips");
      try {
        const cone::ConeMetric here(st.triangulation, cone::Geometry::Spherical, seg.at(s_prev));
        const cone::ConeMetric flipped_here = cone::flip_edge(here, *bad);
        goal = cone::flip_edge(goal, *bad);
        st.triangulation = flipped_here.surface();
        seg = Segment{s_prev, flipped_here.lengths(), goal.lengths(), 0.0};
      } catch (const Error& e) {
        blocked(s_next, *bad, std::string("chart exit with no valid flip: ") + e.what());
      }
      choose_bump(st.triangulation, seg, samples);
      out.flips.push_back({s_prev, *bad});
      continue;
    }
    double margin;
    try {
      const auto rep = cone::is_concave(cone::ConeMetric(st.triangulation, cone::Geometry::Spherical, l));
      if (!rep.concave) blocked(s_next, -1, "interpolated metric is not concave");
      margin = rep.min_margin;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::HomotopyBlocked) throw;
      blocked(s_next, -1, std::string("interpolated metric is invalid: ") + e.what());
    }

    SolverState trial = st;
    trial.target = l;
    trial.s = s_next;
    try {
      NewtonOptions o = opts;
      if (s_next < 1.0) o.polish_tol = opts.tol;
      NewtonResult nr = newton_solve(trial, o);
      st = std::move(nr.state);
      out.steps.push_back({s_next, nr.iterations, nr.residual_norms.back(), margin});
      s_prev = s_next;
      h = std::min(nominal, 2.0 * h);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::StepStalled && e.kind() != ErrorKind::FeasibilityLost) throw;
      h *= 0.5;
      if (h < nominal / 64.0) blocked(s_next, -1, std::string("Newton cannot follow the path: ") + e.what());
    }
  }
  if (!realizes_triangulation(st)) blocked(1.0, -1, "final state does not realize the target triangulation");
  return out;
}

SolverState perturbed(const SolverState& st, double eps, std::mt19937_64& rng) {
  const Chart chart = build_chart(st, true);
  std::normal_distribution<double> gauss;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd delta(chart.dim);
    for (int v = 0; v < st.num_vertices(); ++v) {
      Eigen::Vector3d c(gauss(rng), gauss(rng), gauss(rng));
      delta.segment<3>(chart.offset[v]) = eps * c.normalized();
    }
    SolverState out = displaced_in(st, chart, delta);
    if (!check_feasible(out).ok) continue;
    out.target = current_lengths(out);
    return out;
  }
  throw Error(ErrorKind::FeasibilityLost, "no feasible perturbation of size " + std::to_string(eps));
}

SolverState apply(const geom::Isometry& g, const SolverState& st) {
  SolverState out = st;
  for (auto& p : out.positions) p = g.apply(p);
  return out;
}

AutoStart auto_start(const cone::ConeMetric& target) {
  const int n = target.surface().num_vertices();
  std::string name;
  std::vector<DSPoint> planes;
  if (n == 4) {
    name = "tetrahedron";
    planes = poly::regular_tetrahedron_planes(0.5 * (kPi / 3.0 + std::acos(1.0 / 3.0)));
  } else if (n == 6) {
    name = "cube";
    planes = poly::cube_planes(0.5);
  } else if (n == 8) {
    name = "octahedron";
    planes = poly::octahedron_planes(0.3);
  } else {
    throw Error(ErrorKind::HomotopyBlocked, "no symmetric start with " + std::to_string(n) + " faces");
  }
  AutoStart out = start_from_polyhedron(poly::hull_from_dual_points(planes), target);
  out.fixture = name;
  return out;
}

AutoStart start_from_polyhedron(const poly::ConvexPolyhedronH3& p, const cone::ConeMetric& target) {
  const int n = target.surface().num_vertices();
  if (p.num_faces() != n) {
    throw Error(ErrorKind::HomotopyBlocked, "start has " + std::to_string(p.num_faces()) + " faces, target has " +
                                                std::to_string(n) + " vertices");
  }
  const poly::DualMetricOutput d = poly::dualize(p);

  std::vector<int> diagonals;
  for (std::size_t e = 0; e < d.edge_sources.size(); ++e) {
    if (d.edge_sources[e].kind == poly::DualEdgeSource::Kind::Diagonal) diagonals.push_back(static_cast<int>(e));
  }
  geom::Mat4 reflect = geom::Mat4::Identity();
  reflect(1, 1) = -1.0;
  for (unsigned mask = 0; mask < (1u << diagonals.size()); ++mask) {
    cone::ConeMetric m = d.metric;
    int flips = 0;
    for (std::size_t i = 0; i < diagonals.size(); ++i) {
      if (mask & (1u << i)) {
        m = cone::flip_edge(m, diagonals[i]);
        ++flips;
      }
    }
    for (bool mirror : {false, true}) {
      const cone::CombSurface s = mirror ? mirrored(m.surface()) : m.surface();
      const auto iso = find_isomorphism(s, target.surface());
      if (!iso) continue;
      AutoStart out;
      out.flips = flips;
      out.mirrored = mirror;
      std::vector<std::optional<DSPoint>> pos(n);
      for (int v = 0; v < n; ++v) {
        Vec4 x = p.planes[d.face_of_vertex[v]].v();
        if (mirror) x = reflect * x;
        pos[iso->vertex[v]] = DSPoint::normalize(x);
      }
      for (auto& x : pos) out.state.positions.push_back(*x);
      out.state.triangulation = target.surface();
      out.state.target = current_lengths(out.state);
      return out;
    }
  }
  throw Error(ErrorKind::HomotopyBlocked, "target triangulation is not reachable from the start");
}

}  // namespace hypdual::solve
