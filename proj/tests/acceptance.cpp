// Acceptance suite: eight end-to-end criteria, one PASS/FAIL line each.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "hypdual/cli_io.hpp"
#include "hypdual/realization_solver.hpp"
#include "support.hpp"

using namespace hypdual;
using testsupport::kPi;

namespace {

// Collects the first few failure messages of one criterion.
struct Verdict {
  int failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first = what;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

std::vector<poly::ConvexPolyhedronH3> fixtures() {
  return {poly::hull_from_dual_points(poly::regular_tetrahedron_planes(1.1)),
          poly::hull_from_dual_points(poly::cube_planes(0.5)),
          poly::hull_from_dual_points(poly::octahedron_planes(0.3))};
}

void polarity(Verdict& v) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 100; ++i) {
    const auto n = testsupport::random_dspoint(rng);
    const auto back = geom::plane_dual(geom::point_dual(n));
    v.expect((back.v() - n.v()).cwiseAbs().maxCoeff() < 1e-9, "dual of dual differs");
  }
  for (int i = 0; i < 20; ++i) {
    const auto p = poly::random_polyhedron(rng);
    const auto from_points = poly::hull_from_points(p.vertices);
    v.expect(testsupport::plane_set_gap(from_points.planes, p.planes) < 1e-9, "hull of vertices misses a face");
    const auto again = poly::hull_from_dual_points(from_points.planes);
    v.expect(testsupport::vertex_set_gap(again.vertices, p.vertices) < 1e-9, "hull of faces misses a vertex");
    const auto g = testsupport::random_isometry(rng);
    std::vector<geom::DSPoint> moved;
    for (const auto& n : p.planes) moved.push_back(g.apply(n));
    std::vector<geom::HPoint> image;
    for (const auto& x : p.vertices) image.push_back(g.apply(x));
    v.expect(testsupport::vertex_set_gap(poly::hull_from_dual_points(moved).vertices, image) < 1e-9,
             "hull does not commute with an isometry");
  }
}

void duality_identities(Verdict& v) {
  auto check = [&](const poly::ConvexPolyhedronH3& p, const std::string& name) {
    const auto d = poly::dualize(p);
    for (int e = 0; e < d.metric.surface().num_edges(); ++e) {
      const auto& src = d.edge_sources[e];
      if (src.kind != poly::DualEdgeSource::Kind::PrimalEdge) continue;
      v.expect(std::abs(d.metric.length(e) - (kPi - poly::dihedral_angle(p, src.index))) < 1e-9,
               name + ": dual edge is not pi - theta");
    }
    for (int u = 0; u < d.metric.surface().num_vertices(); ++u) {
      const double area = poly::face_area(p, d.face_of_vertex[u]);
      v.expect(std::abs(cone::cone_angle(d.metric, u) - (2 * kPi + area)) < 1e-9,
               name + ": cone angle is not 2 pi + area");
    }
    v.expect(std::abs(cone::gauss_bonnet_residual(d.metric)) < 1e-8, name + ": gauss-bonnet residual");
  };
  for (int i = 0; i < 10; ++i) {
    const double theta = kPi / 3 + (std::acos(1.0 / 3.0) - kPi / 3) * (i + 0.5) / 10;
    const testsupport::TetraOracle o(theta);
    const auto p = poly::hull_from_dual_points(poly::regular_tetrahedron_planes(theta));
    check(p, "tetrahedron " + fmt(theta));
    const auto d = poly::dualize(p);
    for (double l : d.metric.lengths()) v.expect(std::abs(l - o.dual_edge) < 1e-9, "tetrahedron: closed form edge");
    for (double a : cone::cone_angles(d.metric)) {
      v.expect(std::abs(a - o.dual_cone_angle) < 1e-9, "tetrahedron: closed form cone angle");
    }
  }
  check(poly::hull_from_dual_points(poly::cube_planes(0.5)), "hexahedron");
}

void concave_and_large(Verdict& v) {
  auto check = [&](const cone::ConeMetric& m, const std::vector<geom::Isometry>* deck, const std::string& name) {
    const auto c = cone::is_concave(m);
    v.expect(c.concave && c.min_margin > 0, name + ": not concave (margin " + fmt(c.min_margin) + ")");
    cone::GeodesicSearchOptions opts;
    opts.depth = 8;
    opts.deck = deck;
    const auto s = cone::shortest_closed_geodesic_search(m, opts);
    v.expect(!s.found || s.min_length > cone::kTwoPi, name + ": closed geodesic of length " + fmt(s.min_length));
  };
  for (double theta : {1.06, 1.1, 1.15, 1.2}) {
    check(poly::dualize(poly::hull_from_dual_points(poly::regular_tetrahedron_planes(theta))).metric, nullptr,
          "tetrahedron");
  }
  for (const auto& p : fixtures()) check(poly::dualize(p).metric, nullptr, "fixture");
  std::mt19937_64 rng(103);
  for (int i = 0; i < 10; ++i) check(poly::dualize(poly::random_polyhedron(rng)).metric, nullptr, "random");
  const auto data = poly::fuchsian_octagon_group();
  for (double h : {0.5, 1.0, 2.0}) {
    const auto fx = poly::fuchsian_dualize(data, h);
    check(fx.dual.metric, &fx.dual.deck, "genus 2");
  }
}

void lambda_scaling(Verdict& v) {
  std::mt19937_64 rng(104);
  const auto metrics = testsupport::random_concave_metrics(rng, 50, 0.05, 0.1);
  for (const auto& m : metrics) {
    const double lambda = testsupport::uniform(rng, 1e-6, 0.1);
    const auto s = cone::scale(m, lambda);
    v.expect(cone::is_concave(s).concave, "scaled metric not concave");
    for (double l : s.lengths()) v.expect(l < kPi, "scaled length reaches pi");
    v.expect(cone::scale(m, 0.0).lengths() == m.lengths(), "scale by 0 changes lengths");
  }
}

void rigidity(Verdict& v) {
  std::mt19937_64 rng(105);
  const char* names[] = {"tetrahedron", "hexahedron", "octahedron"};
  int k = 0;
  for (const auto& p : fixtures()) {
    const std::string name = names[k++];
    const auto st = solve::state_from_polyhedron(p, poly::dualize(p));
    const auto rep = solve::rigidity_report(st);
    v.expect(rep.sigma_min > 1e-8, name + ": sigma_min " + fmt(rep.sigma_min));
    const Eigen::MatrixXd J = solve::jacobian(st);
    std::normal_distribution<double> g;
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd dir(solve::num_unknowns(st));
      for (int i = 0; i < dir.size(); ++i) dir[i] = g(rng);
      dir.normalize();
      const double h = 1e-4;
      const Eigen::VectorXd fd =
          (solve::residual(solve::displaced(st, h * dir)) - solve::residual(solve::displaced(st, -h * dir))) / (2 * h);
      const double rel = (fd - J * dir).norm() / (J * dir).norm();
      v.expect(rel < 1e-5, name + ": FD mismatch " + fmt(rel));
    }
  }
  // The cube and octahedron duals have vertices of valence 4 in the dual
  // triangulation (square faces, resp. fan-triangulated quadrilateral links).
  const auto cube = poly::dualize(fixtures()[1]).metric.surface();
  bool high_valence = false;
  std::vector<int> valence(cube.num_vertices(), 0);
  for (int h = 0; h < cube.num_halfedges(); ++h) ++valence[cube.tail(h)];
  for (int x : valence) high_valence = high_valence || x > 3;
  v.expect(high_valence, "no dual vertex of valence > 3");
}

void round_trip(Verdict& v) {
  std::mt19937_64 rng(106);
  auto polys = fixtures();
  polys.push_back(poly::random_polyhedron(rng));
  for (const auto& p : polys) {
    const auto d = poly::dualize(p);
    const auto truth = solve::state_from_polyhedron(p, d);
    const auto ref = testsupport::sorted_dihedrals(p);
    for (int i = 0; i < 10; ++i) {
      try {
        const auto res = solve::continuation(solve::perturbed(truth, 0.03, rng), d.metric, 10);
        const auto q = solve::realized_polyhedron(res.state);
        const double gap = testsupport::max_gap(ref, testsupport::sorted_dihedrals(q));
        v.expect(gap < 1e-8, "dihedral gap " + fmt(gap) + " on " + std::to_string(p.num_faces()) + " faces");
      } catch (const Error& e) {
        v.expect(false, e.what());
      }
    }
  }
}

void dimension(Verdict& v) {
  std::mt19937_64 rng(107);
  std::vector<cone::CombSurface> surfaces;
  for (const auto& p : fixtures()) surfaces.push_back(poly::dualize(p).metric.surface());
  for (int i = 0; i < 20; ++i) surfaces.push_back(poly::dualize(poly::random_polyhedron(rng)).metric.surface());
  surfaces.push_back(testsupport::octahedron_surface());
  const std::size_t base = surfaces.size();
  for (std::size_t i = 0; i < base; ++i) {
    for (int e = 0; e < surfaces[i].num_edges(); ++e) {
      try {
        surfaces.push_back(surfaces[i].flipped(e));
      } catch (const Error&) {
      }
    }
  }
  for (const auto& s : surfaces) {
    v.expect(s.euler_characteristic() == 2 && s.num_edges() == 3 * s.num_vertices() - 6, "genus-0 count");
  }
  const auto& g2 = poly::fuchsian_dualize(poly::fuchsian_octagon_group(), 1.0).dual.metric.surface();
  v.expect(g2.euler_characteristic() == -2, "genus-2 surface has chi " + std::to_string(g2.euler_characteristic()));
  v.expect(g2.num_edges() == 3 * (g2.num_vertices() + 2), "genus-2 edge count " + std::to_string(g2.num_edges()));
}

void fuchsian(Verdict& v) {
  std::ostringstream out, err;
  const int code = io::run_cli({"fuchsian-demo", "--heights", "0.5,1.0,2.0"}, out, err);
  v.expect(code == 0, "fuchsian-demo exit code " + std::to_string(code) + ": " + err.str());
  const auto data = poly::fuchsian_octagon_group();
  double prev = 0;
  for (double h : {0.5, 1.0, 2.0}) {
    const auto fx = poly::fuchsian_dualize(data, h);
    const auto& m = fx.dual.metric;
    v.expect(m.surface().euler_characteristic() == -2, "chi is not -2");
    v.expect(std::abs(cone::gauss_bonnet_residual(m)) < 1e-8, "gauss-bonnet residual at h " + fmt(h));
    v.expect(fx.core_distance > 0, "core distance not positive at h " + fmt(h));
    v.expect(fx.core_distance > prev, "core distance does not decrease with h");
    prev = fx.core_distance;
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Verdict&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"polarity suite", 10, polarity},
      {"duality identities", 10, duality_identities},
      {"concavity and largeness of dual metrics", 120, concave_and_large},
      {"lambda-scaling", 5, lambda_scaling},
      {"numerical infinitesimal rigidity", 30, rigidity},
      {"realization round trip", 120, round_trip},
      {"chart dimension bookkeeping", 1, dimension},
      {"fuchsian desk case", 120, fuchsian},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].run(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.expect(secs < criteria[i].budget_s, "runtime " + fmt(secs) + " s over budget");
    const bool ok = v.failures == 0;
    failed += !ok;
    std::printf("%s [%zu] %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                ok ? "" : ": ", ok ? "" : (v.first + " (" + std::to_string(v.failures) + " failures)").c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
