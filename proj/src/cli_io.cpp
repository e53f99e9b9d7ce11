#include "hypdual/cli_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace hypdual::io {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
}

json vec4_json(const geom::Vec4& v) { return json::array({v[0], v[1], v[2], v[3]}); }

geom::Vec4 vec4_from(const json& j) {
  if (!j.is_array() || j.size() != 4) parse_fail("expected an array of four numbers");
  return geom::Vec4(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

DocKind kind_from(const std::string& s) {
  for (DocKind k : {DocKind::ConeMetric, DocKind::Polyhedron, DocKind::DualOutput, DocKind::SolverReport,
                    DocKind::FuchsianData}) {
    if (to_string(k) == s) return k;
  }
  parse_fail("unknown document kind '" + s + "'");
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidSurface:
    case ErrorKind::InvalidMetric:
    case ErrorKind::NonFinite:
    case ErrorKind::NotOnModel:
      return 2;
    default:
      return 1;
  }
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

struct MetricInput {
  std::optional<cone::ConeMetric> metric;
  std::vector<geom::Isometry> deck;
};

MetricInput read_metric(const std::string& path) {
  const Document doc = read_document(path);
  MetricInput in;
  if (doc.kind == DocKind::ConeMetric) {
    in.metric = metric_from_json(doc.payload);
  } else if (doc.kind == DocKind::DualOutput) {
    poly::DualMetricOutput d = dual_from_json(doc.payload);
    in.metric = d.metric;
    in.deck = std::move(d.deck);
  } else {
    parse_fail("expected a cone_metric or dual_output document, got " + std::string(to_string(doc.kind)));
  }
  return in;
}

poly::ConvexPolyhedronH3 read_polyhedron(const std::string& path) {
  const Document doc = read_document(path);
  if (doc.kind != DocKind::Polyhedron) {
    parse_fail("expected a polyhedron document, got " + std::string(to_string(doc.kind)));
  }
  return polyhedron_from_json(doc.payload);
}

void emit(const Document& doc, const std::string& out_path, std::ostream& out) {
  const std::string text = dump(doc);
  if (out_path.empty()) {
    out << text;
  } else {
    write_atomic(out_path, text);
  }
}

struct CheckOutcome {
  std::vector<std::string> failures;
  cone::GeodesicSearchReport search;
};

CheckOutcome check_metric(const cone::ConeMetric& m, const std::vector<geom::Isometry>& deck, int depth, double tol,
                          std::ostream& out) {
  CheckOutcome res;
  const auto angles = cone::cone_angles(m);
  for (std::size_t v = 0; v < angles.size(); ++v) {
    out << "vertex " << v << ": cone angle " << num(angles[v]) << ", margin " << num(angles[v] - cone::kTwoPi)
        << "\n";
  }
  const double gb = cone::gauss_bonnet_residual(m);
  out << "gauss-bonnet residual: " << num(gb) << " (chi = " << m.surface().euler_characteristic() << ")\n";
  if (!(std::abs(gb) < 1e-8)) res.failures.push_back("gauss-bonnet: residual " + num(gb));

  if (m.geometry() != cone::Geometry::Spherical) {
    out << "concavity and largeness: not applicable to hyperbolic metrics\n";
    return res;
  }
  const auto conc = cone::is_concave(m, tol);
  out << "concavity: min margin " << num(conc.min_margin) << "\n";
  if (!conc.concave) res.failures.push_back("concavity: min margin " + num(conc.min_margin));

  cone::GeodesicSearchOptions opts;
  opts.depth = depth;
  if (!deck.empty()) opts.deck = &deck;
  res.search = cone::shortest_closed_geodesic_search(m, opts);
  if (res.search.found) {
    out << "geodesic search (depth " << depth << "): shortest closed geodesic " << num(res.search.min_length)
        << " crossing " << res.search.cycle.size() << " edges\n";
    if (res.search.min_length <= cone::kTwoPi + tol) {
      res.failures.push_back("largeness: closed geodesic of length " + num(res.search.min_length));
    }
  } else {
    out << "geodesic search (depth " << depth << "): none found\n";
  }
  return res;
}

json search_json(const cone::GeodesicSearchReport& r) {
  json j{{"depth", r.depth}, {"found", r.found}, {"cycles_examined", r.cycles_examined}};
  if (r.found) {
    j["min_length"] = r.min_length;
    j["cycle"] = r.cycle;
  }
  return j;
}

std::vector<double> sorted_dihedrals(const poly::ConvexPolyhedronH3& p) {
  std::vector<double> out;
  for (int e = 0; e < p.num_edges(); ++e) out.push_back(poly::dihedral_angle(p, e));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> sorted_edge_lengths(const poly::ConvexPolyhedronH3& p) {
  std::vector<double> out;
  for (int e = 0; e < p.num_edges(); ++e) out.push_back(poly::edge_length(p, e));
  std::sort(out.begin(), out.end());
  return out;
}

double multiset_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

json continuation_json(const solve::ContinuationResult& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"s", s.s},
                     {"newton_iterations", s.newton_iterations},
                     {"residual_norm", s.residual_norm},
                     {"min_concavity_margin", s.min_concavity_margin}});
  }
  json flips = json::array();
  for (const auto& f : r.flips) flips.push_back({{"s", f.s}, {"edge", f.edge}});
  return {{"steps", steps}, {"flips", flips}, {"scaling_bump", r.scaling_bump}};
}

json rigidity_json(const solve::RigidityReport& r) {
  return {{"sigma_min", r.sigma_min}, {"sigma_max", r.sigma_max}, {"condition", r.condition}, {"dimension", r.dimension}};
}

poly::ConvexPolyhedronH3 fixture_polyhedron(const std::string& name, std::optional<double> theta,
                                            std::optional<double> rho, std::uint64_t seed) {
  if (name == "tetrahedron") {
    return poly::hull_from_dual_points(poly::regular_tetrahedron_planes(theta.value_or(1.1)));
  }
  if (name == "cube") return poly::hull_from_dual_points(poly::cube_planes(rho.value_or(0.5)));
  if (name == "octahedron") return poly::hull_from_dual_points(poly::octahedron_planes(rho.value_or(0.3)));
  if (name == "random") {
    std::mt19937_64 rng(seed);
    return poly::random_polyhedron(rng);
  }
  parse_fail("unknown fixture '" + name + "'");
}

struct Options {
  std::uint64_t seed = 0;
  int steps = 10;
  int depth = 8;
  double tol = 1e-9;
  std::string out;
  std::string input;
  std::string start;
  std::string polyhedron_out;
  bool autostart = false;
  std::optional<double> fuchsian;
  std::optional<double> theta, rho;
  double lambda = 0.0;
  double perturb = 0.03;
  int word_bound = 5;
  std::vector<double> heights{0.5, 1.0, 2.0};
};

json params_json(const Options& o, const std::string& cmd) {
  json p = json::object();
  if (!o.input.empty()) p["input"] = o.input;
  if (cmd == "check" || cmd == "realize" || cmd == "fuchsian-demo") p["depth"] = o.depth;
  if (cmd == "check" || cmd == "realize") p["tol"] = o.tol;
  if (cmd == "realize" || cmd == "roundtrip") p["steps"] = o.steps;
  if (cmd == "realize") {
    if (o.autostart) p["start"] = "auto";
    else p["start"] = o.start;
  }
  if (cmd == "scale") p["lambda"] = o.lambda;
  if (cmd == "roundtrip") p["perturb"] = o.perturb;
  if (o.fuchsian) p["fuchsian"] = *o.fuchsian;
  if (o.theta) p["theta"] = *o.theta;
  if (o.rho) p["rho"] = *o.rho;
  if (cmd == "fuchsian-demo" || o.fuchsian) p["word_bound"] = o.word_bound;
  if (cmd == "fuchsian-demo") p["heights"] = o.heights;
  return p;
}

int cmd_check(const Options& o, std::ostream& out) {
  const MetricInput in = read_metric(o.input);
  const CheckOutcome res = check_metric(*in.metric, in.deck, o.depth, o.tol, out);
  for (const auto& f : res.failures) out << "FAIL " << f << "\n";
  if (res.failures.empty()) out << "PASS\n";
  return res.failures.empty() ? 0 : 1;
}

int cmd_dualize(const Options& o, std::ostream& out) {
  Document doc;
  doc.kind = DocKind::DualOutput;
  doc.provenance = {"dualize", params_json(o, "dualize"), o.seed};
  if (o.fuchsian) {
    const poly::FuchsianData data = poly::fuchsian_octagon_group(o.word_bound);
    const poly::FuchsianDual fx = poly::fuchsian_dualize(data, *o.fuchsian);
    doc.payload = to_json(fx.dual);
    doc.payload["fuchsian"] = {{"height", *o.fuchsian},
                               {"core_distance", fx.core_distance},
                               {"face_area", fx.face_area},
                               {"orbit_size", fx.orbit_size},
                               {"word_bound", data.word_bound}};
    std::ostream& log = o.out.empty() ? std::cerr : out;
    log << "genus-2 dual: " << fx.dual.metric.surface().num_edges() << " edges, gauss-bonnet residual "
        << num(cone::gauss_bonnet_residual(fx.dual.metric)) << ", core distance " << num(fx.core_distance) << "\n";
  } else {
    if (o.input.empty()) parse_fail("dualize needs a polyhedron file or --fuchsian");
    const poly::ConvexPolyhedronH3 p = read_polyhedron(o.input);
    const poly::DualMetricOutput d = poly::dualize(p);
    doc.payload = to_json(d);
    doc.payload["polyhedron"] = to_json(p);
    std::ostream& log = o.out.empty() ? std::cerr : out;
    log << "dual of " << p.num_faces() << " faces: " << d.metric.surface().num_edges()
        << " edges, gauss-bonnet residual " << num(cone::gauss_bonnet_residual(d.metric)) << "\n";
  }
  emit(doc, o.out, out);
  return 0;
}

int cmd_scale(const Options& o, std::ostream& out) {
  const MetricInput in = read_metric(o.input);
  Document doc{DocKind::ConeMetric, to_json(cone::scale(*in.metric, o.lambda)), {"scale", params_json(o, "scale"), o.seed}};
  emit(doc, o.out, out);
  return 0;
}

int cmd_realize(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.autostart == !o.start.empty()) parse_fail("realize needs exactly one of --start and --auto");
  const MetricInput in = read_metric(o.input);
  const cone::ConeMetric& target = *in.metric;
  if (target.geometry() != cone::Geometry::Spherical || target.surface().euler_characteristic() != 2) {
    err << "target must be a spherical metric on the sphere\n";
    return 2;
  }
  std::ostringstream precheck;
  const CheckOutcome pre = check_metric(target, {}, o.depth, o.tol, precheck);
  if (!pre.failures.empty()) {
    for (const auto& f : pre.failures) err << "target fails precondition: " << f << "\n";
    return 2;
  }

  json report{{"success", false}};
  Document doc{DocKind::SolverReport, {}, {"realize", params_json(o, "realize"), o.seed}};
  int code = 0;
  try {
    solve::AutoStart start = o.autostart ? solve::auto_start(target)
                                         : solve::start_from_polyhedron(read_polyhedron(o.start), target);
    report["start"] = {{"fixture", o.autostart ? start.fixture : o.start},
                       {"flips", start.flips},
                       {"mirrored", start.mirrored}};
    const solve::ContinuationResult res = solve::continuation(start.state, target, o.steps);
    const Eigen::VectorXd r = solve::residual(res.state);
    const double max_res = r.cwiseAbs().maxCoeff();
    const poly::ConvexPolyhedronH3 p = solve::realized_polyhedron(res.state);
    report.update(continuation_json(res));
    report["final_residual_max"] = max_res;
    report["rigidity"] = rigidity_json(solve::rigidity_report(res.state));
    report["dihedral_angles"] = sorted_dihedrals(p);
    report["edge_lengths"] = sorted_edge_lengths(p);
    report["success"] = max_res < 1e-9;
    out << "realized after " << res.steps.size() << " steps and " << res.flips.size()
        << " flips, max residual " << num(max_res) << "\n";
    if (!o.polyhedron_out.empty()) {
      write_atomic(o.polyhedron_out,
                   dump(Document{DocKind::Polyhedron, to_json(p), {"realize", params_json(o, "realize"), o.seed}}));
    }
    if (max_res >= 1e-9) {
      err << "final residual " << num(max_res) << " above 1e-9\n";
      code = 1;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    report["error"] = e.what();
    err << e.what() << "\n";
    code = 1;
  }
  if (!o.out.empty()) {
    doc.payload = report;
    write_atomic(o.out, dump(doc));
  }
  return code;
}

int cmd_roundtrip(const Options& o, std::ostream& out) {
  const poly::ConvexPolyhedronH3 src =
      o.input.empty() ? fixture_polyhedron("tetrahedron", o.theta, o.rho, o.seed) : read_polyhedron(o.input);
  const poly::DualMetricOutput d = poly::dualize(src);
  std::mt19937_64 rng(o.seed);
  const solve::SolverState start = solve::perturbed(solve::state_from_polyhedron(src, d), o.perturb, rng);
  const solve::ContinuationResult res = solve::continuation(start, d.metric, o.steps);
  const poly::ConvexPolyhedronH3 q = solve::realized_polyhedron(res.state);
  const double dgap = multiset_gap(sorted_dihedrals(src), sorted_dihedrals(q));
  const double lgap = multiset_gap(sorted_edge_lengths(src), sorted_edge_lengths(q));
  const bool ok = dgap <= 1e-8 && lgap <= 1e-8;
  out << "dihedral angle gap " << num(dgap) << ", edge length gap " << num(lgap) << "\n";
  out << (ok ? "PASS" : "FAIL round trip") << "\n";
  if (!o.out.empty()) {
    json report = continuation_json(res);
    report["success"] = ok;
    report["dihedral_gap"] = dgap;
    report["edge_length_gap"] = lgap;
    write_atomic(o.out, dump(Document{DocKind::SolverReport, report, {"roundtrip", params_json(o, "roundtrip"), o.seed}}));
  }
  return ok ? 0 : 1;
}

int cmd_fuchsian_demo(const Options& o, std::ostream& out) {
  const poly::FuchsianData data = poly::fuchsian_octagon_group(o.word_bound);
  std::vector<double> heights = o.heights;
  std::sort(heights.begin(), heights.end());
  json results = json::array();
  bool ok = true;
  double prev = -1.0;
  out << "relation residual " << num(poly::relation_residual(data)) << "\n";
  for (double h : heights) {
    const poly::FuchsianDual fx = poly::fuchsian_dualize(data, h);
    const cone::ConeMetric& m = fx.dual.metric;
    const double gb = cone::gauss_bonnet_residual(m);
    const int n = m.surface().num_vertices(), k = m.surface().euler_characteristic();
    const bool dim_ok = m.surface().num_edges() == 3 * (n - k);
    const auto conc = cone::is_concave(m);
    cone::GeodesicSearchOptions opts;
    opts.depth = o.depth;
    opts.deck = &fx.dual.deck;
    const auto search = cone::shortest_closed_geodesic_search(m, opts);
    const bool large = !search.found || search.min_length > cone::kTwoPi;
    const bool step_ok = std::abs(gb) < 1e-8 && k == -2 && dim_ok && conc.concave && large &&
                         fx.core_distance > 0.0 && fx.core_distance > prev;
    ok = ok && step_ok;
    prev = fx.core_distance;
    out << "h " << num(h) << ": chi " << k << ", edges " << m.surface().num_edges() << ", gauss-bonnet " << num(gb)
        << ", core distance " << num(fx.core_distance) << ", min margin " << num(conc.min_margin)
        << ", contractible geodesics " << (search.found ? num(search.min_length) : std::string("none")) << "\n";
    results.push_back({{"height", h},
                       {"chi", k},
                       {"vertices", n},
                       {"edges", m.surface().num_edges()},
                       {"gauss_bonnet_residual", gb},
                       {"core_distance", fx.core_distance},
                       {"face_area", fx.face_area},
                       {"min_concavity_margin", conc.min_margin},
                       {"search", search_json(search)},
                       {"pass", step_ok}});
  }
  out << (ok ? "PASS" : "FAIL fuchsian demo") << "\n";
  if (!o.out.empty()) {
    json gens = json::array();
    for (const auto& g : data.generators) gens.push_back(to_json(g));
    json payload{{"generators", gens},
                 {"invariant_plane", vec4_json(data.invariant_plane.v())},
                 {"word_bound", data.word_bound},
                 {"relation_residual", poly::relation_residual(data)},
                 {"results", results}};
    write_atomic(o.out, dump(Document{DocKind::FuchsianData, payload,
                                      {"fuchsian-demo", params_json(o, "fuchsian-demo"), o.seed}}));
  }
  return ok ? 0 : 1;
}

int cmd_fixture(const Options& o, const std::string& name, std::ostream& out) {
  const poly::ConvexPolyhedronH3 p = fixture_polyhedron(name, o.theta, o.rho, o.seed);
  json params = params_json(o, "fixture");
  params["name"] = name;
  emit(Document{DocKind::Polyhedron, to_json(p), {"fixture", params, o.seed}}, o.out, out);
  return 0;
}

}  // namespace

std::string_view to_string(DocKind k) {
  switch (k) {
    case DocKind::ConeMetric: return "cone_metric";
    case DocKind::Polyhedron: return "polyhedron";
    case DocKind::DualOutput: return "dual_output";
    case DocKind::SolverReport: return "solver_report";
    case DocKind::FuchsianData: return "fuchsian_data";
  }
  return "unknown";
}

json to_json(const cone::ConeMetric& m) {
  json tris = json::array(), edges = json::array();
  const auto& s = m.surface();
  for (int t = 0; t < s.num_faces(); ++t) {
    tris.push_back(s.triangles()[t]);
    edges.push_back({s.edge(3 * t), s.edge(3 * t + 1), s.edge(3 * t + 2)});
  }
  return {{"geometry", m.geometry() == cone::Geometry::Spherical ? "spherical" : "hyperbolic"},
          {"num_vertices", s.num_vertices()},
          {"triangles", tris},
          {"triangle_edges", edges},
          {"lengths", m.lengths()}};
}

cone::ConeMetric metric_from_json(const json& j) {
  return guarded([&] {
    const std::string g = j.at("geometry").get<std::string>();
    if (g != "spherical" && g != "hyperbolic") parse_fail("geometry must be spherical or hyperbolic");
    const auto tris = j.at("triangles").get<std::vector<cone::Tri>>();
    const auto edges = j.at("triangle_edges").get<std::vector<std::array<int, 3>>>();
    if (tris.size() != edges.size()) parse_fail("triangles and triangle_edges differ in length");
    std::vector<int> flat;
    for (const auto& e : edges) flat.insert(flat.end(), e.begin(), e.end());
    cone::CombSurface s(j.at("num_vertices").get<int>(), tris, flat);
    return cone::ConeMetric(std::move(s), g == "spherical" ? cone::Geometry::Spherical : cone::Geometry::Hyperbolic,
                            j.at("lengths").get<std::vector<double>>());
  });
}

json to_json(const poly::ConvexPolyhedronH3& p) {
  json planes = json::array(), verts = json::array();
  for (const auto& n : p.planes) planes.push_back(vec4_json(n.v()));
  for (const auto& v : p.vertices) verts.push_back(vec4_json(v.v()));
  return {{"planes", planes}, {"vertices", verts}, {"faces", p.face_vertices}, {"edges", p.edges}};
}

poly::ConvexPolyhedronH3 polyhedron_from_json(const json& j) {
  return guarded([&] {
    std::vector<geom::DSPoint> planes;
    for (const json& n : j.at("planes")) planes.push_back(geom::DSPoint::normalize(vec4_from(n)));
    return poly::hull_from_dual_points(planes);
  });
}

json to_json(const poly::DualMetricOutput& d) {
  json sources = json::array();
  for (const auto& s : d.edge_sources) {
    sources.push_back({{"kind", s.kind == poly::DualEdgeSource::Kind::PrimalEdge ? "edge" : "diagonal"},
                       {"index", s.index}});
  }
  json j{{"metric", to_json(d.metric)},
         {"face_of_vertex", d.face_of_vertex},
         {"edge_sources", sources},
         {"closure_error", d.closure_error}};
  if (!d.deck.empty()) {
    json deck = json::array();
    for (const auto& g : d.deck) deck.push_back(to_json(g));
    j["deck"] = deck;
  }
  return j;
}

poly::DualMetricOutput dual_from_json(const json& j) {
  return guarded([&] {
    cone::ConeMetric m = metric_from_json(j.at("metric"));
    std::vector<poly::DualEdgeSource> sources;
    for (const json& s : j.at("edge_sources")) {
      const std::string kind = s.at("kind").get<std::string>();
      if (kind != "edge" && kind != "diagonal") parse_fail("unknown edge source kind '" + kind + "'");
      sources.push_back({kind == "edge" ? poly::DualEdgeSource::Kind::PrimalEdge : poly::DualEdgeSource::Kind::Diagonal,
                         s.at("index").get<int>()});
    }
    std::vector<geom::Isometry> deck;
    if (j.contains("deck")) {
      for (const json& g : j.at("deck")) deck.push_back(isometry_from_json(g));
      if (static_cast<int>(deck.size()) != m.surface().num_halfedges()) parse_fail("need one deck entry per half-edge");
    }
    auto marking = j.at("face_of_vertex").get<std::vector<int>>();
    if (static_cast<int>(marking.size()) != m.surface().num_vertices()) parse_fail("marking size mismatch");
    if (static_cast<int>(sources.size()) != m.surface().num_edges()) parse_fail("edge source count mismatch");
    return poly::DualMetricOutput{std::move(m), std::move(marking), std::move(sources), std::move(deck),
                                  j.value("closure_error", 0.0)};
  });
}

json to_json(const geom::Isometry& g) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) rows.push_back({g.matrix()(i, 0), g.matrix()(i, 1), g.matrix()(i, 2), g.matrix()(i, 3)});
  return rows;
}

geom::Isometry isometry_from_json(const json& j) {
  return guarded([&] {
    if (!j.is_array() || j.size() != 4) parse_fail("isometry must be a 4x4 array");
    geom::Mat4 m;
    for (int i = 0; i < 4; ++i) m.row(i) = vec4_from(j[i]).transpose();
    return geom::Isometry::from_matrix(m);
  });
}

json envelope(const Document& doc) {
  return {{"schema_version", kSchemaVersion},
          {"kind", to_string(doc.kind)},
          {"payload", doc.payload},
          {"provenance",
           {{"command", doc.provenance.command},
            {"parameters", doc.provenance.parameters},
            {"seed", doc.provenance.seed}}}};
}

Document parse_document(const std::string& text) {
  return guarded([&] {
    const json j = json::parse(text);
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) parse_fail("unsupported schema version " + std::to_string(version));
    Document doc;
    doc.kind = kind_from(j.at("kind").get<std::string>());
    doc.payload = j.at("payload");
    const json& prov = j.at("provenance");
    doc.provenance.command = prov.at("command").get<std::string>();
    doc.provenance.parameters = prov.at("parameters");
    doc.provenance.seed = prov.at("seed").get<std::uint64_t>();
    return doc;
  });
}

Document read_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

std::string dump(const Document& doc) { return envelope(doc).dump(1) + "\n"; }

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::ParseError, "cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw Error(ErrorKind::ParseError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic polyhedra and their dual spherical cone-metrics"};
  app.require_subcommand(1);
  Options o;
  std::string fixture_name;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output file (written atomically)");
  };
  auto* check = app.add_subcommand("check", "Cone angles, concavity, Gauss-Bonnet and largeness of a metric");
  check->add_option("metric", o.input)->required();
  check->add_option("--depth", o.depth, "Geodesic search depth");
  check->add_option("--tol", o.tol, "Slack for the concavity and largeness tests");
  common(check);

  auto* dualize = app.add_subcommand("dualize", "Dual cone-metric of a polyhedron or of the genus-2 desk case");
  dualize->add_option("polyhedron", o.input);
  dualize->add_option("--fuchsian", o.fuchsian, "Apex height of the genus-2 case");
  dualize->add_option("--word-bound", o.word_bound, "Orbit word length bound");
  common(dualize);

  auto* realize = app.add_subcommand("realize", "Find the polyhedron whose dual metric is the target");
  realize->add_option("target", o.input)->required();
  realize->add_option("--start", o.start, "Start polyhedron file");
  realize->add_flag("--auto", o.autostart, "Start from a symmetric polyhedron");
  realize->add_option("--steps", o.steps, "Continuation steps");
  realize->add_option("--depth", o.depth, "Geodesic search depth for the precondition");
  realize->add_option("--tol", o.tol, "Slack for the precondition checks");
  realize->add_option("--polyhedron-out", o.polyhedron_out, "Write the realized polyhedron here");
  common(realize);

  auto* scale = app.add_subcommand("scale", "Multiply every edge length by exp(lambda)");
  scale->add_option("metric", o.input)->required();
  scale->add_option("--lambda", o.lambda)->required();
  common(scale);

  auto* roundtrip = app.add_subcommand("roundtrip", "Dualize, perturb, realize and compare");
  roundtrip->add_option("polyhedron", o.input);
  roundtrip->add_option("--theta", o.theta, "Dihedral angle of the default tetrahedron");
  roundtrip->add_option("--perturb", o.perturb, "Size of the start perturbation");
  roundtrip->add_option("--steps", o.steps, "Continuation steps");
  common(roundtrip);

  auto* demo = app.add_subcommand("fuchsian-demo", "Genus-2 dual metrics over several apex heights");
  demo->add_option("--heights", o.heights)->delimiter(',');
  demo->add_option("--word-bound", o.word_bound, "Orbit word length bound");
  demo->add_option("--depth", o.depth, "Geodesic search depth");
  common(demo);

  auto* fixture = app.add_subcommand("fixture", "Write a fixture polyhedron");
  fixture->add_option("name", fixture_name, "tetrahedron, cube, octahedron or random")->required();
  fixture->add_option("--theta", o.theta, "Dihedral angle (tetrahedron)");
  fixture->add_option("--rho", o.rho, "Face distance (cube, octahedron)");
  common(fixture);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (*check) return cmd_check(o, out);
    if (*dualize) return cmd_dualize(o, out);
    if (*realize) return cmd_realize(o, out, err);
    if (*scale) return cmd_scale(o, out);
    if (*roundtrip) return cmd_roundtrip(o, out);
    if (*demo) return cmd_fuchsian_demo(o, out);
    if (*fixture) return cmd_fixture(o, fixture_name, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace hypdual::io
