//
// Trial harness: seeded random control polygons, validation of traced curves
// against the smoothness and gap checks, and multi-threaded benchmarks that
// write one JSON line per trial.
//

#ifndef BSURF_HARNESS_HPP
#define BSURF_HARNESS_HPP

#include <atomic>
#include <chrono>
#include <random>
#include <sstream>
#include <thread>

#include "io.hpp"
#include "shapes.hpp"

namespace bsurf {

// -----------------------------------------------------------------------------
// MESHES BY NAME
// -----------------------------------------------------------------------------

// Loads an OBJ file, or a procedural mesh named "builtin:<shape>[:args]":
// icosphere:L, noisy_sphere:L:amplitude, slab:N, plate:W:H, box, cylinder:A:R,
// cone:A.
inline triangle_mesh load_mesh_spec(const string& spec) {
  auto prefix = string{"builtin:"};
  if (spec.rfind(prefix, 0) != 0) return load_obj(spec);
  auto parts  = vector<string>{};
  auto stream = std::istringstream{spec.substr(prefix.size())};
  for (string part; std::getline(stream, part, ':');) parts.push_back(part);
  if (parts.empty()) throw parse_error("empty builtin mesh name");
  auto arg = [&](int i, double fallback) {
    if (i >= (int)parts.size()) return fallback;
    try {
      return std::stod(parts[i]);
    } catch (const std::exception&) {
      throw parse_error("bad builtin mesh argument '" + parts[i] + "'");
    }
  };
  auto& name = parts[0];
  if (name == "icosphere") return make_icosphere((int)arg(1, 4));
  if (name == "noisy_sphere")
    return make_noisy_sphere((int)arg(1, 4), arg(2, 0.05));
  if (name == "slab") return make_slab((int)arg(1, 20));
  if (name == "plate") return make_perforated_plate((int)arg(1, 5), (int)arg(2, 5));
  if (name == "box") return make_box({1, 1, 1}, {4, 4, 4});
  if (name == "cylinder") return make_cylinder((int)arg(1, 32), (int)arg(2, 16));
  if (name == "cone") return make_cone((int)arg(1, 32));
  throw parse_error("unknown builtin mesh '" + name + "'");
}

// -----------------------------------------------------------------------------
// RANDOM POLYGONS
// -----------------------------------------------------------------------------

// k+1 points with faces drawn proportionally to area and uniform barycentric
// coordinates.
inline vector<mesh_point> random_points(
    const triangle_mesh& mesh, int k, uint64_t seed) {
  if (k < 1) throw invalid_argument_error("degree must be at least 1");
  auto areas = vector<double>(mesh.triangles.size());
  for (auto f = 0; f < (int)areas.size(); f++) areas[f] = face_area(mesh, f);
  auto rng    = std::mt19937_64{seed};
  auto faces  = std::discrete_distribution<int>{areas.begin(), areas.end()};
  auto unit   = std::uniform_real_distribution<double>{0, 1};
  auto points = vector<mesh_point>{};
  for (auto i = 0; i <= k; i++) {
    auto f  = faces(rng);
    auto r1 = std::sqrt(unit(rng)), r2 = unit(rng);
    points.push_back(make_point(f, 1 - r1, r1 * (1 - r2)));
  }
  return points;
}

inline control_polygon random_polygon(const triangle_mesh& mesh,
    const dual_graph& graph, int k, uint64_t seed) {
  return make_polygon(mesh, graph, random_points(mesh, k, seed));
}

// -----------------------------------------------------------------------------
// VALIDATION
// -----------------------------------------------------------------------------

struct curve_report {
  double max_angle    = 0;  // degrees, between consecutive segments
  double max_gap      = 0;  // consecutive points of the per-triangle polyline
  double max_node_gap = 0;  // consecutive nodes
  double longest_edge = 0;
  bool   connected    = true;
  bool   angle_ok     = true;
  bool   gap_ok       = true;
  bool   pass         = true;
};

// The angle check compares the tangents of consecutive segments after
// transport into the shared node's frame. The gap check bounds the distance
// between consecutive points of the flattened polyline by the longest mesh
// edge.
inline curve_report validate_curve(const triangle_mesh& mesh,
    const dual_graph& graph, const traced_curve& curve, double theta) {
  auto report         = curve_report{};
  report.longest_edge = mesh.longest_edge;
  auto tol            = 1e-9 * mesh.bbox_diag;
  auto& segments      = curve.segments;
  if (segments.empty() || curve.nodes.size() != segments.size() + 1)
    report.connected = false;
  for (auto i = 0; i < (int)segments.size() && report.connected; i++) {
    auto& s = segments[i];
    if (s.strip.empty() || s.lerps.size() + 1 != s.strip.size() ||
        distance(embed(mesh, s.start), embed(mesh, curve.nodes[i])) > tol ||
        distance(embed(mesh, s.end), embed(mesh, curve.nodes[i + 1])) > tol)
      report.connected = false;
    for (auto j = 0; j + 1 < (int)s.strip.size() && report.connected; j++)
      if (find_adjacent_edge(mesh, s.strip[j], s.strip[j + 1]) < 0)
        report.connected = false;
  }
  for (auto i = 1; i < (int)segments.size(); i++)
    report.max_angle = std::max(report.max_angle,
        rad2deg(node_angle(mesh, graph, segments[i - 1], segments[i])));
  auto polyline = flat_polyline(mesh, curve);
  for (auto i = 1; i < (int)polyline.size(); i++)
    report.max_gap = std::max(report.max_gap, distance(polyline[i - 1], polyline[i]));
  for (auto i = 1; i < (int)curve.nodes.size(); i++)
    report.max_node_gap = std::max(report.max_node_gap,
        distance(embed(mesh, curve.nodes[i - 1]), embed(mesh, curve.nodes[i])));
  report.angle_ok = report.max_angle <= theta;
  report.gap_ok   = report.max_gap <= report.longest_edge;
  report.pass     = report.connected && report.angle_ok && report.gap_ok;
  return report;
}

inline json report_to_json(const curve_report& r) {
  return {{"max_angle_deg", r.max_angle}, {"max_gap", r.max_gap},
      {"max_node_gap", r.max_node_gap}, {"longest_edge", r.longest_edge},
      {"connected", r.connected}, {"angle_ok", r.angle_ok},
      {"gap_ok", r.gap_ok}, {"pass", r.pass}};
}

// -----------------------------------------------------------------------------
// BENCHMARKS
// -----------------------------------------------------------------------------

struct bench_options {
  string                mesh_id = "mesh";
  int                   trials  = 100;
  uint64_t              seed    = 1;
  int                   degree  = 3;
  vector<spline_scheme> schemes = {spline_scheme::rdc, spline_scheme::olr};
  vector<trace_mode>    modes   = {adaptive_mode(5)};
  double                theta   = 5;  // validation threshold, degrees
  int                   threads = 1;
};

// Timing fields of a trial line. Everything else is a function of the seed.
inline const vector<string> timing_fields = {"time_ms"};

// One trial: a random polygon seeded with seed + index, traced with every
// configured scheme and mode. Returns one JSON object per combination.
inline vector<json> run_trial(const triangle_mesh& mesh, const dual_graph& graph,
    const bench_options& options, int index) {
  auto seed   = options.seed + (uint64_t)index;
  auto points = random_points(mesh, options.degree, seed);
  auto lines  = vector<json>{};
  for (auto scheme : options.schemes) {
    for (auto& mode : options.modes) {
      auto line = json{{"trial", index}, {"seed", seed}, {"mesh", options.mesh_id},
          {"sampler", "area_weighted"}, {"scheme", scheme_name(scheme)},
          {"mode", trace_kind_name(mode.kind)}, {"degree", options.degree},
          {"control_points", points_to_json(points)}};
      try {
        auto start   = std::chrono::steady_clock::now();
        auto polygon = make_polygon(mesh, graph, points);
        auto curve   = trace_curve(mesh, graph, scheme, polygon, mode);
        auto stop    = std::chrono::steady_clock::now();
        auto report  = validate_curve(mesh, graph, curve, options.theta);
        line.update(report_to_json(report));
        line["segments"] = curve.segments.size();
        line["leaves"]   = curve.leaves;
        line["time_ms"] =
            std::chrono::duration<double, std::milli>(stop - start).count();
      } catch (const error& e) {
        line["error"] = e.what();
        line["pass"]  = false;
      }
      lines.push_back(std::move(line));
    }
  }
  return lines;
}

// Runs all trials on a pool of threads. Lines come back in trial order, so
// reports are reproducible apart from the timing fields.
inline vector<json> run_bench(const triangle_mesh& mesh, const dual_graph& graph,
    const bench_options& options) {
  auto results = vector<vector<json>>(std::max(options.trials, 0));
  auto next    = std::atomic<int>{0};
  auto worker  = [&]() {
    for (auto i = next++; i < options.trials; i = next++)
      results[i] = run_trial(mesh, graph, options, i);
  };
  auto count = std::clamp(options.threads, 1, std::max(options.trials, 1));
  if (count == 1) {
    worker();
  } else {
    auto pool = vector<std::thread>{};
    for (auto t = 0; t < count; t++) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  auto lines = vector<json>{};
  for (auto& trial : results)
    for (auto& line : trial) lines.push_back(std::move(line));
  return lines;
}

inline json strip_timing(json line) {
  for (auto& key : timing_fields) line.erase(key);
  return line;
}

inline double percentile(vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  auto i = std::clamp((int)std::ceil(q * values.size()) - 1, 0,
      (int)values.size() - 1);
  return values[i];
}

// Pass counts, time percentiles and a decade histogram of trace times.
inline json bench_summary(const vector<json>& lines) {
  auto passed = 0, failed = 0, errors = 0;
  auto times  = vector<double>{};
  auto bins   = vector<int>(5, 0);  // <1ms, <10ms, <100ms, <1s, >=1s
  for (auto& line : lines) {
    if (line.value("pass", false)) passed++;
    else failed++;
    if (line.contains("error")) errors++;
    if (!line.contains("time_ms")) continue;
    auto t = line["time_ms"].get<double>();
    times.push_back(t);
    auto b = t < 1 ? 0 : t < 10 ? 1 : t < 100 ? 2 : t < 1000 ? 3 : 4;
    bins[b]++;
  }
  return {{"curves", lines.size()}, {"passed", passed}, {"failed", failed},
      {"errors", errors}, {"median_ms", percentile(times, 0.5)},
      {"p99_ms", percentile(times, 0.99)},
      {"max_ms", times.empty() ? 0.0 : *std::max_element(times.begin(), times.end())},
      {"histogram_ms",
          {{"lt_1", bins[0]}, {"lt_10", bins[1]}, {"lt_100", bins[2]},
              {"lt_1000", bins[3]}, {"ge_1000", bins[4]}}}};
}

}  // namespace bsurf

#endif
