//
// JSON and OBJ exchange formats for points, paths, polygons, splines, traced
// curves and mesh statistics.
//

#ifndef BSURF_IO_HPP
#define BSURF_IO_HPP

#include <json.hpp>

#include "editing.hpp"

namespace bsurf {

using json = nlohmann::json;

// -----------------------------------------------------------------------------
// POINTS AND PATHS
// -----------------------------------------------------------------------------

inline json point_to_json(const mesh_point& p) {
  return {{"face", p.face}, {"alpha", p.bary.x}, {"beta", p.bary.y}};
}

inline mesh_point point_from_json(const json& js) {
  try {
    if (js.is_array())
      return {js.at(0).get<int>(), {js.at(1).get<double>(), js.at(2).get<double>()}};
    return {js.at("face").get<int>(),
        {js.at("alpha").get<double>(), js.at("beta").get<double>()}};
  } catch (const json::exception& e) {
    throw parse_error(string("malformed mesh point: ") + e.what());
  }
}

inline json vec3_to_json(vec3 v) { return json::array({v.x, v.y, v.z}); }

inline json path_to_json(const triangle_mesh& mesh, const geodesic_path& path) {
  auto points = json::array();
  for (auto& p : path_positions(mesh, path)) points.push_back(vec3_to_json(p));
  return {{"start", point_to_json(path.start)}, {"end", point_to_json(path.end)},
      {"strip", path.strip}, {"intercepts", path.lerps}, {"points3d", points},
      {"length", path.length}};
}

inline geodesic_path path_from_json(
    const triangle_mesh& mesh, const json& js) {
  auto path = geodesic_path{};
  try {
    path.start  = checked_point(mesh, point_from_json(js.at("start")));
    path.end    = checked_point(mesh, point_from_json(js.at("end")));
    path.strip  = js.at("strip").get<vector<int>>();
    path.lerps  = js.at("intercepts").get<vector<double>>();
  } catch (const json::exception& e) {
    throw parse_error(string("malformed path: ") + e.what());
  }
  if (path.strip.empty() || path.lerps.size() + 1 != path.strip.size())
    throw parse_error("path strip and intercepts do not match");
  for (auto f : path.strip) check_face(mesh, f);
  for (auto i = 0; i + 1 < (int)path.strip.size(); i++)
    if (find_adjacent_edge(mesh, path.strip[i], path.strip[i + 1]) < 0)
      throw parse_error("path strip is not connected");
  if (path.start.face != path.strip.front() || path.end.face != path.strip.back())
    throw parse_error("path endpoints are not in the strip end faces");
  path.length = polyline_length(path_positions(mesh, path));
  return path;
}

// -----------------------------------------------------------------------------
// SPLINES
// -----------------------------------------------------------------------------

inline string trace_kind_name(trace_kind kind) {
  return kind == trace_kind::uniform ? "uniform" : "adaptive";
}

inline trace_kind parse_trace_kind(const string& name) {
  if (name == "uniform") return trace_kind::uniform;
  if (name == "adaptive") return trace_kind::adaptive;
  throw invalid_argument_error("unknown mode '" + name + "'");
}

inline void mode_to_json(json& js, const trace_mode& mode) {
  js["mode"]      = trace_kind_name(mode.kind);
  js["depth"]     = mode.depth;
  js["theta"]     = mode.theta;
  js["max_depth"] = mode.max_depth;
}

inline trace_mode mode_from_json(const json& js, trace_mode mode = {}) {
  if (js.contains("mode")) mode.kind = parse_trace_kind(js["mode"].get<string>());
  if (js.contains("depth")) mode.depth = js["depth"].get<int>();
  if (js.contains("levels")) mode.depth = js["levels"].get<int>();
  if (js.contains("theta")) mode.theta = js["theta"].get<double>();
  if (js.contains("max_depth")) mode.max_depth = js["max_depth"].get<int>();
  return mode;
}

inline json points_to_json(const vector<mesh_point>& points) {
  auto js = json::array();
  for (auto& p : points) js.push_back(point_to_json(p));
  return js;
}

inline vector<mesh_point> points_from_json(
    const triangle_mesh& mesh, const json& js) {
  auto points = vector<mesh_point>{};
  if (!js.is_array()) throw parse_error("control points must be an array");
  for (auto& p : js) points.push_back(checked_point(mesh, point_from_json(p)));
  return points;
}

// Single polygon: {degree, scheme, control_points, mode, depth, theta}.
// Spline: {scheme, mode, ..., segments: [{control_points}], continuity}.
inline json spline_to_json(const spline& s) {
  auto js       = json{};
  js["scheme"]  = scheme_name(s.scheme);
  mode_to_json(js, s.mode);
  js["degree"]  = s.segments.empty() ? 3 : degree(s.segments.front());
  auto segments = json::array();
  for (auto& segment : s.segments)
    segments.push_back({{"control_points", points_to_json(segment.points)}});
  js["segments"] = segments;
  auto flags     = json::array();
  for (auto c : s.continuity) flags.push_back(continuity_name(c));
  js["continuity"] = flags;
  if (s.segments.size() == 1)
    js["control_points"] = points_to_json(s.segments.front().points);
  return js;
}

// Reads either form. Single polygons may have any degree; multi-segment
// splines are cubic.
inline spline spline_from_json(
    const triangle_mesh& mesh, const dual_graph& graph, const json& js) {
  try {
    auto s = spline{};
    if (js.contains("scheme")) s.scheme = parse_scheme(js["scheme"].get<string>());
    s.mode = mode_from_json(js);
    if (js.contains("segments")) {
      for (auto& segment : js["segments"]) {
        auto& cp = segment.is_object() ? segment.at("control_points") : segment;
        s.segments.push_back(make_polygon(mesh, graph, points_from_json(mesh, cp)));
      }
    } else {
      s.segments.push_back(make_polygon(
          mesh, graph, points_from_json(mesh, js.at("control_points"))));
    }
    if (s.segments.empty()) throw parse_error("spline has no segments");
    for (auto i = 1; i < (int)s.segments.size(); i++)
      if (!(s.segments[i - 1].points.back() == s.segments[i].points.front()))
        throw parse_error("spline segments do not share anchors");
    if (js.contains("degree") && s.segments.size() == 1 &&
        js["degree"].get<int>() != degree(s.segments.front()))
      throw parse_error("degree does not match the number of control points");
    s.continuity.assign(s.segments.size() + 1, anchor_kind::corner);
    if (js.contains("continuity")) {
      auto flags = js["continuity"].get<vector<string>>();
      if (flags.size() != s.continuity.size())
        throw parse_error("continuity needs one flag per anchor");
      for (auto i = 0; i < (int)flags.size(); i++)
        s.continuity[i] = parse_continuity(flags[i]);
    }
    return s;
  } catch (const json::exception& e) {
    throw parse_error(string("malformed spline: ") + e.what());
  }
}

// -----------------------------------------------------------------------------
// TRACED CURVES
// -----------------------------------------------------------------------------

inline json curve_to_json(const triangle_mesh& mesh, const traced_curve& curve) {
  auto js       = json{};
  js["scheme"]  = scheme_name(curve.scheme);
  js["degree"]  = curve.degree;
  mode_to_json(js, curve.mode);
  js["leaves"]        = curve.leaves;
  js["max_level"]     = curve.max_level;
  js["node_count"]    = curve.nodes.size();
  js["segment_count"] = curve.segments.size();
  auto nodes          = json::array();
  for (auto i = 0; i < (int)curve.nodes.size(); i++) {
    auto node        = point_to_json(curve.nodes[i]);
    node["position"] = vec3_to_json(embed(mesh, curve.nodes[i]));
    if (i < (int)curve.node_knots.size()) node["knots"] = curve.node_knots[i];
    nodes.push_back(node);
  }
  js["nodes"]    = nodes;
  auto segments  = json::array();
  for (auto& s : curve.segments) segments.push_back(path_to_json(mesh, s));
  js["segments"] = segments;
  auto polyline  = json::array();
  for (auto& p : flat_polyline(mesh, curve)) polyline.push_back(vec3_to_json(p));
  js["polyline"] = polyline;
  return js;
}

inline traced_curve curve_from_json(const triangle_mesh& mesh, const json& js) {
  try {
    auto curve   = traced_curve{};
    curve.scheme = parse_scheme(js.value("scheme", string{"rdc"}));
    curve.degree = js.value("degree", 3);
    curve.mode   = mode_from_json(js);
    for (auto& node : js.at("nodes"))
      curve.nodes.push_back(checked_point(mesh, point_from_json(node)));
    for (auto& segment : js.at("segments"))
      curve.segments.push_back(path_from_json(mesh, segment));
    curve.leaves    = js.value("leaves", 0);
    curve.max_level = js.value("max_level", 0);
    if (!curve.nodes.empty() && curve.segments.size() + 1 != curve.nodes.size())
      throw parse_error("curve needs one segment between consecutive nodes");
    return curve;
  } catch (const json::exception& e) {
    throw parse_error(string("malformed curve: ") + e.what());
  }
}

// Polylines as OBJ line elements, one per curve.
inline void save_obj_polylines(
    std::ostream& stream, const vector<vector<vec3>>& polylines) {
  stream.precision(17);
  auto base = 1;
  for (auto& line : polylines) {
    for (auto& p : line) stream << "v " << p.x << " " << p.y << " " << p.z << "\n";
    if (line.size() >= 2) {
      stream << "l";
      for (auto i = 0; i < (int)line.size(); i++) stream << " " << base + i;
      stream << "\n";
    }
    base += (int)line.size();
  }
}

// -----------------------------------------------------------------------------
// MESH STATISTICS
// -----------------------------------------------------------------------------

inline json mesh_stats(const triangle_mesh& mesh, const dual_graph& graph) {
  auto area = 0.0;
  for (auto f = 0; f < (int)mesh.triangles.size(); f++) area += face_area(mesh, f);
  auto used = 0;
  for (auto f : mesh.vertex_face) used += f >= 0 ? 1 : 0;
  auto edges = (int)mesh.triangles.size() * 3 / 2;
  auto euler = used - edges + (int)mesh.triangles.size();
  return {{"vertices", mesh.positions.size()},
      {"triangles", mesh.triangles.size()}, {"bbox_diag", mesh.bbox_diag},
      {"longest_edge", mesh.longest_edge}, {"area", area},
      {"euler_characteristic", euler}, {"graph_nodes", graph.nodes.size()},
      {"graph_arcs", graph.arc_targets.size()},
      {"split_edges", graph.split_edges}, {"split_threshold", graph.threshold}};
}

}  // namespace bsurf

#endif
