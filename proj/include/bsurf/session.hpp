//
// Versioned JSON session protocol used by the editor. A request is
// {v, id, op, args}; the reply is {v, id, ok, result} or
// {v, id, ok: false, error: {type, message}}. Every request carries the full
// spline it edits, so the only state kept between messages is the set of
// loaded meshes.
//

#ifndef BSURF_SESSION_HPP
#define BSURF_SESSION_HPP

#include <memory>
#include <mutex>
#include <set>

#include "harness.hpp"
#include "svg.hpp"

namespace bsurf {

inline constexpr int protocol_version = 1;

struct session_mesh {
  string        name  = {};
  triangle_mesh mesh  = {};
  dual_graph    graph = {};
};

struct session {
  std::map<int, std::shared_ptr<const session_mesh>> meshes  = {};
  int                                                next_id = 1;
  std::mutex                                         lock    = {};
};

// Unknown or unsupported operation.
struct unknown_op_error : error {
  using error::error;
};

inline string error_type(const std::exception& e) {
  if (dynamic_cast<const parse_error*>(&e)) return "parse_error";
  if (dynamic_cast<const non_manifold_error*>(&e)) return "non_manifold";
  if (dynamic_cast<const not_watertight_error*>(&e)) return "not_watertight";
  if (dynamic_cast<const invalid_face_error*>(&e)) return "invalid_face";
  if (dynamic_cast<const invalid_point_error*>(&e)) return "invalid_point";
  if (dynamic_cast<const unreachable_error*>(&e)) return "unreachable";
  if (dynamic_cast<const degenerate_strip_error*>(&e)) return "degenerate_strip";
  if (dynamic_cast<const iteration_cap_error*>(&e)) return "iteration_cap";
  if (dynamic_cast<const extension_unstable_error*>(&e)) return "extension_unstable";
  if (dynamic_cast<const invalid_argument_error*>(&e)) return "invalid_argument";
  if (dynamic_cast<const unknown_op_error*>(&e)) return "unknown_op";
  if (dynamic_cast<const json::exception*>(&e)) return "parse_error";
  return "internal";
}

namespace detail {

inline std::shared_ptr<const session_mesh> find_mesh(session& s, const json& args) {
  auto id   = args.at("mesh").get<int>();
  auto lock = std::lock_guard{s.lock};
  auto it   = s.meshes.find(id);
  if (it == s.meshes.end())
    throw invalid_argument_error("unknown mesh handle " + std::to_string(id));
  return it->second;
}

inline json positions_to_json(const vector<vec3>& points) {
  auto js = json::array();
  for (auto& p : points) js.push_back(vec3_to_json(p));
  return js;
}

inline vec3 vec3_from_json(const json& js) {
  return {js.at(0).get<double>(), js.at(1).get<double>(), js.at(2).get<double>()};
}

// Spline plus what the editor draws: one polyline per traced segment and the
// geodesic tangent segments of every handle. The spline is first passed
// through its JSON form, so the view matches what a later trace of the
// exported file produces.
inline json spline_view(const session_mesh& m, const spline& edited) {
  auto js       = spline_to_json(edited);
  auto s        = spline_from_json(m.mesh, m.graph, js);
  auto curves   = trace_spline(m.mesh, m.graph, s);
  auto lines    = json::array();
  auto segments = json::array();
  for (auto& c : curves) {
    lines.push_back(positions_to_json(flat_polyline(m.mesh, c)));
    segments.push_back(c.segments.size());
  }
  auto tangents = json::array();
  for (auto& polygon : s.segments) {
    tangents.push_back(positions_to_json(path_positions(m.mesh, polygon.segments.front())));
    tangents.push_back(positions_to_json(path_positions(m.mesh, polygon.segments.back())));
  }
  auto anchors = json::array();
  for (auto a = 0; a < anchor_count(s); a++)
    anchors.push_back(vec3_to_json(embed(m.mesh, anchor_point(s, a))));
  return {{"spline", js}, {"polylines", lines},
      {"segment_counts", segments}, {"tangents", tangents}, {"anchors", anchors}};
}

}  // namespace detail

// Runs one operation and returns its result object.
inline json session_dispatch(session& s, const string& op, const json& args) {
  if (op == "load_mesh") {
    auto entry = std::make_shared<session_mesh>();
    if (args.contains("obj")) {
      auto stream = std::istringstream{args["obj"].get<string>()};
      entry->mesh = load_obj(stream);
      entry->name = args.value("name", string{"inline"});
    } else {
      entry->name = args.at("path").get<string>();
      entry->mesh = load_mesh_spec(entry->name);
    }
    entry->graph = build_dual_graph(entry->mesh);
    auto lock    = std::lock_guard{s.lock};
    auto id      = s.next_id++;
    s.meshes[id] = entry;
    return {{"mesh", id}, {"stats", mesh_stats(entry->mesh, entry->graph)}};
  }
  if (op == "unload_mesh") {
    auto id   = args.at("mesh").get<int>();
    auto lock = std::lock_guard{s.lock};
    return {{"removed", s.meshes.erase(id) > 0}};
  }
  if (op == "version") return {{"v", protocol_version}};

  static const auto mesh_ops = std::set<string>{"mesh_stats", "mesh_geometry", "embed",
      "closest_point", "shortest_path", "trace", "eval", "view", "move_anchor",
      "move_handle", "set_continuity", "insert", "delete_anchor", "transform",
      "svg_import"};
  if (!mesh_ops.contains(op)) throw unknown_op_error("unknown op '" + op + "'");
  auto m     = detail::find_mesh(s, args);
  auto& mesh = m->mesh;
  auto& graph = m->graph;
  if (op == "mesh_stats") return mesh_stats(mesh, graph);
  if (op == "mesh_geometry") {
    auto faces = json::array();
    for (auto& t : mesh.triangles) faces.push_back({t.x, t.y, t.z});
    return {{"positions", detail::positions_to_json(mesh.positions)},
        {"triangles", faces}};
  }
  if (op == "embed") {
    auto out = json::array();
    for (auto& p : args.at("points"))
      out.push_back(vec3_to_json(embed(mesh, checked_point(mesh, point_from_json(p)))));
    return {{"positions", out}};
  }
  if (op == "closest_point") {
    auto out = json::array();
    for (auto& p : args.at("positions"))
      out.push_back(point_to_json(closest_point(mesh, detail::vec3_from_json(p))));
    return {{"points", out}};
  }
  if (op == "shortest_path") {
    auto from = checked_point(mesh, point_from_json(args.at("from")));
    auto to   = checked_point(mesh, point_from_json(args.at("to")));
    return path_to_json(mesh, shortest_path(mesh, graph, from, to));
  }
  if (op == "trace") {
    auto sp     = spline_from_json(mesh, graph, args.at("spline"));
    auto curves = json::array();
    for (auto& c : trace_spline(mesh, graph, sp)) curves.push_back(curve_to_json(mesh, c));
    return {{"curves", curves}};
  }
  if (op == "eval") {
    auto sp = spline_from_json(mesh, graph, args.at("spline"));
    auto index = args.value("segment", 0);
    if (index < 0 || index >= (int)sp.segments.size())
      throw invalid_argument_error("segment index out of range");
    auto out = json::array();
    for (auto& t : args.at("t")) {
      auto p = eval_curve(mesh, graph, sp.scheme, sp.segments[index],
          t.get<double>(), sp.mode);
      out.push_back({{"point", point_to_json(p)}, {"position", vec3_to_json(embed(mesh, p))}});
    }
    return {{"values", out}};
  }
  if (op == "view") {
    return detail::spline_view(*m, spline_from_json(mesh, graph, args.at("spline")));
  }
  if (op == "insert") {
    auto sp = spline_from_json(mesh, graph, args.at("spline"));
    sp      = insert_anchor(mesh, graph, std::move(sp), args.value("segment", 0),
        args.at("t").get<double>());
    return detail::spline_view(*m, sp);
  }
  if (op == "move_anchor") {
    auto sp = spline_from_json(mesh, graph, args.at("spline"));
    sp      = move_anchor(mesh, graph, std::move(sp), args.at("anchor").get<int>(),
        point_from_json(args.at("position")));
    return detail::spline_view(*m, sp);
  }
  if (op == "move_handle") {
    auto sp = spline_from_json(mesh, graph, args.at("spline"));
    auto& h = args.at("handle");
    sp      = move_handle(mesh, graph, std::move(sp),
        {h.at("segment").get<int>(), h.at("side").get<int>()},
        point_from_json(args.at("position")));
    return detail::spline_view(*m, sp);
  }
  if (op == "delete_anchor") {
    auto sp = spline_from_json(mesh, graph, args.at("spline"));
    sp = delete_anchor(mesh, graph, std::move(sp), args.at("anchor").get<int>());
    return detail::spline_view(*m, sp);
  }
  if (op == "set_continuity") {
    auto sp = spline_from_json(mesh, graph, args.at("spline"));
    sp      = set_continuity(mesh, graph, std::move(sp), args.at("anchor").get<int>(),
        parse_continuity(args.at("continuity").get<string>()));
    return detail::spline_view(*m, sp);
  }
  if (op == "transform") {
    auto sp     = spline_from_json(mesh, graph, args.at("spline"));
    auto center = point_from_json(args.at("center"));
    auto kind   = args.at("kind").get<string>();
    auto t      = spline_transform{};
    if (kind == "rotate") {
      t.kind  = transform_kind::rotate;
      t.angle = args.at("angle").get<double>();
    } else if (kind == "scale") {
      t.kind   = transform_kind::scale;
      t.factor = args.at("factor").get<double>();
    } else if (kind == "translate") {
      t.kind   = transform_kind::translate;
      t.target = point_from_json(args.at("target"));
    } else {
      throw invalid_argument_error("unknown transform '" + kind + "'");
    }
    return detail::spline_view(*m, transform_spline(mesh, graph, sp, center, t));
  }
  if (op == "svg_import") {
    auto placement     = svg_placement{};
    placement.center   = point_from_json(args.at("center"));
    placement.scale    = args.value("scale", placement.scale);
    placement.rotation = args.value("rotation", placement.rotation);
    auto scheme = parse_scheme(args.value("scheme", string{"rdc"}));
    auto result = svg_import(mesh, graph, args.at("svg").get<string>(), placement,
        scheme, mode_from_json(args));
    auto views  = json::array();
    for (auto& sp : result.splines) views.push_back(detail::spline_view(*m, sp));
    return {{"splines", views}, {"warnings", result.warnings}};
  }
  throw unknown_op_error("unknown op '" + op + "'");
}

// Answers one request. Never throws: every failure becomes an error reply
// that echoes the request id.
inline json session_handle(session& s, const json& request) {
  auto reply = json{{"v", protocol_version}, {"id", nullptr}, {"ok", false}};
  try {
    if (!request.is_object()) throw parse_error("request must be an object");
    if (request.contains("id")) reply["id"] = request["id"];
    if (request.value("v", 0) != protocol_version)
      throw invalid_argument_error(
          "unsupported protocol version, expected " + std::to_string(protocol_version));
    auto op     = request.at("op").get<string>();
    auto args   = request.value("args", json::object());
    if (args.is_null()) args = json::object();
    if (!args.is_object()) throw parse_error("request args must be an object");
    reply["result"] = session_dispatch(s, op, args);
    reply["ok"]     = true;
  } catch (const std::exception& e) {
    reply["error"] = {{"type", error_type(e)}, {"message", e.what()}};
  }
  return reply;
}

inline string session_handle_line(session& s, const string& line) {
  auto request = json{};
  try {
    request = json::parse(line);
  } catch (const json::exception& e) {
    auto reply = json{{"v", protocol_version}, {"id", nullptr}, {"ok", false},
        {"error", {{"type", "parse_error"}, {"message", e.what()}}}};
    return reply.dump();
  }
  return session_handle(s, request).dump();
}

}  // namespace bsurf

#endif
