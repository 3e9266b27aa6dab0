//
// Spline editing: anchors and handles, smooth-anchor mirroring, anchor
// insertion and deletion, and whole-spline transforms in normal coordinates.
//

#ifndef BSURF_EDITING_HPP
#define BSURF_EDITING_HPP

#include "splines.hpp"

namespace bsurf {

// -----------------------------------------------------------------------------
// SPLINES
// -----------------------------------------------------------------------------

enum struct anchor_kind { corner, smooth };

// Chain of cubic segments. Segment i runs from anchor i to anchor i+1, and
// its points 1 and 2 are the handles of those anchors. A spline whose first
// and last anchors are the same mesh point is closed.
struct spline {
  vector<control_polygon> segments   = {};
  vector<anchor_kind>     continuity = {};  // one per anchor
  spline_scheme           scheme     = spline_scheme::rdc;
  trace_mode              mode       = {};
};

// Handle `side` 0 is point 1 of the segment, side 1 is point 2.
struct handle_ref {
  int segment = 0;
  int side    = 0;
};

inline int anchor_count(const spline& s) { return (int)s.segments.size() + 1; }

inline bool is_closed(const spline& s) {
  return s.segments.size() >= 2 &&
         s.segments.front().points.front() == s.segments.back().points.back();
}

inline void check_anchor(const spline& s, int anchor) {
  if (anchor < 0 || anchor >= anchor_count(s))
    throw invalid_argument_error("anchor " + std::to_string(anchor) +
                                 " out of range");
}

inline void check_handle(const spline& s, const handle_ref& h) {
  if (h.segment < 0 || h.segment >= (int)s.segments.size() ||
      (h.side != 0 && h.side != 1))
    throw invalid_argument_error("handle out of range");
}

inline mesh_point anchor_point(const spline& s, int anchor) {
  check_anchor(s, anchor);
  if (anchor < (int)s.segments.size()) return s.segments[anchor].points[0];
  return s.segments.back().points.back();
}

inline int handle_anchor(const handle_ref& h) { return h.segment + h.side; }

inline mesh_point& handle_point(spline& s, const handle_ref& h) {
  return s.segments[h.segment].points[1 + h.side];
}

// Handles attached to an anchor, following closure at the ends.
inline vector<handle_ref> anchor_handles(const spline& s, int anchor) {
  auto n       = (int)s.segments.size();
  auto handles = vector<handle_ref>{};
  auto closed  = is_closed(s);
  if (anchor > 0) handles.push_back({anchor - 1, 1});
  else if (closed) handles.push_back({n - 1, 1});
  if (anchor < n) handles.push_back({anchor, 0});
  else if (closed) handles.push_back({0, 0});
  return handles;
}

// Geodesic from the anchor to one of its handles.
inline geodesic_path tangent_path(const spline& s, const handle_ref& h) {
  auto& segment = s.segments[h.segment];
  if (h.side == 0) return segment.segments[0];
  return reverse_path(segment.segments[2]);
}

inline spline make_spline(const triangle_mesh& mesh, const dual_graph& graph,
    const vector<vector<mesh_point>>& segments, spline_scheme scheme = {},
    const trace_mode& mode = {}) {
  auto s   = spline{};
  s.scheme = scheme;
  s.mode   = mode;
  for (auto& points : segments) {
    if (points.size() != 4)
      throw invalid_argument_error("spline segments must be cubic");
    if (!s.segments.empty() && !(s.segments.back().points.back() == points[0]))
      throw invalid_argument_error("spline segments must share anchors");
    s.segments.push_back(make_polygon(mesh, graph, points));
  }
  if (s.segments.empty()) throw invalid_argument_error("spline has no segments");
  s.continuity.assign(s.segments.size() + 1, anchor_kind::corner);
  return s;
}

// Rebuilds the cached segments of a polygon after its points changed,
// keeping the given tangent paths for the anchor-handle segments.
inline void refresh_segment(const triangle_mesh& mesh, const dual_graph& graph,
    control_polygon& polygon, const std::optional<geodesic_path>& first = {},
    const std::optional<geodesic_path>& last = {}) {
  polygon.segments.resize(polygon.points.size() - 1);
  for (auto i = 0; i + 1 < (int)polygon.points.size(); i++)
    polygon.segments[i] = shortest_path(
        mesh, graph, polygon.points[i], polygon.points[i + 1]);
  if (first) polygon.segments.front() = *first;
  if (last) polygon.segments.back() = reverse_path(*last);
  polygon.max_segment = max_segment_length(polygon.segments);
}

namespace detail {

// Stores a traced anchor-to-handle path as the segment's first or last
// geodesic, so that the handle length is kept exactly.
inline void set_tangent(
    spline& s, const handle_ref& h, const geodesic_path& path) {
  auto& segment = s.segments[h.segment];
  handle_point(s, h) = path.end;
  if (h.side == 0) segment.segments[0] = path;
  else segment.segments[2] = reverse_path(path);
  segment.max_segment = max_segment_length(segment.segments);
}

inline void set_anchor(spline& s, int anchor, const mesh_point& p) {
  if (anchor > 0) s.segments[anchor - 1].points.back() = p;
  if (anchor < (int)s.segments.size()) s.segments[anchor].points.front() = p;
}

}  // namespace detail

// -----------------------------------------------------------------------------
// EDITING OPERATIONS
// -----------------------------------------------------------------------------

namespace detail {

// Recomputes the handle-to-handle geodesic of the given segments.
inline void refresh_middles(const triangle_mesh& mesh, const dual_graph& graph,
    spline& s, const vector<handle_ref>& touched) {
  auto done = vector<bool>(s.segments.size(), false);
  for (auto& h : touched) {
    if (done[h.segment]) continue;
    done[h.segment] = true;
    auto& segment   = s.segments[h.segment];
    segment.segments[1] = shortest_path(
        mesh, graph, segment.points[1], segment.points[2]);
    segment.max_segment = max_segment_length(segment.segments);
  }
}

// Anchor indices naming the same point: both ends of a closed spline.
inline vector<int> anchor_aliases(const spline& s, int anchor) {
  auto last = anchor_count(s) - 1;
  if (is_closed(s) && (anchor == 0 || anchor == last)) return {0, last};
  return {anchor};
}

}  // namespace detail

// Moves an anchor. Its handles keep their geodesic length and their direction
// relative to the anchor, parallel transported to the new position.
inline spline move_anchor(const triangle_mesh& mesh, const dual_graph& graph,
    spline s, int anchor, const mesh_point& position) {
  check_anchor(s, anchor);
  auto to  = checked_point(mesh, position);
  auto old = anchor_point(s, anchor);
  if (to == old) return s;
  auto transport = shortest_path(mesh, graph, old, to);
  auto handles   = anchor_handles(s, anchor);
  auto traced    = vector<geodesic_path>{};
  for (auto& h : handles) {
    auto tangent = tangent_path(s, h);
    auto dir     = transport_along(mesh, transport, start_tangent(mesh, tangent));
    traced.push_back(straightest_geodesic(mesh, to, dir, tangent.length));
  }
  for (auto a : detail::anchor_aliases(s, anchor)) detail::set_anchor(s, a, to);
  for (auto i = 0; i < (int)handles.size(); i++)
    detail::set_tangent(s, handles[i], traced[i]);
  detail::refresh_middles(mesh, graph, s, handles);
  return s;
}

// Moves a handle. At a smooth anchor the opposite handle is re-traced along
// the reversed direction, keeping its own length.
inline spline move_handle(const triangle_mesh& mesh, const dual_graph& graph,
    spline s, const handle_ref& handle, const mesh_point& position) {
  check_handle(s, handle);
  auto to      = checked_point(mesh, position);
  auto anchor  = handle_anchor(handle);
  auto from    = anchor_point(s, anchor);
  auto moved   = shortest_path(mesh, graph, from, to);
  auto touched = vector<handle_ref>{handle};
  detail::set_tangent(s, handle, moved);
  if (s.continuity[anchor] == anchor_kind::smooth) {
    for (auto& h : anchor_handles(s, anchor)) {
      if (h.segment == handle.segment && h.side == handle.side) continue;
      auto len = tangent_path(s, h).length;
      auto dir = moved.length > 0 ? -start_tangent(mesh, moved)
                                  : start_tangent(mesh, tangent_path(s, h));
      detail::set_tangent(s, h, straightest_geodesic(mesh, from, dir, len));
      touched.push_back(h);
    }
  }
  detail::refresh_middles(mesh, graph, s, touched);
  return s;
}

inline spline set_continuity(const triangle_mesh& mesh, const dual_graph& graph,
    spline s, int anchor, anchor_kind kind) {
  check_anchor(s, anchor);
  for (auto a : detail::anchor_aliases(s, anchor)) s.continuity[a] = kind;
  if (kind == anchor_kind::smooth) {
    // Align the handles by mirroring the outgoing one.
    auto handles = anchor_handles(s, anchor);
    if (handles.size() == 2) {
      auto h = handles.back();
      auto p = handle_point(s, h);
      return move_handle(mesh, graph, std::move(s), h, p);
    }
  }
  return s;
}

// Splits segment `index` at t with the spline's scheme. The new anchor is
// smooth.
inline spline insert_anchor(const triangle_mesh& mesh, const dual_graph& graph,
    spline s, int index, double t) {
  if (index < 0 || index >= (int)s.segments.size())
    throw invalid_argument_error("segment index out of range");
  auto [left, right] = insert_point(
      mesh, graph, s.scheme, s.segments[index], t, s.mode);
  s.segments[index] = std::move(left);
  s.segments.insert(s.segments.begin() + index + 1, std::move(right));
  s.continuity.insert(s.continuity.begin() + index + 1, anchor_kind::smooth);
  return s;
}

// Removes an anchor. An interior anchor merges its two segments, keeping the
// outer handles; an end anchor drops its segment.
inline spline delete_anchor(const triangle_mesh& mesh, const dual_graph& graph,
    spline s, int anchor) {
  check_anchor(s, anchor);
  if (s.segments.size() < 2)
    throw invalid_argument_error("cannot delete an anchor of a single segment");
  auto n = (int)s.segments.size();
  if (anchor == 0) {
    s.segments.erase(s.segments.begin());
    s.continuity.erase(s.continuity.begin());
  } else if (anchor == n) {
    s.segments.pop_back();
    s.continuity.pop_back();
  } else {
    auto& a      = s.segments[anchor - 1];
    auto& b      = s.segments[anchor];
    auto  merged = control_polygon{};
    merged.points = {a.points[0], a.points[1], b.points[2], b.points[3]};
    refresh_segment(mesh, graph, merged, a.segments[0], reverse_path(b.segments[2]));
    s.segments[anchor - 1] = std::move(merged);
    s.segments.erase(s.segments.begin() + anchor);
    s.continuity.erase(s.continuity.begin() + anchor);
  }
  return s;
}

// Traces every segment of the spline.
inline vector<traced_curve> trace_spline(
    const triangle_mesh& mesh, const dual_graph& graph, const spline& s) {
  auto curves = vector<traced_curve>{};
  for (auto& segment : s.segments)
    curves.push_back(trace_curve(mesh, graph, s.scheme, segment, s.mode));
  return curves;
}

// -----------------------------------------------------------------------------
// NORMAL COORDINATES
// -----------------------------------------------------------------------------

// Polar coordinates (angle, radius) of points around a center, with angles
// measured in the center's face frame.
struct normal_chart {
  mesh_point   center  = {};
  vector<vec2> entries = {};
};

inline vec2 log_map(const triangle_mesh& mesh, const dual_graph& graph,
    const mesh_point& center, const mesh_point& p) {
  auto path = shortest_path(mesh, graph, center, p);
  if (path.length == 0) return {0, 0};
  return {angle_of(start_tangent(mesh, path)), path.length};
}

inline mesh_point exp_map(
    const triangle_mesh& mesh, const mesh_point& center, vec2 polar) {
  if (polar.y <= 0) return checked_point(mesh, center);
  auto dir = vec2{std::cos(polar.x), std::sin(polar.x)};
  return straightest_geodesic(mesh, center, dir, polar.y).end;
}

inline normal_chart log_chart(const triangle_mesh& mesh, const dual_graph& graph,
    const mesh_point& center, const vector<mesh_point>& points) {
  auto chart   = normal_chart{checked_point(mesh, center), {}};
  for (auto& p : points)
    chart.entries.push_back(log_map(mesh, graph, chart.center, p));
  return chart;
}

inline vector<mesh_point> exp_chart(
    const triangle_mesh& mesh, const normal_chart& chart) {
  auto points = vector<mesh_point>{};
  for (auto& e : chart.entries) points.push_back(exp_map(mesh, chart.center, e));
  return points;
}

enum struct transform_kind { rotate, scale, translate };

struct spline_transform {
  transform_kind kind   = transform_kind::rotate;
  double         angle  = 0;   // radians, for rotate
  double         factor = 1;   // for scale
  mesh_point     target = {};  // new center, for translate
};

// Rotation taking directions in the frame of `from` to directions in the
// frame of `to` along the shortest path between them.
inline double transport_angle(const triangle_mesh& mesh, const dual_graph& graph,
    const mesh_point& from, const mesh_point& to) {
  auto path = shortest_path(mesh, graph, from, to);
  return angle_of(transport_along(mesh, path, {1, 0}));
}

// Applies a 2D linear map to the normal coordinates of all control points
// about the center and maps them back to the surface.
inline spline transform_spline(const triangle_mesh& mesh,
    const dual_graph& graph, const spline& s, const mesh_point& center,
    const spline_transform& op) {
  if (op.kind == transform_kind::scale && !(op.factor > 0))
    throw invalid_argument_error("scale factor must be positive");
  auto points = vector<mesh_point>{};
  for (auto& segment : s.segments)
    points.insert(points.end(), segment.points.begin(), segment.points.end());
  auto chart = log_chart(mesh, graph, center, points);
  switch (op.kind) {
    case transform_kind::rotate:
      for (auto& e : chart.entries) e.x += op.angle;
      break;
    case transform_kind::scale:
      for (auto& e : chart.entries) e.y *= op.factor;
      break;
    case transform_kind::translate: {
      auto target = checked_point(mesh, op.target);
      auto turn   = transport_angle(mesh, graph, chart.center, target);
      for (auto& e : chart.entries) e.x += turn;
      chart.center = target;
    } break;
  }
  auto moved = exp_chart(mesh, chart);
  auto out   = s;
  auto idx   = 0;
  for (auto& segment : out.segments) {
    for (auto& p : segment.points) p = moved[idx++];
  }
  // Shared anchors map to identical points, since they have identical charts.
  for (auto& segment : out.segments) refresh_segment(mesh, graph, segment);
  return out;
}

inline string continuity_name(anchor_kind kind) {
  return kind == anchor_kind::smooth ? "smooth" : "corner";
}

inline anchor_kind parse_continuity(const string& name) {
  if (name == "smooth") return anchor_kind::smooth;
  if (name == "corner") return anchor_kind::corner;
  throw invalid_argument_error("unknown continuity '" + name + "'");
}

}  // namespace bsurf

#endif
