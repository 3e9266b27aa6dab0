//
// Bezier curves on meshes: direct De Casteljau, Recursive De Casteljau (RDC)
// and Open-uniform Lane-Riesenfeld (OLR) subdivision, de Boor evaluation,
// B-spline to Bezier conversion, point insertion and degree elevation.
//
// All weighted means are chains of pairwise manifold averages. Every scheme
// runs its averages through a small construction record that remembers which
// point lies on which path. Points sharing a path are joined by its sub-path,
// and other pairs get the best chain through a shared point as a length bound
// for the shortest-path query.
//

#ifndef BSURF_SPLINES_HPP
#define BSURF_SPLINES_HPP

#include <functional>
#include <map>
#include <optional>
#include <utility>

#include "bezier.hpp"
#include "geodesics.hpp"

namespace bsurf {

// -----------------------------------------------------------------------------
// CONTROL POLYGONS AND CURVES
// -----------------------------------------------------------------------------

// Control points P_0..P_k with the geodesic segments joining them.
struct control_polygon {
  vector<mesh_point>    points      = {};
  vector<geodesic_path> segments    = {};
  double                max_segment = 0;
};

inline int degree(const control_polygon& polygon) {
  return (int)polygon.points.size() - 1;
}

inline double polygon_length(const control_polygon& polygon) {
  auto len = 0.0;
  for (auto& segment : polygon.segments) len += segment.length;
  return len;
}

inline double max_segment_length(const vector<geodesic_path>& segments) {
  auto len = 0.0;
  for (auto& segment : segments) len = std::max(len, segment.length);
  return len;
}

inline control_polygon make_polygon(const triangle_mesh& mesh,
    const dual_graph& graph, const vector<mesh_point>& points) {
  if (points.size() < 2)
    throw invalid_argument_error("a control polygon needs at least 2 points");
  auto polygon = control_polygon{};
  for (auto& p : points) polygon.points.push_back(checked_point(mesh, p));
  for (auto i = 0; i + 1 < (int)points.size(); i++)
    polygon.segments.push_back(shortest_path(
        mesh, graph, polygon.points[i], polygon.points[i + 1]));
  polygon.max_segment = max_segment_length(polygon.segments);
  return polygon;
}

inline control_polygon reverse_polygon(const control_polygon& polygon) {
  auto rev   = control_polygon{};
  rev.points = {polygon.points.rbegin(), polygon.points.rend()};
  for (auto it = polygon.segments.rbegin(); it != polygon.segments.rend(); ++it)
    rev.segments.push_back(reverse_path(*it));
  rev.max_segment = polygon.max_segment;
  return rev;
}

enum struct spline_scheme { rdc, olr };
enum struct trace_kind { uniform, adaptive };

// Uniform mode stops every branch at `depth` (the RDC recursion depth or the
// OLR level). Adaptive mode stops a branch once all node angles of its
// polygon are below theta (degrees), or at max_depth. Leaves next to an
// output node over theta are split further, also up to max_depth.
struct trace_mode {
  trace_kind kind      = trace_kind::adaptive;
  int        depth     = 4;
  double     theta     = 5;
  int        max_depth = 20;
};

inline trace_mode uniform_mode(int depth) {
  return {trace_kind::uniform, depth, 5, std::max(depth, 20)};
}
inline trace_mode adaptive_mode(double theta, int max_depth = 20) {
  return {trace_kind::adaptive, 0, theta, max_depth};
}

// Number of uniform RDC levels that bring segments of length L below delta.
inline int uniform_depth(double max_segment, double delta) {
  if (!(delta > 0)) throw invalid_argument_error("delta must be positive");
  if (max_segment <= delta) return 0;
  return (int)std::ceil(std::log2(max_segment / delta));
}

// Geodesic polygon approximating a curve. node_knots[i] holds the blossom
// arguments of node i: evaluating the Euclidean polar form of the input
// Bezier curve at them gives the flat-space value of the node.
struct traced_curve {
  spline_scheme          scheme     = spline_scheme::rdc;
  int                    degree     = 3;
  trace_mode             mode       = {};
  vector<mesh_point>     nodes      = {};
  vector<geodesic_path>  segments   = {};
  vector<vector<double>> node_knots = {};
  int                    leaves     = 0;
  int                    max_level  = 0;
};

// One 3D point per strip crossing, so every piece lies inside one triangle.
inline vector<vec3> flat_polyline(
    const triangle_mesh& mesh, const traced_curve& curve) {
  auto points = vector<vec3>{};
  for (auto& segment : curve.segments) {
    auto piece = path_positions(mesh, segment);
    auto first = points.empty() ? 0 : 1;
    points.insert(points.end(), piece.begin() + first, piece.end());
  }
  if (points.empty() && !curve.nodes.empty())
    points.push_back(embed(mesh, curve.nodes.front()));
  return points;
}

// -----------------------------------------------------------------------------
// CONSTRUCTION RECORD
// -----------------------------------------------------------------------------

namespace detail {

struct construction {
  const triangle_mesh*                    mesh    = nullptr;
  const dual_graph*                       graph   = nullptr;
  vector<mesh_point>                      points  = {};
  vector<geodesic_path>                   paths   = {};
  vector<std::array<int, 2>>              ends    = {};
  vector<vector<std::pair<int, double>>>  on      = {};  // point -> (path, w)
  vector<vector<std::pair<int, double>>>  members = {};  // path -> (point, w)
  std::map<std::pair<int, int>, int>      links   = {};  // (a, b) -> path a->b
};

inline construction make_construction(
    const triangle_mesh& mesh, const dual_graph& graph) {
  auto c  = construction{};
  c.mesh  = &mesh;
  c.graph = &graph;
  return c;
}

inline int add_point(construction& c, const mesh_point& p) {
  c.points.push_back(p);
  c.on.emplace_back();
  return (int)c.points.size() - 1;
}

inline void mark(construction& c, int point, int path, double w) {
  c.on[point].push_back({path, w});
  c.members[path].push_back({point, w});
}

inline int add_path(construction& c, geodesic_path path, int a, int b) {
  path.start = c.points[a];
  path.end   = c.points[b];
  c.paths.push_back(std::move(path));
  c.ends.push_back({a, b});
  c.members.emplace_back();
  auto id = (int)c.paths.size() - 1;
  mark(c, a, id, 0);
  mark(c, b, id, 1);
  c.links[{a, b}] = id;
  return id;
}

inline vector<int> add_polygon(construction& c, const control_polygon& polygon) {
  auto ids = vector<int>{};
  for (auto& p : polygon.points) ids.push_back(add_point(c, p));
  for (auto i = 0; i < (int)polygon.segments.size(); i++)
    add_path(c, polygon.segments[i], ids[i], ids[i + 1]);
  return ids;
}

// Portion of a path between two fractions, in either direction.
inline geodesic_path piece(
    const construction& c, int path, double w0, double w1) {
  if (w0 <= w1) return sub_path(*c.mesh, c.paths[path], w0, w1);
  return reverse_path(sub_path(*c.mesh, c.paths[path], w1, w0));
}

// Path from a to b, reusing a shared path when there is one.
inline int connect(construction& c, int a, int b) {
  if (auto it = c.links.find({a, b}); it != c.links.end()) return it->second;
  if (auto it = c.links.find({b, a}); it != c.links.end())
    return add_path(c, reverse_path(c.paths[it->second]), a, b);

  // Both points on one path.
  auto shared = -1;
  auto wa = 0.0, wb = 0.0, best = (double)INFINITY;
  for (auto [x, xa] : c.on[a])
    for (auto [y, yb] : c.on[b]) {
      if (x != y) continue;
      auto len = std::abs(yb - xa) * c.paths[x].length;
      if (len < best) {
        shared = x;
        wa     = xa;
        wb     = yb;
        best   = len;
      }
    }
  if (shared >= 0) return add_path(c, piece(c, shared, wa, wb), a, b);

  // Best chain a -> j -> b along two known paths.
  auto chain = vector<geodesic_path>{};
  auto cost  = (double)INFINITY;
  auto hint  = std::array<double, 4>{};
  auto hx = -1, hy = -1;
  for (auto [x, xa] : c.on[a])
    for (auto [j, xj] : c.members[x]) {
      if (j == a || j == b) continue;
      for (auto [y, yj] : c.on[j]) {
        if (y == x) continue;
        for (auto [q, yb] : c.members[y]) {
          if (q != b) continue;
          auto len = std::abs(xj - xa) * c.paths[x].length +
                     std::abs(yb - yj) * c.paths[y].length;
          if (len < cost) {
            cost = len;
            hx   = x;
            hy   = y;
            hint = {xa, xj, yj, yb};
          }
        }
      }
    }
  if (hx >= 0)
    chain = {piece(c, hx, hint[0], hint[1]), piece(c, hy, hint[2], hint[3])};
  auto path = shortest_path_bounded(
      *c.mesh, *c.graph, c.points[a], c.points[b], chain);
  return add_path(c, std::move(path), a, b);
}

// Point at fraction w of a recorded path.
inline int point_on(construction& c, int path, double w) {
  if (w <= 0) return c.ends[path][0];
  if (w >= 1) return c.ends[path][1];
  for (auto [p, pw] : c.members[path])
    if (pw == w) return p;
  auto id = add_point(c, point_at(*c.mesh, c.paths[path], w));
  mark(c, id, path, w);
  return id;
}

inline int average(construction& c, int a, int b, double w) {
  if (w <= 0 || a == b) return a;
  if (w >= 1) return b;
  return point_on(c, connect(c, a, b), w);
}

inline control_polygon extract_polygon(construction& c, const vector<int>& ids) {
  auto polygon = control_polygon{};
  for (auto id : ids) polygon.points.push_back(c.points[id]);
  for (auto i = 0; i + 1 < (int)ids.size(); i++)
    polygon.segments.push_back(c.paths[connect(c, ids[i], ids[i + 1])]);
  polygon.max_segment = max_segment_length(polygon.segments);
  return polygon;
}

// De Casteljau pyramid: levels[r][i] is b_i^r(t).
inline vector<vector<int>> decasteljau_pyramid(
    construction& c, const vector<int>& base, double t) {
  auto levels = vector<vector<int>>{base};
  for (auto r = 1; r < (int)base.size(); r++) {
    auto next = vector<int>(base.size() - r);
    for (auto i = 0; i < (int)next.size(); i++)
      next[i] = average(c, levels[r - 1][i], levels[r - 1][i + 1], t);
    levels.push_back(std::move(next));
  }
  return levels;
}

// Manifold de Boor triangle evaluated at the blossom arguments args[0..k-1]
// for control points ids and local knots u_1..u_2k. With all arguments equal
// to t this is the de Boor algorithm.
inline int deboor_blossom(construction& c, vector<int> ids,
    const vector<double>& knots, const vector<double>& args) {
  auto k = (int)ids.size() - 1;
  for (auto r = 1; r <= k; r++)
    for (auto i = k; i >= r; i--) {
      auto lo = knots[i - 1], hi = knots[i + k - r];
      auto a  = hi > lo ? (args[r - 1] - lo) / (hi - lo) : 0.0;
      ids[i]  = average(c, ids[i - 1], ids[i], a);
    }
  return ids[k];
}

}  // namespace detail

// -----------------------------------------------------------------------------
// DIRECT DE CASTELJAU AND DEGREE ELEVATION
// -----------------------------------------------------------------------------

// Manifold De Casteljau evaluation: k(k+1)/2 averages, returns the apex.
inline mesh_point decasteljau_eval(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& polygon, double t) {
  auto c   = detail::make_construction(mesh, graph);
  auto ids = detail::add_polygon(c, polygon);
  return c.points[detail::decasteljau_pyramid(c, ids, t).back()[0]];
}

// Degree k+1 polygon with new point i = A(P_i-1, P_i; 1 - i/(k+1)).
inline control_polygon degree_elevate(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& polygon) {
  auto k = degree(polygon);
  if (k < 1) throw invalid_argument_error("degree elevation needs k >= 1");
  auto c   = detail::make_construction(mesh, graph);
  auto ids = detail::add_polygon(c, polygon);
  auto out = vector<int>{ids[0]};
  for (auto i = 1; i <= k; i++)
    out.push_back(
        detail::average(c, ids[i - 1], ids[i], 1 - (double)i / (k + 1)));
  out.push_back(ids[k]);
  return detail::extract_polygon(c, out);
}

// -----------------------------------------------------------------------------
// NODE ANGLES
// -----------------------------------------------------------------------------

// Re-expresses a direction given at p (in p's face frame) in the frame of q,
// where q is the same location or a nearby one.
inline vec2 transport_between(const triangle_mesh& mesh, const dual_graph& graph,
    const mesh_point& p, const mesh_point& q, vec2 dir) {
  if (p.face == q.face) return dir;
  return transport_along(mesh, shortest_path(mesh, graph, p, q), dir);
}

// Turning angle (radians) at the node joining two consecutive segments.
inline double node_angle(const triangle_mesh& mesh, const dual_graph& graph,
    const geodesic_path& in, const geodesic_path& out) {
  if (in.length == 0 || out.length == 0) return 0;
  auto a = transport_between(mesh, graph, in.end, out.start, end_tangent(mesh, in));
  return angle_between(a, start_tangent(mesh, out));
}

// All interior node angles of the polygon are below theta (degrees).
inline bool flat_enough(const triangle_mesh& mesh, const dual_graph& graph,
    const control_polygon& polygon, double theta) {
  auto limit = deg2rad(theta);
  for (auto i = 1; i < (int)polygon.segments.size(); i++)
    if (!(node_angle(mesh, graph, polygon.segments[i - 1],
              polygon.segments[i]) < limit))
      return false;
  return true;
}

// -----------------------------------------------------------------------------
// SUBDIVISION TREE
// -----------------------------------------------------------------------------

// A node of the bisection (RDC) or expansion (OLR) tree. It covers the
// parameter interval [start, end] of width 2^-level. For RDC the polygon is
// the Bezier polygon of that piece; for OLR it holds the B-spline points
// index..index+k of level `level`.
struct curve_node {
  int             level   = 0;
  int             index   = 0;
  double          start   = 0;
  double          end     = 1;
  control_polygon polygon = {};
};

inline bool is_leaf(const triangle_mesh& mesh, const dual_graph& graph,
    const curve_node& node, const trace_mode& mode) {
  if (mode.kind == trace_kind::uniform) return node.level >= mode.depth;
  if (!(mode.theta > 0)) throw invalid_argument_error("theta must be positive");
  return node.level >= mode.max_depth ||
         flat_enough(mesh, graph, node.polygon, mode.theta);
}

// -----------------------------------------------------------------------------
// RECURSIVE DE CASTELJAU
// -----------------------------------------------------------------------------

// Splits a Bezier polygon at t. Both halves share the apex b_0^k(t), and their
// segments are sub-paths of the pyramid paths, so the input segments are
// reused as they are.
inline std::pair<control_polygon, control_polygon> rdc_split(
    const triangle_mesh& mesh, const dual_graph& graph,
    const control_polygon& polygon, double t = 0.5) {
  auto k       = degree(polygon);
  auto c       = detail::make_construction(mesh, graph);
  auto ids     = detail::add_polygon(c, polygon);
  auto pyramid = detail::decasteljau_pyramid(c, ids, t);
  auto left = vector<int>(k + 1), right = vector<int>(k + 1);
  for (auto r = 0; r <= k; r++) {
    left[r]  = pyramid[r][0];
    right[r] = pyramid[k - r][r];
  }
  return {detail::extract_polygon(c, left), detail::extract_polygon(c, right)};
}

inline std::pair<curve_node, curve_node> olr_children(const triangle_mesh& mesh,
    const dual_graph& graph, const curve_node& node);

inline std::pair<curve_node, curve_node> split_node(const triangle_mesh& mesh,
    const dual_graph& graph, spline_scheme scheme, const curve_node& node) {
  if (scheme == spline_scheme::olr) return olr_children(mesh, graph, node);
  auto mid           = (node.start + node.end) / 2;
  auto [left, right] = rdc_split(mesh, graph, node.polygon, 0.5);
  return {{node.level + 1, 2 * node.index, node.start, mid, std::move(left)},
      {node.level + 1, 2 * node.index + 1, mid, node.end, std::move(right)}};
}

namespace detail {

// Leaves of the subtree rooted at node, in curve order.
inline void collect_leaves(const triangle_mesh& mesh, const dual_graph& graph,
    spline_scheme scheme, const curve_node& node, const trace_mode& mode,
    vector<curve_node>& leaves) {
  if (is_leaf(mesh, graph, node, mode)) return leaves.push_back(node);
  auto [left, right] = split_node(mesh, graph, scheme, node);
  collect_leaves(mesh, graph, scheme, left, mode, leaves);
  collect_leaves(mesh, graph, scheme, right, mode, leaves);
}

// Builds the curve from the leaves. In adaptive mode the angles at all output
// nodes are checked, including nodes where leaves of different levels meet.
// The leaves owning a node over theta, or its neighbors, are split again
// until every angle passes or those leaves reach max_depth. emit(leaves,
// owner) returns the curve and the leaf that emitted each node.
template <typename Emit>
inline traced_curve trace_leaves(const triangle_mesh& mesh, const dual_graph& graph,
    spline_scheme scheme, const control_polygon& polygon, const trace_mode& mode,
    Emit&& emit) {
  auto leaves = vector<curve_node>{};
  collect_leaves(mesh, graph, scheme, curve_node{0, 0, 0, 1, polygon}, mode, leaves);
  while (true) {
    auto owner = vector<int>{};
    auto curve = emit(leaves, owner);
    if (mode.kind == trace_kind::uniform) return curve;
    auto split = vector<bool>(leaves.size(), false);
    auto again = false;
    for (auto i = 1; i < (int)curve.segments.size(); i++) {
      auto angle = node_angle(mesh, graph, curve.segments[i - 1], curve.segments[i]);
      if (rad2deg(angle) <= mode.theta) continue;
      for (auto j = i - 1; j <= i + 1; j++) {
        auto l = owner[j];
        if (split[l] || leaves[l].level >= mode.max_depth) continue;
        split[l] = true;
        again    = true;
      }
    }
    if (!again) return curve;
    auto next = vector<curve_node>{};
    for (auto l = 0; l < (int)leaves.size(); l++) {
      if (!split[l]) {
        next.push_back(std::move(leaves[l]));
        continue;
      }
      auto [left, right] = split_node(mesh, graph, scheme, leaves[l]);
      collect_leaves(mesh, graph, scheme, left, mode, next);
      collect_leaves(mesh, graph, scheme, right, mode, next);
    }
    leaves = std::move(next);
  }
}

}  // namespace detail

inline traced_curve rdc_trace(const triangle_mesh& mesh, const dual_graph& graph,
    const control_polygon& polygon, const trace_mode& mode) {
  auto k = degree(polygon);
  if (k < 1) throw invalid_argument_error("RDC needs degree >= 1");
  if (mode.kind == trace_kind::uniform && mode.depth < 0)
    throw invalid_argument_error("depth must be non-negative");
  auto emit = [&](const vector<curve_node>& leaves, vector<int>& owner) {
    auto curve   = traced_curve{};
    curve.scheme = spline_scheme::rdc;
    curve.degree = k;
    curve.mode   = mode;
    for (auto l = 0; l < (int)leaves.size(); l++) {
      auto& leaf  = leaves[l];
      auto  first = curve.nodes.empty() ? 0 : 1;
      for (auto i = first; i <= k; i++) {
        curve.nodes.push_back(leaf.polygon.points[i]);
        auto knots = vector<double>(k, leaf.start);
        for (auto j = 0; j < i; j++) knots[k - 1 - j] = leaf.end;
        curve.node_knots.push_back(knots);
        owner.push_back(l);
      }
      for (auto& segment : leaf.polygon.segments) curve.segments.push_back(segment);
      curve.leaves++;
      curve.max_level = std::max(curve.max_level, leaf.level);
    }
    return curve;
  };
  return detail::trace_leaves(mesh, graph, spline_scheme::rdc, polygon, mode, emit);
}

// Descends to the leaf containing t, keeping only the containing child.
// Siblings met on the way are recorded: the first one left of the path starts
// at 0 and the first one right of it ends at 1.
struct tree_descent {
  curve_node                leaf  = {};
  std::optional<curve_node> left  = {};
  std::optional<curve_node> right = {};
};

inline tree_descent descend(const triangle_mesh& mesh, const dual_graph& graph,
    spline_scheme scheme, const control_polygon& polygon, double t,
    const trace_mode& mode) {
  if (!(t >= 0 && t <= 1))
    throw invalid_argument_error("parameter must be in [0, 1]");
  auto result = tree_descent{};
  auto node   = curve_node{0, 0, 0, 1, polygon};
  while (!is_leaf(mesh, graph, node, mode)) {
    auto [left, right] = split_node(mesh, graph, scheme, node);
    if (t < left.end) {
      if (!result.right) result.right = right;
      node = std::move(left);
    } else {
      if (!result.left) result.left = left;
      node = std::move(right);
    }
  }
  result.leaf = std::move(node);
  return result;
}

inline mesh_point rdc_point_eval(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& polygon, double t,
    const trace_mode& mode) {
  auto leaf = descend(mesh, graph, spline_scheme::rdc, polygon, t, mode).leaf;
  auto u    = (t - leaf.start) / (leaf.end - leaf.start);
  return decasteljau_eval(mesh, graph, leaf.polygon, u);
}

// -----------------------------------------------------------------------------
// OPEN-UNIFORM LANE-RIESENFELD
// -----------------------------------------------------------------------------

namespace detail {

// Point i of level n+1 from the points of level n. P(x) returns the record
// id of level-n point x; avg(x, w) is the point at w on segment x.
inline int olr_rule(construction& c, int k, int n, int i,
    const std::function<int(int)>& P) {
  auto m   = 1 << n;
  auto avg = [&](int x, double w) { return average(c, P(x), P(x + 1), w); };
  if (k == 2) {
    if (i == 0) return P(0);
    if (i == 2 * m + 1) return P(m + 1);
    if (n == 0) return avg(i - 1, 0.5);
    if (i == 1) return avg(0, 0.5);
    if (i == 2 * m) return avg(m, 0.5);
    return avg(i / 2, i % 2 == 0 ? 0.25 : 0.75);
  }
  if (n == 0) {
    if (i == 0) return P(0);
    if (i == 4) return P(3);
    return avg(i - 1, 0.5);
  }
  if (n == 1) {
    switch (i) {
      case 0: return P(0);
      case 1: return avg(0, 0.5);
      case 2: return avg(1, 0.25);
      case 3: return average(c, avg(1, 10.0 / 13), P(3), 3.0 / 16);
      case 4: return avg(2, 0.75);
      case 5: return avg(3, 0.5);
      default: return P(4);
    }
  }
  if (i == 0) return P(0);
  if (i == 1) return avg(0, 0.5);
  if (i == 2) return avg(1, 0.25);
  if (i == 3) return average(c, avg(1, 11.0 / 14), P(3), 1.0 / 8);
  if (i == 2 * m + 2) return P(m + 2);
  if (i == 2 * m + 1) return avg(m + 1, 0.5);
  if (i == 2 * m) return avg(m, 0.75);
  if (i == 2 * m - 1) return average(c, avg(m, 3.0 / 14), P(m - 1), 1.0 / 8);
  // Interior: midpoint insertion followed by two smoothing passes.
  auto j = i / 2;
  if (i % 2 == 0) return avg(j, 0.5);
  return average(c, avg(j, 0.75), avg(j + 1, 0.25), 0.5);
}

inline void check_olr_degree(int k) {
  if (k != 2 && k != 3)
    throw invalid_argument_error("OLR supports degree 2 and 3 only");
}

}  // namespace detail

// Level n+1 control polygon from the full level-n polygon (2^n + k points).
inline control_polygon olr_subdivide(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& level, int k, int n) {
  detail::check_olr_degree(k);
  if ((int)level.points.size() != (1 << n) + k)
    throw invalid_argument_error("level size does not match 2^n + k");
  auto c   = detail::make_construction(mesh, graph);
  auto ids = detail::add_polygon(c, level);
  auto P   = [&](int x) { return ids.at(x); };
  auto out = vector<int>((2 << n) + k);
  for (auto i = 0; i < (int)out.size(); i++)
    out[i] = detail::olr_rule(c, k, n, i, P);
  return detail::extract_polygon(c, out);
}

// Full control polygon at level n.
inline control_polygon olr_level(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& polygon, int levels) {
  auto k     = degree(polygon);
  auto level = polygon;
  for (auto n = 0; n < levels; n++)
    level = olr_subdivide(mesh, graph, level, k, n);
  return level;
}

// Children of an expansion-tree node. The k+2 new points 2j..2j+k+1 depend
// only on the parent's points j..j+k.
inline std::pair<curve_node, curve_node> olr_children(const triangle_mesh& mesh,
    const dual_graph& graph, const curve_node& node) {
  auto k = degree(node.polygon);
  detail::check_olr_degree(k);
  auto c   = detail::make_construction(mesh, graph);
  auto ids = detail::add_polygon(c, node.polygon);
  auto j   = node.index;
  auto P   = [&](int x) {
    if (x < j || x > j + k)
      throw std::logic_error("OLR stencil outside the parent node");
    return ids[x - j];
  };
  auto fresh = vector<int>(k + 2);
  for (auto i = 0; i < k + 2; i++)
    fresh[i] = detail::olr_rule(c, k, node.level, 2 * j + i, P);
  auto mid   = (node.start + node.end) / 2;
  auto left  = vector<int>(fresh.begin(), fresh.begin() + k + 1);
  auto right = vector<int>(fresh.begin() + 1, fresh.end());
  return {{node.level + 1, 2 * j, node.start, mid, detail::extract_polygon(c, left)},
      {node.level + 1, 2 * j + 1, mid, node.end,
          detail::extract_polygon(c, right)}};
}

inline traced_curve olr_trace(const triangle_mesh& mesh, const dual_graph& graph,
    const control_polygon& polygon, const trace_mode& mode) {
  auto k = degree(polygon);
  detail::check_olr_degree(k);
  if (mode.kind == trace_kind::uniform) {
    if (mode.depth < 0) throw invalid_argument_error("levels must be non-negative");
    auto curve     = traced_curve{};
    curve.scheme   = spline_scheme::olr;
    curve.degree   = k;
    curve.mode     = mode;
    auto level     = olr_level(mesh, graph, polygon, mode.depth);
    curve.nodes    = level.points;
    curve.segments = level.segments;
    for (auto i = 0; i < (int)level.points.size(); i++)
      curve.node_knots.push_back(olr_point_knots(k, mode.depth, i));
    curve.leaves    = 1 << mode.depth;
    curve.max_level = mode.depth;
    return curve;
  }

  // Each leaf emits the points of its level whose Greville abscissa falls in
  // (start, end]; the first leaf also emits P_0.
  auto emit = [&](const vector<curve_node>& leaves, vector<int>& owner) {
    auto curve   = traced_curve{};
    curve.scheme = spline_scheme::olr;
    curve.degree = k;
    curve.mode   = mode;
    auto last_leaf = -1, last_index = -1;
    for (auto l = 0; l < (int)leaves.size(); l++) {
      auto& leaf = leaves[l];
      auto  n    = leaf.level;
      for (auto i = leaf.index; i <= leaf.index + k; i++) {
        auto g     = olr_greville(k, n, i);
        auto first = curve.nodes.empty() && i == 0;
        if (!first && !(g > leaf.start && g <= leaf.end)) continue;
        auto& p = leaf.polygon.points[i - leaf.index];
        if (!curve.nodes.empty()) {
          if (last_leaf == l && last_index == i - 1) {
            curve.segments.push_back(leaf.polygon.segments[i - 1 - leaf.index]);
          } else {
            curve.segments.push_back(shortest_path(mesh, graph, curve.nodes.back(), p));
          }
        }
        curve.nodes.push_back(p);
        curve.node_knots.push_back(olr_point_knots(k, n, i));
        owner.push_back(l);
        last_leaf  = l;
        last_index = i;
      }
      curve.leaves++;
      curve.max_level = std::max(curve.max_level, n);
    }
    return curve;
  };
  return detail::trace_leaves(mesh, graph, spline_scheme::olr, polygon, mode, emit);
}

// Manifold de Boor evaluation of one B-spline segment from its k+1 control
// points and 2k local knots u_1..u_2k, for t in [u_k, u_k+1].
inline mesh_point deboor_eval(const triangle_mesh& mesh, const dual_graph& graph,
    const control_polygon& points, const vector<double>& knots, double t) {
  auto k = degree(points);
  if ((int)knots.size() != 2 * k)
    throw invalid_argument_error("de Boor needs 2k local knots");
  auto c   = detail::make_construction(mesh, graph);
  auto ids = detail::add_polygon(c, points);
  return c.points[detail::deboor_blossom(c, ids, knots, vector<double>(k, t))];
}

inline mesh_point olr_point_eval(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& polygon, double t,
    const trace_mode& mode) {
  detail::check_olr_degree(degree(polygon));
  auto leaf = descend(mesh, graph, spline_scheme::olr, polygon, t, mode).leaf;
  auto k    = degree(polygon);
  return deboor_eval(mesh, graph, leaf.polygon,
      olr_segment_knots(k, leaf.level, leaf.index), t);
}

// -----------------------------------------------------------------------------
// B-SPLINE TO BEZIER
// -----------------------------------------------------------------------------

// Local knot patterns with dedicated cubic factorizations: uniform
// (-2,-1,0,1,2,3), open at the left (0,0,0,1,2,3) and its mirror
// (-2,-1,0,1,1,1), up to an affine change of parameter.
enum struct bspline_case { uniform, open_left, open_right, general };

inline vector<double> bspline_case_knots(bspline_case kind) {
  switch (kind) {
    case bspline_case::uniform: return {-2, -1, 0, 1, 2, 3};
    case bspline_case::open_left: return {0, 0, 0, 1, 2, 3};
    case bspline_case::open_right: return {-2, -1, 0, 1, 1, 1};
    default: throw invalid_argument_error("general case has no fixed knots");
  }
}

inline bspline_case classify_knots(const vector<double>& knots) {
  if (knots.size() != 6) return bspline_case::general;
  auto a = knots[2], h = knots[3] - knots[2];
  if (!(h > 0)) return bspline_case::general;
  auto matches = [&](bspline_case kind) {
    auto ref = bspline_case_knots(kind);
    for (auto x = 0; x < 6; x++)
      if (std::abs(knots[x] - (a + ref[x] * h)) > 1e-12 * std::max(1.0, h))
        return false;
    return true;
  };
  for (auto kind : {bspline_case::uniform, bspline_case::open_left,
           bspline_case::open_right})
    if (matches(kind)) return kind;
  return bspline_case::general;
}

namespace detail {

inline vector<int> bspline_to_bezier(
    construction& c, const vector<int>& ids, const vector<double>& knots) {
  auto k    = (int)ids.size() - 1;
  auto kind = k == 3 ? classify_knots(knots) : bspline_case::general;
  auto avg  = [&](int a, int b, double w) { return average(c, a, b, w); };
  if (kind == bspline_case::uniform) {
    auto a = avg(ids[0], ids[1], 2.0 / 3), b = avg(ids[1], ids[2], 1.0 / 3);
    auto d = avg(ids[1], ids[2], 2.0 / 3), e = avg(ids[2], ids[3], 1.0 / 3);
    return {avg(a, b, 0.5), b, d, avg(d, e, 0.5)};
  }
  if (kind == bspline_case::open_left) {
    auto mid = avg(ids[1], ids[2], 0.5);
    return {ids[0], ids[1], mid, avg(mid, avg(ids[2], ids[3], 1.0 / 3), 0.5)};
  }
  if (kind == bspline_case::open_right) {
    auto rev = vector<int>(ids.rbegin(), ids.rend());
    auto mid = avg(rev[1], rev[2], 0.5);
    return {avg(mid, avg(rev[2], rev[3], 1.0 / 3), 0.5), mid, rev[1], rev[0]};
  }
  // Polar form at (a..a b..b) through the de Boor triangle.
  auto a = knots[k - 1], b = knots[k];
  auto result = vector<int>(k + 1);
  for (auto r = 0; r <= k; r++) {
    auto args = vector<double>(k, a);
    for (auto x = k - r; x < k; x++) args[x] = b;
    result[r] = deboor_blossom(c, ids, knots, args);
  }
  return result;
}

}  // namespace detail

// Bezier control points of the curve piece over [u_k, u_k+1] of a B-spline
// segment with local knots u_1..u_2k.
inline control_polygon bspline_to_bezier(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& points,
    const vector<double>& knots) {
  auto k = degree(points);
  if ((int)knots.size() != 2 * k)
    throw invalid_argument_error("conversion needs 2k local knots");
  auto c   = detail::make_construction(mesh, graph);
  auto ids = detail::add_polygon(c, points);
  return detail::extract_polygon(c, detail::bspline_to_bezier(c, ids, knots));
}

inline control_polygon bspline_to_bezier(const triangle_mesh& mesh,
    const dual_graph& graph, const control_polygon& points, bspline_case kind) {
  if (degree(points) != 3)
    throw invalid_argument_error("the named conversion cases are cubic");
  return bspline_to_bezier(mesh, graph, points, bspline_case_knots(kind));
}

// -----------------------------------------------------------------------------
// POINT INSERTION
// -----------------------------------------------------------------------------

inline constexpr double extension_limit = 10;

namespace detail {

struct insertion_input {
  const control_polygon*   root     = nullptr;
  double                   t        = 0.5;
  control_polygon          leaf     = {};  // Bezier polygon of the leaf
  double                   start    = 0;
  double                   end      = 1;
  std::optional<curve_node> left    = {};  // Bezier sibling starting at 0
  std::optional<curve_node> right   = {};  // Bezier sibling ending at 1
  std::optional<mesh_point> junction = {};
};

inline mesh_point extend(const triangle_mesh& mesh, const mesh_point& from,
    vec2 dir, double len, double limit) {
  if (len > limit)
    throw extension_unstable_error("geodesic extension of length " +
                                   std::to_string(len) +
                                   " exceeds the polygon scale");
  if (len <= 0) return from;
  return straightest_geodesic(mesh, from, dir, len).end;
}

// Left polygon R_0..R_k of the insertion. The right one is obtained by
// calling this on mirrored input.
inline vector<mesh_point> insertion_side(const triangle_mesh& mesh,
    const control_polygon& root, double t, const vector<mesh_point>& pyramid_left,
    const std::optional<curve_node>& sibling, const mesh_point& junction,
    vec2 back, double back_len, double limit) {
  auto k      = degree(root);
  auto result = vector<mesh_point>(k + 1);
  result[0]   = root.points[0];
  result[k]   = junction;
  if (!sibling) {
    for (auto i = 1; i <= k - 2; i++) result[i] = pyramid_left[i];
  } else {
    // The sibling covers [0, t'] with t' < t.
    auto& s     = sibling->polygon;
    auto  tp    = sibling->end;
    result[1]   = point_at(mesh, root.segments[0], t);
    for (auto i = 1; i <= k - 3; i++) {
      auto& segment = s.segments[i];
      auto  delta   = (t - tp) / tp * segment.length;
      result[i + 1] = extend(
          mesh, segment.end, end_tangent(mesh, segment), delta, limit);
    }
  }
  result[k - 1] = extend(mesh, junction, back, back_len, limit);
  return result;
}

inline curve_node mirror_node(const curve_node& node) {
  return {node.level, node.index, 1 - node.end, 1 - node.start,
      reverse_polygon(node.polygon)};
}

inline std::pair<control_polygon, control_polygon> insert(
    const triangle_mesh& mesh, const dual_graph& graph,
    const insertion_input& input) {
  auto& root  = *input.root;
  auto  k     = degree(root);
  auto  t     = input.t;
  auto  limit = extension_limit * polygon_length(root);
  auto  left = vector<mesh_point>{}, right = vector<mesh_point>{};

  if (k == 2) {
    // Three averages on the root polygon.
    auto c   = make_construction(mesh, graph);
    auto ids = add_polygon(c, root);
    auto l1 = average(c, ids[0], ids[1], t), r1 = average(c, ids[1], ids[2], t);
    auto apex = input.junction ? add_point(c, *input.junction)
                               : average(c, l1, r1, t);
    left  = {c.points[ids[0]], c.points[l1], c.points[apex]};
    right = {c.points[apex], c.points[r1], c.points[ids[2]]};
  } else {
    auto c       = make_construction(mesh, graph);
    auto ids     = add_polygon(c, input.leaf);
    auto u       = (t - input.start) / (input.end - input.start);
    auto pyramid = decasteljau_pyramid(c, ids, u);
    auto apex    = c.points[pyramid[k][0]];
    auto last    = connect(c, pyramid[k - 1][0], pyramid[k - 1][1]);
    auto span    = c.paths[last].length / (input.end - input.start);
    auto junction = input.junction.value_or(apex);
    auto forward  = transport_between(mesh, graph, apex, junction,
        tangent_at(mesh, c.paths[last], u));
    auto pyramid_left = vector<mesh_point>(k + 1), pyramid_right = pyramid_left;
    for (auto r = 0; r <= k; r++) {
      pyramid_left[r]  = c.points[pyramid[r][0]];
      pyramid_right[r] = c.points[pyramid[k - r][r]];
    }
    left = insertion_side(mesh, root, t, pyramid_left, input.left, junction,
        -forward, t * span, limit);
    auto mirrored = std::optional<curve_node>{};
    if (input.right) mirrored = mirror_node(*input.right);
    right = insertion_side(mesh, reverse_polygon(root), 1 - t,
        {pyramid_right.rbegin(), pyramid_right.rend()}, mirrored, junction,
        forward, (1 - t) * span, limit);
    std::reverse(right.begin(), right.end());
  }
  return {make_polygon(mesh, graph, left), make_polygon(mesh, graph, right)};
}

}  // namespace detail

// Splits a Bezier polygon at t into two polygons of the same degree that
// join at the curve point P_t.
inline std::pair<control_polygon, control_polygon> rdc_insert(
    const triangle_mesh& mesh, const dual_graph& graph,
    const control_polygon& polygon, double t, const trace_mode& mode = {}) {
  auto k = degree(polygon);
  if (k < 2) throw invalid_argument_error("insertion needs degree >= 2");
  if (!(t > 0 && t < 1))
    throw invalid_argument_error("insertion parameter must be in (0, 1)");
  auto input = detail::insertion_input{};
  input.root = &polygon;
  input.t    = t;
  if (k > 2) {
    auto path   = descend(mesh, graph, spline_scheme::rdc, polygon, t, mode);
    input.leaf  = path.leaf.polygon;
    input.start = path.leaf.start;
    input.end   = path.leaf.end;
    input.left  = path.left;
    input.right = path.right;
  }
  return detail::insert(mesh, graph, input);
}

// OLR insertion: the leaf and the recorded siblings are converted to Bezier
// form, then the construction proceeds as for RDC. The junction is the de
// Boor value at t.
inline std::pair<control_polygon, control_polygon> olr_insert(
    const triangle_mesh& mesh, const dual_graph& graph,
    const control_polygon& polygon, double t, const trace_mode& mode = {}) {
  auto k = degree(polygon);
  detail::check_olr_degree(k);
  if (!(t > 0 && t < 1))
    throw invalid_argument_error("insertion parameter must be in (0, 1)");
  auto path      = descend(mesh, graph, spline_scheme::olr, polygon, t, mode);
  auto to_bezier = [&](curve_node node) {
    node.polygon = bspline_to_bezier(mesh, graph, node.polygon,
        olr_segment_knots(k, node.level, node.index));
    return node;
  };
  auto input     = detail::insertion_input{};
  input.root     = &polygon;
  input.t        = t;
  input.junction = deboor_eval(mesh, graph, path.leaf.polygon,
      olr_segment_knots(k, path.leaf.level, path.leaf.index), t);
  if (k > 2) {
    auto leaf   = to_bezier(path.leaf);
    input.leaf  = leaf.polygon;
    input.start = leaf.start;
    input.end   = leaf.end;
    if (path.left) input.left = to_bezier(*path.left);
    if (path.right) input.right = to_bezier(*path.right);
  }
  return detail::insert(mesh, graph, input);
}

// -----------------------------------------------------------------------------
// DISPATCH
// -----------------------------------------------------------------------------

inline traced_curve trace_curve(const triangle_mesh& mesh,
    const dual_graph& graph, spline_scheme scheme,
    const control_polygon& polygon, const trace_mode& mode) {
  if (scheme == spline_scheme::olr) return olr_trace(mesh, graph, polygon, mode);
  return rdc_trace(mesh, graph, polygon, mode);
}

inline mesh_point eval_curve(const triangle_mesh& mesh, const dual_graph& graph,
    spline_scheme scheme, const control_polygon& polygon, double t,
    const trace_mode& mode) {
  if (scheme == spline_scheme::olr)
    return olr_point_eval(mesh, graph, polygon, t, mode);
  return rdc_point_eval(mesh, graph, polygon, t, mode);
}

inline std::pair<control_polygon, control_polygon> insert_point(
    const triangle_mesh& mesh, const dual_graph& graph, spline_scheme scheme,
    const control_polygon& polygon, double t, const trace_mode& mode = {}) {
  if (scheme == spline_scheme::olr)
    return olr_insert(mesh, graph, polygon, t, mode);
  return rdc_insert(mesh, graph, polygon, t, mode);
}

inline string scheme_name(spline_scheme scheme) {
  return scheme == spline_scheme::olr ? "olr" : "rdc";
}

inline spline_scheme parse_scheme(const string& name) {
  if (name == "rdc") return spline_scheme::rdc;
  if (name == "olr") return spline_scheme::olr;
  throw invalid_argument_error("unknown scheme '" + name + "'");
}

}  // namespace bsurf

#endif
