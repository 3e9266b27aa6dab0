//
// Geodesic primitives on triangle meshes: locally shortest paths (graph strip,
// funnel, straightening), path queries, straightest geodesics and parallel
// transport.
//

#ifndef BSURF_GEODESICS_HPP
#define BSURF_GEODESICS_HPP

#include <deque>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "mesh.hpp"

namespace bsurf {

// -----------------------------------------------------------------------------
// PATH TYPES
// -----------------------------------------------------------------------------

// A surface polyline stored as the strip of faces it crosses. lerps[i] locates
// the crossing on the edge shared by strip[i] and strip[i+1], as a fraction
// from corner e to corner e+1 of strip[i], where e is the local index of that
// edge in strip[i].
struct geodesic_path {
  mesh_point     start  = {};
  mesh_point     end    = {};
  vector<int>    strip  = {};
  vector<double> lerps  = {};
  double         length = 0;
};

// A tangent vector expressed in the frame of the face containing its anchor.
struct tangent_vector {
  mesh_point at  = {};
  vec2       dir = {};
};

// -----------------------------------------------------------------------------
// POLYLINE QUERIES
// -----------------------------------------------------------------------------

// 3D points of the path: start, every edge crossing, end. Piece i lies in
// face strip[i].
inline vector<vec3> path_positions(
    const triangle_mesh& mesh, const geodesic_path& path) {
  auto points = vector<vec3>{};
  points.reserve(path.strip.size() + 1);
  points.push_back(embed(mesh, path.start));
  for (auto i = 0; i + 1 < (int)path.strip.size(); i++) {
    auto  f = path.strip[i];
    auto  e = find_adjacent_edge(mesh, f, path.strip[i + 1]);
    auto& t = mesh.triangles[f];
    points.push_back(lerp(mesh.positions[t[e]],
        mesh.positions[t[(e + 1) % 3]], path.lerps[i]));
  }
  points.push_back(embed(mesh, path.end));
  return points;
}

inline double polyline_length(const vector<vec3>& points) {
  auto len = 0.0;
  for (auto i = 1; i < (int)points.size(); i++)
    len += distance(points[i - 1], points[i]);
  return len;
}

inline double path_length(const triangle_mesh& mesh, const geodesic_path& path) {
  return polyline_length(path_positions(mesh, path));
}

// Barycentric location of polyline point i inside face strip[piece], where
// piece is i or i-1.
inline mesh_point polyline_point_in(const triangle_mesh& mesh,
    const geodesic_path& path, int i, int piece) {
  auto h = (int)path.strip.size() - 1;
  if (i == 0) return path.start;
  if (i == h + 1) return path.end;
  auto f = path.strip[piece];
  if (piece == i - 1) {
    auto e = find_adjacent_edge(mesh, f, path.strip[i]);
    return edge_point(f, e, path.lerps[i - 1]);
  } else {
    auto e = find_adjacent_edge(mesh, f, path.strip[i - 1]);
    return edge_point(f, e, 1 - path.lerps[i - 1]);
  }
}

namespace detail {

struct path_location {
  int    piece = 0;
  double t     = 0;
};

// Finds the polyline piece containing arc length s.
inline path_location locate(
    const vector<double>& cumulative, double s) {
  auto n  = (int)cumulative.size() - 1;
  auto it = std::lower_bound(cumulative.begin() + 1, cumulative.end(), s);
  auto i  = std::min((int)(it - cumulative.begin()) - 1, n - 1);
  i       = std::max(i, 0);
  auto d  = cumulative[i + 1] - cumulative[i];
  auto t  = d > 0 ? std::clamp((s - cumulative[i]) / d, 0.0, 1.0) : 0.0;
  return {i, t};
}

inline vector<double> cumulative_lengths(const vector<vec3>& points) {
  auto cumulative = vector<double>(points.size(), 0);
  for (auto i = 1; i < (int)points.size(); i++)
    cumulative[i] = cumulative[i - 1] + distance(points[i - 1], points[i]);
  return cumulative;
}

inline mesh_point point_in_piece(const triangle_mesh& mesh,
    const geodesic_path& path, const path_location& loc) {
  auto a = polyline_point_in(mesh, path, loc.piece, loc.piece);
  auto b = polyline_point_in(mesh, path, loc.piece + 1, loc.piece);
  if (loc.t == 0) return a;
  if (loc.t == 1) return b;
  return {a.face, a.bary * (1 - loc.t) + b.bary * loc.t};
}

}  // namespace detail

// Point at fraction w of the arc length of the path.
inline mesh_point point_at(
    const triangle_mesh& mesh, const geodesic_path& path, double w) {
  if (w <= 0) return path.start;
  if (w >= 1) return path.end;
  auto points     = path_positions(mesh, path);
  auto cumulative = detail::cumulative_lengths(points);
  auto loc        = detail::locate(cumulative, w * cumulative.back());
  return detail::point_in_piece(mesh, path, loc);
}

// Portion of the path between arc-length fractions w0 <= w1. The endpoints
// are bitwise equal to point_at(path, w0) and point_at(path, w1).
inline geodesic_path sub_path(const triangle_mesh& mesh,
    const geodesic_path& path, double w0, double w1) {
  auto points     = path_positions(mesh, path);
  auto cumulative = detail::cumulative_lengths(points);
  auto total      = cumulative.back();
  auto h          = (int)path.strip.size() - 1;
  auto where      = [&](double w) {
    if (w <= 0) return detail::path_location{0, 0};
    if (w >= 1) return detail::path_location{h, 1};
    return detail::locate(cumulative, w * total);
  };
  auto endpoint = [&](double w, const detail::path_location& loc) {
    if (w <= 0) return path.start;
    if (w >= 1) return path.end;
    return detail::point_in_piece(mesh, path, loc);
  };
  auto l0   = where(w0), l1 = where(w1);
  auto sub  = geodesic_path{};
  sub.start = endpoint(w0, l0);
  sub.end   = endpoint(w1, l1);
  sub.strip = {path.strip.begin() + l0.piece, path.strip.begin() + l1.piece + 1};
  sub.lerps = {path.lerps.begin() + l0.piece, path.lerps.begin() + l1.piece};
  auto a    = lerp(points[l0.piece], points[l0.piece + 1], l0.t);
  auto b    = lerp(points[l1.piece], points[l1.piece + 1], l1.t);
  if (l0.piece == l1.piece) {
    sub.length = distance(a, b);
  } else {
    sub.length = distance(a, points[l0.piece + 1]) +
                 (cumulative[l1.piece] - cumulative[l0.piece + 1]) +
                 distance(points[l1.piece], b);
  }
  return sub;
}

inline geodesic_path reverse_path(const geodesic_path& path) {
  auto rev   = geodesic_path{};
  rev.start  = path.end;
  rev.end    = path.start;
  rev.strip  = {path.strip.rbegin(), path.strip.rend()};
  rev.lerps  = {path.lerps.rbegin(), path.lerps.rend()};
  for (auto& l : rev.lerps) l = 1 - l;
  rev.length = path.length;
  return rev;
}

// -----------------------------------------------------------------------------
// UNFOLDING
// -----------------------------------------------------------------------------

// Corner positions of face g when its edge ge is placed at a (corner ge) and
// b (corner ge+1). The third corner lands on the left of a->b.
inline array<vec2, 3> unfold_face(
    const triangle_mesh& mesh, int g, int ge, vec2 a, vec2 b) {
  auto& t   = mesh.triangles[g];
  auto  pc  = mesh.positions[t[(ge + 2) % 3]];
  auto  la  = distance(mesh.positions[t[ge]], pc);
  auto  lb  = distance(mesh.positions[t[(ge + 1) % 3]], pc);
  auto  ab  = distance(a, b);
  auto  u   = ab > 0 ? (b - a) / ab : vec2{1, 0};
  auto  d   = ab > 0 ? (la * la - lb * lb + ab * ab) / (2 * ab) : 0.0;
  auto  h   = std::sqrt(std::max(la * la - d * d, 0.0));
  auto  res = array<vec2, 3>{};
  res[ge]           = a;
  res[(ge + 1) % 3] = b;
  res[(ge + 2) % 3] = a + u * d + perp(u) * h;
  return res;
}

// Unfolds consecutive strip faces into the plane of the first face's frame.
inline vector<array<vec2, 3>> unfold_strip(
    const triangle_mesh& mesh, const vector<int>& strip) {
  auto coords = vector<array<vec2, 3>>{};
  coords.reserve(strip.size());
  coords.push_back(face_coords(mesh, strip[0]));
  for (auto i = 1; i < (int)strip.size(); i++) {
    auto f  = strip[i - 1], g = strip[i];
    auto fe = find_adjacent_edge(mesh, f, g);
    auto ge = find_adjacent_edge(mesh, g, f);
    if (fe < 0 || ge < 0)
      throw degenerate_strip_error("strip faces are not adjacent");
    auto& c = coords.back();
    coords.push_back(unfold_face(mesh, g, ge, c[(fe + 1) % 3], c[fe]));
  }
  return coords;
}

// -----------------------------------------------------------------------------
// FUNNEL
// -----------------------------------------------------------------------------

// A vertex where the funnel collapsed and the path bends.
struct pseudo_source {
  int    vertex = -1;
  int    portal = -1;  // index into the strip edges
  double turn   = 0;   // absolute turning angle in radians
};

namespace detail {

struct funnel_result {
  geodesic_path         path    = {};
  vector<pseudo_source> sources = {};
};

struct portal {
  vec2 left   = {};
  vec2 right  = {};
  int  lid    = -1;
  int  rid    = -1;
};

inline funnel_result funnel(const triangle_mesh& mesh, const vector<int>& strip,
    const mesh_point& p, const mesh_point& q) {
  auto result        = funnel_result{};
  result.path.start  = p;
  result.path.end    = q;
  result.path.strip  = strip;
  auto h             = (int)strip.size() - 1;
  if (h == 0) {
    result.path.length = distance(embed(mesh, p), embed(mesh, q));
    return result;
  }
  auto coords = unfold_strip(mesh, strip);
  auto start  = interpolate(coords.front(), p);
  auto end    = interpolate(coords.back(), q);

  auto portals = vector<portal>(h + 2);
  portals[0]   = {start, start, -1, -1};
  for (auto i = 0; i < h; i++) {
    auto  e = find_adjacent_edge(mesh, strip[i], strip[i + 1]);
    auto& t = mesh.triangles[strip[i]];
    portals[i + 1] = {
        coords[i][(e + 1) % 3], coords[i][e], t[(e + 1) % 3], t[e]};
  }
  portals[h + 1] = {end, end, -2, -2};

  // Simple stupid funnel algorithm over the unfolded portals.
  struct corner {
    vec2 pos;
    int  vertex;
    int  index;
  };
  auto corners = vector<corner>{{start, -1, 0}};
  auto apex = start, left = start, right = start;
  auto apex_index = 0, left_index = 0, right_index = 0;
  auto left_id = -1, right_id = -1;
  // Whether v lies past the boundary ray b on the given side (+1 left of b,
  // -1 right of b). Collinear points count only on the ray itself, which
  // keeps half-plane funnels from collapsing when a portal starts at the apex.
  auto beyond = [](vec2 b, vec2 v, int side) {
    auto c = cross(b, v) * side;
    return c > 0 || (c == 0 && dot(b, v) > 0);
  };
  auto add_corner = [&](vec2 pos, int id, int index) {
    if (id >= 0 && corners.back().vertex == id) return;
    corners.push_back({pos, id, index});
  };
  for (auto i = 1; i < (int)portals.size(); i++) {
    auto& pl = portals[i];
    if (cross(right - apex, pl.right - apex) >= 0) {
      if (apex == right || apex == left ||
          !beyond(left - apex, pl.right - apex, 1)) {
        right       = pl.right;
        right_id    = pl.rid;
        right_index = i;
      } else {
        add_corner(left, left_id, left_index);
        apex = right = left;
        apex_index = right_index = left_index;
        right_id   = left_id;
        i          = apex_index;
        continue;
      }
    }
    if (cross(left - apex, pl.left - apex) <= 0) {
      if (apex == left || apex == right ||
          !beyond(right - apex, pl.left - apex, -1)) {
        left       = pl.left;
        left_id    = pl.lid;
        left_index = i;
      } else {
        add_corner(right, right_id, right_index);
        apex = left = right;
        apex_index = left_index = right_index;
        left_id    = right_id;
        i          = apex_index;
        continue;
      }
    }
  }
  corners.push_back({end, -2, h + 1});

  // Edge intercepts of the straight pieces.
  result.path.lerps.resize(h);
  auto seg = 0;
  for (auto i = 1; i <= h; i++) {
    while (seg + 2 < (int)corners.size() && corners[seg + 1].index < i) seg++;
    auto& pl = portals[i];
    auto  a = corners[seg].pos, b = corners[seg + 1].pos;
    auto  l = 0.0;
    auto on_vertex = [&](const corner& c) {
      if (c.vertex < 0) return false;
      if (c.vertex == pl.rid) return (l = 0.0), true;
      if (c.vertex == pl.lid) return (l = 1.0), true;
      return false;
    };
    if (!on_vertex(corners[seg]) && !on_vertex(corners[seg + 1])) {
      auto dir   = b - a;
      auto edge  = pl.left - pl.right;
      auto denom = cross(dir, edge);
      if (denom != 0) {
        l = cross(dir, a - pl.right) / denom;
      } else {
        auto e2 = dot(edge, edge);
        l       = e2 > 0 ? dot(a - pl.right, edge) / e2 : 0.5;
      }
      l = std::clamp(l, 0.0, 1.0);
    }
    result.path.lerps[i - 1] = l;
  }

  for (auto c = 1; c + 1 < (int)corners.size(); c++) {
    auto in   = corners[c].pos - corners[c - 1].pos;
    auto out  = corners[c + 1].pos - corners[c].pos;
    auto turn = angle_between(in, out);
    result.sources.push_back({corners[c].vertex, corners[c].index - 1, turn});
  }
  result.path.length = path_length(mesh, result.path);
  return result;
}

// Removes closed loops so that each face appears once.
inline vector<int> remove_loops(const vector<int>& strip) {
  auto out = vector<int>{};
  auto pos = std::unordered_map<int, int>{};
  for (auto f : strip) {
    auto it = pos.find(f);
    if (it != pos.end()) {
      while ((int)out.size() > it->second + 1) {
        pos.erase(out.back());
        out.pop_back();
      }
    } else {
      pos[f] = (int)out.size();
      out.push_back(f);
    }
  }
  return out;
}

// Strip faces [a, b] all contain v. Returns the faces strictly between a and
// b going around v on the other side, or false if the fan is inconsistent.
inline bool other_semi_star(const triangle_mesh& mesh, const vector<int>& strip,
    int a, int b, int v, vector<int>& between) {
  auto fan = vertex_fan(mesh, strip[a], v);
  auto n   = (int)fan.size();
  if (n < 3) return false;
  auto ccw  = strip[a + 1] == fan[1];
  between.clear();
  for (auto k = 1; k < n; k++) {
    auto f = ccw ? fan[n - k] : fan[k];
    if (f == strip[b]) return true;
    between.push_back(f);
  }
  return false;
}

}  // namespace detail

inline constexpr double turn_epsilon = 1e-10;

// Shortest path constrained to the given strip.
inline geodesic_path funnel_shortest(const triangle_mesh& mesh,
    const vector<int>& strip, const mesh_point& p, const mesh_point& q) {
  return detail::funnel(mesh, strip, p, q).path;
}

// Pseudo-sources of the funnel path through the given strip.
inline vector<pseudo_source> funnel_sources(const triangle_mesh& mesh,
    const vector<int>& strip, const mesh_point& p, const mesh_point& q) {
  return detail::funnel(mesh, strip, p, q).sources;
}

struct straighten_stats {
  int iterations = 0;
  int accepted   = 0;
  int frozen     = 0;
};

namespace detail {

// A planned reroute: strip faces (a, b) are replaced by the other side of the
// star of v.
struct strip_swap {
  int         vertex = -1;
  int         a      = 0;
  int         b      = 0;
  vector<int> between = {};
};

inline bool plan_swap(const triangle_mesh& mesh, const vector<int>& strip,
    const pseudo_source& source, strip_swap& swap) {
  auto v       = source.vertex;
  auto h       = (int)strip.size() - 1;
  auto touches = [&](int i) {
    auto& t = mesh.triangles[strip[i]];
    auto  e = find_adjacent_edge(mesh, strip[i], strip[i + 1]);
    return t[e] == v || t[(e + 1) % 3] == v;
  };
  auto pa = source.portal, pb = pa;
  while (pa > 0 && touches(pa - 1)) pa--;
  while (pb + 1 < h && touches(pb + 1)) pb++;
  swap.vertex = v;
  swap.a      = pa;
  swap.b      = pb + 1;
  return other_semi_star(mesh, strip, pa, pb + 1, v, swap.between);
}

// Applies swaps sorted by position with disjoint ranges.
inline vector<int> apply_swaps(
    const vector<int>& strip, const vector<strip_swap>& swaps) {
  auto next = vector<int>{};
  auto done = 0;
  for (auto& swap : swaps) {
    next.insert(next.end(), strip.begin() + done, strip.begin() + swap.a + 1);
    next.insert(next.end(), swap.between.begin(), swap.between.end());
    done = swap.b;
  }
  next.insert(next.end(), strip.begin() + done, strip.end());
  return remove_loops(next);
}

}  // namespace detail

// Repeatedly reroutes the strip around the vertices where the path bends,
// keeping a new route only if it is shorter. Each iteration first tries all
// bending vertices with disjoint strip ranges at once, taken by decreasing
// turn, and falls back to the single vertex with the largest turn.
inline geodesic_path straighten_strip(const triangle_mesh& mesh,
    const vector<int>& strip, const mesh_point& p, const mesh_point& q,
    straighten_stats* stats = nullptr) {
  auto current = detail::funnel(mesh, strip, p, q);
  auto frozen  = std::unordered_set<int>{};
  auto cap     = 100 * std::max((int)strip.size(), 1);
  auto local   = straighten_stats{};
  auto freeze  = [&](int v) {
    if (frozen.insert(v).second) local.frozen++;
  };
  auto persists = [&](const detail::funnel_result& result, int v) {
    for (auto& s : result.sources)
      if (s.vertex == v && s.turn > turn_epsilon) return true;
    return false;
  };
  while (true) {
    auto order = vector<int>{};
    for (auto i = 0; i < (int)current.sources.size(); i++) {
      auto& s = current.sources[i];
      if (s.vertex < 0 || s.turn <= turn_epsilon || frozen.count(s.vertex))
        continue;
      order.push_back(i);
    }
    if (order.empty()) break;
    if (++local.iterations > cap)
      throw iteration_cap_error("straightening exceeded its iteration cap");
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return current.sources[a].turn > current.sources[b].turn;
    });
    auto& cstrip = current.path.strip;

    // Largest turn first; a vertex whose star cannot be swapped is frozen.
    auto best = detail::strip_swap{};
    if (!detail::plan_swap(mesh, cstrip, current.sources[order[0]], best)) {
      freeze(best.vertex);
      continue;
    }

    // Batch of independent swaps.
    auto batch = vector<detail::strip_swap>{best};
    for (auto idx = 1; idx < (int)order.size(); idx++) {
      auto swap = detail::strip_swap{};
      if (!detail::plan_swap(mesh, cstrip, current.sources[order[idx]], swap))
        continue;
      auto overlaps = false;
      for (auto& other : batch)
        if (swap.vertex == other.vertex ||
            (swap.a <= other.b + 1 && other.a <= swap.b + 1))
          overlaps = true;
      if (!overlaps) batch.push_back(std::move(swap));
    }
    if (batch.size() > 1) {
      std::sort(batch.begin(), batch.end(),
          [](auto& x, auto& y) { return x.a < y.a; });
      auto candidate = detail::funnel(
          mesh, detail::apply_swaps(cstrip, batch), p, q);
      if (candidate.path.length < current.path.length) {
        current = std::move(candidate);
        local.accepted++;
        continue;
      }
    }

    auto candidate = detail::funnel(mesh, detail::apply_swaps(cstrip, {best}), p, q);
    if (candidate.path.length < current.path.length) {
      current = std::move(candidate);
      local.accepted++;
      if (persists(current, best.vertex)) freeze(best.vertex);
    } else {
      freeze(best.vertex);
    }
  }
  if (stats) *stats = local;
  return current.path;
}

inline geodesic_path straighten(const triangle_mesh& mesh,
    const geodesic_path& path, straighten_stats* stats = nullptr) {
  return straighten_strip(mesh, path.strip, path.start, path.end, stats);
}

// -----------------------------------------------------------------------------
// INITIAL STRIP
// -----------------------------------------------------------------------------

// Label-correcting search on the dual graph with a double-ended queue
// (small-label-first insertion, large-label-last extraction). Node weights add
// the straight-line distance to the target, and an upper bound from the best
// target label prunes the search, so the result is a shortest graph route.
inline vector<int> initial_strip(const triangle_mesh& mesh,
    const dual_graph& graph, const mesh_point& p, const mesh_point& q) {
  check_face(mesh, p.face);
  check_face(mesh, q.face);
  if (p.face == q.face) return {p.face};
  auto source = embed(mesh, p), target = embed(mesh, q);

  struct label {
    double dist     = 0;
    double weight   = 0;
    int    pred     = -1;
    bool   in_queue = false;
  };
  auto labels = std::unordered_map<int, label>{};
  labels.reserve(1024);
  auto queue        = std::deque<int>{};
  auto queue_weight = 0.0;
  auto best_total   = std::numeric_limits<double>::infinity();
  auto best_node    = -1;

  auto push = [&](int n, label& l) {
    l.in_queue = true;
    queue_weight += l.weight;
    if (!queue.empty() && l.weight < labels[queue.front()].weight)
      queue.push_front(n);
    else
      queue.push_back(n);
  };
  for (auto n = graph.face_offsets[p.face]; n < graph.face_offsets[p.face + 1];
       n++) {
    auto& l  = labels[n];
    l.dist   = distance(source, graph.nodes[n]);
    l.weight = l.dist + distance(graph.nodes[n], target);
    push(n, l);
  }
  while (!queue.empty()) {
    // Large label last: rotate heavy nodes to the back.
    auto average = queue_weight / (double)queue.size();
    for (auto r = (int)queue.size(); r > 1; r--) {
      if (labels[queue.front()].weight <= average) break;
      queue.push_back(queue.front());
      queue.pop_front();
    }
    auto n = queue.front();
    queue.pop_front();
    auto& ln = labels[n];
    ln.in_queue = false;
    queue_weight -= ln.weight;
    if (queue.empty()) queue_weight = 0;
    if (ln.weight >= best_total) continue;
    if (graph.node_face[n] == q.face) {
      auto total = ln.dist + distance(graph.nodes[n], target);
      if (total < best_total || (total == best_total && n < best_node)) {
        best_total = total;
        best_node  = n;
      }
    }
    auto dist = ln.dist;
    for (auto a = graph.arc_offsets[n]; a < graph.arc_offsets[n + 1]; a++) {
      auto m      = graph.arc_targets[a];
      auto nd     = dist + graph.arc_lengths[a];
      auto weight = nd + distance(graph.nodes[m], target);
      if (weight >= best_total) continue;
      auto [it, inserted] = labels.try_emplace(m);
      auto& lm            = it->second;
      if (!inserted) {
        if (nd > lm.dist) continue;
        if (nd == lm.dist) {
          if (n < lm.pred) lm.pred = n;
          continue;
        }
      }
      if (lm.in_queue) queue_weight -= lm.weight;
      lm.dist   = nd;
      lm.weight = weight;
      lm.pred   = n;
      if (lm.in_queue) queue_weight += lm.weight;
      else push(m, lm);
    }
  }
  if (best_node < 0)
    throw unreachable_error("no route between the two mesh points");

  auto strip = vector<int>{};
  for (auto n = best_node; n >= 0; n = labels[n].pred) {
    auto f = graph.node_face[n];
    if (strip.empty() || strip.back() != f) strip.push_back(f);
  }
  std::reverse(strip.begin(), strip.end());
  return detail::remove_loops(strip);
}

// -----------------------------------------------------------------------------
// SHORTEST PATHS
// -----------------------------------------------------------------------------

namespace detail {

// Corner of the face at which p sits, or -1.
inline int vertex_corner(const mesh_point& p) {
  auto w = weights(p);
  for (auto c = 0; c < 3; c++)
    if (w[c] >= 1 - bary_epsilon) return c;
  return -1;
}

// Path between two points in general position or with the start or end on
// a vertex or an edge given in the face that the path actually leaves or
// enters.
inline geodesic_path shortest_path_faces(const triangle_mesh& mesh,
    const dual_graph& graph, const mesh_point& a, const mesh_point& b,
    straighten_stats* stats) {
  if (a.face == b.face) {
    if (stats) *stats = {};
    return {a, b, {a.face}, {}, distance(embed(mesh, a), embed(mesh, b))};
  }
  return straighten_strip(mesh, initial_strip(mesh, graph, a, b), a, b, stats);
}

// Edge of the face on which p sits away from the corners, or -1.
inline int edge_side(const mesh_point& p) {
  if (vertex_corner(p) >= 0) return -1;
  auto w = weights(p);
  for (auto e = 0; e < 3; e++)
    if (w[(e + 2) % 3] < bary_epsilon) return e;
  return -1;
}

// The same point seen from every face that contains it: the fan of a
// vertex counter-clockwise from the face of p, both faces of an edge, or p.
inline vector<mesh_point> point_views(const triangle_mesh& mesh, const mesh_point& p) {
  auto c = vertex_corner(p);
  if (c >= 0) {
    auto v     = mesh.triangles[p.face][c];
    auto views = vector<mesh_point>{};
    for (auto f : vertex_fan(mesh, p.face, v))
      views.push_back(corner_point(f, find_corner(mesh, f, v)));
    return views;
  }
  auto e = edge_side(p);
  if (e < 0) return {p};
  auto g = mesh.adjacencies[p.face][e];
  auto w = weights(p);
  return {p, edge_point(g, find_adjacent_edge(mesh, g, p.face), w[e])};
}

// Moves from face f to the next face g that also holds p, crossing their
// shared edge at p itself.
inline void step_around(const triangle_mesh& mesh, const mesh_point& p,
    vector<int>& strip, vector<double>& lerps, int g) {
  auto f = strip.back();
  auto e = find_adjacent_edge(mesh, f, g);
  auto c = vertex_corner(p);
  if (c >= 0) {
    auto v = mesh.triangles[p.face][c];
    lerps.push_back(mesh.triangles[f][e] == v ? 0.0 : 1.0);
  } else {
    lerps.push_back(weights(p)[(e + 1) % 3]);
  }
  strip.push_back(g);
}

// Faces from the face of p to the view face `to`, all holding p.
inline vector<int> views_between(const triangle_mesh& mesh, const mesh_point& p, int to) {
  auto faces = vector<int>{};
  for (auto& s : point_views(mesh, p)) {
    faces.push_back(s.face);
    if (s.face == to) break;
  }
  return faces;
}

}  // namespace detail

// Shortest path between two mesh points. A path from a point on a vertex or
// an edge may leave through any face that holds it: every such face is tried
// and the strip is joined to the given face by crossing edges at the point
// itself, so the path starts and ends in the faces of p and q.
inline geodesic_path shortest_path(const triangle_mesh& mesh,
    const dual_graph& graph, const mesh_point& p, const mesh_point& q,
    straighten_stats* stats = nullptr) {
  auto a = checked_point(mesh, p), b = checked_point(mesh, q);
  auto views_a = detail::point_views(mesh, a), views_b = detail::point_views(mesh, b);
  if (views_a.size() == 1 && views_b.size() == 1)
    return detail::shortest_path_faces(mesh, graph, a, b, stats);

  // Pick the leaving face first, then the entering face.
  auto best  = geodesic_path{};
  auto found = false;
  auto from = a, to = b;
  for (auto& s : views_a) {
    auto path = detail::shortest_path_faces(mesh, graph, s, b, stats);
    if (!found || path.length < best.length) {
      best  = std::move(path);
      from  = s;
      found = true;
    }
  }
  for (auto& e : views_b) {
    if (e == b) continue;
    auto path = detail::shortest_path_faces(mesh, graph, from, e, stats);
    if (path.length < best.length) {
      best = std::move(path);
      to   = e;
    }
  }

  // Join the chosen faces to the faces of p and q.
  auto strip = vector<int>{a.face};
  auto lerps = vector<double>{};
  auto head  = detail::views_between(mesh, a, from.face);
  for (auto i = 1; i < (int)head.size(); i++)
    detail::step_around(mesh, a, strip, lerps, head[i]);
  for (auto i = 0; i < (int)best.strip.size(); i++) {
    if (i > 0) lerps.push_back(best.lerps[i - 1]);
    if (i > 0 || strip.back() != best.strip[0]) strip.push_back(best.strip[i]);
  }
  auto tail = detail::views_between(mesh, b, to.face);
  for (auto i = (int)tail.size() - 2; i >= 0; i--) {
    auto& at = *std::find_if(views_b.begin(), views_b.end(),
        [&](const mesh_point& s) { return s.face == strip.back(); });
    detail::step_around(mesh, at, strip, lerps, tail[i]);
  }
  best.start = a;
  best.end   = b;
  best.strip = std::move(strip);
  best.lerps = std::move(lerps);
  return best;
}

// Shortest path from p to q that is never longer than the given chain of
// paths joining p to q. If the graph-seeded path is longer than the chain,
// the chain's own strip is straightened instead and the shorter result kept.
inline geodesic_path shortest_path_bounded(const triangle_mesh& mesh,
    const dual_graph& graph, const mesh_point& p, const mesh_point& q,
    const vector<geodesic_path>& chain) {
  auto path = shortest_path(mesh, graph, p, q);
  if (chain.empty()) return path;
  auto bound = 0.0;
  for (auto& piece : chain) bound += piece.length;
  if (path.length <= bound) return path;
  if (chain.front().strip.front() != p.face || chain.back().strip.back() != q.face)
    return path;
  auto strip = vector<int>{};
  for (auto& piece : chain) {
    for (auto f : piece.strip) {
      if (!strip.empty() && strip.back() == f) continue;
      if (!strip.empty() && find_adjacent_edge(mesh, strip.back(), f) < 0)
        return path;
      strip.push_back(f);
    }
  }
  auto hinted = straighten_strip(mesh, strip, p, q);
  return hinted.length < path.length ? hinted : path;
}

inline mesh_point manifold_average(const triangle_mesh& mesh,
    const dual_graph& graph, const mesh_point& p, const mesh_point& q,
    double w) {
  if (w <= 0) return p;
  if (w >= 1) return q;
  return point_at(mesh, shortest_path(mesh, graph, p, q), w);
}

// -----------------------------------------------------------------------------
// TANGENTS
// -----------------------------------------------------------------------------

// Unit direction of the path at its start, in the start face frame. Follows
// the first straight piece as far as the first vertex the path touches, which
// keeps the direction well conditioned for paths starting near an edge.
inline vec2 start_tangent(const triangle_mesh& mesh, const geodesic_path& path) {
  auto coords = face_coords(mesh, path.strip[0]);
  auto start  = interpolate(coords, path.start);
  auto best   = vec2{};
  // Offsets below round-off of the coordinates carry no direction.
  auto tiny = std::pow(1e-12 * mesh.bbox_diag, 2);
  for (auto i = 0; i + 1 < (int)path.strip.size(); i++) {
    auto f = path.strip[i], g = path.strip[i + 1];
    auto fe = find_adjacent_edge(mesh, f, g);
    auto l  = path.lerps[i];
    auto x  = lerp(coords[fe], coords[(fe + 1) % 3], l);
    if (length_squared(x - start) > tiny) best = x - start;
    if ((l == 0 || l == 1) && length_squared(best) > tiny) return normalize(best);
    auto ge = find_adjacent_edge(mesh, g, f);
    coords  = unfold_face(mesh, g, ge, coords[(fe + 1) % 3], coords[fe]);
  }
  auto end = interpolate(coords, path.end);
  if (length_squared(end - start) > 0) best = end - start;
  return normalize(best);
}

// Unit direction of travel at the end of the path, in the end face frame.
inline vec2 end_tangent(const triangle_mesh& mesh, const geodesic_path& path) {
  return -start_tangent(mesh, reverse_path(path));
}

// Direction of travel at fraction w, in the frame of point_at(path, w).
inline vec2 tangent_at(
    const triangle_mesh& mesh, const geodesic_path& path, double w) {
  if (w >= 1) return end_tangent(mesh, path);
  return start_tangent(mesh, sub_path(mesh, path, w, 1));
}

// -----------------------------------------------------------------------------
// STRAIGHTEST GEODESICS
// -----------------------------------------------------------------------------

inline constexpr double vertex_hit_epsilon = 1e-10;

// Traces a straight line of length len from a point along a direction given
// in the start face frame. At vertices the trace continues along the
// direction that splits the total angle around the vertex in two halves.
inline geodesic_path straightest_geodesic(const triangle_mesh& mesh,
    const mesh_point& from, vec2 dir, double len) {
  auto path  = geodesic_path{};
  path.start = checked_point(mesh, from);
  path.strip = {path.start.face};
  path.end   = path.start;
  if (!(len > 0) || length_squared(dir) == 0) return path;

  auto f         = path.start.face;
  auto coords    = face_coords(mesh, f);
  auto pos       = interpolate(coords, path.start);
  auto d         = normalize(dir);
  auto remaining = len;
  auto entry     = -1;  // edge we entered through
  auto at_corner = -1;  // corner we left from after a vertex event
  auto max_steps = 16 * (int64_t)mesh.triangles.size() + 1024;

  // Leaves vertex corner c of the current face at angle `budget`, measured
  // counter-clockwise from the spoke to corner c+1 and walking the fan.
  auto leave_vertex = [&](int c, double budget) {
    auto  v    = mesh.triangles[f][c];
    auto  fan  = vertex_fan(mesh, f, v);
    auto  k    = 0;
    auto  cg   = c;
    auto& pos3 = mesh.positions;
    while (true) {
      auto& t  = mesh.triangles[fan[k]];
      cg       = find_corner(mesh, fan[k], v);
      auto ang = corner_angle(
          pos3[t[cg]], pos3[t[(cg + 1) % 3]], pos3[t[(cg + 2) % 3]]);
      if (budget <= ang || k + 1 == (int)fan.size()) {
        budget = std::clamp(budget, ang * 1e-9, ang * (1 - 1e-9));
        break;
      }
      budget -= ang;
      k++;
    }
    // The shared edge of consecutive fan faces runs into the vertex, so the
    // crossing sits at its far end.
    for (auto i = 0; i < k; i++) {
      path.lerps.push_back(1);
      path.strip.push_back(fan[i + 1]);
    }
    f         = fan[k];
    coords    = face_coords(mesh, f);
    pos       = coords[cg];
    d         = rotate(normalize(coords[(cg + 1) % 3] - pos), budget);
    entry     = -1;
    at_corner = cg;
  };

  // Starting on a vertex, the direction may point into another face of its
  // fan.
  auto w0 = weights(path.start);
  for (auto c = 0; c < 3; c++) {
    if (w0[c] < 1 - bary_epsilon) continue;
    auto v     = mesh.triangles[f][c];
    auto spoke = coords[(c + 1) % 3] - coords[c];
    auto phi   = std::atan2(cross(spoke, d), dot(spoke, d));
    if (phi < 0) phi += mesh.total_angle[v];
    leave_vertex(c, phi);
    break;
  }
  for (auto step = (int64_t)0;; step++) {
    if (step > max_steps)
      throw iteration_cap_error("straightest geodesic trace did not terminate");
    auto best_s = std::numeric_limits<double>::infinity();
    auto best_e = -1;
    for (auto e = 0; e < 3; e++) {
      if (e == entry) continue;
      if (at_corner >= 0 && (e == at_corner || e == (at_corner + 2) % 3))
        continue;
      auto a = coords[e], b = coords[(e + 1) % 3];
      auto ab = b - a;
      if (cross(ab, d) >= 0) continue;  // not leaving through this edge
      auto s = std::max(cross(a - pos, ab) / cross(d, ab), 0.0);
      if (s < best_s) {
        best_s = s;
        best_e = e;
      }
    }
    if (best_e < 0 || remaining <= best_s) {
      if (best_e >= 0) pos = pos + d * remaining;
      auto bary = barycentric(pos, coords);
      auto w = array<double, 3>{std::max(bary.x, 0.0), std::max(bary.y, 0.0),
          std::max(1 - bary.x - bary.y, 0.0)};
      auto s = w[0] + w[1] + w[2];
      path.end = {f, {w[0] / s, w[1] / s}};
      break;
    }
    auto a = coords[best_e], b = coords[(best_e + 1) % 3];
    auto hit = pos + d * best_s;
    auto u   = std::clamp(dot(hit - a, b - a) / length_squared(b - a), 0.0, 1.0);
    remaining -= best_s;
    if (u > vertex_hit_epsilon && u < 1 - vertex_hit_epsilon) {
      auto g  = mesh.adjacencies[f][best_e];
      auto ge = find_adjacent_edge(mesh, g, f);
      path.lerps.push_back(u);
      path.strip.push_back(g);
      coords    = unfold_face(mesh, g, ge, b, a);
      pos       = lerp(a, b, u);
      f         = g;
      entry     = ge;
      at_corner = -1;
      continue;
    }

    // Vertex event: rotate counter-clockwise from the backward direction by
    // half of the total angle.
    auto c      = u <= vertex_hit_epsilon ? best_e : (best_e + 1) % 3;
    auto v      = mesh.triangles[f][c];
    auto spoke  = coords[(c + 1) % 3] - coords[c];
    auto corner = angle_between(spoke, coords[(c + 2) % 3] - coords[c]);
    auto phi    = std::clamp(
        std::atan2(cross(spoke, -d), dot(spoke, -d)), 0.0, corner);
    leave_vertex(c, mesh.total_angle[v] / 2 + phi);
  }
  path.length = path_length(mesh, path);
  return path;
}

// -----------------------------------------------------------------------------
// PARALLEL TRANSPORT
// -----------------------------------------------------------------------------

// Re-expresses a vector given in the frame of the first strip face in the
// frame of the last face, after unfolding the strip.
inline vec2 transport_along(
    const triangle_mesh& mesh, const geodesic_path& path, vec2 v) {
  if (path.strip.size() <= 1) return v;
  auto coords = unfold_strip(mesh, path.strip);
  auto& last  = coords.back();
  auto x      = normalize(last[1] - last[0]);
  auto y      = perp(x);
  return {dot(v, x), dot(v, y)};
}

inline tangent_vector parallel_transport(const triangle_mesh& mesh,
    const dual_graph& graph, const tangent_vector& v, const mesh_point& to) {
  auto path = shortest_path(mesh, graph, v.at, to);
  return {path.end, transport_along(mesh, path, v.dir)};
}

}  // namespace bsurf

#endif
