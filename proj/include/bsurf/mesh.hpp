//
// Triangle mesh storage, mesh points, face frames and the dual graph used to
// seed geodesic searches.
//

#ifndef BSURF_MESH_HPP
#define BSURF_MESH_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "math.hpp"

namespace bsurf {

using std::array;
using std::string;
using std::vector;

// -----------------------------------------------------------------------------
// MESH DATA
// -----------------------------------------------------------------------------

// Indexed triangle mesh. adjacencies[f][e] is the triangle across edge e of
// face f, where edge e joins corners e and (e+1)%3. Meshes built through
// make_mesh are closed, edge-manifold and coherently oriented, so every entry
// is a valid face index.
struct triangle_mesh {
  vector<vec3>   positions   = {};
  vector<vec3i>  triangles   = {};
  vector<vec3i>  adjacencies = {};
  vector<int>    vertex_face = {};  // one incident face per vertex, or -1
  vector<double> total_angle = {};  // sum of corner angles at each vertex
  double         bbox_diag    = 0;
  double         longest_edge = 0;
};

// A surface location: a face plus the barycentric weights of its first two
// corners. The third weight is 1 - alpha - beta.
struct mesh_point {
  int  face = -1;
  vec2 bary = {0, 0};
};

inline bool operator==(const mesh_point& a, const mesh_point& b) {
  return a.face == b.face && a.bary == b.bary;
}
inline bool operator!=(const mesh_point& a, const mesh_point& b) {
  return !(a == b);
}

inline constexpr double bary_epsilon = 1e-9;

inline array<double, 3> weights(const mesh_point& p) {
  return {p.bary.x, p.bary.y, 1 - p.bary.x - p.bary.y};
}

// Mesh point with the given corner weights; w must sum to one.
inline mesh_point make_point(int face, double w0, double w1) {
  return {face, {w0, w1}};
}

// Local index of vertex v in face f, or -1.
inline int find_corner(const triangle_mesh& mesh, int f, int v) {
  auto& t = mesh.triangles[f];
  for (auto c = 0; c < 3; c++)
    if (t[c] == v) return c;
  return -1;
}

// Local index of the edge of f shared with g, or -1.
inline int find_adjacent_edge(const triangle_mesh& mesh, int f, int g) {
  auto& a = mesh.adjacencies[f];
  for (auto e = 0; e < 3; e++)
    if (a[e] == g) return e;
  return -1;
}

// Mesh point placed exactly on corner c of face f.
inline mesh_point corner_point(int f, int c) {
  if (c == 0) return {f, {1, 0}};
  if (c == 1) return {f, {0, 1}};
  return {f, {0, 0}};
}

inline mesh_point vertex_point(const triangle_mesh& mesh, int v) {
  auto f = mesh.vertex_face.at(v);
  return corner_point(f, find_corner(mesh, f, v));
}

// Point on edge e of face f at fraction l from corner e to corner e+1.
inline mesh_point edge_point(int f, int e, double l) {
  auto w = array<double, 3>{0, 0, 0};
  w[e]           = 1 - l;
  w[(e + 1) % 3] = l;
  return {f, {w[0], w[1]}};
}

inline void check_face(const triangle_mesh& mesh, int f) {
  if (f < 0 || f >= (int)mesh.triangles.size())
    throw invalid_face_error("face index " + std::to_string(f) + " out of range");
}

// Validates a mesh point and clamps round-off below bary_epsilon.
inline mesh_point checked_point(const triangle_mesh& mesh, const mesh_point& p) {
  check_face(mesh, p.face);
  auto [a, b, c] = weights(p);
  if (!std::isfinite(a) || !std::isfinite(b) || a < -bary_epsilon ||
      b < -bary_epsilon || c < -bary_epsilon)
    throw invalid_point_error("barycentric coordinates outside face " +
                              std::to_string(p.face));
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  if (a + b > 1) {
    auto s = a + b;
    a /= s;
    b /= s;
  }
  return {p.face, {a, b}};
}

inline vec3 embed(const triangle_mesh& mesh, const mesh_point& p) {
  check_face(mesh, p.face);
  auto& t       = mesh.triangles[p.face];
  auto [a, b, c] = weights(p);
  return mesh.positions[t.x] * a + mesh.positions[t.y] * b +
         mesh.positions[t.z] * c;
}

inline double face_area(const triangle_mesh& mesh, int f) {
  auto& t = mesh.triangles[f];
  return triangle_area(
      mesh.positions[t.x], mesh.positions[t.y], mesh.positions[t.z]);
}

inline double edge_length(const triangle_mesh& mesh, int f, int e) {
  auto& t = mesh.triangles[f];
  return distance(mesh.positions[t[e]], mesh.positions[t[(e + 1) % 3]]);
}

// -----------------------------------------------------------------------------
// FACE FRAMES
// -----------------------------------------------------------------------------

// Orthonormal tangent frame of a face: x along the first edge, y completing a
// right-handed frame with the face normal.
struct face_frame {
  vec3 origin = {};
  vec3 x      = {1, 0, 0};
  vec3 y      = {0, 1, 0};
  vec3 normal = {0, 0, 1};
};

inline face_frame make_frame(const triangle_mesh& mesh, int f) {
  auto& t  = mesh.triangles[f];
  auto  p0 = mesh.positions[t.x], p1 = mesh.positions[t.y],
       p2  = mesh.positions[t.z];
  auto n   = normalize(cross(p1 - p0, p2 - p0));
  auto x   = normalize(p1 - p0);
  return {p0, x, cross(n, x), n};
}

// Corner positions of a face in its own tangent frame.
inline array<vec2, 3> face_coords(const triangle_mesh& mesh, int f) {
  auto& t     = mesh.triangles[f];
  auto  frame = make_frame(mesh, f);
  auto  d1    = mesh.positions[t.y] - frame.origin;
  auto  d2    = mesh.positions[t.z] - frame.origin;
  return {vec2{0, 0}, vec2{length(d1), 0},
      vec2{dot(d2, frame.x), dot(d2, frame.y)}};
}

inline vec3 to_world(const triangle_mesh& mesh, int f, vec2 v) {
  auto frame = make_frame(mesh, f);
  return frame.x * v.x + frame.y * v.y;
}

inline vec2 to_local(const triangle_mesh& mesh, int f, vec3 v) {
  auto frame = make_frame(mesh, f);
  return {dot(v, frame.x), dot(v, frame.y)};
}

inline vec2 interpolate(const array<vec2, 3>& t, const mesh_point& p) {
  auto [a, b, c] = weights(p);
  return t[0] * a + t[1] * b + t[2] * c;
}

// Barycentric pair of a 2D point with respect to a 2D triangle.
inline vec2 barycentric(vec2 p, const array<vec2, 3>& t) {
  auto d   = cross(t[1] - t[0], t[2] - t[0]);
  auto w1  = cross(p - t[0], t[2] - t[0]) / d;
  auto w2  = cross(t[1] - t[0], p - t[0]) / d;
  return {1 - w1 - w2, w1};
}

// -----------------------------------------------------------------------------
// CONSTRUCTION AND VALIDATION
// -----------------------------------------------------------------------------

// Faces around vertex v in counter-clockwise order, starting at face f.
inline vector<int> vertex_fan(const triangle_mesh& mesh, int f, int v) {
  auto fan  = vector<int>{};
  auto face = f;
  do {
    fan.push_back(face);
    auto c = find_corner(mesh, face, v);
    face   = mesh.adjacencies[face][(c + 2) % 3];
    if ((int)fan.size() > (int)mesh.triangles.size()) break;
  } while (face != f);
  return fan;
}

// Builds adjacency and derived data. Rejects open, non-manifold or
// inconsistently oriented input.
inline triangle_mesh make_mesh(vector<vec3> positions, vector<vec3i> triangles) {
  auto mesh      = triangle_mesh{};
  mesh.positions = std::move(positions);
  mesh.triangles = std::move(triangles);
  auto nverts    = (int64_t)mesh.positions.size();
  if (mesh.triangles.empty()) throw parse_error("mesh has no faces");
  for (auto& p : mesh.positions)
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw parse_error("non-finite vertex position");

  // Directed edge table.
  auto key   = [nverts](int64_t a, int64_t b) { return a * nverts + b; };
  auto edges = std::unordered_map<int64_t, int>{};
  edges.reserve(mesh.triangles.size() * 3);
  for (auto f = 0; f < (int)mesh.triangles.size(); f++) {
    auto& t = mesh.triangles[f];
    for (auto c = 0; c < 3; c++) {
      if (t[c] < 0 || t[c] >= nverts)
        throw parse_error("face " + std::to_string(f) + " has invalid vertex");
    }
    if (t.x == t.y || t.y == t.z || t.z == t.x)
      throw non_manifold_error(
          "face " + std::to_string(f) + " repeats a vertex");
    for (auto e = 0; e < 3; e++) {
      auto [it, inserted] = edges.insert({key(t[e], t[(e + 1) % 3]), f * 3 + e});
      if (!inserted)
        throw non_manifold_error("edge (" + std::to_string(t[e]) + ", " +
                                 std::to_string(t[(e + 1) % 3]) +
                                 ") is shared by more than two faces or "
                                 "faces are inconsistently oriented");
    }
  }

  mesh.adjacencies.assign(mesh.triangles.size(), {-1, -1, -1});
  for (auto f = 0; f < (int)mesh.triangles.size(); f++) {
    auto& t = mesh.triangles[f];
    for (auto e = 0; e < 3; e++) {
      auto it = edges.find(key(t[(e + 1) % 3], t[e]));
      if (it == edges.end())
        throw not_watertight_error("edge (" + std::to_string(t[e]) + ", " +
                                   std::to_string(t[(e + 1) % 3]) +
                                   ") is on the boundary");
      mesh.adjacencies[f][e] = it->second / 3;
    }
  }

  // Vertex manifoldness: each vertex star must be a single fan.
  auto valence     = vector<int>(nverts, 0);
  mesh.vertex_face = vector<int>(nverts, -1);
  for (auto f = 0; f < (int)mesh.triangles.size(); f++) {
    for (auto c = 0; c < 3; c++) {
      auto v = mesh.triangles[f][c];
      valence[v]++;
      if (mesh.vertex_face[v] < 0) mesh.vertex_face[v] = f;
    }
  }
  mesh.total_angle = vector<double>(nverts, 0);
  for (auto v = 0; v < nverts; v++) {
    if (mesh.vertex_face[v] < 0) continue;
    auto fan = vertex_fan(mesh, mesh.vertex_face[v], v);
    if ((int)fan.size() != valence[v])
      throw non_manifold_error(
          "vertex " + std::to_string(v) + " has a non-manifold star");
    for (auto f : fan) {
      auto& t = mesh.triangles[f];
      auto  c = find_corner(mesh, f, v);
      mesh.total_angle[v] += corner_angle(mesh.positions[t[c]],
          mesh.positions[t[(c + 1) % 3]], mesh.positions[t[(c + 2) % 3]]);
    }
  }

  auto lo = vec3{INFINITY, INFINITY, INFINITY}, hi = -lo;
  for (auto v = 0; v < nverts; v++) {
    if (mesh.vertex_face[v] < 0) continue;
    lo = min(lo, mesh.positions[v]);
    hi = max(hi, mesh.positions[v]);
  }
  mesh.bbox_diag = distance(lo, hi);
  for (auto f = 0; f < (int)mesh.triangles.size(); f++)
    for (auto e = 0; e < 3; e++)
      mesh.longest_edge = std::max(mesh.longest_edge, edge_length(mesh, f, e));
  return mesh;
}

// Parses Wavefront OBJ positions and faces. Polygons are fan-triangulated;
// normals, texture coordinates and other records are ignored.
inline triangle_mesh load_obj(std::istream& stream) {
  auto positions = vector<vec3>{};
  auto triangles = vector<vec3i>{};
  auto line      = string{};
  auto lineno    = 0;
  auto fail = [&](const string& msg) {
    throw parse_error("obj line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(stream, line)) {
    lineno++;
    auto ss  = std::istringstream{line};
    auto cmd = string{};
    if (!(ss >> cmd) || cmd[0] == '#') continue;
    if (cmd == "v") {
      auto p = vec3{};
      if (!(ss >> p.x >> p.y >> p.z)) fail("malformed vertex");
      positions.push_back(p);
    } else if (cmd == "f") {
      auto face  = vector<int>{};
      auto token = string{};
      while (ss >> token) {
        auto idx = 0;
        try {
          auto used = size_t{0};
          idx       = std::stoi(token.substr(0, token.find('/')), &used);
        } catch (const std::exception&) {
          fail("malformed face index '" + token + "'");
        }
        if (idx > 0) face.push_back(idx - 1);
        else if (idx < 0) face.push_back((int)positions.size() + idx);
        else fail("face index 0");
        if (face.back() < 0 || face.back() >= (int)positions.size())
          fail("face index out of range");
      }
      if (face.size() < 3) fail("face with fewer than 3 vertices");
      for (auto i = 1; i + 1 < (int)face.size(); i++)
        triangles.push_back({face[0], face[i], face[i + 1]});
    }
  }
  if (positions.empty()) throw parse_error("obj has no vertices");
  return make_mesh(std::move(positions), std::move(triangles));
}

inline triangle_mesh load_obj(const string& filename) {
  auto stream = std::ifstream{filename};
  if (!stream) throw parse_error("cannot open " + filename);
  return load_obj(stream);
}

// Closest surface point to a 3D position, by brute force over all faces.
inline mesh_point closest_point(const triangle_mesh& mesh, vec3 position) {
  auto best      = mesh_point{};
  auto best_dist = (double)INFINITY;
  for (auto f = 0; f < (int)mesh.triangles.size(); f++) {
    auto& t = mesh.triangles[f];
    auto  a = mesh.positions[t.x], b = mesh.positions[t.y],
         c  = mesh.positions[t.z];
    // Barycentric projection, then clamp to the triangle.
    auto n  = cross(b - a, c - a);
    auto nn = dot(n, n);
    if (nn == 0) continue;
    auto wa = dot(cross(b - position, c - position), n) / nn;
    auto wb = dot(cross(c - position, a - position), n) / nn;
    auto wc = 1 - wa - wb;
    if (wa < 0 || wb < 0 || wc < 0) {
      // Project on the closest edge.
      auto candidates = array<std::pair<vec3, vec3>, 3>{
          std::pair{a, b}, std::pair{b, c}, std::pair{c, a}};
      auto bestd = INFINITY;
      for (auto e = 0; e < 3; e++) {
        auto [p, q] = candidates[e];
        auto pq     = q - p;
        auto s = std::clamp(dot(position - p, pq) / dot(pq, pq), 0.0, 1.0);
        auto d = distance(position, p + pq * s);
        if (d < bestd) {
          bestd  = d;
          auto w = array<double, 3>{0, 0, 0};
          w[e]           = 1 - s;
          w[(e + 1) % 3] = s;
          wa = w[0];
          wb = w[1];
        }
      }
    }
    auto p = mesh_point{f, {wa, wb}};
    auto d = distance(position, embed(mesh, p));
    if (d < best_dist) {
      best_dist = d;
      best      = p;
    }
  }
  return best;
}

inline void save_obj(std::ostream& stream, const triangle_mesh& mesh) {
  stream.precision(17);
  for (auto& p : mesh.positions)
    stream << "v " << p.x << " " << p.y << " " << p.z << "\n";
  for (auto& t : mesh.triangles)
    stream << "f " << t.x + 1 << " " << t.y + 1 << " " << t.z + 1 << "\n";
}

// -----------------------------------------------------------------------------
// DUAL GRAPH
// -----------------------------------------------------------------------------

// Graph over faces used to find an initial strip between two points. Faces
// touching an edge longer than the threshold are represented by a fan of
// sub-nodes, one per virtual sub-segment of their boundary, all connected to
// each other. Arcs are stored in compressed rows.
struct dual_graph {
  vector<vec3>   nodes        = {};  // reference point of each node
  vector<int>    node_face    = {};  // provenance: node -> mesh face
  vector<int>    face_offsets = {};  // nodes of face f: [offsets[f], offsets[f+1])
  vector<int>    arc_offsets  = {};
  vector<int>    arc_targets  = {};
  vector<double> arc_lengths  = {};
  double         threshold    = 0;
  int            split_edges  = 0;  // number of mesh edges virtually split
};

inline constexpr double default_split_fraction = 0.05;

inline dual_graph build_dual_graph(
    const triangle_mesh& mesh, double split_fraction = default_split_fraction) {
  if (!(split_fraction > 0))
    throw invalid_argument_error("split fraction must be positive");
  auto graph      = dual_graph{};
  auto nfaces     = (int)mesh.triangles.size();
  graph.threshold = split_fraction * mesh.bbox_diag;

  // Number of pieces for every edge, by repeated midpoint bisection.
  auto pieces = vector<array<int, 3>>(nfaces);
  for (auto f = 0; f < nfaces; f++) {
    for (auto e = 0; e < 3; e++) {
      auto len   = edge_length(mesh, f, e);
      auto count = 1;
      while (len / count > graph.threshold && count < (1 << 20)) count *= 2;
      pieces[f][e] = count;
      if (count > 1 && f < mesh.adjacencies[f][e]) graph.split_edges++;
    }
  }

  // Nodes. Unsplit faces get one node at the centroid; split faces get one
  // node per boundary sub-segment, at the centroid of the fan triangle.
  graph.face_offsets.resize(nfaces + 1);
  auto first_piece = vector<array<int, 3>>(nfaces);  // local index of edge start
  for (auto f = 0; f < nfaces; f++) {
    graph.face_offsets[f] = (int)graph.nodes.size();
    auto& t       = mesh.triangles[f];
    auto  p       = array<vec3, 3>{mesh.positions[t.x], mesh.positions[t.y],
        mesh.positions[t.z]};
    auto centroid = (p[0] + p[1] + p[2]) / 3;
    auto& np      = pieces[f];
    if (np[0] == 1 && np[1] == 1 && np[2] == 1) {
      graph.nodes.push_back(centroid);
      graph.node_face.push_back(f);
      first_piece[f] = {0, 0, 0};
      continue;
    }
    auto local = 0;
    for (auto e = 0; e < 3; e++) {
      first_piece[f][e] = local;
      auto a = p[e], b = p[(e + 1) % 3];
      for (auto i = 0; i < np[e]; i++, local++) {
        auto s0 = lerp(a, b, (double)i / np[e]);
        auto s1 = lerp(a, b, (double)(i + 1) / np[e]);
        graph.nodes.push_back((centroid + s0 + s1) / 3);
        graph.node_face.push_back(f);
      }
    }
  }
  graph.face_offsets[nfaces] = (int)graph.nodes.size();

  auto node_of = [&](int f, int e, int i) {
    auto count = graph.face_offsets[f + 1] - graph.face_offsets[f];
    if (count == 1) return graph.face_offsets[f];
    return graph.face_offsets[f] + first_piece[f][e] + i;
  };

  // Arcs, in node order.
  auto nnodes = (int)graph.nodes.size();
  auto arcs   = vector<vector<int>>(nnodes);
  for (auto f = 0; f < nfaces; f++) {
    auto count = graph.face_offsets[f + 1] - graph.face_offsets[f];
    for (auto e = 0; e < 3; e++) {
      auto g  = mesh.adjacencies[f][e];
      auto ge = find_adjacent_edge(mesh, g, f);
      auto np = pieces[f][e];
      for (auto i = 0; i < np; i++)
        arcs[node_of(f, e, i)].push_back(node_of(g, ge, np - 1 - i));
    }
    // Sub-nodes of a split face see each other across the face interior.
    if (count > 1) {
      for (auto i = 0; i < count; i++)
        for (auto j = 0; j < count; j++)
          if (i != j)
            arcs[graph.face_offsets[f] + i].push_back(graph.face_offsets[f] + j);
    }
  }
  graph.arc_offsets.resize(nnodes + 1);
  for (auto n = 0; n < nnodes; n++) {
    auto& list = arcs[n];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    graph.arc_offsets[n] = (int)graph.arc_targets.size();
    for (auto m : list) {
      if (m == n) continue;
      graph.arc_targets.push_back(m);
      graph.arc_lengths.push_back(
          std::max(distance(graph.nodes[n], graph.nodes[m]), 1e-12));
    }
  }
  graph.arc_offsets[nnodes] = (int)graph.arc_targets.size();
  return graph;
}

}  // namespace bsurf

#endif
