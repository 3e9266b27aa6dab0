//
// Fixtures shared by the unit tests.
//

#ifndef BSURF_TESTS_COMMON_HPP
#define BSURF_TESTS_COMMON_HPP

#include <bsurf/harness.hpp>

#include <random>

namespace bsurf::testing {

// Closed thin slab whose top face z = 0.05 is a finely triangulated unit
// square. Points on the top face stay on it for all convex constructions.
struct flat_fixture {
  triangle_mesh mesh  = make_slab(40);
  dual_graph    graph = build_dual_graph(mesh);
  double        top   = 0.05;

  mesh_point at(vec2 p) const { return closest_point(mesh, {p.x, p.y, top}); }
  mesh_point at(double x, double y) const { return at(vec2{x, y}); }
  vec2 xy(const mesh_point& p) const {
    auto q = embed(mesh, p);
    return {q.x, q.y};
  }
  vector<mesh_point> at(const vector<vec2>& points) const {
    auto out = vector<mesh_point>{};
    for (auto& p : points) out.push_back(at(p));
    return out;
  }
  double diagonal() const { return std::sqrt(2.0); }  // of the top square
};

inline const flat_fixture& flat() {
  static const auto fixture = flat_fixture{};
  return fixture;
}

struct curved_fixture {
  string        name;
  triangle_mesh mesh;
  dual_graph    graph;
};

// Sphere-like, high-genus and noisy test surfaces.
inline const vector<curved_fixture>& curved() {
  static const auto fixtures = [] {
    auto list = vector<curved_fixture>{};
    for (auto [name, mesh] : vector<std::pair<string, triangle_mesh>>{
             {"icosphere", make_icosphere(4)},
             {"plate", make_perforated_plate(5, 5)},
             {"noisy_sphere", make_noisy_sphere(4, 0.05)}}) {
      auto graph = build_dual_graph(mesh);
      list.push_back({name, std::move(mesh), std::move(graph)});
    }
    return list;
  }();
  return fixtures;
}

// Random planar control points inside [lo, hi]^2.
inline vector<vec2> random_plane_points(std::mt19937_64& rng, int count,
    double lo = 0.05, double hi = 0.95) {
  auto dist   = std::uniform_real_distribution<double>{lo, hi};
  auto points = vector<vec2>{};
  for (auto i = 0; i < count; i++) {
    auto x = dist(rng);
    points.push_back({x, dist(rng)});
  }
  return points;
}

}  // namespace bsurf::testing

#endif
