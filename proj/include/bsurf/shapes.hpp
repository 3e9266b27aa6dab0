//
// Procedural closed meshes used by tests, benchmarks and demos.
//

#ifndef BSURF_SHAPES_HPP
#define BSURF_SHAPES_HPP

#include <map>
#include <random>
#include <tuple>

#include "mesh.hpp"

namespace bsurf {

// Surface of a union of axis-aligned voxels. Each voxel face is split into a
// grid of quads, sub[axis] per voxel along each axis, and each quad into two
// triangles. occupied(i, j, k) must describe a set whose boundary is a
// manifold.
template <typename Occupancy>
inline triangle_mesh make_voxel_surface(std::array<int, 3> voxels,
    std::array<int, 3> sub, vec3 cell, Occupancy&& occupied) {
  auto positions = vector<vec3>{};
  auto triangles = vector<vec3i>{};
  auto index     = std::map<std::tuple<int, int, int>, int>{};
  auto inside    = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= voxels[0] || j >= voxels[1] ||
        k >= voxels[2])
      return false;
    return (bool)occupied(i, j, k);
  };
  auto vertex = [&](std::array<int, 3> l) {
    auto key = std::tuple{l[0], l[1], l[2]};
    auto it  = index.find(key);
    if (it != index.end()) return it->second;
    auto id = (int)positions.size();
    positions.push_back({cell.x * l[0] / sub[0], cell.y * l[1] / sub[1],
        cell.z * l[2] / sub[2]});
    index[key] = id;
    return id;
  };
  for (auto i = 0; i < voxels[0]; i++)
    for (auto j = 0; j < voxels[1]; j++)
      for (auto k = 0; k < voxels[2]; k++) {
        if (!inside(i, j, k)) continue;
        auto v = std::array<int, 3>{i, j, k};
        for (auto axis = 0; axis < 3; axis++)
          for (auto dir = -1; dir <= 1; dir += 2) {
            auto n = v;
            n[axis] += dir;
            if (inside(n[0], n[1], n[2])) continue;
            // Face plane and the two in-plane axes, ordered so that the
            // quads are counter-clockwise seen from outside.
            auto u = (axis + 1) % 3, w = (axis + 2) % 3;
            if (dir < 0) std::swap(u, w);
            auto base   = std::array<int, 3>{
                v[0] * sub[0], v[1] * sub[1], v[2] * sub[2]};
            base[axis] += dir > 0 ? sub[axis] : 0;
            for (auto a = 0; a < sub[u]; a++)
              for (auto b = 0; b < sub[w]; b++) {
                auto corner = [&](int da, int db) {
                  auto l = base;
                  l[u] += a + da;
                  l[w] += b + db;
                  return vertex(l);
                };
                auto q0 = corner(0, 0), q1 = corner(1, 0), q2 = corner(1, 1),
                     q3 = corner(0, 1);
                if ((a + b) % 2 == 0) {
                  triangles.push_back({q0, q1, q2});
                  triangles.push_back({q0, q2, q3});
                } else {
                  triangles.push_back({q0, q1, q3});
                  triangles.push_back({q1, q2, q3});
                }
              }
          }
      }
  return make_mesh(std::move(positions), std::move(triangles));
}

// Closed thin box whose top face z = thickness is the square [0,size]^2
// triangulated with 2 * n * n triangles.
inline triangle_mesh make_slab(int n, double size = 1, double thickness = 0.05) {
  return make_voxel_surface({1, 1, 1}, {n, n, 1}, {size, size, thickness},
      [](int, int, int) { return true; });
}

// Axis-aligned box [0,sx]x[0,sy]x[0,sz] with the given per-axis subdivision.
inline triangle_mesh make_box(vec3 size, std::array<int, 3> sub = {1, 1, 1}) {
  return make_voxel_surface(
      {1, 1, 1}, sub, size, [](int, int, int) { return true; });
}

// Plate of w x h voxels with a square hole at every odd (i, j) voxel, so the
// genus equals the number of holes.
inline triangle_mesh make_perforated_plate(int w, int h, int sub = 2) {
  return make_voxel_surface({w, h, 1}, {sub, sub, sub}, {1, 1, 1},
      [](int i, int j, int) { return !(i % 2 == 1 && j % 2 == 1); });
}

// Icosahedron refined by midpoint subdivision and projected on the sphere.
// Level l has 20 * 4^l triangles.
inline triangle_mesh make_icosphere(int level, double radius = 1) {
  auto t         = (1 + std::sqrt(5.0)) / 2;
  auto positions = vector<vec3>{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},
      {-t, 0, -1}, {-t, 0, 1}};
  auto triangles = vector<vec3i>{{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10},
      {0, 10, 11}, {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9}, {4, 9, 5},
      {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (auto& p : positions) p = normalize(p);
  for (auto l = 0; l < level; l++) {
    auto mids = std::map<std::pair<int, int>, int>{};
    auto mid  = [&](int a, int b) {
      auto key = std::pair{std::min(a, b), std::max(a, b)};
      auto it  = mids.find(key);
      if (it != mids.end()) return it->second;
      positions.push_back(normalize(positions[a] + positions[b]));
      return mids[key] = (int)positions.size() - 1;
    };
    auto next = vector<vec3i>{};
    next.reserve(triangles.size() * 4);
    for (auto& tr : triangles) {
      auto a = mid(tr.x, tr.y), b = mid(tr.y, tr.z), c = mid(tr.z, tr.x);
      next.push_back({tr.x, a, c});
      next.push_back({tr.y, b, a});
      next.push_back({tr.z, c, b});
      next.push_back({a, b, c});
    }
    triangles = std::move(next);
  }
  for (auto& p : positions) p = p * radius;
  return make_mesh(std::move(positions), std::move(triangles));
}

// Icosphere with every vertex moved radially by a uniform random amount in
// [-amplitude, amplitude].
inline triangle_mesh make_noisy_sphere(
    int level, double amplitude, uint64_t seed = 7) {
  auto base = make_icosphere(level);
  auto rng  = std::mt19937_64{seed};
  auto dist = std::uniform_real_distribution<double>{-amplitude, amplitude};
  for (auto& p : base.positions) p = p * (1 + dist(rng));
  return make_mesh(std::move(base.positions), std::move(base.triangles));
}

// Capped cylinder around the z axis with `around` sides and `rows` bands.
inline triangle_mesh make_cylinder(
    int around, int rows, double radius = 1, double height = 2) {
  auto positions = vector<vec3>{};
  auto triangles = vector<vec3i>{};
  for (auto r = 0; r <= rows; r++)
    for (auto a = 0; a < around; a++) {
      auto phi = 2 * pi * a / around;
      positions.push_back({radius * std::cos(phi), radius * std::sin(phi),
          height * r / rows});
    }
  auto ring = [&](int r, int a) { return r * around + (a % around); };
  for (auto r = 0; r < rows; r++)
    for (auto a = 0; a < around; a++) {
      triangles.push_back({ring(r, a), ring(r, a + 1), ring(r + 1, a + 1)});
      triangles.push_back({ring(r, a), ring(r + 1, a + 1), ring(r + 1, a)});
    }
  auto bottom = (int)positions.size();
  positions.push_back({0, 0, 0});
  auto top = (int)positions.size();
  positions.push_back({0, 0, height});
  for (auto a = 0; a < around; a++) {
    triangles.push_back({bottom, ring(0, a + 1), ring(0, a)});
    triangles.push_back({top, ring(rows, a), ring(rows, a + 1)});
  }
  return make_mesh(std::move(positions), std::move(triangles));
}

// Closed cone with apex on the z axis over a regular base polygon.
inline triangle_mesh make_cone(int around, double radius = 1, double height = 1) {
  auto positions = vector<vec3>{};
  auto triangles = vector<vec3i>{};
  for (auto a = 0; a < around; a++) {
    auto phi = 2 * pi * a / around;
    positions.push_back({radius * std::cos(phi), radius * std::sin(phi), 0});
  }
  auto apex = (int)positions.size();
  positions.push_back({0, 0, height});
  auto base = (int)positions.size();
  positions.push_back({0, 0, 0});
  for (auto a = 0; a < around; a++) {
    auto b = (a + 1) % around;
    triangles.push_back({a, b, apex});
    triangles.push_back({base, b, a});
  }
  return make_mesh(std::move(positions), std::move(triangles));
}

}  // namespace bsurf

#endif
