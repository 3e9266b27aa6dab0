#include "common.hpp"

#include <catch_amalgamated.hpp>

using namespace bsurf;
using Catch::Approx;
using testing::flat;

// Structural checks every geodesic path must satisfy.
static void check_path(const triangle_mesh& mesh, const geodesic_path& path) {
  REQUIRE(!path.strip.empty());
  REQUIRE(path.lerps.size() + 1 == path.strip.size());
  CHECK(path.start.face == path.strip.front());
  CHECK(path.end.face == path.strip.back());
  for (auto i = 0; i + 1 < (int)path.strip.size(); i++) {
    CHECK(find_adjacent_edge(mesh, path.strip[i], path.strip[i + 1]) >= 0);
    CHECK(path.lerps[i] >= 0);
    CHECK(path.lerps[i] <= 1);
  }
  CHECK(path.length == Approx(path_length(mesh, path)).epsilon(1e-12));
}

TEST_CASE("flat shortest paths are straight segments") {
  auto& fx  = flat();
  auto  rng = std::mt19937_64{11};
  for (auto i = 0; i < 100; i++) {
    auto ends  = testing::random_plane_points(rng, 2, 0.0, 1.0);
    auto stats = straighten_stats{};
    auto path  = shortest_path(fx.mesh, fx.graph, fx.at(ends[0]), fx.at(ends[1]), &stats);
    check_path(fx.mesh, path);
    auto euclid = distance(ends[0], ends[1]);
    CHECK(std::abs(path.length - euclid) <= 1e-9 * std::max(euclid, 1e-300));
    // Every crossing lies on the chord.
    for (auto& p : path_positions(fx.mesh, path)) {
      auto q = vec2{p.x, p.y};
      CHECK(std::abs(cross(ends[1] - ends[0], q - ends[0])) <= 1e-12);
    }
  }
}

TEST_CASE("paths between vertices in any face of their fans") {
  auto& fx  = flat();
  auto  rng = std::mt19937_64{12};
  auto  grid = std::uniform_int_distribution<int>{1, 39};
  for (auto i = 0; i < 20; i++) {
    auto pa = vec2{grid(rng) / 40.0, grid(rng) / 40.0};
    auto pb = vec2{grid(rng) / 40.0, grid(rng) / 40.0};
    auto a  = fx.at(pa), b = fx.at(pb);
    auto va = fx.mesh.triangles[a.face][detail::vertex_corner(a)];
    auto vb = fx.mesh.triangles[b.face][detail::vertex_corner(b)];
    for (auto fa : vertex_fan(fx.mesh, a.face, va)) {
      for (auto fb : vertex_fan(fx.mesh, b.face, vb)) {
        auto p    = corner_point(fa, find_corner(fx.mesh, fa, va));
        auto q    = corner_point(fb, find_corner(fx.mesh, fb, vb));
        auto path = shortest_path(fx.mesh, fx.graph, p, q);
        check_path(fx.mesh, path);
        CHECK(path.start == p);
        CHECK(path.end == q);
        CHECK(path.length == Approx(distance(pa, pb)).epsilon(1e-9).margin(1e-15));
      }
    }
  }
}

TEST_CASE("paths between edge points in either face of the edge") {
  auto& fx  = flat();
  auto  rng = std::mt19937_64{13};
  auto  unit = std::uniform_real_distribution<double>{0.05, 0.95};
  for (auto i = 0; i < 20; i++) {
    auto ends = testing::random_plane_points(rng, 2, 0.0, 1.0);
    auto a = fx.at(ends[0]), b = fx.at(ends[1]);
    auto p = edge_point(a.face, 0, unit(rng)), q = edge_point(b.face, 1, unit(rng));
    auto views_p = detail::point_views(fx.mesh, p), views_q = detail::point_views(fx.mesh, q);
    REQUIRE(views_p.size() == 2);
    REQUIRE(views_q.size() == 2);
    auto euclid = distance(embed(fx.mesh, p), embed(fx.mesh, q));
    for (auto& s : views_p) {
      CHECK(distance(embed(fx.mesh, s), embed(fx.mesh, p)) < 1e-15);
      for (auto& e : views_q) {
        auto path = shortest_path(fx.mesh, fx.graph, s, e);
        check_path(fx.mesh, path);
        CHECK(path.start == s);
        CHECK(path.end == e);
        CHECK(path.length == Approx(euclid).epsilon(1e-9));
      }
    }
  }

  // On a curved mesh the length must not depend on the face an edge point
  // is given in. Reversed paths may settle in a slightly different local
  // minimum.
  auto& cfx = testing::curved()[0];
  for (auto i = 0; i < 50; i++) {
    auto ends = random_points(cfx.mesh, 2, 500 + i);
    auto p    = edge_point(ends[0].face, i % 3, unit(rng));
    auto q    = ends[1];
    auto base = shortest_path(cfx.mesh, cfx.graph, p, q);
    check_path(cfx.mesh, base);
    for (auto& s : detail::point_views(cfx.mesh, p)) {
      auto path = shortest_path(cfx.mesh, cfx.graph, s, q);
      check_path(cfx.mesh, path);
      CHECK(path.length == Approx(base.length).epsilon(1e-12));
      auto back = shortest_path(cfx.mesh, cfx.graph, q, s);
      check_path(cfx.mesh, back);
      CHECK(back.length == Approx(base.length).epsilon(1e-5));
    }
  }
}

TEST_CASE("shortest path within one face") {
  auto& fx   = flat();
  auto  p    = mesh_point{5, {0.2, 0.3}}, q = mesh_point{5, {0.6, 0.1}};
  auto  path = shortest_path(fx.mesh, fx.graph, p, q);
  CHECK(path.strip.size() == 1);
  CHECK(path.length == Approx(distance(embed(fx.mesh, p), embed(fx.mesh, q))));
  auto same = shortest_path(fx.mesh, fx.graph, p, p);
  CHECK(same.length == 0);
}

TEST_CASE("cube face centers unfold to length two") {
  auto cube  = make_box({1, 1, 1});
  auto graph = build_dual_graph(cube);
  auto top   = closest_point(cube, {0.5, 0.5, 1});
  auto bot   = closest_point(cube, {0.5, 0.5, 0});
  auto path  = shortest_path(cube, graph, top, bot);
  check_path(cube, path);
  CHECK(std::abs(path.length - 2.0) < 1e-9);
  auto side  = closest_point(cube, {1, 0.5, 0.5});
  auto short_path = shortest_path(cube, graph, top, side);
  CHECK(std::abs(short_path.length - 1.0) < 1e-9);
}

TEST_CASE("sphere paths approach great circle arcs") {
  auto sphere = make_icosphere(5);
  auto graph  = build_dual_graph(sphere);
  auto rng    = std::mt19937_64{5};
  for (auto i = 0; i < 20; i++) {
    auto points = random_points(sphere, 1, rng());
    auto a = embed(sphere, points[0]), b = embed(sphere, points[1]);
    auto arc  = std::acos(std::clamp(dot(normalize(a), normalize(b)), -1.0, 1.0));
    if (arc > 2.8) continue;  // near antipodal pairs have many minimizers
    auto path = shortest_path(sphere, graph, points[0], points[1]);
    check_path(sphere, path);
    CHECK(path.length >= distance(a, b) - 1e-12);
    CHECK(std::abs(path.length - arc) < 0.01 * arc + 1e-3);
  }
}

TEST_CASE("straightening never lengthens the funnel path") {
  for (auto& fx : testing::curved()) {
    auto rng = std::mt19937_64{17};
    for (auto i = 0; i < 20; i++) {
      auto points  = random_points(fx.mesh, 1, rng());
      auto a       = checked_point(fx.mesh, points[0]);
      auto b       = checked_point(fx.mesh, points[1]);
      if (a.face == b.face) continue;
      auto strip   = initial_strip(fx.mesh, fx.graph, a, b);
      auto initial = funnel_shortest(fx.mesh, strip, a, b);
      auto stats   = straighten_stats{};
      auto path    = straighten_strip(fx.mesh, strip, a, b, &stats);
      check_path(fx.mesh, path);
      CHECK(path.length <= initial.length + 1e-12);
      CHECK(stats.iterations <= 100 * (int)strip.size());
    }
  }
}

TEST_CASE("flat strips containing the chord need no straightening") {
  auto& fx  = flat();
  auto  rng = std::mt19937_64{23};
  for (auto i = 0; i < 20; i++) {
    auto ends  = testing::random_plane_points(rng, 2);
    auto a     = fx.at(ends[0]);
    auto dir   = to_local(fx.mesh, a.face,
        vec3{ends[1].x - ends[0].x, ends[1].y - ends[0].y, 0});
    auto chord = straightest_geodesic(fx.mesh, a, dir, distance(ends[0], ends[1]));
    auto stats = straighten_stats{};
    auto path  = straighten_strip(fx.mesh, chord.strip, a, chord.end, &stats);
    CHECK(stats.iterations == 0);
    CHECK(path.length == Approx(distance(ends[0], ends[1])).epsilon(1e-9));
  }
}

TEST_CASE("point_at follows arc length") {
  auto& fx   = flat();
  auto  a    = vec2{0.1, 0.2}, b = vec2{0.85, 0.7};
  auto  path = shortest_path(fx.mesh, fx.graph, fx.at(a), fx.at(b));
  CHECK(point_at(fx.mesh, path, 0) == path.start);
  CHECK(point_at(fx.mesh, path, 1) == path.end);
  for (auto w : {0.1, 0.25, 0.5, 0.73, 0.99}) {
    CHECK(distance(fx.xy(point_at(fx.mesh, path, w)), lerp(a, b, w)) < 1e-12);
    CHECK(distance(fx.xy(manifold_average(fx.mesh, fx.graph, fx.at(a), fx.at(b), w)),
              lerp(a, b, w)) < 1e-12);
  }
}

TEST_CASE("sub paths and reversal keep geometry") {
  auto& fx   = testing::curved()[0];
  auto  pts  = random_points(fx.mesh, 1, 99);
  auto  path = shortest_path(fx.mesh, fx.graph, pts[0], pts[1]);
  auto  rev  = reverse_path(path);
  check_path(fx.mesh, rev);
  CHECK(rev.length == Approx(path.length).epsilon(1e-12));
  CHECK(rev.start == path.end);
  for (auto [w0, w1] : vector<std::pair<double, double>>{{0, 1}, {0.2, 0.7}, {0.5, 0.5}, {0.9, 1}}) {
    auto sub = sub_path(fx.mesh, path, w0, w1);
    check_path(fx.mesh, sub);
    CHECK(sub.length == Approx((w1 - w0) * path.length).margin(1e-12));
    CHECK(distance(embed(fx.mesh, sub.start), embed(fx.mesh, point_at(fx.mesh, path, w0))) < 1e-12);
  }
}

TEST_CASE("flat straightest geodesics are straight") {
  auto& fx  = flat();
  auto  rng = std::mt19937_64{31};
  auto  ang = std::uniform_real_distribution<double>{-pi, pi};
  for (auto i = 0; i < 50; i++) {
    auto start = testing::random_plane_points(rng, 1, 0.4, 0.6)[0];
    auto p     = fx.at(start);
    auto phi   = ang(rng);
    auto dir   = vec2{std::cos(phi), std::sin(phi)};
    auto path  = straightest_geodesic(fx.mesh, p, dir, 0.3);
    check_path(fx.mesh, path);
    CHECK(path.length == Approx(0.3).epsilon(1e-12));
    // Directions are in the start face frame; compare with the world
    // direction of that frame.
    auto world = to_world(fx.mesh, p.face, dir);
    auto end   = embed(fx.mesh, p) + normalize(world) * 0.3;
    CHECK(distance(embed(fx.mesh, path.end), end) < 1e-12);
  }
}

TEST_CASE("straightest geodesics leave vertices in any direction") {
  auto& fx = flat();
  auto  p  = fx.at(0.5, 0.5);  // a grid vertex
  REQUIRE(std::max({weights(p)[0], weights(p)[1], weights(p)[2]}) == Approx(1));
  for (auto i = 0; i < 24; i++) {
    auto phi   = 2 * pi * (i + 0.37) / 24;
    auto dir   = vec2{std::cos(phi), std::sin(phi)};
    auto path  = straightest_geodesic(fx.mesh, p, dir, 0.2);
    auto world = normalize(to_world(fx.mesh, p.face, dir));
    CHECK(distance(embed(fx.mesh, path.end), embed(fx.mesh, p) + world * 0.2) < 1e-12);
  }
}

TEST_CASE("tangents match path directions") {
  auto& fx   = flat();
  auto  a    = vec2{0.2, 0.3}, b = vec2{0.7, 0.9};
  auto  path = shortest_path(fx.mesh, fx.graph, fx.at(a), fx.at(b));
  auto  dir  = normalize(b - a);
  auto  st   = to_world(fx.mesh, path.start.face, start_tangent(fx.mesh, path));
  auto  et   = to_world(fx.mesh, path.end.face, end_tangent(fx.mesh, path));
  CHECK(distance(vec2{st.x, st.y}, dir) < 1e-12);
  CHECK(distance(vec2{et.x, et.y}, dir) < 1e-12);
}

TEST_CASE("parallel transport preserves norms") {
  for (auto& fx : testing::curved()) {
    auto rng = std::mt19937_64{41};
    auto ang = std::uniform_real_distribution<double>{-pi, pi};
    for (auto i = 0; i < 30; i++) {
      auto pts = random_points(fx.mesh, 1, rng());
      auto phi = ang(rng);
      auto v   = tangent_vector{checked_point(fx.mesh, pts[0]),
          vec2{std::cos(phi), std::sin(phi)} * (0.5 + i)};
      auto t   = parallel_transport(fx.mesh, fx.graph, v, pts[1]);
      CHECK(std::abs(length(t.dir) - length(v.dir)) < 1e-12 * length(v.dir));
    }
  }
}

TEST_CASE("parallel transport around flat loops is the identity") {
  auto& fx  = flat();
  auto  rng = std::mt19937_64{43};
  for (auto i = 0; i < 30; i++) {
    auto corners = fx.at(testing::random_plane_points(rng, 3));
    auto face0   = corners[0].face;
    auto v       = vec2{1, 0};
    for (auto j = 0; j < 3; j++) {
      auto path = shortest_path(fx.mesh, fx.graph, corners[j], corners[(j + 1) % 3]);
      v         = transport_along(fx.mesh, path, v);
      // The next leg starts in the frame the vector is now expressed in.
      corners[(j + 1) % 3] = path.end;
    }
    auto before = to_world(fx.mesh, face0, {1, 0});
    auto after  = to_world(fx.mesh, corners[0].face, v);
    CHECK(angle_between(vec2{before.x, before.y}, vec2{after.x, after.y}) < 1e-9);
  }
}

TEST_CASE("transport around a spherical octant turns by its area") {
  auto sphere = make_icosphere(6);
  auto graph  = build_dual_graph(sphere);
  auto a = closest_point(sphere, {1, 0, 0}), b = closest_point(sphere, {0, 1, 0}),
       c = closest_point(sphere, {0, 0, 1});
  auto v       = vec2{1, 0};
  auto corners = vector<mesh_point>{a, b, c};
  for (auto j = 0; j < 3; j++) {
    auto path = shortest_path(sphere, graph, corners[j], corners[(j + 1) % 3]);
    v         = transport_along(sphere, path, v);
    corners[(j + 1) % 3] = path.end;
  }
  auto turn = angle_between(v, {1, 0});
  CHECK(std::abs(turn - pi / 2) < 0.02 * pi / 2);
}
