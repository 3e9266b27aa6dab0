//
// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// with the number of failed criteria. Tolerances are fixed here.
//

#include "common.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>

using namespace bsurf;
using testing::flat;

// -----------------------------------------------------------------------------
// TOLERANCES AND SIZES
// -----------------------------------------------------------------------------

constexpr auto flat_node_tol      = 1e-6;  // of the domain diagonal
constexpr auto flat_time_limit    = 10.0;  // seconds
constexpr auto contraction_ratio  = 0.5;
constexpr auto contraction_slack  = 1e-9;
constexpr auto ball_tol           = 1e-9;  // relative
constexpr auto smooth_theta       = 5.0;   // degrees
constexpr auto smooth_trials      = 1000;
constexpr auto trace_time_limit   = 100.0;  // ms, median
constexpr auto insert_flat_tol    = 1e-9;
constexpr auto insert_curved_tol  = 0.01;  // of the curve length
constexpr auto conversion_tol     = 1e-9;
constexpr auto flat_path_tol      = 1e-9;  // relative
constexpr auto cube_tol           = 1e-9;
constexpr auto norm_tol           = 1e-12;  // relative
constexpr auto loop_tol           = 1e-9;   // radians

using clock_type = std::chrono::steady_clock;

static double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

static vector<vec2> plane_points(const vector<mesh_point>& points) {
  auto out = vector<vec2>{};
  for (auto& p : points) out.push_back(flat().xy(p));
  return out;
}

static int failures = 0;

static void report(const string& name, bool pass, const string& details) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), details.c_str());
  std::fflush(stdout);
  if (!pass) failures++;
}

static string format(const char* fmt, auto... args) {
  auto buffer = std::array<char, 512>{};
  std::snprintf(buffer.data(), buffer.size(), fmt, args...);
  return buffer.data();
}

// -----------------------------------------------------------------------------
// FLAT ORACLE
// -----------------------------------------------------------------------------

// Nodes are compared with the polar form of the input curve at their knot
// tuples. RDC leaf ends carry repeated knots and are points of the curve, so
// they are also compared with Bernstein evaluation directly.
static void flat_oracle() {
  auto& fx    = flat();
  auto  rng   = std::mt19937_64{1001};
  auto  start = clock_type::now();
  auto  worst = 0.0, worst_ends = 0.0;
  auto  nodes = 0;
  for (auto trial = 0; trial < 100; trial++) {
    auto k       = trial % 2 == 0 ? 3 : 2;
    auto polygon = make_polygon(fx.mesh, fx.graph,
        fx.at(testing::random_plane_points(rng, k + 1)));
    auto plane   = plane_points(polygon.points);
    for (auto scheme : {spline_scheme::rdc, spline_scheme::olr}) {
      auto curve = trace_curve(fx.mesh, fx.graph, scheme, polygon, uniform_mode(6));
      for (auto i = 0; i < (int)curve.nodes.size(); i++) {
        auto  p     = fx.xy(curve.nodes[i]);
        auto& knots = curve.node_knots[i];
        worst       = std::max(worst, distance(p, oracle::blossom(plane, knots)));
        if (scheme == spline_scheme::rdc && knots.front() == knots.back())
          worst_ends = std::max(worst_ends, distance(p, oracle::bezier(plane, knots[0])));
        nodes++;
      }
    }
  }
  auto elapsed = seconds_since(start);
  auto tol     = flat_node_tol * fx.diagonal();
  report("flat-plane oracle",
      worst < tol && worst_ends < tol && elapsed < flat_time_limit,
      format("%d nodes, max node error %.3g, max leaf end error %.3g (tol %.3g), "
             "%.2f s (limit %.0f s), %d triangles",
          nodes, worst, worst_ends, tol, elapsed, flat_time_limit,
          (int)fx.mesh.triangles.size()));
}

// -----------------------------------------------------------------------------
// SEGMENT COUNTS
// -----------------------------------------------------------------------------

static void segment_counts() {
  auto& fx      = flat();
  auto  polygon = make_polygon(fx.mesh, fx.graph,
       fx.at(vector<vec2>{{0.1, 0.1}, {0.2, 0.9}, {0.8, 0.85}, {0.9, 0.2}}));
  auto  rdc = trace_curve(fx.mesh, fx.graph, spline_scheme::rdc, polygon, uniform_mode(4));
  auto  olr = trace_curve(fx.mesh, fx.graph, spline_scheme::olr, polygon, uniform_mode(6));
  report("segment counts", rdc.segments.size() == 48 && olr.segments.size() == 66,
      format("cubic RDC depth 4: %d (expected 48), cubic OLR level 6: %d (expected 66)",
          (int)rdc.segments.size(), (int)olr.segments.size()));
}

// -----------------------------------------------------------------------------
// CONTRACTIVITY AND MINIMAL BALL
// -----------------------------------------------------------------------------

constexpr auto polygons_per_mesh = 200;
constexpr auto contraction_levels = 4;

static uint64_t polygon_seed(int mesh, int trial) { return 70000 + 1000 * mesh + trial; }

// Worst ratio between the longest segment of consecutive levels, over all
// polygons of each level.
static void contractivity() {
  auto rdc_worst = vector<double>(contraction_levels, 0);
  auto olr_worst = vector<double>(contraction_levels, 0);
  auto rdc_fail = 0, olr_fail = 0, polygons = 0;
  for (auto m = 0; m < (int)testing::curved().size(); m++) {
    auto& fx = testing::curved()[m];
    for (auto trial = 0; trial < polygons_per_mesh; trial++) {
      auto polygon = random_polygon(fx.mesh, fx.graph, 3, polygon_seed(m, trial));
      polygons++;
      auto rdc_ok = true, olr_ok = true;
      auto level  = vector<control_polygon>{polygon};
      auto olr    = polygon;
      for (auto n = 0; n < contraction_levels; n++) {
        auto next = vector<control_polygon>{};
        for (auto& p : level) {
          auto [left, right] = rdc_split(fx.mesh, fx.graph, p);
          next.push_back(std::move(left));
          next.push_back(std::move(right));
        }
        auto before = 0.0, after = 0.0;
        for (auto& p : level) before = std::max(before, p.max_segment);
        for (auto& p : next) after = std::max(after, p.max_segment);
        if (after > contraction_ratio * before + contraction_slack) rdc_ok = false;
        if (before > 0) rdc_worst[n] = std::max(rdc_worst[n], after / before);
        level = std::move(next);

        auto refined = olr_subdivide(fx.mesh, fx.graph, olr, 3, n);
        if (refined.max_segment > contraction_ratio * olr.max_segment + contraction_slack)
          olr_ok = false;
        if (olr.max_segment > 0)
          olr_worst[n] = std::max(olr_worst[n], refined.max_segment / olr.max_segment);
        olr = std::move(refined);
      }
      rdc_fail += !rdc_ok;
      olr_fail += !olr_ok;
    }
  }
  auto ratios = [](const vector<double>& worst) {
    auto text = string{};
    for (auto r : worst) text += format("%s%.3f", text.empty() ? "" : " ", r);
    return text;
  };
  report("contractivity", rdc_fail == 0 && olr_fail == 0,
      format("%d cubic polygons on %d meshes, %d levels; RDC violations %d, worst ratios [%s]; "
             "OLR violations %d, worst ratios [%s]",
          polygons, (int)testing::curved().size(), contraction_levels, rdc_fail,
          ratios(rdc_worst).c_str(), olr_fail, ratios(olr_worst).c_str()));
}

// Distance from the arc-length midpoint of the polygon to each control
// point, bounded by the polygon arc between them.
static void minimal_ball() {
  auto worst = 0.0;
  auto fails = 0, checks = 0, unbounded = 0;
  for (auto m = 0; m < (int)testing::curved().size(); m++) {
    auto& fx = testing::curved()[m];
    for (auto trial = 0; trial < polygons_per_mesh; trial++) {
      auto polygon = random_polygon(fx.mesh, fx.graph, 3, polygon_seed(m, trial));
      auto total   = polygon_length(polygon);
      if (total <= 0) continue;
      auto half = total / 2;
      auto i    = 0;
      auto done = 0.0;
      while (i + 1 < (int)polygon.segments.size() && done + polygon.segments[i].length < half)
        done += polygon.segments[i++].length;
      auto& segment = polygon.segments[i];
      auto  w   = segment.length > 0 ? std::clamp((half - done) / segment.length, 0.0, 1.0) : 0.0;
      auto  mid = point_at(fx.mesh, segment, w);
      for (auto j = 0; j < (int)polygon.points.size(); j++) {
        auto chain = vector<geodesic_path>{};
        if (j > i) {
          chain.push_back(sub_path(fx.mesh, segment, w, 1));
          for (auto s = i + 1; s < j; s++) chain.push_back(polygon.segments[s]);
        } else {
          chain.push_back(reverse_path(sub_path(fx.mesh, segment, 0, w)));
          for (auto s = i - 1; s >= j; s--) chain.push_back(reverse_path(polygon.segments[s]));
        }
        auto plain = shortest_path(fx.mesh, fx.graph, mid, polygon.points[j]).length;
        auto d = shortest_path_bounded(fx.mesh, fx.graph, mid, polygon.points[j], chain).length;
        unbounded += plain > half * (1 + ball_tol);
        worst = std::max(worst, d / half);
        fails += d > half * (1 + ball_tol);
        checks++;
      }
    }
  }
  report("minimal ball", fails == 0,
      format("%d control points, worst d(mid, P)/(l/2) = %.12f, violations %d "
             "(graph-seeded paths alone exceeded l/2 %d times)",
          checks, worst, fails, unbounded));
}

// -----------------------------------------------------------------------------
// SMOOTHNESS AND TIMING
// -----------------------------------------------------------------------------

static void smoothness() {
  auto curves = 0, passed = 0;
  auto worst_angle = 0.0, worst_gap = 0.0;
  for (auto trial = 0; trial < smooth_trials; trial++) {
    auto  m  = trial % (int)testing::curved().size();
    auto& fx = testing::curved()[m];
    auto polygon = random_polygon(fx.mesh, fx.graph, 3, 90000 + trial);
    for (auto scheme : {spline_scheme::rdc, spline_scheme::olr}) {
      auto curve  = trace_curve(fx.mesh, fx.graph, scheme, polygon, adaptive_mode(smooth_theta));
      auto result = validate_curve(fx.mesh, fx.graph, curve, smooth_theta);
      curves++;
      passed += result.pass;
      worst_angle = std::max(worst_angle, result.max_angle);
      worst_gap   = std::max(worst_gap, result.max_gap / result.longest_edge);
    }
  }

  auto mesh    = make_icosphere(6);
  auto graph   = build_dual_graph(mesh);
  auto times   = vector<double>{};
  auto timed_pass = 0;
  for (auto trial = 0; trial < 50; trial++) {
    auto polygon = random_polygon(mesh, graph, 3, 95000 + trial);
    for (auto scheme : {spline_scheme::rdc, spline_scheme::olr}) {
      auto start = clock_type::now();
      auto curve = trace_curve(mesh, graph, scheme, polygon, adaptive_mode(smooth_theta));
      times.push_back(1000 * seconds_since(start));
      timed_pass += validate_curve(mesh, graph, curve, smooth_theta).pass;
    }
  }
  auto median = percentile(times, 0.5);
  report("smoothness", passed == curves && timed_pass == (int)times.size() &&
                           median < trace_time_limit,
      format("%d trials, %d of %d curves valid (theta %.0f deg, worst angle %.3f deg, "
             "worst gap %.3f of longest edge); %d-triangle sphere: %d of %d valid, "
             "median trace %.1f ms (limit %.0f ms), p99 %.1f ms",
          smooth_trials, passed, curves, smooth_theta, worst_angle, worst_gap,
          (int)mesh.triangles.size(), timed_pass, (int)times.size(), median,
          trace_time_limit, percentile(times, 0.99)));
}

// -----------------------------------------------------------------------------
// INSERTION
// -----------------------------------------------------------------------------

static double polyline_distance(vec3 p, const vector<vec3>& line) {
  auto best = std::numeric_limits<double>::max();
  for (auto i = 0; i + 1 < (int)line.size(); i++) {
    auto a = line[i], b = line[i + 1];
    auto ab = b - a;
    auto l2 = dot(ab, ab);
    auto s  = l2 > 0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
    best    = std::min(best, distance(p, a + ab * s));
  }
  if (line.size() == 1) best = distance(p, line[0]);
  return best;
}

static double curve_length(const traced_curve& curve) {
  auto len = 0.0;
  for (auto& s : curve.segments) len += s.length;
  return len;
}

// Flat: both halves must reproduce the Euclidean curve on their parameter
// ranges. Curved: samples of each curve must lie near the other one.
static void insertion() {
  auto& fx       = flat();
  auto  rng      = std::mt19937_64{2002};
  auto  flat_err = 0.0;
  for (auto trial = 0; trial < 40; trial++) {
    auto k       = 2 + trial % 2;
    auto polygon = make_polygon(fx.mesh, fx.graph,
        fx.at(testing::random_plane_points(rng, k + 1)));
    auto plane   = plane_points(polygon.points);
    for (auto scheme : {spline_scheme::rdc, spline_scheme::olr}) {
      for (auto t : {0.5, 0.3, 0.77}) {
        auto [left, right] = insert_point(fx.mesh, fx.graph, scheme, polygon, t,
            adaptive_mode(smooth_theta));
        auto lp = plane_points(left.points), rp = plane_points(right.points);
        for (auto i = 0; i <= 50; i++) {
          auto s   = i / 50.0;
          flat_err = std::max(flat_err,
              distance(oracle::bezier(lp, s), oracle::bezier(plane, t * s)));
          flat_err = std::max(flat_err,
              distance(oracle::bezier(rp, s), oracle::bezier(plane, t + (1 - t) * s)));
        }
      }
    }
  }

  auto worst = 0.0;
  auto cases = 0, fails = 0;
  auto per_mesh = string{};
  for (auto m = 0; m < (int)testing::curved().size(); m++) {
    auto& cfx        = testing::curved()[m];
    auto  mesh_worst = 0.0;
    for (auto trial = 0; trial < 10; trial++) {
      auto polygon = random_polygon(cfx.mesh, cfx.graph, 3, 40000 + 100 * m + trial);
      auto mode    = adaptive_mode(smooth_theta);
      for (auto scheme : {spline_scheme::rdc, spline_scheme::olr}) {
        auto t             = 0.2 + 0.6 * trial / 9;
        auto original      = trace_curve(cfx.mesh, cfx.graph, scheme, polygon, mode);
        auto [left, right] = insert_point(cfx.mesh, cfx.graph, scheme, polygon, t, mode);
        auto halves        = vector<vec3>{};
        for (auto& half : {left, right}) {
          auto line = flat_polyline(cfx.mesh, trace_curve(cfx.mesh, cfx.graph, scheme, half, mode));
          halves.insert(halves.end(), line.begin(), line.end());
        }
        auto line = flat_polyline(cfx.mesh, original);
        auto len  = curve_length(original);
        if (len <= 0) continue;
        auto err = 0.0;
        for (auto i = 0; i < 50; i++) {
          auto s = i / 49.0;
          auto p = embed(cfx.mesh, eval_curve(cfx.mesh, cfx.graph, scheme, polygon, s, mode));
          err    = std::max(err, polyline_distance(p, halves));
        }
        for (auto& half : {left, right}) {
          for (auto i = 0; i < 25; i++) {
            auto s = i / 24.0;
            auto q = embed(cfx.mesh, eval_curve(cfx.mesh, cfx.graph, scheme, half, s, mode));
            err    = std::max(err, polyline_distance(q, line));
          }
        }
        mesh_worst = std::max(mesh_worst, err / len);
        fails += err > insert_curved_tol * len;
        cases++;
      }
    }
    worst = std::max(worst, mesh_worst);
    per_mesh += format(" %s %.4f", cfx.name.c_str(), mesh_worst);
  }
  report("insertion", flat_err < insert_flat_tol && fails == 0,
      format("flat max error %.3g (tol %.0e); curved: %d cases, worst deviation %.4f of "
             "curve length (tol %.2f), %d over; worst per mesh:%s",
          flat_err, insert_flat_tol, cases, worst, insert_curved_tol, fails, per_mesh.c_str()));
}

// -----------------------------------------------------------------------------
// CONVERSION
// -----------------------------------------------------------------------------

static void conversion() {
  auto& fx    = flat();
  auto  rng   = std::mt19937_64{3003};
  auto  worst = 0.0;
  for (auto kind : {bspline_case::uniform, bspline_case::open_left}) {
    auto knots = bspline_case_knots(kind);
    auto full  = knots;
    full.insert(full.begin(), knots.front() - 1);
    full.push_back(knots.back() + 1);
    auto a = knots[2], b = knots[3];
    for (auto trial = 0; trial < 20; trial++) {
      auto polygon = make_polygon(fx.mesh, fx.graph,
          fx.at(testing::random_plane_points(rng, 4)));
      auto plane   = plane_points(polygon.points);
      auto bezier  = plane_points(bspline_to_bezier(fx.mesh, fx.graph, polygon, kind).points);
      for (auto i = 0; i < 20; i++) {
        auto s = i / 19.0;
        worst  = std::max(worst, distance(oracle::bezier(bezier, s),
                                     oracle::bspline(plane, full, 3, a + (b - a) * s)));
      }
    }
  }
  report("conversion", worst < conversion_tol,
      format("uniform and open non-uniform cases, 20 polygons x 20 parameters each, "
             "max error %.3g (tol %.0e)", worst, conversion_tol));
}

// -----------------------------------------------------------------------------
// GEODESIC PRIMITIVES
// -----------------------------------------------------------------------------

static void geodesic_primitives() {
  auto& fx       = flat();
  auto  rng      = std::mt19937_64{4004};
  auto  flat_err = 0.0;
  for (auto i = 0; i < 200; i++) {
    auto ends   = testing::random_plane_points(rng, 2, 0.0, 1.0);
    auto path   = shortest_path(fx.mesh, fx.graph, fx.at(ends[0]), fx.at(ends[1]));
    auto euclid = distance(fx.xy(path.start), fx.xy(path.end));
    if (euclid > 0) flat_err = std::max(flat_err, std::abs(path.length - euclid) / euclid);
  }

  auto cube       = make_box({1, 1, 1});
  auto cube_graph = build_dual_graph(cube);
  auto cube_len   = shortest_path(cube, cube_graph, closest_point(cube, {0.5, 0.5, 1}),
        closest_point(cube, {0.5, 0.5, 0})).length;

  auto norm_err = 0.0;
  auto angle    = std::uniform_real_distribution<double>{-pi, pi};
  for (auto& cfx : testing::curved()) {
    for (auto i = 0; i < 50; i++) {
      auto pts = random_points(cfx.mesh, 1, rng());
      auto phi = angle(rng);
      auto v   = tangent_vector{pts[0], vec2{std::cos(phi), std::sin(phi)} * (0.5 + i)};
      auto t   = parallel_transport(cfx.mesh, cfx.graph, v, pts[1]);
      norm_err = std::max(norm_err, std::abs(length(t.dir) - length(v.dir)) / length(v.dir));
    }
  }

  auto loop_err = 0.0;
  for (auto i = 0; i < 50; i++) {
    auto corners = fx.at(testing::random_plane_points(rng, 3));
    auto face0   = corners[0].face;
    auto v       = vec2{1, 0};
    for (auto j = 0; j < 3; j++) {
      auto path = shortest_path(fx.mesh, fx.graph, corners[j], corners[(j + 1) % 3]);
      v         = transport_along(fx.mesh, path, v);
      corners[(j + 1) % 3] = path.end;
    }
    auto before = to_world(fx.mesh, face0, {1, 0});
    auto after  = to_world(fx.mesh, corners[0].face, v);
    loop_err    = std::max(loop_err,
        angle_between(vec2{before.x, before.y}, vec2{after.x, after.y}));
  }

  auto pass = flat_err < flat_path_tol && std::abs(cube_len - 2) < cube_tol &&
              norm_err < norm_tol && loop_err < loop_tol;
  report("geodesic primitives", pass,
      format("flat paths max relative error %.3g (tol %.0e); cube face centers %.15f "
             "(expected 2, tol %.0e); transport norm error %.3g (tol %.0e); "
             "flat loop holonomy %.3g rad (tol %.0e)",
          flat_err, flat_path_tol, cube_len, cube_tol, norm_err, norm_tol, loop_err, loop_tol));
}

// -----------------------------------------------------------------------------
// MAIN
// -----------------------------------------------------------------------------

int main() {
  auto checks = vector<std::function<void()>>{flat_oracle, segment_counts,
      contractivity, minimal_ball, smoothness, insertion, conversion,
      geodesic_primitives};
  for (auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report("exception", false, e.what());
    }
  }
  std::printf("%d of %d criteria failed\n", failures, (int)checks.size());
  return failures == 0 ? 0 : 1;
}
