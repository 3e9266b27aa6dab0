#include "common.hpp"

#include <bsurf/svg.hpp>

#include <catch_amalgamated.hpp>

using namespace bsurf;
using testing::flat;

static vector<svg_subpath> parse(const string& d, vector<string>& warnings) {
  return parse_path_data(d, warnings);
}

TEST_CASE("path data commands") {
  auto warnings = vector<string>{};
  auto paths = parse("M 10 20 L 30 20 h 5 v -5 C 40 0 50 0 60 10 S 80 20 90 10 "
                     "Q 100 0 110 10 T 130 10", warnings);
  REQUIRE(paths.size() == 1);
  auto& s = paths[0].segments;
  REQUIRE(s.size() == 7);
  CHECK(s[0].degree == 1);
  CHECK(s[0].points[1] == vec2{30, 20});
  CHECK(s[1].points[1] == vec2{35, 20});
  CHECK(s[2].points[1] == vec2{35, 15});
  CHECK(s[3].degree == 3);
  CHECK(s[3].points[0] == vec2{35, 15});
  // Smooth cubic reflects the previous second control point.
  CHECK(s[4].points[1] == vec2{70, 20});
  CHECK(s[5].degree == 2);
  CHECK(s[6].points[1] == vec2{120, 20});
  CHECK(!paths[0].closed);
  CHECK(warnings.empty());
}

TEST_CASE("relative commands, implicit repeats and compact numbers") {
  auto warnings = vector<string>{};
  auto paths    = parse("m1,1 2,0 0,2c1 0 1-1 1-1.5e0", warnings);
  REQUIRE(paths.size() == 1);
  auto& s = paths[0].segments;
  REQUIRE(s.size() == 3);
  CHECK(s[0].points[1] == vec2{3, 1});
  CHECK(s[1].points[1] == vec2{3, 3});
  CHECK(s[2].points[3] == vec2{4, 1.5});
  CHECK(parse("M0 0 L.5.5", warnings)[0].segments[0].points[1] == vec2{0.5, 0.5});
}

TEST_CASE("closing and arcs") {
  auto warnings = vector<string>{};
  auto paths    = parse("M0 0 L10 0 L10 10 Z M20 0 A5 5 0 0 1 30 0 L40 0", warnings);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].closed);
  REQUIRE(paths[0].segments.size() == 3);
  CHECK(paths[0].segments[2].points[1] == vec2{0, 0});
  CHECK(paths[1].segments.size() == 1);
  CHECK(paths[1].segments[0].points[0] == vec2{30, 0});
  CHECK(warnings.size() == 1);
  CHECK_THROWS_AS(parse("L 10 10", warnings), parse_error);
  CHECK_THROWS_AS(parse("M 0 0 X 3", warnings), parse_error);
  CHECK_THROWS_AS(parse("M 0 0 L 3", warnings), parse_error);
}

TEST_CASE("svg documents") {
  auto text = string{R"svg(<svg xmlns="http://www.w3.org/2000/svg">
    <g transform="translate(3 4)"><path id='a' d='M0 0 L10 0'/></g>
    <rect x="0" y="0" width="1" height="1"/>
    <path d="M0 10 C 3 10 7 10 10 10"/>
  </svg>)svg"};
  auto drawing = parse_svg(text);
  CHECK(drawing.paths.size() == 2);
  CHECK(drawing.warnings.size() >= 2);
  CHECK(parse_svg("<svg></svg>").paths.empty());
}

TEST_CASE("import keeps the drawing shape on the plane") {
  auto& fx        = flat();
  auto  placement = svg_placement{fx.at(0.5, 0.5), 0.3, 0.4};
  auto  result    = svg_import(fx.mesh, fx.graph,
          "<svg><path d=\"M0 0 L100 0 L100 60 L0 60 Z\"/></svg>", placement);
  REQUIRE(result.splines.size() == 1);
  auto& s = result.splines[0];
  REQUIRE(s.segments.size() == 4);
  CHECK(is_closed(s));
  auto unit    = 0.3 * fx.mesh.bbox_diag / std::hypot(100.0, 60.0);
  auto drawing = vector<vec2>{{0, 0}, {100, 0}, {100, 60}, {0, 60}};
  for (auto i = 0; i < 4; i++)
    for (auto j = i + 1; j < 4; j++) {
      auto d = distance(fx.xy(anchor_point(s, i)), fx.xy(anchor_point(s, j)));
      CHECK(d == Catch::Approx(unit * distance(drawing[i], drawing[j])).epsilon(1e-9));
    }
  // Straight lines become curves of the same length.
  s.mode     = uniform_mode(4);
  auto curve = trace_spline(fx.mesh, fx.graph, s)[0];
  auto len   = 0.0;
  for (auto& segment : curve.segments) len += segment.length;
  CHECK(len == Catch::Approx(100 * unit).epsilon(1e-9));
  for (auto& c : s.continuity) CHECK(c == anchor_kind::corner);
}

TEST_CASE("import detects smooth anchors and mirrors them exactly") {
  auto& cfx    = testing::curved()[0];
  auto  center = random_points(cfx.mesh, 1, 3)[0];
  auto  result = svg_import(cfx.mesh, cfx.graph,
       "<svg><path d=\"M0 0 C 10 -10 20 -10 30 0 S 50 10 60 0 L 60 20\"/></svg>",
       {center, 0.2, 0});
  REQUIRE(result.splines.size() == 1);
  auto& s = result.splines[0];
  REQUIRE(s.continuity.size() == 4);
  CHECK(s.continuity[0] == anchor_kind::corner);
  CHECK(s.continuity[1] == anchor_kind::smooth);
  CHECK(s.continuity[2] == anchor_kind::corner);
  auto a = angle_between(start_tangent(cfx.mesh, tangent_path(s, {0, 1})),
      start_tangent(cfx.mesh, tangent_path(s, {1, 0})));
  CHECK(std::abs(a - pi) < 1e-6);
  CHECK_THROWS_AS(svg_import(cfx.mesh, cfx.graph, "<svg/>", {center, 0, 0}),
      invalid_argument_error);
  CHECK(svg_import(cfx.mesh, cfx.graph, "<svg/>", {center, 0.2, 0}).splines.empty());
}

TEST_CASE("quadratic segments are degree elevated") {
  auto& fx     = flat();
  auto  result = svg_import(fx.mesh, fx.graph,
       "<svg><path d=\"M0 0 Q 50 100 100 0\"/></svg>", {fx.at(0.5, 0.5), 0.3, 0});
  REQUIRE(result.splines.size() == 1);
  auto& p = result.splines[0].segments[0].points;
  REQUIRE(p.size() == 4);
  // The elevated handles sit at 2/3 of the way to the quadratic control point.
  auto apex = (fx.xy(p[1]) - fx.xy(p[0])) * 1.5 + fx.xy(p[0]);
  auto back = (fx.xy(p[2]) - fx.xy(p[3])) * 1.5 + fx.xy(p[3]);
  CHECK(distance(apex, back) < 1e-9);
}
