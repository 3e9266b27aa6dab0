//
// SVG path import. Path data is read as cubic splines in the plane, centered
// on the drawing's bounding box and mapped onto the mesh through normal
// coordinates around a chosen center point.
//

#ifndef BSURF_SVG_HPP
#define BSURF_SVG_HPP

#include <cctype>
#include <map>
#include <regex>

#include "editing.hpp"

namespace bsurf {

// -----------------------------------------------------------------------------
// PATH DATA
// -----------------------------------------------------------------------------

// A planar Bezier piece of degree 1, 2 or 3.
struct svg_segment {
  int          degree = 3;
  vector<vec2> points = {};
};

struct svg_subpath {
  vector<svg_segment> segments = {};
  bool                closed   = false;
};

struct svg_drawing {
  vector<svg_subpath> paths    = {};
  vector<string>      warnings = {};
};

namespace detail {

struct path_scanner {
  const string& text;
  size_t        pos = 0;

  void skip() {
    while (pos < text.size() &&
           (std::isspace((unsigned char)text[pos]) || text[pos] == ','))
      pos++;
  }
  bool at_number() {
    skip();
    if (pos >= text.size()) return false;
    auto c = text[pos];
    return std::isdigit((unsigned char)c) || c == '-' || c == '+' || c == '.';
  }
  double number() {
    skip();
    auto start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) pos++;
    auto digits = false, dot = false;
    while (pos < text.size()) {
      auto c = text[pos];
      if (std::isdigit((unsigned char)c)) digits = true;
      else if (c == '.' && !dot) dot = true;
      else break;
      pos++;
    }
    if (digits && pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      auto save = pos++;
      if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) pos++;
      if (pos < text.size() && std::isdigit((unsigned char)text[pos])) {
        while (pos < text.size() && std::isdigit((unsigned char)text[pos])) pos++;
      } else {
        pos = save;
      }
    }
    if (!digits)
      throw parse_error("svg path data: expected a number at offset " +
                        std::to_string(start));
    return std::stod(text.substr(start, pos - start));
  }
  // Arc flags may be written without separators.
  double flag() {
    skip();
    if (pos < text.size() && (text[pos] == '0' || text[pos] == '1'))
      return text[pos++] - '0';
    throw parse_error("svg path data: expected an arc flag");
  }
};

}  // namespace detail

// Parses the d attribute of an SVG path. Supports M, L, H, V, C, S, Q, T, Z
// in absolute and relative form. Elliptical arcs are skipped with a warning:
// the subpath restarts at the arc's end point.
inline vector<svg_subpath> parse_path_data(
    const string& d, vector<string>& warnings) {
  auto paths   = vector<svg_subpath>{};
  auto scan    = detail::path_scanner{d};
  auto current = vec2{0, 0}, start = vec2{0, 0};
  auto last_control = std::optional<vec2>{};
  auto last_kind    = ' ';
  auto cmd          = ' ';
  auto open = [&]() -> svg_subpath& {
    if (paths.empty() || paths.back().closed) {
      paths.push_back({});
      start = current;
    }
    return paths.back();
  };
  while (true) {
    scan.skip();
    if (scan.pos >= d.size()) break;
    auto c = d[scan.pos];
    if (std::isalpha((unsigned char)c)) {
      if (cmd == ' ' && paths.empty() && c != 'M' && c != 'm')
        throw parse_error("svg path data must start with a moveto");
      cmd = c;
      scan.pos++;
    } else if (cmd == ' ') {
      throw parse_error("svg path data: expected a command");
    }
    auto rel = std::islower((unsigned char)cmd) != 0;
    auto up  = (char)std::toupper((unsigned char)cmd);
    auto pt  = [&]() {
      auto x = scan.number(), y = scan.number();
      return rel ? current + vec2{x, y} : vec2{x, y};
    };
    auto control = std::optional<vec2>{};
    switch (up) {
      case 'M': {
        current = pt();
        paths.push_back({});
        start = current;
        // Further pairs are implicit line-tos.
        cmd = rel ? 'l' : 'L';
      } break;
      case 'L': {
        auto p = pt();
        open().segments.push_back({1, {current, p}});
        current = p;
      } break;
      case 'H': {
        auto x = scan.number();
        auto p = vec2{rel ? current.x + x : x, current.y};
        open().segments.push_back({1, {current, p}});
        current = p;
      } break;
      case 'V': {
        auto y = scan.number();
        auto p = vec2{current.x, rel ? current.y + y : y};
        open().segments.push_back({1, {current, p}});
        current = p;
      } break;
      case 'C': {
        auto a = pt(), b = pt(), p = pt();
        open().segments.push_back({3, {current, a, b, p}});
        control = b;
        current = p;
      } break;
      case 'S': {
        auto a = (last_control && (last_kind == 'C' || last_kind == 'S'))
                     ? current * 2 - *last_control
                     : current;
        auto b = pt(), p = pt();
        open().segments.push_back({3, {current, a, b, p}});
        control = b;
        current = p;
      } break;
      case 'Q': {
        auto a = pt(), p = pt();
        open().segments.push_back({2, {current, a, p}});
        control = a;
        current = p;
      } break;
      case 'T': {
        auto a = (last_control && (last_kind == 'Q' || last_kind == 'T'))
                     ? current * 2 - *last_control
                     : current;
        auto p = pt();
        open().segments.push_back({2, {current, a, p}});
        control = a;
        current = p;
      } break;
      case 'A': {
        scan.number();
        scan.number();
        scan.number();
        scan.flag();
        scan.flag();
        auto p = pt();
        warnings.push_back("elliptical arc skipped");
        current = p;
        paths.push_back({});
        start = current;
      } break;
      case 'Z': {
        if (!paths.empty() && !paths.back().segments.empty()) {
          auto& path = paths.back();
          if (current != start) path.segments.push_back({1, {current, start}});
          path.closed = true;
        }
        current = start;
        cmd     = ' ';
      } break;
      default:
        throw parse_error(string("svg path data: unknown command '") + cmd + "'");
    }
    last_control = control;
    last_kind    = up;
  }
  auto result = vector<svg_subpath>{};
  for (auto& p : paths)
    if (!p.segments.empty()) result.push_back(std::move(p));
  return result;
}

// Extracts the path elements of an SVG document. Other drawing elements,
// gradients, text and transforms are reported as warnings.
inline svg_drawing parse_svg(const string& text) {
  auto drawing = svg_drawing{};
  if (text.find("<svg") == string::npos)
    throw parse_error("not an svg document");
  auto tag = std::regex{R"(<\s*([a-zA-Z][\w:-]*)([^>]*)>)"};
  auto dre = std::regex{R"re((?:^|\s)d\s*=\s*("([^"]*)"|'([^']*)'))re"};
  for (auto it = std::sregex_iterator(text.begin(), text.end(), tag);
       it != std::sregex_iterator(); ++it) {
    auto name  = (*it)[1].str();
    auto attrs = (*it)[2].str();
    if (name == "path") {
      auto m = std::smatch{};
      if (!std::regex_search(attrs, m, dre)) {
        drawing.warnings.push_back("path element without d attribute skipped");
        continue;
      }
      auto d = m[2].matched ? m[2].str() : m[3].str();
      if (attrs.find("transform") != string::npos)
        drawing.warnings.push_back("path transform attribute ignored");
      for (auto& p : parse_path_data(d, drawing.warnings))
        drawing.paths.push_back(std::move(p));
    } else if (name == "text" || name == "tspan" || name == "textPath") {
      drawing.warnings.push_back("text element skipped");
    } else if (name == "linearGradient" || name == "radialGradient") {
      drawing.warnings.push_back("gradient skipped");
    } else if (name == "rect" || name == "circle" || name == "ellipse" ||
               name == "line" || name == "polyline" || name == "polygon" ||
               name == "image" || name == "use") {
      drawing.warnings.push_back(name + " element skipped");
    } else if (name == "g" && attrs.find("transform") != string::npos) {
      drawing.warnings.push_back("group transform ignored");
    }
  }
  return drawing;
}

// -----------------------------------------------------------------------------
// IMPORT
// -----------------------------------------------------------------------------

struct svg_placement {
  mesh_point center   = {};
  double     scale    = 0.25;  // drawing diagonal as a fraction of bbox_diag
  double     rotation = 0;     // radians
};

struct svg_import_result {
  vector<spline> splines  = {};
  vector<string> warnings = {};
};

inline svg_import_result svg_import(const triangle_mesh& mesh,
    const dual_graph& graph, const svg_drawing& drawing,
    const svg_placement& placement, spline_scheme scheme = {},
    const trace_mode& mode = {}) {
  if (!(placement.scale > 0))
    throw invalid_argument_error("svg scale must be positive");
  auto result     = svg_import_result{};
  result.warnings = drawing.warnings;
  auto center     = checked_point(mesh, placement.center);

  // Drawing center and scale from the bounding box of all control points.
  auto lo = vec2{INFINITY, INFINITY}, hi = vec2{-INFINITY, -INFINITY};
  for (auto& path : drawing.paths)
    for (auto& segment : path.segments)
      for (auto& p : segment.points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
      }
  if (drawing.paths.empty()) {
    result.warnings.push_back("no path data found");
    return result;
  }
  auto mid  = (lo + hi) / 2;
  auto diag = distance(lo, hi);
  auto size = placement.scale * mesh.bbox_diag;
  auto unit = diag > 0 ? size / diag : 1.0;

  // Exponential map of a drawing point, shared between coincident points.
  auto cache = std::map<std::pair<double, double>, mesh_point>{};
  auto place = [&](vec2 p) {
    auto key = std::pair{p.x, p.y};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto v = rotate(vec2{p.x - mid.x, mid.y - p.y} * unit, placement.rotation);
    auto q = exp_map(mesh, center, {angle_of(v), length(v)});
    return cache[key] = q;
  };

  for (auto& path : drawing.paths) {
    auto s   = spline{};
    s.scheme = scheme;
    s.mode   = mode;
    for (auto& segment : path.segments) {
      auto& p = segment.points;
      if (segment.degree == 2) {
        auto quad = make_polygon(mesh, graph, {place(p[0]), place(p[1]), place(p[2])});
        s.segments.push_back(degree_elevate(mesh, graph, quad));
        continue;
      }
      auto cubic = segment.degree == 3
                       ? p
                       : vector<vec2>{p[0], lerp(p[0], p[1], 1.0 / 3),
                             lerp(p[0], p[1], 2.0 / 3), p[1]};
      auto points = vector<mesh_point>{};
      for (auto& q : cubic) points.push_back(place(q));
      s.segments.push_back(make_polygon(mesh, graph, points));
    }

    // Anchors whose planar handles are collinear and opposed are smooth.
    auto n       = (int)path.segments.size();
    s.continuity = vector<anchor_kind>(n + 1, anchor_kind::corner);
    auto planar  = [&](int i) {
      auto& seg = path.segments[i];
      auto  c   = seg.degree == 1 ? vector<vec2>{seg.points[0], seg.points[1]}
                                  : seg.points;
      auto out = vec2{}, in = vec2{};
      for (auto j = 1; j < (int)c.size() && length(out) == 0; j++)
        out = c[j] - c[0];
      for (auto j = (int)c.size() - 2; j >= 0 && length(in) == 0; j--)
        in = c.back() - c[j];
      return std::pair{in, out};
    };
    auto smooth_join = [&](int a, int b) {
      auto in = planar(a).first, out = planar(b).second;
      return length(in) > 0 && length(out) > 0 && angle_between(in, out) < 1e-6;
    };
    for (auto a = 1; a < n; a++)
      if (smooth_join(a - 1, a)) s.continuity[a] = anchor_kind::smooth;
    if (path.closed && n >= 2 && smooth_join(n - 1, 0))
      s.continuity[0] = s.continuity[n] = anchor_kind::smooth;

    // Mirror handles exactly at smooth anchors.
    for (auto a = 0; a <= n; a++)
      if (s.continuity[a] == anchor_kind::smooth)
        s = set_continuity(mesh, graph, std::move(s), a, anchor_kind::smooth);
    result.splines.push_back(std::move(s));
  }
  return result;
}

inline svg_import_result svg_import(const triangle_mesh& mesh,
    const dual_graph& graph, const string& text, const svg_placement& placement,
    spline_scheme scheme = {}, const trace_mode& mode = {}) {
  return svg_import(mesh, graph, parse_svg(text), placement, scheme, mode);
}

}  // namespace bsurf

#endif
