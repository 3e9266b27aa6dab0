//
// Command line front end: trace, insert, evaluate and validate curves, run
// seeded benchmarks, import SVG drawings and serve the session protocol.
//
// Exit codes: 0 ok, 2 input error, 3 validation failure.
//

#include <CLI11.hpp>
#include <httplib.h>

#include <bsurf/session.hpp>

#include <fstream>
#include <iostream>

using namespace bsurf;

// -----------------------------------------------------------------------------
// FILES
// -----------------------------------------------------------------------------

static string read_text(const string& filename) {
  auto stream = std::ifstream{filename};
  if (!stream) throw parse_error("cannot open " + filename);
  auto buffer = std::stringstream{};
  buffer << stream.rdbuf();
  return buffer.str();
}

static json read_json(const string& filename) {
  try {
    return json::parse(read_text(filename));
  } catch (const json::exception& e) {
    throw parse_error(filename + ": " + e.what());
  }
}

static bool ends_with(const string& s, const string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Writes to a file, or to stdout when the name is empty or "-".
static void write_text(const string& filename, const string& text) {
  if (filename.empty() || filename == "-") {
    std::cout << text;
    return;
  }
  auto stream = std::ofstream{filename};
  if (!stream) throw parse_error("cannot write " + filename);
  stream << text;
}

static mesh_point parse_center(const string& text) {
  auto face = 0;
  auto a = 0.0, b = 0.0;
  if (std::sscanf(text.c_str(), "%d:%lf:%lf", &face, &a, &b) != 3)
    throw parse_error("center must be FACE:ALPHA:BETA");
  return {face, {a, b}};
}

struct loaded_mesh {
  triangle_mesh mesh;
  dual_graph    graph;
};

static loaded_mesh load(const string& spec) {
  auto m  = loaded_mesh{load_mesh_spec(spec), {}};
  m.graph = build_dual_graph(m.mesh);
  return m;
}

// -----------------------------------------------------------------------------
// TRACE OPTIONS
// -----------------------------------------------------------------------------

struct trace_flags {
  string scheme    = {};
  string mode      = {};
  int    depth     = -1;
  double theta     = -1;
  int    max_depth = -1;
};

static void add_trace_flags(CLI::App* cmd, trace_flags& flags) {
  cmd->add_option("--scheme", flags.scheme, "rdc or olr")
      ->check(CLI::IsMember({"rdc", "olr"}));
  cmd->add_option("--mode", flags.mode, "uniform or adaptive")
      ->check(CLI::IsMember({"uniform", "adaptive"}));
  cmd->add_option("--depth", flags.depth, "uniform subdivision depth")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--theta", flags.theta, "adaptive angle threshold, degrees")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", flags.max_depth, "adaptive depth limit")
      ->check(CLI::NonNegativeNumber);
}

// Command line flags override the settings stored in the spline file.
static void apply_flags(spline& s, const trace_flags& flags) {
  if (!flags.scheme.empty()) s.scheme = parse_scheme(flags.scheme);
  if (!flags.mode.empty()) s.mode.kind = parse_trace_kind(flags.mode);
  if (flags.depth >= 0) s.mode.depth = flags.depth;
  if (flags.theta > 0) s.mode.theta = flags.theta;
  if (flags.max_depth >= 0) s.mode.max_depth = flags.max_depth;
}

// A traced file holds one curve, or {"curves": [...]} for several segments.
static json curves_to_json(const triangle_mesh& mesh, const vector<traced_curve>& curves) {
  if (curves.size() == 1) return curve_to_json(mesh, curves.front());
  auto list  = json::array();
  auto total = 0;
  for (auto& c : curves) {
    list.push_back(curve_to_json(mesh, c));
    total += (int)c.segments.size();
  }
  return {{"curves", list}, {"segment_count", total}};
}

static vector<traced_curve> curves_from_json(const triangle_mesh& mesh, const json& js) {
  auto curves = vector<traced_curve>{};
  if (js.contains("curves")) {
    for (auto& c : js["curves"]) curves.push_back(curve_from_json(mesh, c));
  } else {
    curves.push_back(curve_from_json(mesh, js));
  }
  return curves;
}

// -----------------------------------------------------------------------------
// COMMANDS
// -----------------------------------------------------------------------------

static int run_trace(const string& mesh_spec, const string& spline_file,
    const trace_flags& flags, const string& out) {
  auto m = load(mesh_spec);
  auto s = spline_from_json(m.mesh, m.graph, read_json(spline_file));
  apply_flags(s, flags);
  auto curves = trace_spline(m.mesh, m.graph, s);
  auto total  = 0;
  for (auto& c : curves) total += (int)c.segments.size();
  if (ends_with(out, ".obj")) {
    auto lines = vector<vector<vec3>>{};
    for (auto& c : curves) lines.push_back(flat_polyline(m.mesh, c));
    auto stream = std::ostringstream{};
    save_obj_polylines(stream, lines);
    write_text(out, stream.str());
  } else {
    write_text(out, curves_to_json(m.mesh, curves).dump(2) + "\n");
  }
  if (!out.empty() && out != "-")
    std::cout << "segments: " << total << "\n";
  return 0;
}

static int run_insert(const string& mesh_spec, const string& spline_file,
    double t, int segment, const trace_flags& flags, const string& out) {
  if (!(t > 0 && t < 1)) throw invalid_argument_error("t must be in (0, 1)");
  auto m = load(mesh_spec);
  auto s = spline_from_json(m.mesh, m.graph, read_json(spline_file));
  apply_flags(s, flags);
  s = insert_anchor(m.mesh, m.graph, std::move(s), segment, t);
  write_text(out, spline_to_json(s).dump(2) + "\n");
  return 0;
}

static int run_eval(const string& mesh_spec, const string& spline_file,
    const vector<double>& ts, int segment, const trace_flags& flags) {
  auto m = load(mesh_spec);
  auto s = spline_from_json(m.mesh, m.graph, read_json(spline_file));
  apply_flags(s, flags);
  if (segment < 0 || segment >= (int)s.segments.size())
    throw invalid_argument_error("segment index out of range");
  auto values = json::array();
  for (auto t : ts) {
    auto p = eval_curve(m.mesh, m.graph, s.scheme, s.segments[segment], t, s.mode);
    values.push_back({{"t", t}, {"point", point_to_json(p)},
        {"position", vec3_to_json(embed(m.mesh, p))}});
  }
  std::cout << json{{"values", values}}.dump(2) << "\n";
  return 0;
}

static int run_validate(
    const string& mesh_spec, const string& curve_file, double theta) {
  auto m      = load(mesh_spec);
  auto curves = curves_from_json(m.mesh, read_json(curve_file));
  auto pass   = true;
  auto list   = json::array();
  for (auto& c : curves) {
    auto report = validate_curve(m.mesh, m.graph, c, theta);
    pass        = pass && report.pass;
    auto entry  = report_to_json(report);
    entry["segments"] = c.segments.size();
    list.push_back(entry);
  }
  std::cout << json{{"theta", theta}, {"pass", pass}, {"curves", list}}.dump(2) << "\n";
  return pass ? 0 : 3;
}

static int run_bench_command(const string& mesh_spec, bench_options options,
    const string& schemes, const string& modes, const trace_flags& flags,
    const string& report) {
  auto m          = load(mesh_spec);
  options.mesh_id = mesh_spec;
  options.schemes.clear();
  if (schemes == "rdc" || schemes == "all") options.schemes.push_back(spline_scheme::rdc);
  if (schemes == "olr" || schemes == "all") options.schemes.push_back(spline_scheme::olr);
  auto mode = trace_mode{};
  if (flags.depth >= 0) mode.depth = flags.depth;
  if (flags.theta > 0) mode.theta = flags.theta;
  if (flags.max_depth >= 0) mode.max_depth = flags.max_depth;
  options.theta = mode.theta;
  options.modes.clear();
  for (auto kind : {trace_kind::uniform, trace_kind::adaptive}) {
    if (modes != "all" && modes != trace_kind_name(kind)) continue;
    mode.kind = kind;
    options.modes.push_back(mode);
  }
  auto lines = run_bench(m.mesh, m.graph, options);
  auto text  = string{};
  for (auto& line : lines) text += line.dump() + "\n";
  if (!report.empty()) write_text(report, text);
  auto summary = bench_summary(lines);
  summary["mesh"]      = mesh_spec;
  summary["triangles"] = m.mesh.triangles.size();
  summary["trials"]    = options.trials;
  summary["seed"]      = options.seed;
  std::cout << summary.dump(2) << "\n";
  return summary["failed"].get<int>() == 0 ? 0 : 3;
}

static int run_svg(const string& mesh_spec, const string& svg_file,
    const string& center, double scale, double rotation, const trace_flags& flags,
    const string& out) {
  auto m         = load(mesh_spec);
  auto placement = svg_placement{parse_center(center), scale, deg2rad(rotation)};
  auto result    = svg_import(m.mesh, m.graph, read_text(svg_file), placement);
  auto list      = json::array();
  for (auto& s : result.splines) {
    apply_flags(s, flags);
    list.push_back(spline_to_json(s));
  }
  for (auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  write_text(out, json{{"splines", list}, {"warnings", result.warnings}}.dump(2) + "\n");
  return 0;
}

static int run_stats(const string& mesh_spec) {
  auto m = load(mesh_spec);
  std::cout << mesh_stats(m.mesh, m.graph).dump(2) << "\n";
  return 0;
}

static int run_serve(bool use_stdio, const string& host, int port) {
  auto state = session{};
  if (use_stdio) {
    for (string line; std::getline(std::cin, line);) {
      if (line.find_first_not_of(" \t\r") == string::npos) continue;
      std::cout << session_handle_line(state, line) << std::endl;
    }
    return 0;
  }
  auto server = httplib::Server{};
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
      {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options("/session", [](const httplib::Request&, httplib::Response&) {});
  server.Post("/session", [&](const httplib::Request& req, httplib::Response& res) {
    res.set_content(session_handle_line(state, req.body), "application/json");
  });
  server.Get("/version", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"v", protocol_version}}.dump(), "application/json");
  });
  std::cerr << "serving on http://" << host << ":" << port << "/session\n";
  if (!server.listen(host, port)) throw invalid_argument_error("cannot listen on port");
  return 0;
}

// -----------------------------------------------------------------------------
// MAIN
// -----------------------------------------------------------------------------

int main(int argc, char** argv) {
  auto app = CLI::App{"Bezier splines on triangle meshes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bsurf protocol " + std::to_string(protocol_version));

  auto mesh_spec = string{}, input = string{}, out = string{};
  auto flags     = trace_flags{};

  auto trace = app.add_subcommand("trace", "trace a spline file");
  trace->add_option("mesh", mesh_spec, "OBJ file or builtin:<shape>")->required();
  trace->add_option("spline", input, "spline JSON")->required();
  trace->add_option("--out", out, "output .json or .obj (default stdout)");
  add_trace_flags(trace, flags);

  auto t       = 0.5;
  auto segment = 0;
  auto insert  = app.add_subcommand("insert", "insert a point into a segment");
  insert->add_option("mesh", mesh_spec)->required();
  insert->add_option("spline", input)->required();
  insert->add_option("--t", t, "curve parameter in (0, 1)")->required();
  insert->add_option("--segment", segment, "segment index");
  insert->add_option("--out", out, "output spline JSON (default stdout)");
  add_trace_flags(insert, flags);

  auto ts   = vector<double>{};
  auto eval = app.add_subcommand("eval", "evaluate a segment at parameters");
  eval->add_option("mesh", mesh_spec)->required();
  eval->add_option("spline", input)->required();
  eval->add_option("--t", ts, "curve parameters in [0, 1]")->required();
  eval->add_option("--segment", segment, "segment index");
  add_trace_flags(eval, flags);

  auto theta    = 5.0;
  auto validate = app.add_subcommand("validate", "check a traced curve");
  validate->add_option("mesh", mesh_spec)->required();
  validate->add_option("curve", input, "traced curve JSON")->required();
  validate->add_option("--theta", theta, "angle threshold, degrees")
      ->check(CLI::PositiveNumber);

  auto options = bench_options{};
  auto schemes = string{"all"}, modes = string{"adaptive"}, report = string{};
  auto bench   = app.add_subcommand("bench", "seeded random trials");
  bench->add_option("mesh", mesh_spec)->required();
  bench->add_option("--trials", options.trials)->check(CLI::PositiveNumber);
  bench->add_option("--seed", options.seed);
  bench->add_option("--degree", options.degree)->check(CLI::Range(2, 3));
  bench->add_option("--threads", options.threads)->check(CLI::PositiveNumber);
  bench->add_option("--scheme", schemes)->check(CLI::IsMember({"rdc", "olr", "all"}));
  bench->add_option("--mode", modes)->check(CLI::IsMember({"uniform", "adaptive", "all"}));
  bench->add_option("--depth", flags.depth)->check(CLI::NonNegativeNumber);
  bench->add_option("--theta", flags.theta)->check(CLI::PositiveNumber);
  bench->add_option("--max-depth", flags.max_depth)->check(CLI::NonNegativeNumber);
  bench->add_option("--report", report, "JSON-lines report file");

  auto center   = string{};
  auto scale    = 0.25, rotation = 0.0;
  auto svg      = app.add_subcommand("svg", "import SVG path data onto the mesh");
  svg->add_option("mesh", mesh_spec)->required();
  svg->add_option("drawing", input, "SVG file")->required();
  svg->add_option("--center", center, "FACE:ALPHA:BETA")->required();
  svg->add_option("--scale", scale, "drawing diagonal over mesh diagonal")
      ->check(CLI::PositiveNumber);
  svg->add_option("--rotation", rotation, "degrees");
  svg->add_option("--out", out, "output JSON (default stdout)");
  add_trace_flags(svg, flags);

  auto stats = app.add_subcommand("stats", "mesh statistics");
  stats->add_option("mesh", mesh_spec)->required();

  auto use_stdio = false;
  auto host      = string{"127.0.0.1"};
  auto port      = 8080;
  auto serve     = app.add_subcommand("serve", "serve the session protocol");
  serve->add_flag("--stdio", use_stdio, "one JSON request per line on stdin");
  serve->add_option("--host", host);
  serve->add_option("--port", port)->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*trace) return run_trace(mesh_spec, input, flags, out);
    if (*insert) return run_insert(mesh_spec, input, t, segment, flags, out);
    if (*eval) return run_eval(mesh_spec, input, ts, segment, flags);
    if (*validate) return run_validate(mesh_spec, input, theta);
    if (*bench)
      return run_bench_command(mesh_spec, options, schemes, modes, flags, report);
    if (*svg) return run_svg(mesh_spec, input, center, scale, rotation, flags, out);
    if (*stats) return run_stats(mesh_spec);
    if (*serve) return run_serve(use_stdio, host, port);
  } catch (const std::exception& e) {
    std::cerr << "error (" << error_type(e) << "): " << e.what() << "\n";
    return 2;
  }
  return 0;
}
