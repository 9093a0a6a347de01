#include "jstat/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "jstat/rng.hpp"
#include "json.hpp"

namespace jstat {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || s.empty()) {
    throw FormatError("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

json point_json(const Point& p, int dim) {
  json a = json::array();
  for (int k = 0; k < dim; ++k) a.push_back(p[k]);
  return a;
}

Point point_from_json(const json& a, int dim) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim) {
    throw FormatError("window corner must be an array of " + std::to_string(dim) + " numbers");
  }
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) p[k] = a.at(k).get<double>();
  return p;
}

json window_json(const Window& w) {
  const int dim = w.dimension();
  json j;
  switch (w.kind()) {
    case WindowKind::rect2d:
    case WindowKind::box3d: {
      const auto& c = w.components().front();
      j["kind"] = w.kind() == WindowKind::rect2d ? "rect2d" : "box3d";
      j["lo"] = point_json(c.lo, dim);
      j["hi"] = point_json(c.hi, dim);
      break;
    }
    case WindowKind::rect_union2d: {
      j["kind"] = "rect-union2d";
      json rects = json::array();
      for (const auto& c : w.components()) {
        rects.push_back({{"lo", point_json(c.lo, 2)}, {"hi", point_json(c.hi, 2)}});
      }
      j["rects"] = rects;
      break;
    }
  }
  return j;
}

Window window_from(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw FormatError("window JSON needs a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "rect2d") {
    const auto lo = point_from_json(j.at("lo"), 2);
    const auto hi = point_from_json(j.at("hi"), 2);
    return Window::rect(lo[0], lo[1], hi[0], hi[1]);
  }
  if (kind == "box3d") return Window::box(point_from_json(j.at("lo"), 3), point_from_json(j.at("hi"), 3));
  if (kind == "rect-union2d") {
    std::vector<Box> rects;
    for (const auto& r : j.at("rects")) {
      rects.push_back({point_from_json(r.at("lo"), 2), point_from_json(r.at("hi"), 2)});
    }
    return Window::rect_union(std::move(rects));
  }
  throw FormatError("unknown window kind '" + kind + "'");
}

template <typename Fn>
auto json_guard(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_cell(std::ostream& out, const FunctionEstimate& f, std::size_t i) {
  out << ',';
  if (f.defined[i]) out << format_double(f.values[i]);
}

std::string_view transform_name(Transform t) { return t == Transform::sqrt ? "sqrt" : "raw"; }

std::string estimator_column(Estimator e) { return "J_" + std::string(short_name(e)); }

}  // namespace

std::string window_to_json(const Window& w) { return window_json(w).dump(); }

Window window_from_json(std::string_view text) {
  return json_guard([&] { return window_from(json::parse(text)); });
}

Window parse_window_spec(std::string_view spec) {
  spec = trim(spec);
  if (spec.empty()) throw FormatError("empty window spec");
  if (spec.front() == '{') return window_from_json(spec);
  if (spec == "unit-square") return Window::unit_square();
  if (spec == "unit-cube") return Window::unit_cube();
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw FormatError("unknown window spec '" + std::string(spec) + "'");
  const auto name = spec.substr(0, colon);
  std::vector<double> args;
  for (auto part : split(spec.substr(colon + 1), ',')) args.push_back(parse_number(part, "window size"));
  auto need = [&](std::size_t n) {
    if (args.size() != n) {
      throw FormatError("window spec '" + std::string(name) + "' takes " + std::to_string(n) + " values");
    }
  };
  if (name == "rect") {
    need(2);
    return Window::rect(0.0, 0.0, args[0], args[1]);
  }
  if (name == "box") {
    need(3);
    return Window::box({0.0, 0.0, 0.0}, {args[0], args[1], args[2]});
  }
  if (name == "two-rect") {
    need(3);
    return Window::stacked_pair(args[0], args[1], args[2]);
  }
  throw FormatError("unknown window spec '" + std::string(spec) + "'");
}

std::string config_hash(const Window& w, double intensity) {
  json j{{"window", window_json(w)}, {"intensity", intensity}};
  return hex64(fnv1a(j.dump()));
}

void write_pattern_csv(std::ostream& out, const PointPattern& p) {
  const int dim = p.dimension();
  out << (dim == 3 ? "x,y,z\n" : "x,y\n");
  for (const auto& pt : p.points()) {
    out << format_double(pt[0]) << ',' << format_double(pt[1]);
    if (dim == 3) out << ',' << format_double(pt[2]);
    out << '\n';
  }
}

PointPattern read_pattern_csv(std::istream& in, const Window& w) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("pattern CSV is empty");
  const auto header = trim(line);
  int dim = 0;
  if (header == "x,y") dim = 2;
  else if (header == "x,y,z") dim = 3;
  else throw FormatError("pattern CSV header must be 'x,y' or 'x,y,z'");
  if (dim != w.dimension()) throw FormatError("pattern dimension does not match the window");

  std::vector<Point> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto cells = split(row, ',');
    if (static_cast<int>(cells.size()) != dim) {
      throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) + " values");
    }
    Point p{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) p[k] = parse_number(cells[k], "coordinate on line " + std::to_string(lineno));
    pts.push_back(p);
  }
  try {
    return PointPattern(w, std::move(pts));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

PointPattern read_pattern_csv(const std::filesystem::path& path, const Window& w) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_pattern_csv(in, w);
}

void write_estimate_csv(std::ostream& out, const EstimateTable& t) {
  out << kEstimateCsvHeader << '\n';
  for (std::size_t i = 0; i < t.rgrid.size(); ++i) {
    out << format_double(t.rgrid[i]);
    for (const auto* f : {&t.F_uncorr, &t.G_uncorr, &t.J_W, &t.F_rs, &t.G_rs, &t.J_rs, &t.F_km,
                          &t.G_km, &t.J_km}) {
      write_cell(out, *f, i);
    }
    out << '\n';
  }
}

void write_envelope_csv(std::ostream& out, const Envelope& env) {
  out << "r,obs,min,max\n";
  for (std::size_t i = 0; i < env.lo.size(); ++i) {
    out << format_double(env.observed.rgrid[i]);
    write_cell(out, env.observed, i);
    out << ',';
    if (env.defined[i]) out << format_double(env.lo[i]);
    out << ',';
    if (env.defined[i]) out << format_double(env.hi[i]);
    out << '\n';
  }
}

std::string null_config_hash(const NullDistribution& null) {
  return config_hash(null.window, null.intensity);
}

std::string null_to_json(const NullDistribution& n) {
  json j;
  j["format"] = "jstat-null";
  j["version"] = 1;
  j["estimator"] = estimator_column(n.estimator);
  j["window"] = window_json(n.window);
  j["intensity"] = n.intensity;
  j["grid_target"] = n.grid_target;
  j["rgrid"] = std::vector<double>(n.rgrid.values().begin(), n.rgrid.values().end());
  j["mean"] = n.mean;
  j["sd"] = n.sd;
  j["r0"] = n.r0;
  j["sigma_floor"] = n.sigma_floor;
  j["transform"] = transform_name(n.transform);
  j["tau"] = n.tau;
  j["quantiles"] = {{"q025", n.quantiles.q025}, {"q05", n.quantiles.q05},
                    {"q95", n.quantiles.q95}, {"q975", n.quantiles.q975}};
  j["reps"] = n.reps;
  j["seed"] = n.seed;
  j["truncations"] = n.truncations;
  j["rng_stream_version"] = kRngStreamVersion;
  j["config_hash"] = null_config_hash(n);
  return j.dump(1);
}

NullDistribution null_from_json(std::string_view text) {
  return json_guard([&] {
    const auto j = json::parse(text);
    if (j.value("format", "") != "jstat-null") throw FormatError("not a jstat null distribution");
    NullDistribution n;
    n.estimator = parse_estimator(j.at("estimator").get<std::string>());
    n.window = window_from(j.at("window"));
    n.intensity = j.at("intensity").get<double>();
    n.grid_target = j.at("grid_target").get<std::size_t>();
    n.rgrid = RGrid(j.at("rgrid").get<std::vector<double>>());
    n.mean = j.at("mean").get<std::vector<double>>();
    n.sd = j.at("sd").get<std::vector<double>>();
    if (n.mean.size() != n.rgrid.size() || n.sd.size() != n.rgrid.size()) {
      throw FormatError("null mean/sd length differs from the r grid");
    }
    n.r0 = j.at("r0").get<double>();
    n.sigma_floor = j.at("sigma_floor").get<double>();
    n.transform = j.at("transform").get<std::string>() == "sqrt" ? Transform::sqrt : Transform::raw;
    n.tau = j.at("tau").get<std::vector<double>>();
    const auto& q = j.at("quantiles");
    n.quantiles = {q.at("q025").get<double>(), q.at("q05").get<double>(), q.at("q95").get<double>(),
                   q.at("q975").get<double>()};
    n.reps = j.at("reps").get<std::size_t>();
    n.seed = j.at("seed").get<std::uint64_t>();
    n.truncations = j.value("truncations", std::size_t{0});
    if (j.contains("config_hash") && j.at("config_hash").get<std::string>() != null_config_hash(n)) {
      throw FormatError("null distribution config_hash does not match its contents");
    }
    return n;
  });
}

void write_power_csv(std::ostream& out, std::span<const PowerCell> cells) {
  out << kPowerCsvHeader << '\n';
  for (const auto& c : cells) {
    for (const auto& p : c.power) {
      out << format_double(c.param1) << ',' << format_double(c.param2) << ',' << c.reps << ','
          << format_double(p.rejections.two_sided) << ',' << format_double(p.rejections.clustering)
          << ',' << format_double(p.rejections.regularity) << ',' << estimator_column(p.estimator)
          << '\n';
    }
  }
}

}  // namespace jstat
