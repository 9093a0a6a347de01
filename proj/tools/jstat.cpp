// jstat: command-line front end for simulating point patterns, estimating
// F/G/J summary functions and running Monte Carlo tests of complete spatial
// randomness.
//
// Exit codes: 0 success, 2 usage error, 3 data or configuration error.
// Test decisions are reported in output files, never through the exit code.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "jstat/estimate.hpp"
#include "jstat/geometry.hpp"
#include "jstat/inference.hpp"
#include "jstat/io.hpp"
#include "jstat/patterns.hpp"
#include "jstat/rng.hpp"
#include "jstat/simulate.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

/// Raised for bad flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  if (with_seed) {
    cmd->add_option("--seed", c.seed, "RNG seed (env JSTAT_SEED)")->envname("JSTAT_SEED");
  }
  cmd->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--out", c.out, "output file (default: stdout)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw jstat::FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Window from an inline spec, inline JSON, or a path to a JSON file.
jstat::Window resolve_window(const std::string& spec) {
  if (!spec.empty() && spec.front() != '{' && fs::is_regular_file(spec)) {
    return jstat::window_from_json(read_file(spec));
  }
  return jstat::parse_window_spec(spec);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw jstat::FormatError("cannot write " + path);
  out << content;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Records what produced an output so the run can be repeated exactly.
class Manifest {
 public:
  Manifest(std::string subcommand, std::vector<std::string> argv)
      : started_(std::chrono::steady_clock::now()) {
    doc_["tool"] = "jstat";
    doc_["version"] = kVersion;
    doc_["rng_stream_version"] = jstat::kRngStreamVersion;
    doc_["subcommand"] = std::move(subcommand);
    doc_["command_line"] = std::move(argv);
    doc_["started_at"] = utc_timestamp();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
  }

  json& config() { return doc_["config"]; }
  void seed(std::uint64_t s) { doc_["seed"] = s; }
  void input(const std::string& path) { doc_["inputs"].push_back(path); }
  void note(const std::string& key, json value) { doc_["notes"][key] = std::move(value); }

  /// Writes `<output>.manifest.json` next to the output; no-op for stdout.
  void write(const std::string& output) {
    if (output.empty()) return;
    doc_["outputs"].push_back(output);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started_;
    doc_["wall_clock_seconds"] = elapsed.count();
    write_output(output + ".manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point started_;
};

jstat::RGrid resolve_rgrid(std::optional<double> r_max, std::size_t r_count, double intensity,
                           const jstat::Window& w) {
  if (r_max) return jstat::RGrid::linear(*r_max, r_count);
  if (intensity > 0.0) return jstat::default_rgrid(intensity, w.dimension(), r_count);
  // Empty pattern: fall back to half the smallest side.
  double side = std::numeric_limits<double>::infinity();
  for (const auto& c : w.components()) {
    for (int k = 0; k < w.dimension(); ++k) side = std::min(side, c.hi[k] - c.lo[k]);
  }
  return jstat::RGrid::linear(0.5 * side, r_count);
}

/// Enum-valued flags: a bad value is a usage error, not a data error.
template <typename Parse>
auto parse_flag(Parse parse, const std::string& value) {
  try {
    return parse(value);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string estimator_name(jstat::Estimator e) {
  return "J_" + std::string(jstat::short_name(e));
}

json test_result_json(const jstat::TestResult& t, const jstat::NullDistribution& null) {
  return {{"estimator", estimator_name(t.estimator)},
          {"tau", t.tau},
          {"truncated", t.truncated},
          {"reject_two_sided", t.reject_two_sided},
          {"reject_cluster", t.reject_clustering},
          {"reject_regular", t.reject_regularity},
          {"quantiles",
           {{"q025", t.quantiles.q025},
            {"q05", t.quantiles.q05},
            {"q95", t.quantiles.q95},
            {"q975", t.quantiles.q975}}},
          {"r0", null.r0},
          {"null_reps", null.reps},
          {"null_config_hash", jstat::null_config_hash(null)}};
}

// --------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  Common common;
  std::string model;
  std::string window = "unit-square";
  std::string config;
  std::optional<double> lambda, lambda_p, intensity, kappa, mu, radius;
  std::optional<std::size_t> n;
  std::uint64_t replicate = 0;
};

jstat::SimConfig resolve_sim_config(const SimulateArgs& a, const CLI::App& cmd) {
  json cfg = json::object();
  if (!a.config.empty()) {
    cfg = json::parse(read_file(a.config));
    if (!cfg.is_object()) throw jstat::FormatError("simulate config must be a JSON object");
  }
  auto number = [&](const std::optional<double>& flag, const char* key) -> std::optional<double> {
    if (flag) return flag;
    if (cfg.contains(key)) return cfg.at(key).get<double>();
    return std::nullopt;
  };

  jstat::SimConfig sc;
  std::string model = a.model;
  if (model.empty() && cfg.contains("model")) model = cfg.at("model").get<std::string>();
  if (model.empty()) throw UsageError("--model is required");
  sc.model = parse_flag(jstat::parse_model, model);

  if (cmd.count("--window") == 0 && cfg.contains("window")) {
    sc.window = jstat::window_from_json(cfg.at("window").dump());
  } else {
    sc.window = resolve_window(a.window);
  }
  sc.seed = cmd.count("--seed") > 0 || !cfg.contains("seed") ? a.common.seed
                                                             : cfg.at("seed").get<std::uint64_t>();
  sc.replicate = a.replicate;

  const auto lambda = number(a.lambda, "lambda");
  const auto radius = number(a.radius, "R");
  const auto mu = number(a.mu, "mu");
  switch (sc.model) {
    case jstat::Model::poisson:
      if (!lambda) throw UsageError("poisson needs --lambda");
      sc.intensity = *lambda;
      break;
    case jstat::Model::binomial: {
      std::optional<std::size_t> n = a.n;
      if (!n && cfg.contains("n")) n = cfg.at("n").get<std::size_t>();
      if (!n) throw UsageError("binomial needs --n");
      sc.count = *n;
      break;
    }
    case jstat::Model::matern2: {
      if (!radius) throw UsageError("matern2 needs --R");
      sc.radius = *radius;
      const auto lambda_p = number(a.lambda_p, "lambda_p");
      const auto target = number(a.intensity, "intensity");
      if (lambda_p && target) throw UsageError("give either --lambda-p or --intensity, not both");
      if (lambda_p) sc.intensity = *lambda_p;
      else if (target) sc.intensity = jstat::matern2_primary_intensity(*target, *radius, sc.window.dimension());
      else throw UsageError("matern2 needs --lambda-p or --intensity");
      break;
    }
    case jstat::Model::matern_cluster: {
      if (!radius || !mu) throw UsageError("matern-cluster needs --R and --mu");
      sc.radius = *radius;
      sc.mu = *mu;
      const auto kappa = number(a.kappa, "kappa");
      if (kappa && lambda) throw UsageError("give either --kappa or --lambda, not both");
      if (kappa) sc.kappa = *kappa;
      else if (lambda) sc.kappa = *lambda / *mu;
      else throw UsageError("matern-cluster needs --kappa or --lambda");
      break;
    }
  }
  sc.validate();
  return sc;
}

json sim_config_json(const jstat::SimConfig& sc) {
  json j{{"model", jstat::to_string(sc.model)},
         {"window", json::parse(jstat::window_to_json(sc.window))},
         {"seed", sc.seed},
         {"replicate", sc.replicate}};
  switch (sc.model) {
    case jstat::Model::poisson: j["lambda"] = sc.intensity; break;
    case jstat::Model::binomial: j["n"] = sc.count; break;
    case jstat::Model::matern2:
      j["lambda_p"] = sc.intensity;
      j["R"] = sc.radius;
      break;
    case jstat::Model::matern_cluster:
      j["kappa"] = sc.kappa;
      j["mu"] = sc.mu;
      j["R"] = sc.radius;
      break;
  }
  return j;
}

void run_simulate(const SimulateArgs& a, const CLI::App& cmd, Manifest& m) {
  const auto sc = resolve_sim_config(a, cmd);
  m.config() = sim_config_json(sc);
  m.seed(sc.seed);
  if (!a.config.empty()) m.input(a.config);
  std::ostringstream csv;
  jstat::write_pattern_csv(csv, jstat::simulate(sc));
  write_output(a.common.out, csv.str());
  m.write(a.common.out);
}

// --------------------------------------------------------------------------
// estimate

struct GridArgs {
  std::optional<double> r_max;
  std::size_t r_count = jstat::kDefaultRGridCount;
  std::size_t grid_target = 0;
};

void add_grid_options(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--r-max", g.r_max, "largest r (default: Poisson F 0.99 quantile)");
  cmd->add_option("--r-count", g.r_count, "number of r values")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--grid-target", g.grid_target, "evaluation grid size (0 = default)");
}

json grid_json(const jstat::RGrid& r, std::size_t grid_target) {
  return {{"r_max", r.back()}, {"r_count", r.size()}, {"grid_target", grid_target}};
}

struct EstimateArgs {
  Common common;
  std::string pattern;
  std::string window = "unit-square";
  GridArgs grid;
};

void run_estimate(const EstimateArgs& a, Manifest& m) {
  const auto w = resolve_window(a.window);
  const auto p = jstat::read_pattern_csv(fs::path(a.pattern), w);
  const auto target = a.grid.grid_target > 0 ? a.grid.grid_target : jstat::default_grid_target(w);
  const auto rgrid = resolve_rgrid(a.grid.r_max, a.grid.r_count, p.intensity(), w);
  if (p.size() < 2) {
    std::cerr << "warning: pattern has " << p.size()
              << " point(s); G and J columns are masked\n";
  }
  const auto table = jstat::estimate_all(p, jstat::make_grid(w, target), rgrid);
  std::ostringstream csv;
  jstat::write_estimate_csv(csv, table);
  write_output(a.common.out, csv.str());

  m.input(a.pattern);
  m.config() = {{"window", json::parse(jstat::window_to_json(w))}, {"n", p.size()}};
  m.config().update(grid_json(rgrid, target));
  if (table.bounds) m.note("domain", {{"r_Gmax", table.bounds->r_gmax}, {"r_Fmax", table.bounds->r_fmax}});
  m.write(a.common.out);
}

// --------------------------------------------------------------------------
// build-null / test-csr

struct NullArgs {
  std::optional<double> lambda;
  std::size_t reps = jstat::kDefaultNullReps;
  std::vector<std::string> estimators;
  std::optional<double> r0;
  bool sqrt_transform = false;
  GridArgs grid;
};

void add_null_options(CLI::App* cmd, NullArgs& n, const std::string& prefix) {
  cmd->add_option("--lambda", n.lambda, "Poisson intensity of the null");
  cmd->add_option("--" + prefix + "reps", n.reps, "null replicates")->check(CLI::PositiveNumber);
  cmd->add_option("--estimator", n.estimators, "J variant: W, rs or km (repeatable)");
  cmd->add_option("--r0", n.r0, "upper integration limit (default: Poisson F 0.9 quantile)");
  cmd->add_flag("--sqrt-transform", n.sqrt_transform, "compute sigma and tau on sqrt(J)");
  add_grid_options(cmd, n.grid);
}

std::vector<jstat::NullDistribution> build_nulls_from(const NullArgs& n, const jstat::Window& w,
                                                      std::uint64_t seed, unsigned jobs,
                                                      std::vector<jstat::Estimator> fallback,
                                                      json& config) {
  if (!n.lambda) throw UsageError("building a null needs --lambda");
  std::vector<jstat::Estimator> estimators;
  for (const auto& e : n.estimators) estimators.push_back(parse_flag(jstat::parse_estimator, e));
  if (estimators.empty()) estimators = std::move(fallback);

  jstat::SimConfig poisson;
  poisson.model = jstat::Model::poisson;
  poisson.window = w;
  poisson.intensity = *n.lambda;
  poisson.seed = seed;
  const auto rgrid = resolve_rgrid(n.grid.r_max, n.grid.r_count, *n.lambda, w);
  jstat::NullOptions opts;
  opts.grid_target = n.grid.grid_target;
  opts.r0 = n.r0;
  opts.transform = n.sqrt_transform ? jstat::Transform::sqrt : jstat::Transform::raw;
  opts.jobs = jobs;

  config["null"] = {{"lambda", *n.lambda}, {"reps", n.reps}, {"seed", seed},
                    {"transform", n.sqrt_transform ? "sqrt" : "raw"}};
  config["null"].update(grid_json(rgrid, n.grid.grid_target));
  if (n.r0) config["null"]["r0"] = *n.r0;
  return jstat::build_nulls(poisson, estimators, n.reps, rgrid, opts);
}

struct BuildNullArgs {
  Common common;
  std::string window = "unit-square";
  NullArgs null;
};

void run_build_null(const BuildNullArgs& a, Manifest& m) {
  if (a.common.out.empty()) throw UsageError("build-null needs --out");
  if (a.null.estimators.size() > 1) throw UsageError("build-null writes one estimator per file");
  const auto w = resolve_window(a.window);
  json config{{"window", json::parse(jstat::window_to_json(w))}};
  auto nulls = build_nulls_from(a.null, w, a.common.seed, a.common.jobs,
                                {jstat::Estimator::uncorrected}, config);
  config["estimator"] = estimator_name(nulls.front().estimator);
  write_output(a.common.out, jstat::null_to_json(nulls.front()) + "\n");
  m.config() = config;
  m.seed(a.common.seed);
  m.note("truncations", nulls.front().truncations);
  m.write(a.common.out);
}

struct TestArgs {
  Common common;
  std::string null_path;
  bool build_null = false;
  std::string pattern;
  std::string window;
  NullArgs null;
};

void run_test(const TestArgs& a, const CLI::App& cmd, Manifest& m) {
  if (a.null_path.empty() == !a.build_null) throw UsageError("give exactly one of --null or --build-null");
  json config = json::object();
  jstat::NullDistribution null;
  if (!a.null_path.empty()) {
    null = jstat::null_from_json(read_file(a.null_path));
    m.input(a.null_path);
  } else {
    const auto w = resolve_window(a.window.empty() ? "unit-square" : a.window);
    null = std::move(build_nulls_from(a.null, w, a.common.seed, a.common.jobs,
                                      {jstat::Estimator::uncorrected}, config)
                         .front());
  }
  const auto w = a.window.empty() ? null.window : resolve_window(a.window);
  const double lambda = cmd.count("--lambda") > 0 ? *a.null.lambda : null.intensity;
  if (jstat::config_hash(w, lambda) != jstat::null_config_hash(null)) {
    throw jstat::FormatError("config hash mismatch: pattern window/intensity differ from the null's");
  }
  const auto p = jstat::read_pattern_csv(fs::path(a.pattern), w);
  m.input(a.pattern);
  const auto result = jstat::test_csr(p, null);

  config["window"] = json::parse(jstat::window_to_json(w));
  config["estimator"] = estimator_name(null.estimator);
  m.config() = config;
  m.seed(a.common.seed);
  auto out = test_result_json(result, null);
  out["n"] = p.size();
  write_output(a.common.out, out.dump(2) + "\n");
  m.write(a.common.out);
}

// --------------------------------------------------------------------------
// envelope

struct EnvelopeArgs {
  Common common;
  std::string pattern;
  std::string window = "unit-square";
  std::size_t sims = 99;
  std::string estimator = "W";
  GridArgs grid;
};

void run_envelope(const EnvelopeArgs& a, Manifest& m) {
  const auto w = resolve_window(a.window);
  const auto p = jstat::read_pattern_csv(fs::path(a.pattern), w);
  const auto e = parse_flag(jstat::parse_estimator, a.estimator);
  const auto rgrid = resolve_rgrid(a.grid.r_max, a.grid.r_count, p.intensity(), w);
  jstat::EnvelopeOptions opts;
  opts.grid_target = a.grid.grid_target;
  opts.jobs = a.common.jobs;
  const auto env = jstat::envelope(p, e, a.sims, rgrid, a.common.seed, opts);
  std::ostringstream csv;
  jstat::write_envelope_csv(csv, env);
  write_output(a.common.out, csv.str());

  m.input(a.pattern);
  m.config() = {{"window", json::parse(jstat::window_to_json(w))},
                {"estimator", estimator_name(e)},
                {"sims", a.sims},
                {"n", p.size()}};
  m.config().update(grid_json(rgrid, a.grid.grid_target));
  m.seed(a.common.seed);
  m.note("exits_below", jstat::exits_below(env));
  m.write(a.common.out);
}

// --------------------------------------------------------------------------
// power

struct PowerArgs {
  Common common;
  std::string model;
  std::string window = "unit-square";
  std::vector<double> radii;
  std::vector<double> mus;
  double lambda = 100.0;
  std::optional<double> lambda_p;
  std::optional<double> intensity;
  std::size_t reps = 1000;
  std::vector<std::string> null_paths;
  bool build_null = false;
  bool match_intensity = false;
  NullArgs null;
};

std::vector<jstat::PowerCellSpec> power_cells(const PowerArgs& a, const jstat::Window& w) {
  std::vector<jstat::PowerCellSpec> cells;
  const auto model = parse_flag(jstat::parse_model, a.model);
  jstat::SimConfig base;
  base.model = model;
  base.window = w;
  switch (model) {
    case jstat::Model::poisson: {
      base.intensity = a.lambda;
      cells.push_back({base, a.lambda, 0.0});
      break;
    }
    case jstat::Model::matern2: {
      if (a.lambda_p && a.intensity) throw UsageError("give either --lambda-p or --intensity, not both");
      const auto radii = a.radii.empty() ? jstat::default_hardcore_radii() : a.radii;
      for (double R : radii) {
        auto cfg = base;
        cfg.radius = R;
        cfg.intensity = a.intensity ? jstat::matern2_primary_intensity(*a.intensity, R, w.dimension())
                                    : a.lambda_p.value_or(100.0);
        cells.push_back({cfg, R, cfg.intensity});
      }
      break;
    }
    case jstat::Model::matern_cluster: {
      if (a.radii.empty() || a.mus.empty()) throw UsageError("matern-cluster needs --R-list and --mu-list");
      for (double R : a.radii) {
        for (double mu : a.mus) {
          auto cfg = base;
          cfg.radius = R;
          cfg.mu = mu;
          cfg.kappa = a.lambda / mu;
          cells.push_back({cfg, R, mu});
        }
      }
      break;
    }
    case jstat::Model::binomial: throw UsageError("power study supports poisson, matern2, matern-cluster");
  }
  return cells;
}

std::vector<jstat::PowerCell> run_fixed(const PowerArgs& a, const jstat::Window& w, json& config,
                                        Manifest& m) {
  if (a.null_paths.empty() == !a.build_null) {
    throw UsageError("give --null (repeatable), --build-null or --match-intensity");
  }
  std::vector<jstat::NullDistribution> nulls;
  if (a.build_null) {
    NullArgs n = a.null;
    if (!n.lambda) n.lambda = a.lambda;
    // The null gets its own stream so cell seeds stay independent of it.
    nulls = build_nulls_from(n, w, jstat::derive_seed(a.common.seed, 0x6e756c6cULL), a.common.jobs,
                             {jstat::Estimator::uncorrected, jstat::Estimator::reduced_sample,
                              jstat::Estimator::kaplan_meier},
                             config);
  } else {
    for (const auto& path : a.null_paths) {
      nulls.push_back(jstat::null_from_json(read_file(path)));
      m.input(path);
    }
  }
  for (const auto& n : nulls) {
    if (!(n.window == w)) throw jstat::FormatError("null window differs from --window");
  }
  jstat::PowerOptions opts;
  opts.reps = a.reps;
  opts.seed = a.common.seed;
  opts.jobs = a.common.jobs;
  return jstat::power_study(power_cells(a, w), nulls, opts);
}

std::vector<jstat::PowerCell> run_matched(const PowerArgs& a, const jstat::Window& w,
                                          json& config) {
  if (!a.null_paths.empty()) throw UsageError("--match-intensity builds its own nulls; drop --null");
  if (a.null.grid.r_max || a.null.r0) {
    throw UsageError("--r-max and --r0 follow each cell's intensity under --match-intensity");
  }
  std::vector<jstat::Estimator> estimators;
  for (const auto& e : a.null.estimators) estimators.push_back(parse_flag(jstat::parse_estimator, e));
  if (estimators.empty()) {
    estimators = {jstat::Estimator::uncorrected, jstat::Estimator::reduced_sample,
                  jstat::Estimator::kaplan_meier};
  }
  jstat::MatchedNullOptions nulls;
  nulls.reps = a.null.reps;
  nulls.seed = jstat::derive_seed(a.common.seed, 0x6e756c6cULL);
  nulls.r_count = a.null.grid.r_count;
  nulls.null.grid_target = a.null.grid.grid_target;
  nulls.null.transform = a.null.sqrt_transform ? jstat::Transform::sqrt : jstat::Transform::raw;
  nulls.null.jobs = a.common.jobs;
  config["null"] = {{"match_intensity", true}, {"reps", nulls.reps}, {"seed", nulls.seed},
                    {"r_count", nulls.r_count}, {"grid_target", nulls.null.grid_target},
                    {"transform", a.null.sqrt_transform ? "sqrt" : "raw"}};

  jstat::PowerOptions opts;
  opts.reps = a.reps;
  opts.seed = a.common.seed;
  opts.jobs = a.common.jobs;
  return jstat::power_study_matched(power_cells(a, w), estimators, nulls, opts);
}

void run_power(const PowerArgs& a, Manifest& m) {
  const auto w = resolve_window(a.window);
  json config{{"window", json::parse(jstat::window_to_json(w))},
              {"model", a.model},
              {"reps", a.reps},
              {"lambda", a.lambda}};
  const auto result = a.match_intensity ? run_matched(a, w, config) : run_fixed(a, w, config, m);

  std::ostringstream csv;
  jstat::write_power_csv(csv, result);
  write_output(a.common.out, csv.str());

  json failures = json::array();
  for (const auto& c : result) {
    if (c.failures > 0) std::cerr << "warning: cell (" << c.param1 << ", " << c.param2 << ") had "
                                  << c.failures << " replicate(s) with fewer than 2 points\n";
    json tr = json::object();
    for (const auto& p : c.power) tr[estimator_name(p.estimator)] = p.truncations;
    failures.push_back({{"param1", c.param1}, {"param2", c.param2}, {"failures", c.failures},
                        {"truncations", tr}});
  }
  m.config() = config;
  m.seed(a.common.seed);
  m.note("cells", failures);
  m.write(a.common.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jstat: F, G and J function estimation and Monte Carlo CSR tests"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "simulate a point pattern");
  add_common(sim_cmd, sim.common);
  sim_cmd->add_option("--model", sim.model, "poisson | binomial | matern2 | matern-cluster");
  sim_cmd->add_option("--window", sim.window, "window spec or JSON");
  sim_cmd->add_option("--config", sim.config, "JSON file with model parameters");
  sim_cmd->add_option("--lambda", sim.lambda, "intensity (poisson; matern-cluster: kappa = lambda/mu)");
  sim_cmd->add_option("--n", sim.n, "point count (binomial)");
  sim_cmd->add_option("--lambda-p", sim.lambda_p, "primary intensity (matern2)");
  sim_cmd->add_option("--intensity", sim.intensity, "target retained intensity (matern2)");
  sim_cmd->add_option("--kappa", sim.kappa, "parent intensity (matern-cluster)");
  sim_cmd->add_option("--mu", sim.mu, "mean offspring per parent (matern-cluster)");
  sim_cmd->add_option("--R", sim.radius, "hard-core or cluster radius");
  sim_cmd->add_option("--replicate", sim.replicate, "replicate index");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "estimate F, G and J for a pattern");
  add_common(est_cmd, est.common, false);
  est_cmd->add_option("--pattern", est.pattern, "pattern CSV")->required();
  est_cmd->add_option("--window", est.window, "window spec or JSON");
  add_grid_options(est_cmd, est.grid);

  BuildNullArgs bn;
  auto* bn_cmd = app.add_subcommand("build-null", "simulate the Poisson null distribution of tau");
  add_common(bn_cmd, bn.common);
  bn_cmd->add_option("--window", bn.window, "window spec or JSON");
  add_null_options(bn_cmd, bn.null, "");

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test-csr", "Monte Carlo test of complete spatial randomness");
  add_common(test_cmd, test.common);
  test_cmd->add_option("--null", test.null_path, "null distribution JSON");
  test_cmd->add_flag("--build-null", test.build_null, "build the null in memory");
  test_cmd->add_option("--pattern", test.pattern, "pattern CSV")->required();
  test_cmd->add_option("--window", test.window, "window spec or JSON (default: the null's)");
  add_null_options(test_cmd, test.null, "");

  EnvelopeArgs env;
  auto* env_cmd = app.add_subcommand("envelope", "pointwise binomial simulation envelope");
  add_common(env_cmd, env.common);
  env_cmd->add_option("--pattern", env.pattern, "pattern CSV")->required();
  env_cmd->add_option("--window", env.window, "window spec or JSON");
  env_cmd->add_option("--sims", env.sims, "number of simulations")->check(CLI::PositiveNumber);
  env_cmd->add_option("--estimator", env.estimator, "W, rs or km");
  add_grid_options(env_cmd, env.grid);

  PowerArgs pow;
  auto* pow_cmd = app.add_subcommand("power", "rejection rates against alternative models");
  add_common(pow_cmd, pow.common);
  pow_cmd->add_option("--model", pow.model, "poisson | matern2 | matern-cluster")->required();
  pow_cmd->add_option("--window", pow.window, "window spec or JSON");
  pow_cmd->add_option("--R-list", pow.radii, "radii (comma separated)")->delimiter(',');
  pow_cmd->add_option("--mu-list", pow.mus, "mean cluster sizes (comma separated)")->delimiter(',');
  pow_cmd->add_option("--lambda", pow.lambda, "intensity of the null and of cluster alternatives");
  pow_cmd->add_option("--lambda-p", pow.lambda_p, "matern2 primary intensity (default 100)");
  pow_cmd->add_option("--intensity", pow.intensity, "matern2 target retained intensity");
  pow_cmd->add_option("--reps", pow.reps, "replicates per cell")->check(CLI::PositiveNumber);
  pow_cmd->add_option("--null", pow.null_paths, "null distribution JSON (repeatable)");
  pow_cmd->add_flag("--build-null", pow.build_null, "build nulls in memory");
  pow_cmd->add_flag("--match-intensity", pow.match_intensity,
                    "per cell, build nulls at the alternative's expected intensity");
  pow_cmd->add_option("--null-reps", pow.null.reps, "null replicates with --build-null");
  pow_cmd->add_option("--estimator", pow.null.estimators, "J variants with --build-null (repeatable)");
  pow_cmd->add_option("--r0", pow.null.r0, "upper integration limit for --build-null");
  add_grid_options(pow_cmd, pow.null.grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const std::vector<std::string> args(argv, argv + argc);
  try {
    if (*sim_cmd) {
      Manifest m("simulate", args);
      run_simulate(sim, *sim_cmd, m);
    } else if (*est_cmd) {
      Manifest m("estimate", args);
      run_estimate(est, m);
    } else if (*bn_cmd) {
      Manifest m("build-null", args);
      run_build_null(bn, m);
    } else if (*test_cmd) {
      Manifest m("test-csr", args);
      run_test(test, *test_cmd, m);
    } else if (*env_cmd) {
      Manifest m("envelope", args);
      run_envelope(env, m);
    } else if (*pow_cmd) {
      Manifest m("power", args);
      run_power(pow, m);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
