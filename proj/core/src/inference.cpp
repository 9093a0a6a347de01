#include "jstat/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jstat/parallel.hpp"
#include "jstat/rng.hpp"

namespace jstat {

namespace {

double apply(Transform t, double j) { return t == Transform::sqrt ? std::sqrt(j) : j; }

std::size_t grid_target_or_default(std::size_t target, const Window& w) {
  return target > 0 ? target : default_grid_target(w);
}

std::vector<FunctionEstimate> estimate_variants(const PointPattern& p, const EvaluationGrid& grid,
                                                const RGrid& rgrid,
                                                std::span<const Estimator> estimators) {
  std::vector<FunctionEstimate> out;
  if (p.size() < 2) {
    for (auto e : estimators) out.emplace_back(rgrid, e, Target::J);
    return out;
  }
  if (estimators.size() == 1) {
    out.push_back(estimate_J(p, grid, rgrid, estimators[0]));
    return out;
  }
  const auto table = estimate_all(p, grid, rgrid);
  for (auto e : estimators) out.push_back(table.J(e));
  return out;
}

struct Curve {
  std::vector<double> values;
  std::vector<bool> defined;
};

TauResult tau_sum(const RGrid& rgrid, std::span<const double> values,
                  const std::vector<bool>& defined, const NullDistribution& null,
                  bool transformed) {
  if (null.sd.size() != rgrid.size()) throw std::invalid_argument("null distribution is incomplete");
  TauResult out;
  bool started = false;
  for (std::size_t k = 1; k < rgrid.size() && rgrid[k] <= null.r0; ++k) {
    if (!defined[k]) {
      out.truncated = true;
      break;
    }
    const double sigma = null.sd[k];
    if (sigma < null.sigma_floor) continue;
    const double g = transformed ? values[k] : apply(null.transform, values[k]);
    out.value += (g - 1.0) / sigma * (rgrid[k] - rgrid[k - 1]);
    if (!started) {
      out.r_min = rgrid[k - 1];
      started = true;
    }
    out.r_end = rgrid[k];
  }
  return out;
}

}  // namespace

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<NullDistribution> build_nulls(const SimConfig& poisson,
                                          std::span<const Estimator> estimators,
                                          std::size_t reps, const RGrid& rgrid,
                                          const NullOptions& options) {
  if (poisson.model != Model::poisson) throw std::invalid_argument("null model must be Poisson");
  poisson.validate();
  if (reps < 100) throw std::invalid_argument("null distribution needs at least 100 replicates");
  if (estimators.empty()) throw std::invalid_argument("no estimator requested");

  const Window& w = poisson.window;
  const double r0 = options.r0.value_or(
      poisson_empty_space_quantile(kR0Probability, poisson.intensity, w.dimension()));
  if (!(r0 > 0.0) || r0 > rgrid.back()) {
    throw std::invalid_argument("r0 must lie inside the r grid range");
  }
  const std::size_t target = grid_target_or_default(options.grid_target, w);
  const auto grid = make_grid(w, target);

  // curves[v][k] is replicate k's curve for estimator v, on the transformed scale.
  const std::size_t V = estimators.size();
  std::vector<std::vector<Curve>> curves(V, std::vector<Curve>(reps));
  parallel_for(reps, options.jobs, [&](std::size_t k) {
    SimConfig cfg = poisson;
    cfg.replicate = k;
    auto js = estimate_variants(simulate(cfg), grid, rgrid, estimators);
    for (std::size_t v = 0; v < V; ++v) {
      for (std::size_t i = 0; i < js[v].size(); ++i) {
        if (js[v].defined[i]) js[v].values[i] = apply(options.transform, js[v].values[i]);
      }
      curves[v][k] = {std::move(js[v].values), std::move(js[v].defined)};
    }
  });

  std::vector<NullDistribution> nulls;
  for (std::size_t v = 0; v < V; ++v) {
    NullDistribution null;
    null.estimator = estimators[v];
    null.window = w;
    null.intensity = poisson.intensity;
    null.grid_target = target;
    null.rgrid = rgrid;
    null.r0 = r0;
    null.transform = options.transform;
    null.reps = reps;
    null.seed = poisson.seed;
    null.mean.assign(rgrid.size(), 0.0);
    null.sd.assign(rgrid.size(), 0.0);

    for (std::size_t i = 0; i < rgrid.size(); ++i) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& c : curves[v]) {
        if (c.defined[i]) {
          sum += c.values[i];
          ++n;
        }
      }
      const double undefined_share = static_cast<double>(reps - n) / static_cast<double>(reps);
      if (rgrid[i] <= r0 && undefined_share > kMaxUndefinedShare) {
        std::ostringstream msg;
        msg << "J_" << short_name(estimators[v]) << " is undefined on "
            << 100.0 * undefined_share << "% of null replicates at r=" << rgrid[i]
            << " <= r0=" << r0 << "; choose a smaller r0";
        throw std::runtime_error(msg.str());
      }
      if (n == 0) continue;
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (const auto& c : curves[v]) {
        if (c.defined[i]) ss += (c.values[i] - mean) * (c.values[i] - mean);
      }
      null.mean[i] = mean;
      null.sd[i] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    }

    null.tau.resize(reps);
    for (std::size_t k = 0; k < reps; ++k) {
      const auto t = tau_sum(null.rgrid, curves[v][k].values, curves[v][k].defined, null, true);
      null.tau[k] = t.value;
      if (t.truncated) ++null.truncations;
    }
    std::vector<double> sorted = null.tau;
    std::sort(sorted.begin(), sorted.end());
    null.quantiles = {empirical_quantile(sorted, 0.025), empirical_quantile(sorted, 0.05),
                      empirical_quantile(sorted, 0.95), empirical_quantile(sorted, 0.975)};
    nulls.push_back(std::move(null));
  }
  return nulls;
}

NullDistribution build_null(const SimConfig& poisson, Estimator estimator, std::size_t reps,
                            const RGrid& rgrid, const NullOptions& options) {
  const Estimator one[] = {estimator};
  return std::move(build_nulls(poisson, one, reps, rgrid, options).front());
}

TauResult tau_detailed(const FunctionEstimate& jhat, const NullDistribution& null) {
  if (!(jhat.rgrid == null.rgrid)) throw std::invalid_argument("estimate and null use different r grids");
  return tau_sum(jhat.rgrid, jhat.values, jhat.defined, null, false);
}

double tau(const FunctionEstimate& jhat, const NullDistribution& null) {
  return tau_detailed(jhat, null).value;
}

TestResult decide(double tau_value, const Quantiles& q) {
  TestResult r;
  r.tau = tau_value;
  r.quantiles = q;
  r.reject_two_sided = tau_value < q.q025 || tau_value > q.q975;
  r.reject_clustering = tau_value < q.q05;
  r.reject_regularity = tau_value > q.q95;
  return r;
}

TestResult test_csr(const PointPattern& pattern, const NullDistribution& null,
                    const EvaluationGrid* grid) {
  if (!(pattern.window() == null.window)) {
    throw std::invalid_argument("pattern window differs from the null distribution's window");
  }
  std::optional<EvaluationGrid> own;
  if (grid == nullptr) {
    own = make_grid(null.window, grid_target_or_default(null.grid_target, null.window));
    grid = &*own;
  }
  const auto jhat = estimate_J(pattern, *grid, null.rgrid, null.estimator);
  const auto t = tau_detailed(jhat, null);
  auto result = decide(t.value, null.quantiles);
  result.estimator = null.estimator;
  result.truncated = t.truncated;
  return result;
}

Envelope envelope(const PointPattern& pattern, Estimator estimator, std::size_t n_sims,
                  const RGrid& rgrid, std::uint64_t seed, const EnvelopeOptions& options) {
  if (n_sims < 1) throw std::invalid_argument("envelope needs at least one simulation");
  const Window& w = pattern.window();
  const auto grid = make_grid(w, grid_target_or_default(options.grid_target, w));

  Envelope env{estimate_J(pattern, grid, rgrid, estimator), {}, {}, {}, n_sims};
  std::vector<FunctionEstimate> sims(n_sims, FunctionEstimate(rgrid, estimator, Target::J));
  parallel_for(n_sims, options.jobs, [&](std::size_t k) {
    const auto sim = sim_binomial(w, pattern.size(), derive_seed(seed, k));
    sims[k] = estimate_J(sim, grid, rgrid, estimator);
  });

  const std::size_t K = rgrid.size();
  env.lo.assign(K, std::numeric_limits<double>::infinity());
  env.hi.assign(K, -std::numeric_limits<double>::infinity());
  env.defined.assign(K, false);
  for (const auto& s : sims) {
    for (std::size_t i = 0; i < K; ++i) {
      if (!s.defined[i]) continue;
      env.lo[i] = std::min(env.lo[i], s.values[i]);
      env.hi[i] = std::max(env.hi[i], s.values[i]);
      env.defined[i] = true;
    }
  }
  for (std::size_t i = 0; i < K; ++i) {
    if (!env.defined[i]) env.lo[i] = env.hi[i] = 0.0;
  }
  return env;
}

bool exits_below(const Envelope& env) {
  for (std::size_t i = 0; i < env.lo.size(); ++i) {
    if (env.observed.rgrid[i] > 0.0 && env.defined[i] && env.observed.defined[i] &&
        env.observed.values[i] < env.lo[i]) {
      return true;
    }
  }
  return false;
}

std::vector<PowerCell> power_study(std::span<const PowerCellSpec> cells,
                                   std::span<const NullDistribution> nulls,
                                   const PowerOptions& options) {
  if (nulls.empty()) throw std::invalid_argument("power study needs at least one null");
  if (options.reps < 50) throw std::invalid_argument("power study needs at least 50 replicates");
  const auto& ref = nulls.front();
  for (const auto& n : nulls) {
    if (!(n.window == ref.window) || !(n.rgrid == ref.rgrid) || n.grid_target != ref.grid_target) {
      throw std::invalid_argument("null distributions disagree on window, r grid or grid");
    }
  }
  std::vector<Estimator> estimators;
  for (const auto& n : nulls) estimators.push_back(n.estimator);
  const auto grid = make_grid(ref.window, grid_target_or_default(ref.grid_target, ref.window));

  struct Outcome {
    bool failed = false;
    std::vector<TestResult> tests;
  };

  std::vector<PowerCell> result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& spec = cells[c];
    if (!(spec.model.window == ref.window)) {
      throw std::invalid_argument("power cell window differs from the null window");
    }
    std::vector<Outcome> outcomes(options.reps);
    parallel_for(options.reps, options.jobs, [&](std::size_t j) {
      SimConfig cfg = spec.model;
      cfg.seed = derive_seed(options.seed, c);
      cfg.replicate = j;
      const auto pattern = simulate(cfg);
      if (pattern.size() < 2) {
        outcomes[j].failed = true;
        return;
      }
      const auto js = estimate_variants(pattern, grid, ref.rgrid, estimators);
      for (std::size_t v = 0; v < nulls.size(); ++v) {
        const auto t = tau_detailed(js[v], nulls[v]);
        auto d = decide(t.value, nulls[v].quantiles);
        d.truncated = t.truncated;
        outcomes[j].tests.push_back(d);
      }
    });

    PowerCell cell;
    cell.model = spec.model.model;
    cell.param1 = spec.param1;
    cell.param2 = spec.param2;
    for (const auto& o : outcomes) (o.failed ? cell.failures : cell.reps) += 1;
    for (std::size_t v = 0; v < nulls.size(); ++v) {
      EstimatorPower ep;
      ep.estimator = estimators[v];
      std::size_t two = 0, lo = 0, hi = 0;
      for (const auto& o : outcomes) {
        if (o.failed) continue;
        const auto& t = o.tests[v];
        two += t.reject_two_sided;
        lo += t.reject_clustering;
        hi += t.reject_regularity;
        ep.truncations += t.truncated;
      }
      if (cell.reps > 0) {
        const auto n = static_cast<double>(cell.reps);
        ep.rejections = {static_cast<double>(two) / n, static_cast<double>(lo) / n,
                         static_cast<double>(hi) / n};
      }
      cell.power.push_back(ep);
    }
    result.push_back(std::move(cell));
  }
  return result;
}

double expected_intensity(const SimConfig& model) {
  model.validate();
  switch (model.model) {
    case Model::poisson: return model.intensity;
    case Model::binomial: return static_cast<double>(model.count) / model.window.volume();
    case Model::matern2:
      return matern2_retained_intensity(model.intensity, model.radius, model.window.dimension());
    case Model::matern_cluster: return model.kappa * model.mu;
  }
  throw std::invalid_argument("unknown model");
}

std::vector<PowerCell> power_study_matched(std::span<const PowerCellSpec> cells,
                                           std::span<const Estimator> estimators,
                                           const MatchedNullOptions& nulls,
                                           const PowerOptions& options) {
  std::vector<PowerCell> result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& spec = cells[c];
    SimConfig poisson;
    poisson.model = Model::poisson;
    poisson.window = spec.model.window;
    poisson.intensity = expected_intensity(spec.model);
    poisson.seed = derive_seed(nulls.seed, c);
    const auto rgrid =
        default_rgrid(poisson.intensity, poisson.window.dimension(), nulls.r_count);
    const auto null = build_nulls(poisson, estimators, nulls.reps, rgrid, nulls.null);
    PowerOptions cell_options = options;
    cell_options.seed = derive_seed(options.seed, c);
    auto one = power_study(std::span(&spec, 1), null, cell_options);
    result.push_back(std::move(one.front()));
  }
  return result;
}

std::vector<double> default_hardcore_radii(std::size_t count, double rmax) {
  if (count == 0 || !(rmax > 0.0)) throw std::invalid_argument("need count >= 1 and rmax > 0");
  std::vector<double> radii(count);
  for (std::size_t i = 0; i < count; ++i) {
    radii[i] = rmax * static_cast<double>(i + 1) / static_cast<double>(count);
  }
  return radii;
}

}  // namespace jstat
