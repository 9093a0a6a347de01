#include "jstat/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jstat/rng.hpp"
#include "jstat/spatial_index.hpp"

namespace jstat {

namespace {

// Uniform point strictly inside box b (interior rejection guards against
// rounding onto the boundary).
Point uniform_in_box(Rng& rng, const Box& b, int dim) {
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    double c;
    do {
      c = rng.uniform(b.lo[k], b.hi[k]);
    } while (!(c > b.lo[k] && c < b.hi[k]));
    p[k] = c;
  }
  return p;
}

Point uniform_in_ball(Rng& rng, const Point& centre, double radius, int dim) {
  Point v{0.0, 0.0, 0.0};
  double n2;
  do {
    n2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      v[k] = rng.uniform(-1.0, 1.0);
      n2 += v[k] * v[k];
    }
  } while (n2 >= 1.0);
  Point p = centre;
  for (int k = 0; k < dim; ++k) p[k] += radius * v[k];
  return p;
}

Box dilate(const Box& b, double r, int dim) {
  Box out = b;
  for (int k = 0; k < dim; ++k) {
    out.lo[k] -= r;
    out.hi[k] += r;
  }
  return out;
}

double box_volume(const Box& b, int dim) {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= b.hi[k] - b.lo[k];
  return v;
}

std::vector<Point> poisson_points(Rng& rng, const Box& b, double lambda, int dim) {
  const auto n = rng.poisson(lambda * box_volume(b, dim));
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) pts.push_back(uniform_in_box(rng, b, dim));
  return pts;
}

}  // namespace

std::string_view to_string(Model m) {
  switch (m) {
    case Model::poisson: return "poisson";
    case Model::binomial: return "binomial";
    case Model::matern2: return "matern2";
    case Model::matern_cluster: return "matern-cluster";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "poisson") return Model::poisson;
  if (name == "binomial") return Model::binomial;
  if (name == "matern2") return Model::matern2;
  if (name == "matern-cluster") return Model::matern_cluster;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

void SimConfig::validate() const {
  switch (model) {
    case Model::poisson:
      if (!(intensity > 0.0)) throw std::invalid_argument("poisson needs intensity > 0");
      break;
    case Model::binomial: break;
    case Model::matern2:
      if (!(intensity > 0.0)) throw std::invalid_argument("matern2 needs lambda_p > 0");
      if (!(radius >= 0.0)) throw std::invalid_argument("matern2 needs R >= 0");
      break;
    case Model::matern_cluster:
      if (!(kappa > 0.0) || !(mu > 0.0) || !(radius > 0.0)) {
        throw std::invalid_argument("matern-cluster needs kappa, mu, R > 0");
      }
      break;
  }
}

PointPattern simulate(const SimConfig& config) {
  config.validate();
  const auto s = derive_seed(config.seed, config.replicate);
  switch (config.model) {
    case Model::poisson: return sim_poisson(config.window, config.intensity, s);
    case Model::binomial: return sim_binomial(config.window, config.count, s);
    case Model::matern2: return sim_matern2(config.window, config.intensity, config.radius, s);
    case Model::matern_cluster:
      return sim_matern_cluster(config.window, config.kappa, config.mu, config.radius, s);
  }
  throw std::logic_error("unhandled model");
}

PointPattern sim_poisson(const Window& w, double lambda, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw std::invalid_argument("intensity must be positive");
  Rng rng(seed);
  const int dim = w.dimension();
  std::vector<Point> pts;
  for (const auto& c : w.components()) {
    auto part = poisson_points(rng, c, lambda, dim);
    pts.insert(pts.end(), part.begin(), part.end());
  }
  return PointPattern(w, std::move(pts));
}

PointPattern sim_binomial(const Window& w, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const int dim = w.dimension();
  const auto comps = w.components();
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& c : comps) cumulative.push_back(total += box_volume(c, dim));

  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto k = std::min<std::size_t>(it - cumulative.begin(), comps.size() - 1);
    pts.push_back(uniform_in_box(rng, comps[k], dim));
  }
  return PointPattern(w, std::move(pts));
}

PointPattern sim_matern2(const Window& w, double lambda_p, double radius, std::uint64_t seed) {
  if (!(lambda_p > 0.0)) throw std::invalid_argument("primary intensity must be positive");
  if (!(radius >= 0.0)) throw std::invalid_argument("hard-core radius must be >= 0");
  Rng rng(seed);
  const int dim = w.dimension();
  // The dilated bounding box contains W ⊕ B(0,R); primaries farther than R
  // from W cannot influence the thinning inside W.
  const Box region = dilate(w.bounding_box(), radius, dim);
  const auto primary = poisson_points(rng, region, lambda_p, dim);
  std::vector<double> marks(primary.size());
  for (auto& m : marks) m = rng.uniform();

  std::vector<Point> kept;
  if (radius == 0.0) {
    for (const auto& p : primary) {
      if (w.contains_strictly(p)) kept.push_back(p);
    }
    return PointPattern(w, std::move(kept));
  }

  const BucketIndex index(primary, region, dim, radius);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < primary.size(); ++i) {
    if (!w.contains_strictly(primary[i])) continue;
    bool survives = true;
    index.for_each_within(primary[i], radius, [&](std::size_t j, double d2) {
      if (j != i && d2 < r2 && marks[j] <= marks[i]) survives = false;
    });
    if (survives) kept.push_back(primary[i]);
  }
  return PointPattern(w, std::move(kept));
}

ClusterRealisation sim_matern_cluster_traced(const Window& w, double kappa, double mu,
                                             double radius, std::uint64_t seed) {
  if (!(kappa > 0.0) || !(mu > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("matern-cluster needs kappa, mu, R > 0");
  }
  Rng rng(seed);
  const int dim = w.dimension();
  const Box region = dilate(w.bounding_box(), radius, dim);
  auto parents = poisson_points(rng, region, kappa, dim);

  std::vector<Point> offspring;
  std::vector<std::size_t> parent_of;
  for (std::size_t j = 0; j < parents.size(); ++j) {
    const auto m = rng.poisson(mu);
    for (std::uint64_t c = 0; c < m; ++c) {
      const Point p = uniform_in_ball(rng, parents[j], radius, dim);
      if (w.contains_strictly(p)) {
        offspring.push_back(p);
        parent_of.push_back(j);
      }
    }
  }
  return {PointPattern(w, std::move(offspring)), std::move(parents), std::move(parent_of)};
}

PointPattern sim_matern_cluster(const Window& w, double kappa, double mu, double radius,
                                std::uint64_t seed) {
  return sim_matern_cluster_traced(w, kappa, mu, radius, seed).pattern;
}

double matern2_retained_intensity(double lambda_p, double radius, int dimension) {
  const double v = unit_ball_volume(dimension) * std::pow(radius, dimension);
  if (v == 0.0) return lambda_p;
  return -std::expm1(-lambda_p * v) / v;
}

double matern2_primary_intensity(double target_intensity, double radius, int dimension) {
  if (!(target_intensity > 0.0)) throw std::invalid_argument("target intensity must be > 0");
  const double v = unit_ball_volume(dimension) * std::pow(radius, dimension);
  if (v == 0.0) return target_intensity;
  const double load = target_intensity * v;
  if (!(load < 1.0)) {
    throw std::domain_error("matern2 cannot reach intensity " + std::to_string(target_intensity) +
                            " with R=" + std::to_string(radius) + "; the supremum is " +
                            std::to_string(1.0 / v));
  }
  return -std::log1p(-load) / v;
}

}  // namespace jstat
