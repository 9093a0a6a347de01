#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "jstat/geometry.hpp"
#include "jstat/patterns.hpp"

namespace jstat {

enum class Model { poisson, binomial, matern2, matern_cluster };

std::string_view to_string(Model m);
/// Accepts "poisson", "binomial", "matern2", "matern-cluster".
Model parse_model(std::string_view name);

/// Everything needed to reproduce one realisation.
///  - poisson:        intensity
///  - binomial:       count
///  - matern2:        intensity (primary λ_p), radius (hard core R)
///  - matern_cluster: kappa (parent intensity), mu (mean offspring), radius
struct SimConfig {
  Model model = Model::poisson;
  Window window = Window::unit_square();
  double intensity = 0.0;
  std::size_t count = 0;
  double radius = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

  /// Throws std::invalid_argument when a model parameter is out of range.
  void validate() const;
};

/// Realisation for (config, derive_seed(seed, replicate)).
PointPattern simulate(const SimConfig& config);

PointPattern sim_poisson(const Window& w, double lambda, std::uint64_t seed);
PointPattern sim_binomial(const Window& w, std::size_t n, std::uint64_t seed);

/// Matérn model II: primary Poisson(lambda_p) on the window dilated by R with
/// uniform marks; a primary point in W is kept iff no other primary point
/// closer than R has a mark <= its own (mark ties delete both).
PointPattern sim_matern2(const Window& w, double lambda_p, double radius, std::uint64_t seed);

/// Matérn cluster: Poisson(kappa) parents on the dilated window, Poisson(mu)
/// offspring uniform in the radius-R ball around each parent, clipped to W.
PointPattern sim_matern_cluster(const Window& w, double kappa, double mu, double radius,
                                std::uint64_t seed);

/// Cluster realisation with parent bookkeeping; `parent_of[i]` indexes the
/// parent of pattern point i. Same stream as sim_matern_cluster.
struct ClusterRealisation {
  PointPattern pattern;
  std::vector<Point> parents;
  std::vector<std::size_t> parent_of;
};
ClusterRealisation sim_matern_cluster_traced(const Window& w, double kappa, double mu,
                                             double radius, std::uint64_t seed);

/// Retained intensity (1 - exp(-lambda_p v)) / v with v = |B(0,R)|.
double matern2_retained_intensity(double lambda_p, double radius, int dimension);

/// Inverse of matern2_retained_intensity. Throws std::domain_error when the
/// target exceeds the supremum 1 / |B(0,R)|.
double matern2_primary_intensity(double target_intensity, double radius, int dimension);

}  // namespace jstat
