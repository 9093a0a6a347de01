#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jstat/estimate.hpp"
#include "jstat/geometry.hpp"
#include "jstat/patterns.hpp"
#include "jstat/simulate.hpp"

namespace jstat {

/// Cells with null standard deviation below this are left out of τ
/// (near r = 0 every replicate gives Ĵ = 1).
inline constexpr double kSigmaFloor = 1e-6;
inline constexpr std::size_t kDefaultNullReps = 10000;
/// τ integrates up to the quantile of the Poisson F at this probability.
inline constexpr double kR0Probability = 0.9;
/// Largest tolerated share of replicates with an undefined estimate at r <= r0.
inline constexpr double kMaxUndefinedShare = 0.01;

/// Scale on which σ̂ and τ are computed. sqrt roughly symmetrises Ĵ.
enum class Transform { raw, sqrt };

struct Quantiles {
  double q025 = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double q975 = 0.0;
};

/// Type-7 (linear interpolation) empirical quantile; `sorted` ascending.
double empirical_quantile(std::span<const double> sorted, double p);

/// Monte Carlo null distribution of one Ĵ variant under a Poisson process.
struct NullDistribution {
  Estimator estimator = Estimator::uncorrected;
  Window window = Window::unit_square();
  double intensity = 0.0;
  std::size_t grid_target = 0;
  RGrid rgrid{std::vector<double>{0.0}};
  std::vector<double> mean;
  std::vector<double> sd;
  double r0 = 0.0;
  double sigma_floor = kSigmaFloor;
  Transform transform = Transform::raw;
  std::vector<double> tau;
  Quantiles quantiles;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  /// Replicates whose τ sum stopped early at an undefined cell.
  std::size_t truncations = 0;
};

struct NullOptions {
  std::size_t grid_target = 0;  ///< 0 selects default_grid_target
  std::optional<double> r0;     ///< default: Poisson F quantile at kR0Probability
  Transform transform = Transform::raw;
  unsigned jobs = 0;
};

/// Simulates `reps` Poisson patterns (replicate k uses
/// derive_seed(poisson.seed, k)) and tabulates mean, σ̂ and τ samples for
/// each requested estimator from the same realisations. Throws
/// std::runtime_error when an estimator is undefined on more than 1% of
/// replicates at some r <= r0.
std::vector<NullDistribution> build_nulls(const SimConfig& poisson,
                                          std::span<const Estimator> estimators,
                                          std::size_t reps, const RGrid& rgrid,
                                          const NullOptions& options = {});

NullDistribution build_null(const SimConfig& poisson, Estimator estimator, std::size_t reps,
                            const RGrid& rgrid, const NullOptions& options = {});

struct TauResult {
  double value = 0.0;
  bool truncated = false;  ///< an undefined cell at or below r0 ended the sum
  double r_min = 0.0;      ///< left end of the first included cell
  double r_end = 0.0;      ///< right end of the last included cell
};

/// Riemann sum of (g(Ĵ) - 1) / σ̂ over cells (r_{k-1}, r_k] with r_k <= r0,
/// skipping cells whose σ̂ is below the floor and stopping at the first
/// undefined cell. Throws when the grids differ.
TauResult tau_detailed(const FunctionEstimate& jhat, const NullDistribution& null);
double tau(const FunctionEstimate& jhat, const NullDistribution& null);

struct TestResult {
  Estimator estimator = Estimator::uncorrected;
  double tau = 0.0;
  bool truncated = false;
  bool reject_two_sided = false;  ///< τ outside [q0.025, q0.975]
  bool reject_clustering = false; ///< τ < q0.05
  bool reject_regularity = false; ///< τ > q0.95
  Quantiles quantiles;
};

TestResult decide(double tau_value, const Quantiles& q);

/// Tests a pattern against a null built for the same window. `grid` may be
/// supplied to skip rebuilding the evaluation grid.
TestResult test_csr(const PointPattern& pattern, const NullDistribution& null,
                    const EvaluationGrid* grid = nullptr);

struct EnvelopeOptions {
  std::size_t grid_target = 0;
  unsigned jobs = 0;
};

/// Pointwise min/max of an estimator over binomial simulations with the
/// observed count in the observed window. `defined[k]` is true when at least
/// one simulation is defined at r_k.
struct Envelope {
  FunctionEstimate observed;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<bool> defined;
  std::size_t sims = 0;
};

Envelope envelope(const PointPattern& pattern, Estimator estimator, std::size_t n_sims,
                  const RGrid& rgrid, std::uint64_t seed, const EnvelopeOptions& options = {});

/// True when the observed curve is defined and strictly below the envelope
/// minimum at some r > 0.
bool exits_below(const Envelope& env);

/// One alternative-model setting. `param1`/`param2` label the cell in
/// output (e.g. R and λ_p, or R and μ); the model's seed and replicate are
/// assigned by power_study.
struct PowerCellSpec {
  SimConfig model;
  double param1 = 0.0;
  double param2 = 0.0;
};

struct Rejections {
  double two_sided = 0.0;
  double clustering = 0.0;
  double regularity = 0.0;
};

struct EstimatorPower {
  Estimator estimator = Estimator::uncorrected;
  Rejections rejections;
  std::size_t truncations = 0;
};

struct PowerCell {
  Model model = Model::poisson;
  double param1 = 0.0;
  double param2 = 0.0;
  std::size_t reps = 0;      ///< replicates that produced an estimate
  std::size_t failures = 0;  ///< replicates with n < 2
  std::vector<EstimatorPower> power;
};

struct PowerOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
};

/// Rejection rates per cell and estimator. All nulls must share window,
/// r grid and grid target. Replicate j of cell c is simulated with seed
/// derive_seed(options.seed, c) and replicate index j.
std::vector<PowerCell> power_study(std::span<const PowerCellSpec> cells,
                                   std::span<const NullDistribution> nulls,
                                   const PowerOptions& options);

/// Mean number of points per unit volume of the model: λ for Poisson,
/// n/|W| for binomial, the retained intensity for Matérn II and κμ for
/// the cluster process.
double expected_intensity(const SimConfig& model);

struct MatchedNullOptions {
  std::size_t reps = 2000;
  std::uint64_t seed = 0;
  std::size_t r_count = kDefaultRGridCount;
  NullOptions null;
};

/// Power against a Poisson null of the alternative's own expected intensity.
/// Cell c gets nulls from build_nulls with seed derive_seed(nulls.seed, c) on
/// default_rgrid(expected_intensity) and is then run as a one-cell
/// power_study with seed derive_seed(options.seed, c).
std::vector<PowerCell> power_study_matched(std::span<const PowerCellSpec> cells,
                                           std::span<const Estimator> estimators,
                                           const MatchedNullOptions& nulls,
                                           const PowerOptions& options);

/// `count` equally spaced hard-core radii in (0, rmax].
std::vector<double> default_hardcore_radii(std::size_t count = 22, double rmax = 0.11);

}  // namespace jstat
