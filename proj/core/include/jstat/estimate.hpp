#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jstat/geometry.hpp"
#include "jstat/patterns.hpp"

namespace jstat {

/// Tabulation abscissae shared by every estimate: r[0] == 0, strictly
/// increasing, finite.
class RGrid {
 public:
  explicit RGrid(std::vector<double> r);
  /// `count` equally spaced values from 0 to rmax inclusive.
  static RGrid linear(double rmax, std::size_t count);

  std::span<const double> values() const { return r_; }
  std::size_t size() const { return r_.size(); }
  double operator[](std::size_t i) const { return r_[i]; }
  double back() const { return r_.back(); }
  /// Index of the grid value closest to r.
  std::size_t nearest_index(double r) const;

  friend bool operator==(const RGrid&, const RGrid&) = default;

 private:
  std::vector<double> r_;
};

inline constexpr std::size_t kDefaultRGridCount = 512;

/// Poisson empty-space function 1 - exp(-λ |B(0,1)| r^d).
double poisson_empty_space(double r, double intensity, int dimension);
/// Inverse of poisson_empty_space at probability p in (0, 1).
double poisson_empty_space_quantile(double p, double intensity, int dimension);

/// Default grid: kDefaultRGridCount values up to the 0.99 quantile of the
/// Poisson empty-space distribution at the given intensity.
RGrid default_rgrid(double intensity, int dimension,
                    std::size_t count = kDefaultRGridCount);

enum class Estimator { uncorrected, reduced_sample, kaplan_meier };
enum class Target { F, G, J };

/// Column-style names: "W"/"rs"/"km".
std::string_view short_name(Estimator e);
/// Accepts "W", "jw", "uncorrected", "rs", "km" (case-insensitive).
Estimator parse_estimator(std::string_view name);

/// A tabulated function of r with a definedness mask. Undefined entries hold
/// 0.0 in `values` and must not be read as data.
struct FunctionEstimate {
  RGrid rgrid;
  std::vector<double> values;
  std::vector<bool> defined;
  Estimator estimator = Estimator::uncorrected;
  Target target = Target::F;
  std::optional<DomainBounds> bounds;

  FunctionEstimate(RGrid grid, Estimator e, Target t);

  std::size_t size() const { return values.size(); }
  std::optional<double> at(std::size_t i) const {
    return defined[i] ? std::optional<double>(values[i]) : std::nullopt;
  }
  void set(std::size_t i, double v) {
    values[i] = v;
    defined[i] = true;
  }
};

/// F̂(r) = #{grid points with distance <= r} / m.
FunctionEstimate estimate_F_uncorrected(const DistanceSet& es, const RGrid& rgrid);
/// Ĝ(r) = #{data points with nn distance <= r} / #(X ∩ W). Requires n >= 2.
FunctionEstimate estimate_G_uncorrected(const DistanceSet& nn, const RGrid& rgrid);

/// Border-method estimates: only sources with censor >= r are eligible.
/// Undefined where the eligible set is empty.
FunctionEstimate estimate_F_rs(const DistanceSet& es, const RGrid& rgrid);
FunctionEstimate estimate_G_rs(const DistanceSet& nn, const RGrid& rgrid);

/// Product-limit estimates with the boundary distance as right censoring:
/// observation min(dist, censor), event iff dist <= censor. Undefined beyond
/// the largest observation.
FunctionEstimate estimate_F_km(const DistanceSet& es, const RGrid& rgrid);
FunctionEstimate estimate_G_km(const DistanceSet& nn, const RGrid& rgrid);

/// Ĵ = (1 - Ĝ) / (1 - F̂) wherever both are defined and F̂ < 1. Throws when
/// the estimator tags or grids differ.
FunctionEstimate estimate_J_variant(const FunctionEstimate& F, const FunctionEstimate& G);

/// Uncorrected Ĵ_W from precomputed distance sets; carries r_Fmax / r_Gmax.
FunctionEstimate estimate_JW(const DistanceSet& nn, const DistanceSet& es, const RGrid& rgrid);
/// Uncorrected Ĵ_W of a pattern. Requires n >= 2.
FunctionEstimate estimate_JW(const PointPattern& p, const EvaluationGrid& grid,
                             const RGrid& rgrid);

/// Ĵ for one estimator variant, computing only what that variant needs.
FunctionEstimate estimate_J(const PointPattern& p, const EvaluationGrid& grid,
                            const RGrid& rgrid, Estimator e);

/// All nine curves for one pattern. With n < 2 the G and J curves are fully
/// masked and `bounds` is empty.
struct EstimateTable {
  RGrid rgrid;
  FunctionEstimate F_uncorr, G_uncorr, J_W;
  FunctionEstimate F_rs, G_rs, J_rs;
  FunctionEstimate F_km, G_km, J_km;
  std::optional<DomainBounds> bounds;

  const FunctionEstimate& J(Estimator e) const;
};

EstimateTable estimate_all(const PointPattern& p, const EvaluationGrid& grid, const RGrid& rgrid);

}  // namespace jstat
