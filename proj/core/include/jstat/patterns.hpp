#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "jstat/geometry.hpp"
#include "jstat/spatial_index.hpp"

namespace jstat {

/// Finite point set observed in a window. Immutable; the bucket index is
/// built once at construction and shared between copies.
class PointPattern {
 public:
  /// Throws std::invalid_argument if a point is not strictly inside the
  /// window or two points coincide.
  PointPattern(Window window, std::vector<Point> points);

  const Window& window() const { return window_; }
  std::span<const Point> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  int dimension() const { return window_.dimension(); }

  /// Observed intensity n / |W|.
  double intensity() const;

  const BucketIndex& index() const { return *index_; }

 private:
  Window window_;
  std::vector<Point> points_;
  std::shared_ptr<const BucketIndex> index_;
};

enum class DistanceKind { nearest_neighbour, empty_space };

/// Distances from each source (data point or grid point) to the nearest
/// data point, with the source's boundary distance as censoring time.
struct DistanceSet {
  DistanceKind kind = DistanceKind::nearest_neighbour;
  std::vector<double> values;
  std::vector<double> censor;

  std::size_t size() const { return values.size(); }
};

/// Nearest-other-point distance for every data point. Requires n >= 2.
DistanceSet nn_distances(const PointPattern& p);

/// Distance from every grid point to the nearest data point (+inf when the
/// pattern is empty). The grid must be built on the pattern's window.
DistanceSet empty_space_distances(const PointPattern& p, const EvaluationGrid& grid);

struct DomainBounds {
  double r_gmax = 0.0;  ///< largest nearest-neighbour distance
  double r_fmax = 0.0;  ///< largest empty-space distance over the grid
};

DomainBounds max_distances(const DistanceSet& nn, const DistanceSet& es);

}  // namespace jstat
