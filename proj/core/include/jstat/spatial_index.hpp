#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "jstat/geometry.hpp"

namespace jstat {

/// Exact nearest-neighbour and fixed-radius queries over a static point set,
/// backed by uniform cubic buckets. Queries may lie outside `bounds`.
class BucketIndex {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  /// `cell_side` <= 0 selects (volume / n)^(1/d), the expected spacing.
  BucketIndex(std::span<const Point> points, const Box& bounds, int dimension,
              double cell_side = 0.0);

  std::size_t size() const { return ids_.size(); }
  double cell_side() const { return side_; }

  /// Squared distance from q to the nearest indexed point other than the one
  /// with id `exclude`; +inf when there is none.
  double nearest_squared(const Point& q, std::size_t exclude = npos) const;

  /// Calls fn(id, squared_distance) for every point within `radius` of q
  /// (inclusive). Order is unspecified.
  template <typename Fn>
  void for_each_within(const Point& q, double radius, Fn&& fn) const {
    if (ids_.empty()) return;
    std::array<long, 3> lo{}, hi{};
    for (int k = 0; k < 3; ++k) {
      if (k >= dim_) {
        lo[k] = hi[k] = 0;
        continue;
      }
      lo[k] = clamp_cell(k, (q[k] - radius - origin_[k]) / side_) - 1;
      hi[k] = clamp_cell(k, (q[k] + radius - origin_[k]) / side_) + 1;
      lo[k] = std::max(lo[k], 0L);
      hi[k] = std::min(hi[k], counts_[k] - 1);
    }
    const double r2 = radius * radius;
    for (long z = lo[2]; z <= hi[2]; ++z) {
      for (long y = lo[1]; y <= hi[1]; ++y) {
        for (long x = lo[0]; x <= hi[0]; ++x) {
          const std::size_t c = flat(x, y, z);
          for (std::size_t s = starts_[c]; s < starts_[c + 1]; ++s) {
            const double d2 = squared_distance(q, points_[s]);
            if (d2 <= r2) fn(ids_[s], d2);
          }
        }
      }
    }
  }

 private:
  long clamp_cell(int axis, double scaled) const;
  std::size_t flat(long x, long y, long z) const {
    return static_cast<std::size_t>((z * counts_[1] + y) * counts_[0] + x);
  }

  int dim_;
  double side_ = 0.0;
  Point origin_{};
  std::array<long, 3> counts_{1, 1, 1};
  std::vector<std::size_t> starts_;  // bucket offsets, size cells + 1
  std::vector<Point> points_;        // bucket-sorted copies
  std::vector<std::size_t> ids_;     // original index of points_[s]
};

}  // namespace jstat
