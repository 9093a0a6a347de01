#include "jstat/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace jstat {

namespace {

constexpr long kMaxCellsPerAxis = 1L << 12;

}  // namespace

BucketIndex::BucketIndex(std::span<const Point> points, const Box& bounds, int dimension,
                         double cell_side)
    : dim_(dimension), origin_(bounds.lo) {
  if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("dimension must be 2 or 3");
  double volume = 1.0;
  for (int k = 0; k < dim_; ++k) {
    const double extent = bounds.hi[k] - bounds.lo[k];
    if (!(extent > 0.0)) throw std::invalid_argument("index bounds are degenerate");
    volume *= extent;
  }
  const double n = static_cast<double>(std::max<std::size_t>(points.size(), 1));
  side_ = cell_side > 0.0 ? cell_side : std::pow(volume / n, 1.0 / dim_);
  // Cap the bucket count; a coarser grid is still exact, only slower.
  for (int k = 0; k < dim_; ++k) {
    const double extent = bounds.hi[k] - bounds.lo[k];
    side_ = std::max(side_, extent / static_cast<double>(kMaxCellsPerAxis));
  }
  for (int k = 0; k < dim_; ++k) {
    const double extent = bounds.hi[k] - bounds.lo[k];
    counts_[k] = std::max(1L, static_cast<long>(std::ceil(extent / side_)));
  }

  const std::size_t cells = static_cast<std::size_t>(counts_[0] * counts_[1] * counts_[2]);
  std::vector<std::size_t> cell_of(points.size());
  starts_.assign(cells + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const long x = clamp_cell(0, (p[0] - origin_[0]) / side_);
    const long y = clamp_cell(1, (p[1] - origin_[1]) / side_);
    const long z = dim_ == 3 ? clamp_cell(2, (p[2] - origin_[2]) / side_) : 0;
    cell_of[i] = flat(x, y, z);
    ++starts_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) starts_[c + 1] += starts_[c];

  points_.resize(points.size());
  ids_.resize(points.size());
  std::vector<std::size_t> fill(starts_.begin(), starts_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t slot = fill[cell_of[i]]++;
    points_[slot] = points[i];
    ids_[slot] = i;
  }
}

long BucketIndex::clamp_cell(int axis, double scaled) const {
  if (!(scaled > 0.0)) return 0;
  const double last = static_cast<double>(counts_[axis] - 1);
  if (scaled >= last) return counts_[axis] - 1;
  return static_cast<long>(scaled);
}

double BucketIndex::nearest_squared(const Point& q, std::size_t exclude) const {
  double best = std::numeric_limits<double>::infinity();
  if (ids_.empty()) return best;

  std::array<long, 3> centre{0, 0, 0};
  for (int k = 0; k < dim_; ++k) centre[k] = clamp_cell(k, (q[k] - origin_[k]) / side_);

  long max_ring = 0;
  for (int k = 0; k < dim_; ++k) {
    max_ring = std::max({max_ring, centre[k], counts_[k] - 1 - centre[k]});
  }

  const long zspan = dim_ == 3 ? 1 : 0;
  for (long ring = 0; ring <= max_ring; ++ring) {
    const long zr = ring * zspan;
    for (long dz = -zr; dz <= zr; ++dz) {
      const long z = centre[2] + dz;
      if (z < 0 || z >= counts_[2]) continue;
      for (long dy = -ring; dy <= ring; ++dy) {
        const long y = centre[1] + dy;
        if (y < 0 || y >= counts_[1]) continue;
        const bool on_shell = std::abs(dz) == ring || std::abs(dy) == ring;
        // Interior rows only contribute their two end cells.
        const long step = on_shell ? 1 : std::max(2 * ring, 1L);
        for (long dx = -ring; dx <= ring; dx += step) {
          const long x = centre[0] + dx;
          if (x < 0 || x >= counts_[0]) continue;
          const std::size_t c = flat(x, y, z);
          for (std::size_t s = starts_[c]; s < starts_[c + 1]; ++s) {
            if (ids_[s] == exclude) continue;
            const double d2 = squared_distance(q, points_[s]);
            if (d2 < best) best = d2;
          }
        }
      }
    }
    // Unvisited buckets are at least `ring` whole cells away from q.
    const double reach = (static_cast<double>(ring) - 1e-6) * side_;
    if (reach > 0.0 && best <= reach * reach) break;
  }
  return best;
}

}  // namespace jstat
