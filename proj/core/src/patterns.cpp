#include "jstat/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jstat {

PointPattern::PointPattern(Window window, std::vector<Point> points)
    : window_(std::move(window)), points_(std::move(points)) {
  const int dim = window_.dimension();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    auto& p = points_[i];
    if (dim == 2) p[2] = 0.0;
    if (!window_.contains_strictly(p)) {
      throw std::invalid_argument("point " + std::to_string(i) +
                                  " is not strictly inside the window");
    }
  }
  std::vector<Point> sorted = points_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("pattern contains duplicate points");
  }
  index_ = std::make_shared<const BucketIndex>(points_, window_.bounding_box(), dim);
}

double PointPattern::intensity() const {
  return static_cast<double>(points_.size()) / window_.volume();
}

DistanceSet nn_distances(const PointPattern& p) {
  if (p.size() < 2) throw std::invalid_argument("nearest-neighbour undefined for n < 2");
  DistanceSet out;
  out.kind = DistanceKind::nearest_neighbour;
  out.values.resize(p.size());
  out.censor.resize(p.size());
  const auto pts = p.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.values[i] = std::sqrt(p.index().nearest_squared(pts[i], i));
    out.censor[i] = p.window().boundary_distance(pts[i]);
  }
  return out;
}

DistanceSet empty_space_distances(const PointPattern& p, const EvaluationGrid& grid) {
  DistanceSet out;
  out.kind = DistanceKind::empty_space;
  out.values.resize(grid.size());
  out.censor = grid.boundary;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.values[i] = std::sqrt(p.index().nearest_squared(grid.points[i]));
  }
  return out;
}

DomainBounds max_distances(const DistanceSet& nn, const DistanceSet& es) {
  if (nn.values.empty() || es.values.empty()) {
    throw std::invalid_argument("max_distances needs non-empty distance sets");
  }
  return {*std::max_element(nn.values.begin(), nn.values.end()),
          *std::max_element(es.values.begin(), es.values.end())};
}

}  // namespace jstat
