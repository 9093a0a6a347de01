#include "jstat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jstat {

namespace {

bool separated(const Box& a, const Box& b, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (a.hi[k] < b.lo[k] || b.hi[k] < a.lo[k]) return true;
  }
  return false;
}

void check_box(const Box& b, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(b.lo[k]) || !std::isfinite(b.hi[k]) || !(b.hi[k] > b.lo[k])) {
      throw std::invalid_argument("window component has non-positive side length");
    }
  }
}

bool in_box(const Box& b, const Point& x, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (x[k] < b.lo[k] || x[k] > b.hi[k]) return false;
  }
  return true;
}

bool in_box_strictly(const Box& b, const Point& x, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (!(x[k] > b.lo[k] && x[k] < b.hi[k])) return false;
  }
  return true;
}

double box_boundary_distance(const Box& b, const Point& x, int dim) {
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dim; ++k) {
    d = std::min({d, x[k] - b.lo[k], b.hi[k] - x[k]});
  }
  return d;
}

}  // namespace

Window::Window(WindowKind kind, std::vector<Box> components)
    : kind_(kind), components_(std::move(components)) {
  const int dim = dimension();
  if (components_.empty()) throw std::invalid_argument("window has no components");
  for (auto& c : components_) {
    if (dim == 2) c.lo[2] = c.hi[2] = 0.0;
    check_box(c, dim);
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (std::size_t j = i + 1; j < components_.size(); ++j) {
      if (!separated(components_[i], components_[j], dim)) {
        throw std::invalid_argument("rectangles " + std::to_string(i) + " and " +
                                    std::to_string(j) + " are not separated");
      }
    }
  }
}

Window Window::rect(double x0, double y0, double x1, double y1) {
  return Window(WindowKind::rect2d, {Box{{x0, y0, 0.0}, {x1, y1, 0.0}}});
}

Window Window::rect_union(std::vector<Box> rects) {
  return Window(WindowKind::rect_union2d, std::move(rects));
}

Window Window::box(const Point& lo, const Point& hi) {
  return Window(WindowKind::box3d, {Box{lo, hi}});
}

Window Window::stacked_pair(double width, double height, double gap) {
  if (!(gap > 0.0)) throw std::invalid_argument("stacked_pair gap must be positive");
  return rect_union({Box{{0.0, 0.0, 0.0}, {width, height, 0.0}},
                     Box{{0.0, height + gap, 0.0}, {width, 2.0 * height + gap, 0.0}}});
}

double Window::volume() const {
  const int dim = dimension();
  double total = 0.0;
  for (const auto& c : components_) {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= c.hi[k] - c.lo[k];
    total += v;
  }
  return total;
}

bool Window::contains(const Point& x) const { return component_of(x).has_value(); }

bool Window::contains_strictly(const Point& x) const {
  const int dim = dimension();
  return std::any_of(components_.begin(), components_.end(),
                     [&](const Box& c) { return in_box_strictly(c, x, dim); });
}

std::optional<std::size_t> Window::component_of(const Point& x) const {
  const int dim = dimension();
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (in_box(components_[i], x, dim)) return i;
  }
  return std::nullopt;
}

double Window::boundary_distance(const Point& x) const {
  const auto c = component_of(x);
  if (!c) throw std::domain_error("point lies outside the window");
  return box_boundary_distance(components_[*c], x, dimension());
}

Box Window::bounding_box() const {
  Box bb = components_.front();
  for (const auto& c : components_) {
    for (int k = 0; k < 3; ++k) {
      bb.lo[k] = std::min(bb.lo[k], c.lo[k]);
      bb.hi[k] = std::max(bb.hi[k], c.hi[k]);
    }
  }
  return bb;
}

Window Window::translated(const Point& shift) const {
  std::vector<Box> moved = components_;
  const int dim = dimension();
  for (auto& c : moved) {
    for (int k = 0; k < dim; ++k) {
      c.lo[k] += shift[k];
      c.hi[k] += shift[k];
    }
  }
  return Window(kind_, std::move(moved));
}

double unit_ball_volume(int dimension) {
  switch (dimension) {
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw std::invalid_argument("dimension must be 2 or 3");
  }
}

std::size_t default_grid_target(const Window& w) {
  return w.dimension() == 3 ? kDefaultGridTarget3d : kDefaultGridTarget2d;
}

namespace {

// Lattice of cell centres anchored at the bounding-box corner:
// coordinate along axis k is origin[k] + (i + 0.5) * h.
struct LatticeRange {
  std::array<long, 3> first{};
  std::array<long, 3> last{};  // inclusive; last < first means empty
};

LatticeRange lattice_range(const Box& c, const Point& origin, double h, int dim) {
  LatticeRange r;
  for (int k = 0; k < 3; ++k) {
    if (k >= dim) {
      r.first[k] = r.last[k] = 0;
      continue;
    }
    // Widen by one on each side; exact membership is decided per point.
    r.first[k] = static_cast<long>(std::floor((c.lo[k] - origin[k]) / h - 0.5)) - 1;
    r.last[k] = static_cast<long>(std::ceil((c.hi[k] - origin[k]) / h - 0.5)) + 1;
    r.first[k] = std::max(r.first[k], 0L);
  }
  return r;
}

template <typename Fn>
void for_each_lattice_point(const Window& w, double h, Fn&& fn) {
  const int dim = w.dimension();
  const Point origin = w.bounding_box().lo;
  for (const auto& c : w.components()) {
    const auto range = lattice_range(c, origin, h, dim);
    for (long iz = range.first[2]; iz <= range.last[2]; ++iz) {
      for (long iy = range.first[1]; iy <= range.last[1]; ++iy) {
        for (long ix = range.first[0]; ix <= range.last[0]; ++ix) {
          Point p{origin[0] + (static_cast<double>(ix) + 0.5) * h,
                  origin[1] + (static_cast<double>(iy) + 0.5) * h, 0.0};
          if (dim == 3) p[2] = origin[2] + (static_cast<double>(iz) + 0.5) * h;
          if (in_box_strictly(c, p, dim)) fn(p, c);
        }
      }
    }
  }
}

std::size_t lattice_count(const Window& w, double h) {
  std::size_t m = 0;
  for_each_lattice_point(w, h, [&](const Point&, const Box&) { ++m; });
  return m;
}

}  // namespace

EvaluationGrid make_grid(const Window& w, std::size_t target_count) {
  if (target_count < 100) throw std::invalid_argument("grid target_count must be >= 100");
  const int dim = w.dimension();
  const double target = static_cast<double>(target_count);
  const double vol = w.volume();
  if (!(vol > 0.0) || !std::isfinite(vol)) throw std::invalid_argument("degenerate window");

  double h = std::pow(vol / target, 1.0 / dim);
  bool accepted = false;
  for (int iter = 0; iter < 60; ++iter) {
    const auto m = static_cast<double>(lattice_count(w, h));
    if (std::abs(m - target) <= 0.25 * target) {
      accepted = true;
      break;
    }
    h *= m == 0.0 ? 0.5 : std::pow(m / target, 1.0 / dim);
  }
  if (!accepted) throw std::invalid_argument("could not build an evaluation grid for this window");

  EvaluationGrid grid;
  grid.spacing = h;
  for_each_lattice_point(w, h, [&](const Point& p, const Box& c) {
    grid.points.push_back(p);
    grid.boundary.push_back(box_boundary_distance(c, p, dim));
  });
  return grid;
}

double dilation_coverage_fraction(const EvaluationGrid& grid,
                                  std::span<const double> empty_space, double r) {
  if (empty_space.size() != grid.size()) {
    throw std::invalid_argument("empty-space distances do not match the grid");
  }
  if (grid.size() == 0 || r <= 0.0) return 0.0;
  const auto covered = std::count_if(empty_space.begin(), empty_space.end(),
                                     [r](double d) { return d <= r; });
  return static_cast<double>(covered) / static_cast<double>(grid.size());
}

}  // namespace jstat
