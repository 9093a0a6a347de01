#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace jstat {

/// Coordinates in length units. Planar points keep z == 0 so the same
/// distance code serves 2D and 3D.
using Point = std::array<double, 3>;

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

/// Axis-aligned box [lo, hi]. In 2D the z extent is [0, 0] and ignored.
struct Box {
  Point lo{};
  Point hi{};

  friend bool operator==(const Box&, const Box&) = default;
};

enum class WindowKind { rect2d, rect_union2d, box3d };

/// Bounded observation region: a rectangle, a union of well-separated
/// rectangles, or a 3D box.
class Window {
 public:
  static Window rect(double x0, double y0, double x1, double y1);
  static Window rect_union(std::vector<Box> rects);
  static Window box(const Point& lo, const Point& hi);
  static Window unit_square() { return rect(0.0, 0.0, 1.0, 1.0); }
  static Window unit_cube() { return box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}); }

  /// Two equal rectangles of size width x height stacked vertically with a
  /// gap between them: [0,w]x[0,h] and [0,w]x[h+gap, 2h+gap].
  static Window stacked_pair(double width, double height, double gap);

  WindowKind kind() const { return kind_; }
  int dimension() const { return kind_ == WindowKind::box3d ? 3 : 2; }
  std::span<const Box> components() const { return components_; }

  /// Exact volume (area in 2D), summed over components.
  double volume() const;

  /// Closed containment.
  bool contains(const Point& x) const;
  /// Interior containment, used for data points.
  bool contains_strictly(const Point& x) const;
  std::optional<std::size_t> component_of(const Point& x) const;

  /// Distance from x to the boundary of the component containing it.
  /// Throws std::domain_error when x is outside the window.
  double boundary_distance(const Point& x) const;

  Box bounding_box() const;
  Window translated(const Point& shift) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window(WindowKind kind, std::vector<Box> components);

  WindowKind kind_;
  std::vector<Box> components_;
};

/// Volume of the unit ball in dimension 2 or 3.
double unit_ball_volume(int dimension);

inline constexpr std::size_t kDefaultGridTarget2d = 65536;
inline constexpr std::size_t kDefaultGridTarget3d = 262144;

std::size_t default_grid_target(const Window& w);

/// Regular lattice of cell centres clipped to a window. `boundary` holds the
/// boundary distance of every grid point (censoring for reduced-sample and
/// Kaplan-Meier estimators).
struct EvaluationGrid {
  double spacing = 0.0;
  std::vector<Point> points;
  std::vector<double> boundary;

  std::size_t size() const { return points.size(); }
};

/// Builds a lattice with equal spacing per axis whose in-window count is
/// within 25% of `target_count`. Deterministic in (window, target_count).
EvaluationGrid make_grid(const Window& w, std::size_t target_count);

/// Fraction of grid points whose nearest-data-point distance is <= r, i.e.
/// the discretised |W ∩ (X ⊕ B(0,r))| / |W|. Zero at r <= 0.
double dilation_coverage_fraction(const EvaluationGrid& grid,
                                  std::span<const double> empty_space, double r);

}  // namespace jstat
