#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "jstat/geometry.hpp"
#include "jstat/patterns.hpp"
#include "oracles.hpp"

using jstat::Box;
using jstat::Point;
using jstat::Window;

TEST_CASE("volume") {
  CHECK(Window::unit_square().volume() == 1.0);
  CHECK(Window::unit_cube().volume() == 1.0);
  CHECK(Window::stacked_pair(3.125, 0.16, 0.02).volume() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Window::rect(0, 0, 10, 1).volume() == 10.0);
}

TEST_CASE("volume is additive over union components") {
  const auto w = Window::rect_union({Box{{0, 0, 0}, {0.5, 0.25, 0}}, Box{{0, 0.5, 0}, {0.75, 1, 0}}});
  CHECK(w.volume() == 0.5 * 0.25 + 0.75 * 0.5);
}

TEST_CASE("invalid windows are rejected") {
  CHECK_THROWS_AS(Window::rect(0, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Window::rect(0, 0, 1, -1), std::invalid_argument);
  CHECK_THROWS_AS(Window::box({0, 0, 0}, {1, 1, 0}), std::invalid_argument);
  // touching components have no separation
  CHECK_THROWS_AS(Window::rect_union({Box{{0, 0, 0}, {1, 1, 0}}, Box{{1, 0, 0}, {2, 1, 0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Window::stacked_pair(1, 1, 0), std::invalid_argument);
}

TEST_CASE("boundary distance") {
  const auto sq = Window::unit_square();
  CHECK(sq.boundary_distance({0.5, 0.5, 0}) == 0.5);
  CHECK(sq.boundary_distance({0.1, 0.3, 0}) == 0.1);
  CHECK(Window::unit_cube().boundary_distance({0.5, 0.5, 0.02}) == 0.02);
  CHECK_THROWS_AS(sq.boundary_distance({1.5, 0.5, 0}), std::domain_error);

  // the gap between union components counts as boundary
  const auto two = Window::stacked_pair(3.125, 0.16, 0.02);
  CHECK(two.boundary_distance({1.0, 0.15, 0}) == doctest::Approx(0.01));
  CHECK(two.boundary_distance({1.0, 0.19, 0}) == doctest::Approx(0.01));
  CHECK_THROWS_AS(two.boundary_distance({1.0, 0.17, 0}), std::domain_error);
}

TEST_CASE("boundary distance is at most half the smallest side") {
  std::mt19937_64 gen(4);
  const auto w = Window::stacked_pair(3.125, 0.16, 0.02);
  std::uniform_real_distribution<double> ux(0.0, 3.125), uy(0.0, 0.34);
  for (int i = 0; i < 2000; ++i) {
    const Point x{ux(gen), uy(gen), 0.0};
    if (!w.contains(x)) continue;
    CHECK(w.boundary_distance(x) <= 0.08);
  }
}

TEST_CASE("containment") {
  const auto sq = Window::unit_square();
  CHECK(sq.contains({0, 0, 0}));
  CHECK_FALSE(sq.contains_strictly({0, 0.5, 0}));
  CHECK(sq.contains_strictly({1e-9, 0.5, 0}));
  const auto two = Window::stacked_pair(1, 0.4, 0.2);
  CHECK(two.component_of({0.5, 0.7, 0}) == 1u);
  CHECK_FALSE(two.component_of({0.5, 0.5, 0}).has_value());
}

TEST_CASE("make_grid on uniform windows") {
  const auto g2 = jstat::make_grid(Window::unit_square(), 65536);
  CHECK(g2.size() == 65536);
  CHECK(g2.spacing == 1.0 / 256);
  const auto g3 = jstat::make_grid(Window::unit_cube(), 262144);
  CHECK(g3.size() == 262144);
  CHECK(g3.spacing == doctest::Approx(1.0 / 64).epsilon(1e-12));
  CHECK_THROWS_AS(jstat::make_grid(Window::unit_square(), 10), std::invalid_argument);
}

TEST_CASE("make_grid on the two-rectangle window matches a lattice count") {
  const auto w = Window::stacked_pair(3.125, 0.16, 0.02);
  const auto g = jstat::make_grid(w, 65536);
  const double h = g.spacing;
  const std::size_t expected = oracle::lattice_count_2d(0, 0, 0, 0, 3.125, 0.16, h) +
                               oracle::lattice_count_2d(0, 0, 0, 0.18, 3.125, 0.34, h);
  CHECK(g.size() == expected);
  CHECK(std::abs(static_cast<double>(g.size()) - 65536.0) <= 0.25 * 65536.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(w.contains(g.points[i]));
    REQUIRE(g.boundary[i] == w.boundary_distance(g.points[i]));
  }
}

TEST_CASE("make_grid is deterministic") {
  const auto w = Window::rect(0, 0, 10, 1);
  const auto a = jstat::make_grid(w, 20000);
  const auto b = jstat::make_grid(w, 20000);
  CHECK(a.spacing == b.spacing);
  CHECK(a.points == b.points);
  CHECK(a.boundary == b.boundary);
}

namespace {

double single_point_coverage(std::size_t target, double r) {
  const auto w = Window::unit_square();
  const jstat::PointPattern p(w, {Point{0.5, 0.5, 0}});
  const auto grid = jstat::make_grid(w, target);
  const auto es = jstat::empty_space_distances(p, grid);
  return jstat::dilation_coverage_fraction(grid, es.values, r);
}

}  // namespace

TEST_CASE("coverage of a single disc") {
  const double r = 0.1;
  const double area = std::numbers::pi * r * r;
  for (std::size_t target : {std::size_t{65536}, std::size_t{262144}}) {
    const double h = 1.0 / std::sqrt(static_cast<double>(target));
    const double cov = single_point_coverage(target, r);
    CHECK(std::abs(cov - area) <= 4.0 * h * r);
    // discretisation error is bounded by h times the disc perimeter
    CHECK(std::abs(cov - area) <= h * 2.0 * std::numbers::pi * r);
  }
}

TEST_CASE("coverage degenerate cases") {
  const auto w = Window::unit_square();
  const auto grid = jstat::make_grid(w, 4096);
  const jstat::PointPattern empty(w, {});
  const auto es = jstat::empty_space_distances(empty, grid);
  CHECK(jstat::dilation_coverage_fraction(grid, es.values, 0.3) == 0.0);
  CHECK(jstat::dilation_coverage_fraction(grid, es.values, 10.0) == 0.0);

  const jstat::PointPattern one(w, {Point{grid.points[100][0], grid.points[100][1], 0}});
  const auto es1 = jstat::empty_space_distances(one, grid);
  CHECK(jstat::dilation_coverage_fraction(grid, es1.values, 0.0) == 0.0);
}

TEST_CASE("coverage is a nondecreasing step function in [0,1]") {
  const auto w = Window::unit_square();
  const auto grid = jstat::make_grid(w, 4096);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<Point> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({u(gen), u(gen), 0});
  const jstat::PointPattern p(w, pts);
  const auto es = jstat::empty_space_distances(p, grid);
  double prev = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double c = jstat::dilation_coverage_fraction(grid, es.values, k * 0.005);
    CHECK(c >= prev);
    CHECK(c <= 1.0);
    prev = c;
  }
  CHECK(prev == 1.0);
  // right-continuous: the value at a jump includes the jumping grid point
  const double d = es.values[17];
  CHECK(jstat::dilation_coverage_fraction(grid, es.values, d) >
        jstat::dilation_coverage_fraction(grid, es.values, std::nextafter(d, 0.0)));
}

TEST_CASE("unit ball volume") {
  CHECK(jstat::unit_ball_volume(2) == std::numbers::pi);
  CHECK(jstat::unit_ball_volume(3) == doctest::Approx(4.0 / 3.0 * std::numbers::pi));
}
