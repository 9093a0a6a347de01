#include <sstream>
#include <string>

#include "doctest.h"
#include "jstat/inference.hpp"
#include "jstat/io.hpp"
#include "jstat/simulate.hpp"
#include "json.hpp"

using jstat::FormatError;
using jstat::Point;
using jstat::PointPattern;
using jstat::Window;

TEST_CASE("shortest round-trip doubles") {
  CHECK(jstat::format_double(0.1) == "0.1");
  CHECK(jstat::format_double(1.0) == "1");
  const double x = 0.7075513636989531;
  CHECK(std::stod(jstat::format_double(x)) == x);
}

TEST_CASE("window JSON") {
  CHECK(nlohmann::json::parse(jstat::window_to_json(Window::unit_square())) ==
        nlohmann::json::parse(R"({"kind":"rect2d","lo":[0,0],"hi":[1,1]})"));
  for (const auto& w : {Window::unit_square(), Window::unit_cube(), Window::rect(0, 0, 10, 1),
                        Window::stacked_pair(3.125, 0.16, 0.02)}) {
    CHECK(jstat::window_from_json(jstat::window_to_json(w)) == w);
  }
  CHECK_THROWS_AS(jstat::window_from_json(R"({"kind":"disc"})"), FormatError);
  CHECK_THROWS_AS(jstat::window_from_json("not json"), FormatError);
}

TEST_CASE("window specs") {
  CHECK(jstat::parse_window_spec("unit-square") == Window::unit_square());
  CHECK(jstat::parse_window_spec("unit-cube") == Window::unit_cube());
  CHECK(jstat::parse_window_spec("rect:10,1") == Window::rect(0, 0, 10, 1));
  CHECK(jstat::parse_window_spec("box:1,2,3") == Window::box({0, 0, 0}, {1, 2, 3}));
  CHECK(jstat::parse_window_spec("two-rect:3.125,0.16,0.02") == Window::stacked_pair(3.125, 0.16, 0.02));
  CHECK(jstat::parse_window_spec(R"({"kind":"rect2d","lo":[0,0],"hi":[2,1]})") == Window::rect(0, 0, 2, 1));
  CHECK_THROWS_AS(jstat::parse_window_spec("rect:1"), FormatError);
  CHECK_THROWS_AS(jstat::parse_window_spec("hexagon"), FormatError);
  CHECK_THROWS_AS(jstat::parse_window_spec("rect:a,b"), FormatError);
}

TEST_CASE("config hash") {
  const auto h = jstat::config_hash(Window::unit_square(), 100);
  CHECK(h.size() == 16);
  CHECK(h == jstat::config_hash(Window::unit_square(), 100));
  CHECK(h != jstat::config_hash(Window::unit_square(), 25));
  CHECK(h != jstat::config_hash(Window::rect(0, 0, 1, 2), 100));
}

TEST_CASE("pattern CSV round trip") {
  for (const auto& w : {Window::unit_square(), Window::unit_cube(), Window::stacked_pair(3.125, 0.16, 0.02)}) {
    const auto p = jstat::sim_poisson(w, 80, 3);
    std::stringstream ss;
    jstat::write_pattern_csv(ss, p);
    const auto q = jstat::read_pattern_csv(ss, w);
    REQUIRE(q.size() == p.size());
    CHECK(std::equal(p.points().begin(), p.points().end(), q.points().begin()));
  }
  std::stringstream empty("x,y\n");
  CHECK(jstat::read_pattern_csv(empty, Window::unit_square()).size() == 0);
}

TEST_CASE("malformed pattern CSV") {
  const auto sq = Window::unit_square();
  auto read = [&](const std::string& text, const Window& w) {
    std::stringstream ss(text);
    return jstat::read_pattern_csv(ss, w);
  };
  CHECK_THROWS_AS(read("", sq), FormatError);
  CHECK_THROWS_AS(read("a,b\n0.1,0.2\n", sq), FormatError);
  CHECK_THROWS_AS(read("x,y\n0.1\n", sq), FormatError);
  CHECK_THROWS_AS(read("x,y\n0.1,zz\n", sq), FormatError);
  CHECK_THROWS_AS(read("x,y\n1.5,0.5\n", sq), FormatError);
  CHECK_THROWS_AS(read("x,y\n0.5,0.5\n0.5,0.5\n", sq), FormatError);
  CHECK_THROWS_AS(read("x,y\n0.5,0.5\n", Window::unit_cube()), FormatError);
  CHECK(read("x,y\r\n0.5,0.5\r\n", sq).size() == 1);
}

TEST_CASE("estimate CSV masks undefined cells") {
  const auto sq = Window::unit_square();
  const PointPattern one(sq, {Point{0.5, 0.5, 0}});
  const auto t = jstat::estimate_all(one, jstat::make_grid(sq, 1024), jstat::RGrid::linear(0.1, 3));
  std::ostringstream out;
  jstat::write_estimate_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == jstat::kEstimateCsvHeader);
  std::getline(in, line);
  CHECK(line == "0,0,,,0,,,0,,");
}

TEST_CASE("null JSON round trip and tamper check") {
  const jstat::Estimator e[] = {jstat::Estimator::reduced_sample};
  jstat::SimConfig c;
  c.model = jstat::Model::poisson;
  c.intensity = 100;
  c.seed = 10;
  jstat::NullOptions opts;
  opts.grid_target = 1024;
  const auto n = jstat::build_nulls(c, e, 100, jstat::default_rgrid(100, 2, 32), opts).front();
  const auto text = jstat::null_to_json(n);
  const auto back = jstat::null_from_json(text);
  CHECK(back.estimator == n.estimator);
  CHECK(back.window == n.window);
  CHECK(back.rgrid == n.rgrid);
  CHECK(back.mean == n.mean);
  CHECK(back.sd == n.sd);
  CHECK(back.tau == n.tau);
  CHECK(back.r0 == n.r0);
  CHECK(back.quantiles.q975 == n.quantiles.q975);
  CHECK(jstat::null_to_json(back) == text);

  auto doc = nlohmann::json::parse(text);
  CHECK(doc.at("format") == "jstat-null");
  CHECK(doc.at("estimator") == "J_rs");
  CHECK(doc.at("config_hash") == jstat::config_hash(n.window, 100));
  doc["intensity"] = 50.0;
  CHECK_THROWS_AS(jstat::null_from_json(doc.dump()), FormatError);
  CHECK_THROWS_AS(jstat::null_from_json(R"({"format":"other"})"), FormatError);
}

TEST_CASE("power CSV") {
  jstat::PowerCell cell;
  cell.param1 = 0.05;
  cell.param2 = 100;
  cell.reps = 200;
  cell.power.push_back({jstat::Estimator::uncorrected, {0.5, 0.0, 0.625}, 0});
  std::ostringstream out;
  jstat::write_power_csv(out, std::span(&cell, 1));
  CHECK(out.str() == std::string(jstat::kPowerCsvHeader) + "\n0.05,100,200,0.5,0,0.625,J_W\n");
}
