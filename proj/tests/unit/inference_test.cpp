#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "jstat/inference.hpp"
#include "jstat/rng.hpp"

using jstat::Estimator;
using jstat::FunctionEstimate;
using jstat::NullDistribution;
using jstat::RGrid;
using jstat::Window;

namespace {

constexpr std::size_t kSmallGrid = 4096;

jstat::SimConfig poisson100(std::uint64_t seed) {
  jstat::SimConfig c;
  c.model = jstat::Model::poisson;
  c.intensity = 100;
  c.seed = seed;
  return c;
}

// Shared small nulls: 400 replicates on a coarse grid keep the suite quick.
const std::vector<NullDistribution>& small_nulls() {
  static const auto nulls = [] {
    const Estimator all[] = {Estimator::uncorrected, Estimator::reduced_sample,
                             Estimator::kaplan_meier};
    jstat::NullOptions opts;
    opts.grid_target = kSmallGrid;
    return jstat::build_nulls(poisson100(1234), all, 400, jstat::default_rgrid(100, 2, 128), opts);
  }();
  return nulls;
}

NullDistribution synthetic_null(const RGrid& r, double r0) {
  NullDistribution n;
  n.rgrid = r;
  n.mean.assign(r.size(), 1.0);
  n.sd.assign(r.size(), 0.25);
  n.sd[0] = 0.0;
  n.r0 = r0;
  return n;
}

}  // namespace

TEST_CASE("type-7 quantiles") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(jstat::empirical_quantile(v, 0.0) == 1.0);
  CHECK(jstat::empirical_quantile(v, 1.0) == 4.0);
  CHECK(jstat::empirical_quantile(v, 0.5) == 2.5);
  CHECK(jstat::empirical_quantile(v, 0.25) == 1.75);
  const std::vector<double> one{7};
  CHECK(jstat::empirical_quantile(one, 0.3) == 7.0);
}

TEST_CASE("r0 is the 0.9 quantile of the Poisson empty-space function") {
  const double r0 = std::sqrt(std::log(10.0) / (100.0 * std::numbers::pi));
  CHECK(r0 == doctest::Approx(0.0856).epsilon(1e-3));
  CHECK(jstat::poisson_empty_space_quantile(jstat::kR0Probability, 100, 2) == doctest::Approx(r0).epsilon(1e-14));
  CHECK(small_nulls().front().r0 == doctest::Approx(r0).epsilon(1e-14));
}

TEST_CASE("tau on constructed curves") {
  // dyadic grid keeps the cell widths exact
  std::vector<double> rv(65);
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = static_cast<double>(i) / 512.0;
  const RGrid r(rv);
  const double r0 = 40.0 / 512.0;
  const auto null = synthetic_null(r, r0);

  FunctionEstimate one(r, Estimator::uncorrected, jstat::Target::J);
  FunctionEstimate up(r, Estimator::uncorrected, jstat::Target::J);
  for (std::size_t i = 0; i < r.size(); ++i) {
    one.set(i, 1.0);
    up.set(i, 1.0 + null.sd[i]);
  }
  CHECK(jstat::tau(one, null) == 0.0);
  const auto t = jstat::tau_detailed(up, null);
  // sd vanishes only at r = 0, never a right cell end, so every cell counts
  CHECK(t.r_min == 0.0);
  CHECK(t.r_end == r0);
  CHECK(t.value == r0 - t.r_min);
  CHECK_FALSE(t.truncated);
}

TEST_CASE("reflection about one negates tau exactly") {
  std::vector<double> rv(65);
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = static_cast<double>(i) / 512.0;
  const RGrid r(rv);
  const auto null = synthetic_null(r, 48.0 / 512.0);
  jstat::Rng rng(17);
  FunctionEstimate j(r, Estimator::uncorrected, jstat::Target::J);
  FunctionEstimate refl(r, Estimator::uncorrected, jstat::Target::J);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v = 1.0 + std::floor((rng.uniform() - 0.5) * 512.0) / 1024.0;
    j.set(i, v);
    refl.set(i, 2.0 - v);
  }
  CHECK(jstat::tau(refl, null) == -jstat::tau(j, null));
}

TEST_CASE("tau stops at the first undefined cell") {
  std::vector<double> rv(65);
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = static_cast<double>(i) / 512.0;
  const RGrid r(rv);
  const auto null = synthetic_null(r, 48.0 / 512.0);
  FunctionEstimate j(r, Estimator::uncorrected, jstat::Target::J);
  for (std::size_t i = 0; i < 20; ++i) j.set(i, 1.25);
  const auto t = jstat::tau_detailed(j, null);
  CHECK(t.truncated);
  CHECK(t.r_end == r[19]);
  CHECK(t.value == 19.0 / 512.0);

  FunctionEstimate other(RGrid::linear(0.1, 65), Estimator::uncorrected, jstat::Target::J);
  CHECK_THROWS_AS(jstat::tau(other, null), std::invalid_argument);
}

TEST_CASE("decisions") {
  const jstat::Quantiles q{-2, -1, 1, 2};
  auto d = jstat::decide(-1.5, q);
  CHECK_FALSE(d.reject_two_sided);
  CHECK(d.reject_clustering);
  CHECK_FALSE(d.reject_regularity);
  d = jstat::decide(2.5, q);
  CHECK(d.reject_two_sided);
  CHECK(d.reject_regularity);
  d = jstat::decide(0.0, q);
  CHECK_FALSE((d.reject_two_sided || d.reject_clustering || d.reject_regularity));
}

TEST_CASE("null distribution invariants") {
  for (const auto& n : small_nulls()) {
    CHECK(n.reps == 400);
    CHECK(n.tau.size() == 400);
    CHECK(n.grid_target == kSmallGrid);
    CHECK(n.quantiles.q025 <= n.quantiles.q05);
    CHECK(n.quantiles.q05 <= n.quantiles.q95);
    CHECK(n.quantiles.q95 <= n.quantiles.q975);
    CHECK(n.r0 <= n.rgrid.back());
    for (double s : n.sd) REQUIRE(s >= 0.0);
  }
  const auto& jw = small_nulls().front();
  CHECK(jw.estimator == Estimator::uncorrected);
  for (std::size_t i = 0; jw.rgrid[i] <= 0.05; ++i) {
    CHECK(jw.mean[i] == doctest::Approx(1.0).epsilon(0.05));
  }
  // sd grows over the upper half of the range
  const std::size_t mid = jw.rgrid.size() / 2;
  CHECK(jw.sd.back() > jw.sd[mid]);
  CHECK(jw.sd[mid + (jw.rgrid.size() - mid) / 2] > jw.sd[mid]);
}

TEST_CASE("null construction preconditions") {
  const Estimator e[] = {Estimator::uncorrected};
  jstat::NullOptions opts;
  opts.grid_target = kSmallGrid;
  CHECK_THROWS_AS(jstat::build_nulls(poisson100(1), e, 50, jstat::default_rgrid(100, 2), opts),
                  std::invalid_argument);
  opts.r0 = 0.5;
  CHECK_THROWS_AS(jstat::build_nulls(poisson100(1), e, 200, jstat::default_rgrid(100, 2), opts),
                  std::invalid_argument);
}

TEST_CASE("null construction is deterministic and thread-count independent") {
  const Estimator e[] = {Estimator::kaplan_meier};
  jstat::NullOptions opts;
  opts.grid_target = kSmallGrid;
  opts.jobs = 1;
  const auto r = jstat::default_rgrid(100, 2, 64);
  const auto a = jstat::build_nulls(poisson100(3), e, 120, r, opts);
  opts.jobs = 3;
  const auto b = jstat::build_nulls(poisson100(3), e, 120, r, opts);
  CHECK(a.front().tau == b.front().tau);
  CHECK(a.front().sd == b.front().sd);
}

TEST_CASE("sqrt transform") {
  const Estimator e[] = {Estimator::uncorrected};
  jstat::NullOptions opts;
  opts.grid_target = kSmallGrid;
  opts.transform = jstat::Transform::sqrt;
  const auto n = jstat::build_nulls(poisson100(8), e, 150, jstat::default_rgrid(100, 2, 64), opts);
  CHECK(n.front().transform == jstat::Transform::sqrt);
  const auto p = jstat::sim_poisson(Window::unit_square(), 100, 999);
  const auto t = jstat::test_csr(p, n.front());
  CHECK(std::isfinite(t.tau));
}

TEST_CASE("test_csr on a null-drawn pattern") {
  const auto& null = small_nulls().front();
  const auto p = jstat::sim_poisson(Window::unit_square(), 100, 4242);
  const auto t = jstat::test_csr(p, null);
  CHECK(std::isfinite(t.tau));
  CHECK(t.estimator == Estimator::uncorrected);
  CHECK(t.quantiles.q975 == null.quantiles.q975);

  const auto q = jstat::sim_poisson(Window::rect(0, 0, 2, 1), 50, 1);
  CHECK_THROWS_AS(jstat::test_csr(q, null), std::invalid_argument);
}

TEST_CASE("clustered patterns give negative tau") {
  const auto& null = small_nulls().front();
  const auto grid = jstat::make_grid(null.window, kSmallGrid);
  int negative = 0;
  const int reps = 200;
  for (int s = 0; s < reps; ++s) {
    const auto p = jstat::sim_matern_cluster(null.window, 25, 4, 0.1, jstat::derive_seed(55, s));
    if (p.size() < 2) continue;
    negative += jstat::test_csr(p, null, &grid).tau < 0.0 ? 1 : 0;
  }
  CHECK(negative >= 0.9 * reps);
}

TEST_CASE("envelope basics") {
  const auto sq = Window::unit_square();
  const auto p = jstat::sim_poisson(sq, 100, 31);
  const auto r = jstat::default_rgrid(100, 2, 64);
  jstat::EnvelopeOptions opts;
  opts.grid_target = kSmallGrid;

  // one simulation: the envelope is that simulated curve
  const auto one = jstat::envelope(p, Estimator::uncorrected, 1, r, 6, opts);
  const auto sim = jstat::sim_binomial(sq, p.size(), jstat::derive_seed(6, 0));
  const auto curve = jstat::estimate_J(sim, jstat::make_grid(sq, kSmallGrid), r, Estimator::uncorrected);
  for (std::size_t i = 0; i < r.size(); ++i) {
    REQUIRE(one.defined[i] == curve.defined[i]);
    if (curve.defined[i]) {
      REQUIRE(one.lo[i] == curve.values[i]);
      REQUIRE(one.hi[i] == curve.values[i]);
    }
  }

  const auto a = jstat::envelope(p, Estimator::reduced_sample, 19, r, 6, opts);
  opts.jobs = 2;
  const auto b = jstat::envelope(p, Estimator::reduced_sample, 19, r, 6, opts);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.observed.values == b.observed.values);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (a.defined[i]) REQUIRE(a.lo[i] <= a.hi[i]);
  }
}

TEST_CASE("envelope coverage under the null") {
  const auto sq = Window::unit_square();
  const auto r = jstat::default_rgrid(100, 2, 64);
  jstat::EnvelopeOptions opts;
  opts.grid_target = kSmallGrid;
  int good_runs = 0;
  const int runs = 20;
  for (int run = 0; run < runs; ++run) {
    const auto p = jstat::sim_poisson(sq, 100, jstat::derive_seed(77, run));
    const auto env = jstat::envelope(p, Estimator::uncorrected, 99, r, jstat::derive_seed(78, run), opts);
    std::size_t compared = 0, inside = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (!env.defined[i] || !env.observed.defined[i]) continue;
      ++compared;
      const double v = env.observed.values[i];
      inside += v >= env.lo[i] && v <= env.hi[i] ? 1 : 0;
    }
    good_runs += inside >= 0.95 * static_cast<double>(compared) ? 1 : 0;
  }
  CHECK(good_runs >= 0.9 * runs);
}

TEST_CASE("power at the null is close to the nominal level") {
  const auto& nulls = small_nulls();
  jstat::PowerCellSpec cell{poisson100(0), 100, 0};
  jstat::PowerOptions opts;
  opts.reps = 400;
  opts.seed = 5;
  const auto res = jstat::power_study(std::span(&cell, 1), nulls, opts);
  REQUIRE(res.size() == 1);
  CHECK(res[0].reps == 400);
  CHECK(res[0].failures == 0);
  // the null quantiles come from 400 reps themselves, which roughly doubles
  // the variance of the observed level
  const double se = std::sqrt(0.05 * 0.95 / 400 + 0.05 * 0.95 / 400);
  for (const auto& ep : res[0].power) {
    CAPTURE(jstat::short_name(ep.estimator));
    CHECK(std::abs(ep.rejections.two_sided - 0.05) <= 3 * se);
  }
}

TEST_CASE("power study preconditions and determinism") {
  const auto& nulls = small_nulls();
  auto model = poisson100(0);
  model.model = jstat::Model::matern2;
  model.radius = 0.03;
  const jstat::PowerCellSpec cells[] = {{model, 0.03, 100}};
  jstat::PowerOptions opts;
  opts.reps = 10;
  CHECK_THROWS_AS(jstat::power_study(cells, nulls, opts), std::invalid_argument);
  opts.reps = 60;
  opts.seed = 9;
  const auto a = jstat::power_study(cells, std::span(nulls).first(1), opts);
  opts.jobs = 2;
  const auto b = jstat::power_study(cells, std::span(nulls).first(1), opts);
  CHECK(a[0].power[0].rejections.two_sided == b[0].power[0].rejections.two_sided);
  CHECK(a[0].power[0].rejections.regularity == b[0].power[0].rejections.regularity);
}

TEST_CASE("default hard-core radii") {
  const auto r = jstat::default_hardcore_radii();
  CHECK(r.size() == 22);
  CHECK(r.front() > 0.0);
  CHECK(r.back() == doctest::Approx(0.11));
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
}

TEST_CASE("expected intensity per model") {
  auto c = poisson100(0);
  CHECK(jstat::expected_intensity(c) == 100.0);
  c.model = jstat::Model::binomial;
  c.count = 50;
  c.window = jstat::Window::rect(0, 0, 2, 1);
  CHECK(jstat::expected_intensity(c) == 25.0);
  c = poisson100(0);
  c.model = jstat::Model::matern2;
  c.radius = 0.1;
  CHECK(jstat::expected_intensity(c) == jstat::matern2_retained_intensity(100, 0.1, 2));
  c.model = jstat::Model::matern_cluster;
  c.kappa = 25;
  c.mu = 4;
  CHECK(jstat::expected_intensity(c) == 100.0);
}

TEST_CASE("intensity-matched power") {
  auto hard = poisson100(0);
  hard.model = jstat::Model::matern2;
  hard.radius = 0.1;
  const jstat::PowerCellSpec cells[] = {{hard, 0.1, 100}};
  const jstat::Estimator w[] = {jstat::Estimator::uncorrected};
  jstat::MatchedNullOptions nulls;
  nulls.reps = 200;
  nulls.seed = 3;
  nulls.r_count = 128;
  nulls.null.grid_target = 4096;
  jstat::PowerOptions opts;
  opts.reps = 50;
  opts.seed = 4;
  const auto a = jstat::power_study_matched(cells, w, nulls, opts);
  REQUIRE(a.size() == 1);
  // retained intensity ~30 with a 0.1 hard core is far from Poisson(30)
  CHECK(a[0].power[0].rejections.regularity >= 0.9);
  const auto b = jstat::power_study_matched(cells, w, nulls, opts);
  CHECK(b[0].power[0].rejections.two_sided == a[0].power[0].rejections.two_sided);
}
