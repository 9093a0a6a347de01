#include "jstat/estimate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace jstat {

// ---------------------------------------------------------------------------
// RGrid

RGrid::RGrid(std::vector<double> r) : r_(std::move(r)) {
  if (r_.empty() || r_.front() != 0.0) throw std::invalid_argument("r grid must start at 0");
  for (std::size_t i = 1; i < r_.size(); ++i) {
    if (!std::isfinite(r_[i]) || !(r_[i] > r_[i - 1])) {
      throw std::invalid_argument("r grid must be finite and strictly increasing");
    }
  }
}

RGrid RGrid::linear(double rmax, std::size_t count) {
  if (count < 2 || !(rmax > 0.0) || !std::isfinite(rmax)) {
    throw std::invalid_argument("linear r grid needs count >= 2 and rmax > 0");
  }
  std::vector<double> r(count);
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) r[i] = rmax * (static_cast<double>(i) / last);
  return RGrid(std::move(r));
}

std::size_t RGrid::nearest_index(double r) const {
  auto it = std::lower_bound(r_.begin(), r_.end(), r);
  if (it == r_.end()) return r_.size() - 1;
  const auto i = static_cast<std::size_t>(it - r_.begin());
  if (i > 0 && r - r_[i - 1] < *it - r) return i - 1;
  return i;
}

double poisson_empty_space(double r, double intensity, int dimension) {
  return -std::expm1(-intensity * unit_ball_volume(dimension) * std::pow(r, dimension));
}

double poisson_empty_space_quantile(double p, double intensity, int dimension) {
  if (!(p > 0.0 && p < 1.0) || !(intensity > 0.0)) {
    throw std::invalid_argument("quantile needs p in (0,1) and intensity > 0");
  }
  return std::pow(-std::log1p(-p) / (intensity * unit_ball_volume(dimension)),
                  1.0 / dimension);
}

RGrid default_rgrid(double intensity, int dimension, std::size_t count) {
  return RGrid::linear(poisson_empty_space_quantile(0.99, intensity, dimension), count);
}

std::string_view short_name(Estimator e) {
  switch (e) {
    case Estimator::uncorrected: return "W";
    case Estimator::reduced_sample: return "rs";
    case Estimator::kaplan_meier: return "km";
  }
  return "?";
}

Estimator parse_estimator(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "w" || s == "jw" || s == "j_w" || s == "uncorrected") return Estimator::uncorrected;
  if (s == "rs" || s == "j_rs" || s == "reduced-sample") return Estimator::reduced_sample;
  if (s == "km" || s == "j_km" || s == "kaplan-meier") return Estimator::kaplan_meier;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

FunctionEstimate::FunctionEstimate(RGrid grid, Estimator e, Target t)
    : rgrid(std::move(grid)),
      values(rgrid.size(), 0.0),
      defined(rgrid.size(), false),
      estimator(e),
      target(t) {}

// ---------------------------------------------------------------------------
// Distribution estimators

namespace {

// Index of the first grid value >= d, i.e. the first r with d <= r.
std::size_t first_covering(std::span<const double> r, double d) {
  return static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), d) - r.begin());
}

// One past the last grid value <= c, i.e. the count of r with r <= c.
std::size_t past_censor(std::span<const double> r, double c) {
  return static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), c) - r.begin());
}

// A zero-radius dilation has zero volume, so every F estimate vanishes at 0.
void pin_origin(FunctionEstimate& f) {
  if (f.target == Target::F && f.size() > 0 && f.defined[0]) f.values[0] = 0.0;
}

FunctionEstimate edf(const DistanceSet& ds, const RGrid& rgrid, Target target) {
  FunctionEstimate out(rgrid, Estimator::uncorrected, target);
  const auto r = rgrid.values();
  std::vector<std::size_t> hits(r.size() + 1, 0);
  for (double d : ds.values) ++hits[first_covering(r, d)];
  const auto m = static_cast<double>(ds.size());
  std::size_t cum = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    cum += hits[k];
    out.set(k, static_cast<double>(cum) / m);
  }
  pin_origin(out);
  return out;
}

FunctionEstimate reduced_sample(const DistanceSet& ds, const RGrid& rgrid, Target target) {
  if (ds.censor.size() != ds.values.size()) {
    throw std::invalid_argument("reduced-sample estimate needs censoring distances");
  }
  FunctionEstimate out(rgrid, Estimator::reduced_sample, target);
  const auto r = rgrid.values();
  const std::size_t K = r.size();
  // eligible[k] = #{c >= r_k}; covered[k] = #{d <= r_k <= c}.
  std::vector<long> eligible_hist(K + 1, 0);
  std::vector<long> covered_diff(K + 1, 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double d = ds.values[i];
    const double c = ds.censor[i];
    const std::size_t upto = past_censor(r, c);
    ++eligible_hist[upto];
    if (d <= c) {
      const std::size_t from = first_covering(r, d);
      if (from < upto) {
        ++covered_diff[from];
        --covered_diff[upto];
      }
    }
  }
  long eligible = 0;
  for (std::size_t u = 0; u <= K; ++u) eligible += eligible_hist[u];
  long covered = 0;
  for (std::size_t k = 0; k < K; ++k) {
    eligible -= eligible_hist[k];  // drop sources with upto == k, i.e. c < r_k
    covered += covered_diff[k];
    if (eligible > 0) out.set(k, static_cast<double>(covered) / static_cast<double>(eligible));
  }
  pin_origin(out);
  return out;
}

FunctionEstimate kaplan_meier(const DistanceSet& ds, const RGrid& rgrid, Target target) {
  if (ds.censor.size() != ds.values.size()) {
    throw std::invalid_argument("Kaplan-Meier estimate needs censoring distances");
  }
  FunctionEstimate out(rgrid, Estimator::kaplan_meier, target);
  const std::size_t n = ds.size();
  if (n == 0) return out;

  struct Obs {
    double t;
    bool event;
  };
  std::vector<Obs> obs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ds.values[i];
    const double c = ds.censor[i];
    obs[i] = d <= c ? Obs{d, true} : Obs{c, false};
  }
  std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) { return a.t < b.t; });
  const double t_max = obs.back().t;

  // Product-limit survival, updated once per distinct observation time.
  double surv = 1.0;
  std::size_t at_risk = n;
  const auto r = rgrid.values();
  std::size_t i = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    while (i < n && obs[i].t <= r[k]) {
      const double t = obs[i].t;
      std::size_t events = 0;
      std::size_t censored = 0;
      for (; i < n && obs[i].t == t; ++i) (obs[i].event ? events : censored) += 1;
      if (events > 0) {
        surv *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      }
      at_risk -= events + censored;
    }
    if (r[k] > t_max) break;
    out.set(k, 1.0 - surv);
  }
  pin_origin(out);
  return out;
}

void require_kind(const DistanceSet& ds, DistanceKind kind) {
  if (ds.kind != kind) throw std::invalid_argument("distance set has the wrong kind");
}

void require_nn(const DistanceSet& nn) {
  require_kind(nn, DistanceKind::nearest_neighbour);
  if (nn.size() < 2) throw std::invalid_argument("G estimate needs at least two points");
}

}  // namespace

FunctionEstimate estimate_F_uncorrected(const DistanceSet& es, const RGrid& rgrid) {
  require_kind(es, DistanceKind::empty_space);
  if (es.size() == 0) throw std::invalid_argument("F estimate needs a non-empty grid");
  return edf(es, rgrid, Target::F);
}

FunctionEstimate estimate_G_uncorrected(const DistanceSet& nn, const RGrid& rgrid) {
  require_nn(nn);
  return edf(nn, rgrid, Target::G);
}

FunctionEstimate estimate_F_rs(const DistanceSet& es, const RGrid& rgrid) {
  require_kind(es, DistanceKind::empty_space);
  return reduced_sample(es, rgrid, Target::F);
}

FunctionEstimate estimate_G_rs(const DistanceSet& nn, const RGrid& rgrid) {
  require_nn(nn);
  return reduced_sample(nn, rgrid, Target::G);
}

FunctionEstimate estimate_F_km(const DistanceSet& es, const RGrid& rgrid) {
  require_kind(es, DistanceKind::empty_space);
  return kaplan_meier(es, rgrid, Target::F);
}

FunctionEstimate estimate_G_km(const DistanceSet& nn, const RGrid& rgrid) {
  require_nn(nn);
  return kaplan_meier(nn, rgrid, Target::G);
}

FunctionEstimate estimate_J_variant(const FunctionEstimate& F, const FunctionEstimate& G) {
  if (F.target != Target::F || G.target != Target::G) {
    throw std::invalid_argument("J needs an F estimate and a G estimate");
  }
  if (F.estimator != G.estimator) throw std::invalid_argument("F and G estimator tags differ");
  if (!(F.rgrid == G.rgrid)) throw std::invalid_argument("F and G use different r grids");
  FunctionEstimate J(F.rgrid, F.estimator, Target::J);
  for (std::size_t k = 0; k < J.size(); ++k) {
    if (F.defined[k] && G.defined[k] && F.values[k] < 1.0) {
      J.set(k, (1.0 - G.values[k]) / (1.0 - F.values[k]));
    }
  }
  return J;
}

FunctionEstimate estimate_JW(const DistanceSet& nn, const DistanceSet& es, const RGrid& rgrid) {
  auto J = estimate_J_variant(estimate_F_uncorrected(es, rgrid),
                              estimate_G_uncorrected(nn, rgrid));
  J.bounds = max_distances(nn, es);
  return J;
}

FunctionEstimate estimate_JW(const PointPattern& p, const EvaluationGrid& grid,
                             const RGrid& rgrid) {
  if (p.size() < 2) throw std::invalid_argument("J_W needs at least two points");
  return estimate_JW(nn_distances(p), empty_space_distances(p, grid), rgrid);
}

FunctionEstimate estimate_J(const PointPattern& p, const EvaluationGrid& grid,
                            const RGrid& rgrid, Estimator e) {
  if (p.size() < 2) throw std::invalid_argument("J estimate needs at least two points");
  const auto nn = nn_distances(p);
  const auto es = empty_space_distances(p, grid);
  FunctionEstimate J = [&] {
    switch (e) {
      case Estimator::uncorrected: return estimate_JW(nn, es, rgrid);
      case Estimator::reduced_sample:
        return estimate_J_variant(estimate_F_rs(es, rgrid), estimate_G_rs(nn, rgrid));
      case Estimator::kaplan_meier:
        return estimate_J_variant(estimate_F_km(es, rgrid), estimate_G_km(nn, rgrid));
    }
    throw std::logic_error("unhandled estimator");
  }();
  J.bounds = max_distances(nn, es);
  return J;
}

const FunctionEstimate& EstimateTable::J(Estimator e) const {
  switch (e) {
    case Estimator::uncorrected: return J_W;
    case Estimator::reduced_sample: return J_rs;
    case Estimator::kaplan_meier: return J_km;
  }
  throw std::logic_error("unhandled estimator");
}

EstimateTable estimate_all(const PointPattern& p, const EvaluationGrid& grid, const RGrid& rgrid) {
  const auto es = empty_space_distances(p, grid);
  auto masked = [&](Estimator e, Target t) { return FunctionEstimate(rgrid, e, t); };
  EstimateTable table{rgrid,
                      estimate_F_uncorrected(es, rgrid), masked(Estimator::uncorrected, Target::G),
                      masked(Estimator::uncorrected, Target::J),
                      estimate_F_rs(es, rgrid), masked(Estimator::reduced_sample, Target::G),
                      masked(Estimator::reduced_sample, Target::J),
                      estimate_F_km(es, rgrid), masked(Estimator::kaplan_meier, Target::G),
                      masked(Estimator::kaplan_meier, Target::J),
                      std::nullopt};
  if (p.size() < 2) return table;

  const auto nn = nn_distances(p);
  const auto bounds = max_distances(nn, es);
  table.bounds = bounds;
  table.G_uncorr = estimate_G_uncorrected(nn, rgrid);
  table.G_rs = estimate_G_rs(nn, rgrid);
  table.G_km = estimate_G_km(nn, rgrid);
  table.J_W = estimate_J_variant(table.F_uncorr, table.G_uncorr);
  table.J_rs = estimate_J_variant(table.F_rs, table.G_rs);
  table.J_km = estimate_J_variant(table.F_km, table.G_km);
  for (auto* f : {&table.F_uncorr, &table.G_uncorr, &table.J_W, &table.F_rs, &table.G_rs,
                  &table.J_rs, &table.F_km, &table.G_km, &table.J_km}) {
    f->bounds = bounds;
  }
  return table;
}

}  // namespace jstat
