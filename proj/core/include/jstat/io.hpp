#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "jstat/estimate.hpp"
#include "jstat/geometry.hpp"
#include "jstat/inference.hpp"
#include "jstat/patterns.hpp"

namespace jstat {

/// Malformed file or configuration content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Windows ---------------------------------------------------------------
//
// Canonical JSON:
//   {"kind":"rect2d","lo":[0,0],"hi":[1,1]}
//   {"kind":"box3d","lo":[0,0,0],"hi":[1,1,1]}
//   {"kind":"rect-union2d","rects":[{"lo":[..],"hi":[..]}, ...]}

std::string window_to_json(const Window& w);
Window window_from_json(std::string_view json);

/// Inline spec: unit-square | unit-cube | rect:a,b | box:a,b,c |
/// two-rect:width,height,gap | a JSON object.
Window parse_window_spec(std::string_view spec);

/// FNV-1a 64-bit hash (hex) of the canonical window JSON and intensity;
/// used to check that a pattern is tested against a matching null.
std::string config_hash(const Window& w, double intensity);

// Patterns ---------------------------------------------------------------
//
// Header `x,y` or `x,y,z`, one point per row. Points must be strictly inside
// the window.

void write_pattern_csv(std::ostream& out, const PointPattern& p);
PointPattern read_pattern_csv(std::istream& in, const Window& w);
PointPattern read_pattern_csv(const std::filesystem::path& path, const Window& w);

// Estimates ---------------------------------------------------------------
//
// Header r,F_uncorr,G_uncorr,J_W,F_rs,G_rs,J_rs,F_km,G_km,J_km; masked cells
// are empty.

inline constexpr std::string_view kEstimateCsvHeader =
    "r,F_uncorr,G_uncorr,J_W,F_rs,G_rs,J_rs,F_km,G_km,J_km";

void write_estimate_csv(std::ostream& out, const EstimateTable& table);

/// Envelope CSV: r,obs,min,max.
void write_envelope_csv(std::ostream& out, const Envelope& env);

// Null distributions ------------------------------------------------------

std::string null_to_json(const NullDistribution& null);
NullDistribution null_from_json(std::string_view json);
std::string null_config_hash(const NullDistribution& null);

// Power -------------------------------------------------------------------
//
// param1,param2,reps,reject_two_sided,reject_cluster,reject_regular,estimator
// with one row per (cell, estimator).

inline constexpr std::string_view kPowerCsvHeader =
    "param1,param2,reps,reject_two_sided,reject_cluster,reject_regular,estimator";

void write_power_csv(std::ostream& out, std::span<const PowerCell> cells);

}  // namespace jstat
