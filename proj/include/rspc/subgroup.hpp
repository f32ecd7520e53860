#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rspc/errors.hpp"

namespace rspc {

enum class LocationKind { Mean, Median, HL1, HL2, HL3 };
enum class ScaleKind { StdDev, Mad, Shamos };

// A single key space for factor tables and reports covering both families.
enum class EstimatorId { Mean, Median, HL1, HL2, HL3, StdDev, Mad, Shamos };

inline constexpr EstimatorId kAllEstimators[] = {
    EstimatorId::Mean, EstimatorId::Median, EstimatorId::HL1, EstimatorId::HL2,
    EstimatorId::HL3,  EstimatorId::StdDev, EstimatorId::Mad, EstimatorId::Shamos};

inline constexpr LocationKind kLocationKinds[] = {
    LocationKind::Mean, LocationKind::Median, LocationKind::HL1,
    LocationKind::HL2, LocationKind::HL3};

inline constexpr ScaleKind kScaleKinds[] = {ScaleKind::StdDev, ScaleKind::Mad,
                                            ScaleKind::Shamos};

inline constexpr EstimatorId id_of(LocationKind k) {
  switch (k) {
    case LocationKind::Mean: return EstimatorId::Mean;
    case LocationKind::Median: return EstimatorId::Median;
    case LocationKind::HL1: return EstimatorId::HL1;
    case LocationKind::HL2: return EstimatorId::HL2;
    case LocationKind::HL3: return EstimatorId::HL3;
  }
  return EstimatorId::Mean;
}

inline constexpr EstimatorId id_of(ScaleKind k) {
  switch (k) {
    case ScaleKind::StdDev: return EstimatorId::StdDev;
    case ScaleKind::Mad: return EstimatorId::Mad;
    case ScaleKind::Shamos: return EstimatorId::Shamos;
  }
  return EstimatorId::StdDev;
}

inline constexpr bool is_location(EstimatorId id) {
  return id == EstimatorId::Mean || id == EstimatorId::Median ||
         id == EstimatorId::HL1 || id == EstimatorId::HL2 || id == EstimatorId::HL3;
}

inline constexpr bool is_scale(EstimatorId id) { return !is_location(id); }

inline constexpr const char* name(EstimatorId id) {
  switch (id) {
    case EstimatorId::Mean: return "mean";
    case EstimatorId::Median: return "median";
    case EstimatorId::HL1: return "hl1";
    case EstimatorId::HL2: return "hl2";
    case EstimatorId::HL3: return "hl3";
    case EstimatorId::StdDev: return "sd";
    case EstimatorId::Mad: return "mad";
    case EstimatorId::Shamos: return "shamos";
  }
  return "?";
}

inline constexpr const char* name(LocationKind k) { return name(id_of(k)); }
inline constexpr const char* name(ScaleKind k) { return name(id_of(k)); }

inline EstimatorId parse_estimator(std::string_view s) {
  for (EstimatorId id : kAllEstimators)
    if (s == name(id)) return id;
  throw invalid_input("unknown estimator name: " + std::string(s));
}

// One Phase-I sample: an identifier plus an ordered sequence of measurements.
// All values are finite; n >= 1.
struct Subgroup {
  std::string id;
  std::vector<double> values;

  std::size_t n() const noexcept { return values.size(); }
};

inline Subgroup make_subgroup(std::string id, std::vector<double> values) {
  if (values.empty())
    throw invalid_input("subgroup '" + id + "' has no observations");
  for (double v : values)
    if (!std::isfinite(v))
      throw invalid_input("subgroup '" + id + "' contains a non-finite value");
  return Subgroup{std::move(id), std::move(values)};
}

}  // namespace rspc
