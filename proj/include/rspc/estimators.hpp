#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rspc/errors.hpp"
#include "rspc/normal.hpp"
#include "rspc/subgroup.hpp"

namespace rspc {

namespace detail {

// Median of a scratch buffer, partially sorting it. Even n averages the two
// central order statistics.
inline double median_partial(std::vector<double>& buf) {
  const std::size_t n = buf.size();
  const std::size_t mid = n / 2;
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
  const double upper = buf[mid];
  if (n % 2 != 0) return upper;
  const double lower =
      *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace detail

inline double mean(std::span<const double> x) {
  if (x.empty()) throw invalid_input("mean: empty sample");
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

inline double median(std::span<const double> x) {
  if (x.empty()) throw invalid_input("median: empty sample");
  thread_local std::vector<double> buf;
  buf.assign(x.begin(), x.end());
  return detail::median_partial(buf);
}

// Median of pairwise Walsh averages (x_k + x_l)/2. The variants differ in the
// index set: HL1 k < l, HL2 k <= l, HL3 all (k, l). Subgroups here are small
// (n <= ~30), so the pair set is enumerated explicitly.
inline double hodges_lehmann(std::span<const double> x,
                             LocationKind variant = LocationKind::HL1) {
  const std::size_t n = x.size();
  if (variant != LocationKind::HL1 && variant != LocationKind::HL2 &&
      variant != LocationKind::HL3)
    throw invalid_input("hodges_lehmann: variant must be HL1, HL2, or HL3");
  if (n == 0) throw invalid_input("hodges_lehmann: empty sample");
  if (variant == LocationKind::HL1 && n < 2)
    throw invalid_input("hodges_lehmann: HL1 needs n >= 2");

  thread_local std::vector<double> walsh;
  walsh.clear();
  switch (variant) {
    case LocationKind::HL1:
      walsh.reserve(n * (n - 1) / 2);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) walsh.push_back(0.5 * (x[k] + x[l]));
      break;
    case LocationKind::HL2:
      walsh.reserve(n * (n + 1) / 2);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k; l < n; ++l) walsh.push_back(0.5 * (x[k] + x[l]));
      break;
    default:  // HL3
      walsh.reserve(n * n);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) walsh.push_back(0.5 * (x[k] + x[l]));
      break;
  }
  return detail::median_partial(walsh);
}

inline double std_dev(std::span<const double> x) {
  if (x.size() < 2) throw invalid_input("std_dev: need n >= 2");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) {
    const double d = v - m;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

// Median absolute deviation from the median, divided by Phi^{-1}(3/4) for
// Fisher consistency at the normal.
inline double mad(std::span<const double> x) {
  if (x.size() < 2) throw invalid_input("mad: need n >= 2");
  const double center = median(x);
  thread_local std::vector<double> dev;
  dev.clear();
  dev.reserve(x.size());
  for (double v : x) dev.push_back(std::fabs(v - center));
  return detail::median_partial(dev) / kInvPhi34;
}

// Median of the n(n-1)/2 pairwise absolute differences, divided by
// sqrt(2) * Phi^{-1}(3/4).
inline double shamos(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw invalid_input("shamos: need n >= 2");
  thread_local std::vector<double> diffs;
  diffs.clear();
  diffs.reserve(n * (n - 1) / 2);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) diffs.push_back(std::fabs(x[k] - x[l]));
  return detail::median_partial(diffs) / kSqrt2InvPhi34;
}

inline double location_estimate(LocationKind kind, std::span<const double> x) {
  switch (kind) {
    case LocationKind::Mean: return mean(x);
    case LocationKind::Median: return median(x);
    default: return hodges_lehmann(x, kind);
  }
}

inline double scale_estimate(ScaleKind kind, std::span<const double> x) {
  switch (kind) {
    case ScaleKind::StdDev: return std_dev(x);
    case ScaleKind::Mad: return mad(x);
    case ScaleKind::Shamos: return shamos(x);
  }
  throw invalid_input("scale_estimate: unknown kind");
}

inline double estimate(EstimatorId id, std::span<const double> x) {
  switch (id) {
    case EstimatorId::Mean: return mean(x);
    case EstimatorId::Median: return median(x);
    case EstimatorId::HL1: return hodges_lehmann(x, LocationKind::HL1);
    case EstimatorId::HL2: return hodges_lehmann(x, LocationKind::HL2);
    case EstimatorId::HL3: return hodges_lehmann(x, LocationKind::HL3);
    case EstimatorId::StdDev: return std_dev(x);
    case EstimatorId::Mad: return mad(x);
    case EstimatorId::Shamos: return shamos(x);
  }
  throw invalid_input("estimate: unknown estimator");
}

}  // namespace rspc
