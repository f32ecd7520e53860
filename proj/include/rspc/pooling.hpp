#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rspc/errors.hpp"
#include "rspc/estimators.hpp"
#include "rspc/factors.hpp"
#include "rspc/subgroup.hpp"

namespace rspc {

// A: simple average of unbiased per-subgroup estimates.
// B: size-weighted (location) or factor-weighted (scale) average.
// C: BLUE weights from constrained variance minimization.
// D: estimator applied to the pooled data with a global unbiasing factor
//    (scale only).
enum class PoolingType { A, B, C, D };

inline constexpr PoolingType kWeightedPoolings[] = {PoolingType::A, PoolingType::B,
                                                    PoolingType::C};

// Report/array index of a weighted pooling type (A=0, B=1, C=2).
inline constexpr std::size_t pooling_index(PoolingType p) {
  return p == PoolingType::A ? 0 : p == PoolingType::B ? 1 : 2;
}

inline constexpr const char* name(PoolingType p) {
  switch (p) {
    case PoolingType::A: return "A";
    case PoolingType::B: return "B";
    case PoolingType::C: return "C";
    case PoolingType::D: return "D";
  }
  return "?";
}

inline PoolingType parse_pooling(std::string_view s) {
  if (s == "A" || s == "a") return PoolingType::A;
  if (s == "B" || s == "b") return PoolingType::B;
  if (s == "C" || s == "c") return PoolingType::C;
  if (s == "D" || s == "d") return PoolingType::D;
  throw invalid_input("unknown pooling type: " + std::string(s));
}

enum class PoolKind { Location, Scale };

// Pooled estimate with materialized weights so the weight-sum identities can
// be checked directly. Type D has no per-subgroup weights (the estimator acts
// on the concatenated data); its weight vector is empty.
struct PooledEstimate {
  double value = 0.0;
  std::vector<double> weights;
  PoolKind kind = PoolKind::Location;
  EstimatorId estimator = EstimatorId::Mean;
  PoolingType pooling = PoolingType::A;
  // Var(pooled)/sigma^2 under normality, from the standardized moments.
  double theoretical_var_factor = 0.0;
};

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw invalid_input(std::string("length mismatch: ") + what);
}

}  // namespace detail

// Minimum-variance location weights: w_i proportional to 1/nu_i^2,
// normalized to sum 1.
inline std::vector<double> blue_location_weights(std::span<const double> nu_sq) {
  if (nu_sq.empty()) throw invalid_input("blue_location_weights: empty input");
  double denom = 0.0;
  for (double v : nu_sq) {
    if (!(v > 0.0)) throw invalid_input("blue_location_weights: nu^2 must be positive");
    denom += 1.0 / v;
  }
  std::vector<double> w(nu_sq.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 / nu_sq[i]) / denom;
  return w;
}

// Minimum-variance scale weights: w_i = (gamma_i/tau_i^2) / sum_j gamma_j^2/tau_j^2,
// chosen so that
// sum_i w_i gamma_i = 1 (unbiasedness of the pooled scale estimate).
inline std::vector<double> blue_scale_weights(std::span<const double> gamma,
                                              std::span<const double> tau_sq) {
  detail::require_same_length(gamma.size(), tau_sq.size(), "gamma vs tau_sq");
  if (gamma.empty()) throw invalid_input("blue_scale_weights: empty input");
  double denom = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (!(gamma[i] > 0.0)) throw invalid_input("blue_scale_weights: gamma must be positive");
    if (!(tau_sq[i] > 0.0)) throw invalid_input("blue_scale_weights: tau^2 must be positive");
    denom += gamma[i] * gamma[i] / tau_sq[i];
  }
  std::vector<double> w(gamma.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (gamma[i] / tau_sq[i]) / denom;
  return w;
}

// Var(sum w_i estimate_i)/sigma^2 = sum w_i^2 var_std_i under normality.
// Applies to both pooled kinds; for scale the unbiasing lives in the weights.
inline double pooled_variance_factor(std::span<const double> weights,
                                     std::span<const double> var_std) {
  detail::require_same_length(weights.size(), var_std.size(), "weights vs var_std");
  double f = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) f += weights[i] * weights[i] * var_std[i];
  return f;
}

inline PooledEstimate pool_location(EstimatorId estimator, std::span<const double> estimates,
                                    std::span<const int> sizes, std::span<const double> nu_sq,
                                    PoolingType pooling) {
  const std::size_t m = estimates.size();
  if (m == 0) throw invalid_input("pool_location: no estimates");
  detail::require_same_length(m, sizes.size(), "estimates vs sizes");
  detail::require_same_length(m, nu_sq.size(), "estimates vs nu_sq");
  if (pooling == PoolingType::D)
    throw invalid_input("pool_location: pooling type D is defined for scale only");

  std::vector<double> w(m);
  switch (pooling) {
    case PoolingType::A:
      for (double& wi : w) wi = 1.0 / static_cast<double>(m);
      break;
    case PoolingType::B: {
      double total = 0.0;
      for (int n : sizes) {
        if (n < 1) throw invalid_input("pool_location: sizes must be >= 1");
        total += n;
      }
      for (std::size_t i = 0; i < m; ++i) w[i] = sizes[i] / total;
      break;
    }
    default:
      w = blue_location_weights(nu_sq);
      break;
  }

  PooledEstimate out;
  out.value = std::inner_product(w.begin(), w.end(), estimates.begin(), 0.0);
  out.kind = PoolKind::Location;
  out.estimator = estimator;
  out.pooling = pooling;
  out.theoretical_var_factor = pooled_variance_factor(w, nu_sq);
  out.weights = std::move(w);
  return out;
}

// Raw (biased) per-subgroup scale estimates enter here together with their
// standardized moments; the unbiasing is folded into the weights, one
// canonical path for all three weighted types.
//   A: value = (1/m) sum estimates_i/gamma_i
//   B: value = sum estimates_i / sum gamma_i
//   C: value = sum (gamma_i/tau_i^2) estimates_i / sum gamma_i^2/tau_i^2
// Type D needs the raw subgroups plus the global factor pair
// (pooled_gamma, pooled_var_std) of the pooled-data estimator: S_p/c4(N-m+1)
// for the standard deviation, MAD over the concatenated sample divided by
// c5(N) for the MAD. D is undefined for the Shamos estimator.
inline PooledEstimate pool_scale(EstimatorId estimator, std::span<const double> estimates,
                                 std::span<const double> gamma, std::span<const double> tau_sq,
                                 std::span<const int> sizes, PoolingType pooling,
                                 std::span<const Subgroup> raw_subgroups = {},
                                 double pooled_gamma = 0.0, double pooled_var_std = 0.0) {
  const std::size_t m = estimates.size();
  if (m == 0) throw invalid_input("pool_scale: no estimates");
  detail::require_same_length(m, gamma.size(), "estimates vs gamma");
  detail::require_same_length(m, tau_sq.size(), "estimates vs tau_sq");
  detail::require_same_length(m, sizes.size(), "estimates vs sizes");
  if (!is_scale(estimator)) throw invalid_input("pool_scale: location estimator given");

  PooledEstimate out;
  out.kind = PoolKind::Scale;
  out.estimator = estimator;
  out.pooling = pooling;

  if (pooling == PoolingType::D) {
    if (estimator == EstimatorId::Shamos)
      throw invalid_input("pool_scale: pooled-data (type D) estimation is not defined "
                          "for the Shamos estimator");
    if (raw_subgroups.size() != m)
      throw invalid_input("pool_scale: type D needs the raw subgroups");

    std::size_t total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (raw_subgroups[i].n() != static_cast<std::size_t>(sizes[i]))
        throw invalid_input("pool_scale: raw subgroup size disagrees with sizes");
      total += raw_subgroups[i].n();
    }
    const double big_n = static_cast<double>(total);

    if (estimator == EstimatorId::StdDev) {
      if (total <= m) throw invalid_input("pool_scale: type D needs N > m");
      if (!(pooled_gamma > 0.0)) {
        pooled_gamma = c4(static_cast<int>(total - m + 1));
        pooled_var_std = 1.0 - pooled_gamma * pooled_gamma;
      }
      double ss = 0.0;
      for (const Subgroup& s : raw_subgroups) {
        const double mu = mean(s.values);
        for (double v : s.values) ss += (v - mu) * (v - mu);
      }
      const double sp = std::sqrt(ss / (big_n - static_cast<double>(m)));
      out.value = sp / pooled_gamma;
    } else {  // Mad over the concatenated data, centered at the global median
      if (!(pooled_gamma > 0.0))
        throw invalid_input("pool_scale: MAD type D needs the global unbiasing factor c5(N)");
      std::vector<double> all;
      all.reserve(total);
      for (const Subgroup& s : raw_subgroups)
        all.insert(all.end(), s.values.begin(), s.values.end());
      out.value = mad(all) / pooled_gamma;
    }
    out.theoretical_var_factor =
        pooled_gamma > 0.0 ? pooled_var_std / (pooled_gamma * pooled_gamma) : 0.0;
    return out;
  }

  std::vector<double> w(m);
  switch (pooling) {
    case PoolingType::A:
      for (std::size_t i = 0; i < m; ++i) {
        if (!(gamma[i] > 0.0)) throw invalid_input("pool_scale: gamma must be positive");
        w[i] = 1.0 / (static_cast<double>(m) * gamma[i]);
      }
      break;
    case PoolingType::B: {
      double gsum = 0.0;
      for (double g : gamma) {
        if (!(g > 0.0)) throw invalid_input("pool_scale: gamma must be positive");
        gsum += g;
      }
      for (double& wi : w) wi = 1.0 / gsum;
      break;
    }
    default:
      w = blue_scale_weights(gamma, tau_sq);
      break;
  }

  out.value = std::inner_product(w.begin(), w.end(), estimates.begin(), 0.0);
  out.theoretical_var_factor = pooled_variance_factor(w, tau_sq);
  out.weights = std::move(w);
  return out;
}

}  // namespace rspc
