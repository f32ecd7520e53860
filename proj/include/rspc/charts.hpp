#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rspc/errors.hpp"
#include "rspc/estimators.hpp"
#include "rspc/factors.hpp"
#include "rspc/normal.hpp"
#include "rspc/pooling.hpp"
#include "rspc/subgroup.hpp"

namespace rspc {

// Estimator pairings for Phase-I parameter estimation:
//   I   mean + standard deviation
//   II  median + MAD
//   III Hodges-Lehmann (HL1) + Shamos
enum class Method { I, II, III };

inline constexpr Method kAllMethods[] = {Method::I, Method::II, Method::III};

inline constexpr const char* name(Method m) {
  switch (m) {
    case Method::I: return "I";
    case Method::II: return "II";
    case Method::III: return "III";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "I" || s == "1") return Method::I;
  if (s == "II" || s == "2") return Method::II;
  if (s == "III" || s == "3") return Method::III;
  throw invalid_input("unknown method: " + std::string(s) + " (expected I, II, or III)");
}

inline constexpr LocationKind location_kind(Method m) {
  switch (m) {
    case Method::I: return LocationKind::Mean;
    case Method::II: return LocationKind::Median;
    case Method::III: return LocationKind::HL1;
  }
  return LocationKind::Mean;
}

inline constexpr ScaleKind scale_kind(Method m) {
  switch (m) {
    case Method::I: return ScaleKind::StdDev;
    case Method::II: return ScaleKind::Mad;
    case Method::III: return ScaleKind::Shamos;
  }
  return ScaleKind::StdDev;
}

struct PhaseIEstimate {
  double mu_hat = 0.0;
  double sigma_hat = 0.0;
  Method method = Method::I;
  PoolingType pooling = PoolingType::C;
  std::size_t m = 0;
  std::vector<int> sizes;
  std::string factor_version;
};

// Pooled (mu_hat, sigma_hat) across the Phase-I subgroups. With pooling D the
// scale uses the pooled-data estimator while the location falls back to the
// size-weighted type B (the pooled-data pairing used with the classical
// grand-average chart).
inline PhaseIEstimate phase1_estimate(std::span<const Subgroup> samples, Method method,
                                      PoolingType pooling, const FactorTable& table) {
  if (samples.empty()) throw invalid_input("phase1_estimate: no subgroups");

  const LocationKind loc = location_kind(method);
  const ScaleKind sca = scale_kind(method);
  const std::size_t m = samples.size();

  std::vector<int> sizes(m);
  std::vector<double> loc_est(m), sca_est(m), nu_sq(m), gamma(m), tau_sq(m);
  std::size_t total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Subgroup& s = samples[i];
    if (s.n() < 2)
      throw invalid_input("phase1_estimate: subgroup '" + s.id +
                          "' has fewer than 2 observations");
    sizes[i] = static_cast<int>(s.n());
    total += s.n();
    loc_est[i] = location_estimate(loc, s.values);
    sca_est[i] = scale_estimate(sca, s.values);
    nu_sq[i] = table.location_variance(loc, sizes[i]);
    gamma[i] = table.scale_gamma(sca, sizes[i]);
    tau_sq[i] = table.scale_variance(sca, sizes[i]);
  }

  PooledEstimate pooled_loc =
      pool_location(id_of(loc), loc_est, sizes,
                    nu_sq, pooling == PoolingType::D ? PoolingType::B : pooling);

  PooledEstimate pooled_sca;
  if (pooling == PoolingType::D) {
    double pooled_gamma = 0.0;
    double pooled_var = 0.0;
    if (sca == ScaleKind::Mad) {
      const FactorEntry& global = table.at(EstimatorId::Mad, static_cast<int>(total));
      pooled_gamma = global.gamma;
      pooled_var = global.var_std;
    }
    pooled_sca = pool_scale(id_of(sca), sca_est, gamma, tau_sq, sizes, pooling, samples,
                            pooled_gamma, pooled_var);
  } else {
    pooled_sca = pool_scale(id_of(sca), sca_est, gamma, tau_sq, sizes, pooling);
  }

  PhaseIEstimate out;
  out.mu_hat = pooled_loc.value;
  out.sigma_hat = pooled_sca.value;
  out.method = method;
  out.pooling = pooling;
  out.m = m;
  out.sizes = std::move(sizes);
  out.factor_version = table.version();
  return out;
}

struct ControlLimits {
  double lcl = 0.0;
  double cl = 0.0;
  double ucl = 0.0;
  double g = 3.0;
  int n_k = 1;
};

inline ControlLimits control_limits(const PhaseIEstimate& est, int n_k, double g = 3.0) {
  if (n_k < 1) throw invalid_input("control_limits: n_k must be >= 1");
  if (!(g > 0.0)) throw invalid_input("control_limits: g must be positive");
  const double h = g * est.sigma_hat / std::sqrt(static_cast<double>(n_k));
  return ControlLimits{est.mu_hat - h, est.mu_hat, est.mu_hat + h, g, n_k};
}

struct MonitorResult {
  std::size_t run_length = 0;
  bool censored = true;
  std::optional<std::size_t> signal_index;  // 1-based
};

// First subgroup mean strictly outside [LCL, UCL]. A mean exactly on a limit
// does not signal.
inline MonitorResult monitor(const ControlLimits& limits, std::span<const double> phase2_means) {
  MonitorResult r;
  for (std::size_t i = 0; i < phase2_means.size(); ++i) {
    if (phase2_means[i] < limits.lcl || phase2_means[i] > limits.ucl) {
      r.run_length = i + 1;
      r.censored = false;
      r.signal_index = i + 1;
      return r;
    }
  }
  r.run_length = phase2_means.size();
  r.censored = true;
  return r;
}

// Probability that one Phase-II mean of size n_k drawn from N(mu, sigma^2)
// falls outside the limits.
inline double signal_probability(const ControlLimits& limits, double mu, double sigma, int n_k) {
  if (!(sigma > 0.0)) throw invalid_input("signal_probability: sigma must be positive");
  if (n_k < 1) throw invalid_input("signal_probability: n_k must be >= 1");
  const double se = sigma / std::sqrt(static_cast<double>(n_k));
  return normal_cdf((limits.lcl - mu) / se) + 1.0 - normal_cdf((limits.ucl - mu) / se);
}

// ---------------------------------------------------------------------------
// Contamination sensitivity sweep: recompute the limits while one injected
// observation runs over a delta grid.

enum class ContaminationMode {
  Append,   // the contaminated observation is a new value delta added to the target subgroup
  Replace,  // delta is added onto an existing observation of the target subgroup
};

struct SweepSpec {
  double delta_start = 0.0;
  double delta_stop = 0.0;
  double delta_step = 1.0;
  std::size_t sample_index = 1;       // 1-based target subgroup
  std::size_t observation_index = 0;  // Replace mode, 1-based; 0 means last
  ContaminationMode mode = ContaminationMode::Append;
  std::vector<Method> methods{Method::I, Method::II, Method::III};
  PoolingType pooling = PoolingType::C;
  int n_k = 5;
  double g = 3.0;
};

struct SensitivityResult {
  std::vector<double> deltas;
  std::vector<Method> methods;
  // limits[method_index][delta_index]
  std::vector<std::vector<ControlLimits>> limits;
};

inline SensitivityResult sensitivity_sweep(std::span<const Subgroup> data, const SweepSpec& spec,
                                           const FactorTable& table) {
  if (!(spec.delta_step > 0.0)) throw invalid_input("sensitivity_sweep: step must be positive");
  if (spec.delta_start > spec.delta_stop)
    throw invalid_input("sensitivity_sweep: delta_start must be <= delta_stop");
  if (spec.methods.empty()) throw invalid_input("sensitivity_sweep: no methods selected");
  if (data.empty()) throw invalid_input("sensitivity_sweep: empty dataset");
  if (spec.sample_index < 1 || spec.sample_index > data.size())
    throw invalid_input("sensitivity_sweep: sample_index out of range");

  const std::size_t target = spec.sample_index - 1;
  std::size_t obs = 0;
  if (spec.mode == ContaminationMode::Replace) {
    obs = spec.observation_index == 0 ? data[target].n() : spec.observation_index;
    if (obs < 1 || obs > data[target].n())
      throw invalid_input("sensitivity_sweep: observation_index out of range");
  }

  const std::size_t steps = static_cast<std::size_t>(
      std::floor((spec.delta_stop - spec.delta_start) / spec.delta_step + 1e-9));

  SensitivityResult out;
  out.methods = spec.methods;
  out.limits.assign(spec.methods.size(), {});
  for (auto& v : out.limits) v.reserve(steps + 1);

  std::vector<Subgroup> work(data.begin(), data.end());
  for (std::size_t k = 0; k <= steps; ++k) {
    const double delta = spec.delta_start + static_cast<double>(k) * spec.delta_step;
    out.deltas.push_back(delta);
    if (spec.mode == ContaminationMode::Append) {
      work[target].values = data[target].values;
      work[target].values.push_back(delta);
    } else {
      work[target].values = data[target].values;
      work[target].values[obs - 1] += delta;
    }
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const PhaseIEstimate est =
          phase1_estimate(work, spec.methods[mi], spec.pooling, table);
      out.limits[mi].push_back(control_limits(est, spec.n_k, spec.g));
    }
  }
  return out;
}

}  // namespace rspc
