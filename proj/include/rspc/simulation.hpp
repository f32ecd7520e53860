#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rspc/charts.hpp"
#include "rspc/errors.hpp"
#include "rspc/estimators.hpp"
#include "rspc/factors.hpp"
#include "rspc/parallel.hpp"
#include "rspc/pooling.hpp"
#include "rspc/rng.hpp"
#include "rspc/subgroup.hpp"

namespace rspc {

// A single gross outlier: delta is added to one observation. Indices are
// 1-based; the last observation of subgroup i is observation n_i.
struct ContaminationSpec {
  std::size_t sample_index = 1;
  std::size_t observation_index = 1;
  double delta = 0.0;
};

struct ScenarioConfig {
  std::vector<int> sizes;
  double mu0 = 0.0;
  double sigma0 = 1.0;
  std::uint64_t replications = 0;
  std::uint64_t master_seed = 0;
  std::optional<ContaminationSpec> contamination;
};

inline void validate_config(const ScenarioConfig& c) {
  if (c.sizes.empty()) throw invalid_input("scenario: sizes must be nonempty");
  for (int n : c.sizes)
    if (n < 2) throw invalid_input("scenario: every subgroup size must be >= 2");
  if (c.replications < 1) throw invalid_input("scenario: replications must be >= 1");
  if (!(c.sigma0 > 0.0)) throw invalid_input("scenario: sigma0 must be positive");
  if (!std::isfinite(c.mu0)) throw invalid_input("scenario: mu0 must be finite");
  if (c.contamination) {
    const ContaminationSpec& s = *c.contamination;
    if (s.sample_index < 1 || s.sample_index > c.sizes.size())
      throw invalid_input("scenario: contamination sample_index out of range");
    const int n = c.sizes[s.sample_index - 1];
    if (s.observation_index < 1 || s.observation_index > static_cast<std::size_t>(n))
      throw invalid_input("scenario: contamination observation_index out of range");
    if (!std::isfinite(s.delta)) throw invalid_input("scenario: contamination delta must be finite");
  }
}

// Returns a copy of the dataset with exactly one observation shifted by delta.
inline std::vector<Subgroup> inject_contamination(std::vector<Subgroup> dataset,
                                                  const ContaminationSpec& spec) {
  if (spec.sample_index < 1 || spec.sample_index > dataset.size())
    throw invalid_input("inject_contamination: sample_index out of range");
  Subgroup& target = dataset[spec.sample_index - 1];
  if (spec.observation_index < 1 || spec.observation_index > target.n())
    throw invalid_input("inject_contamination: observation_index out of range");
  target.values[spec.observation_index - 1] += spec.delta;
  return dataset;
}

// ---------------------------------------------------------------------------
// Estimator efficiency under clean and contaminated Phase-I data.

inline constexpr PoolingType kReportPoolings[] = {PoolingType::A, PoolingType::B,
                                                  PoolingType::C};

struct EfficiencyCell {
  double variance = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double re_percent = 0.0;
};

// Per-(estimator, pooling) variance, bias, MSE, and relative efficiency.
// The RE baseline is the clean-data MSE of the BLUE mean (location cells)
// and of the BLUE standard deviation (scale cells), so on a clean run
// RE(mean, C) and RE(sd, C) are exactly 100.
struct EfficiencyReport {
  std::vector<int> sizes;
  double mu0 = 0.0;
  double sigma0 = 1.0;
  std::uint64_t replications = 0;
  std::uint64_t master_seed = 0;
  bool contaminated = false;
  double baseline_location_mse = 0.0;
  double baseline_scale_mse = 0.0;
  std::array<std::array<EfficiencyCell, 3>, 5> location{};
  std::array<std::array<EfficiencyCell, 3>, 3> scale{};

  const EfficiencyCell& cell(LocationKind k, PoolingType p) const {
    return location[static_cast<std::size_t>(k)][pooling_index(p)];
  }
  const EfficiencyCell& cell(ScaleKind k, PoolingType p) const {
    return scale[static_cast<std::size_t>(k)][pooling_index(p)];
  }
};

namespace detail {

// Welford moments plus an independently accumulated sum of squared errors
// against the true parameter, so mse = variance + bias^2 can be checked as
// an identity rather than hold by construction.
struct CellAcc {
  MomentAcc mom;
  double sq_err = 0.0;

  void add(double x, double truth) noexcept {
    mom.add(x);
    const double d = x - truth;
    sq_err += d * d;
  }
  void merge(const CellAcc& o) noexcept {
    mom.merge(o.mom);
    sq_err += o.sq_err;
  }
};

struct EfficiencyAcc {
  std::array<std::array<CellAcc, 3>, 5> location{};
  std::array<std::array<CellAcc, 3>, 3> scale{};
  CellAcc baseline_location;  // clean (mean, C)
  CellAcc baseline_scale;     // clean (sd, C)

  void merge(const EfficiencyAcc& o) noexcept {
    for (std::size_t e = 0; e < 5; ++e)
      for (std::size_t p = 0; p < 3; ++p) location[e][p].merge(o.location[e][p]);
    for (std::size_t e = 0; e < 3; ++e)
      for (std::size_t p = 0; p < 3; ++p) scale[e][p].merge(o.scale[e][p]);
    baseline_location.merge(o.baseline_location);
    baseline_scale.merge(o.baseline_scale);
  }
};

inline EfficiencyCell finish_cell(const CellAcc& acc, double truth, double baseline_mse) {
  EfficiencyCell c;
  const double count = static_cast<double>(acc.mom.count);
  c.variance = acc.mom.m2 / count;
  c.bias = acc.mom.mean - truth;
  c.mse = acc.sq_err / count;
  c.re_percent = 100.0 * baseline_mse / c.mse;
  return c;
}

}  // namespace detail

inline EfficiencyReport efficiency_study(const ScenarioConfig& config, const FactorTable& table,
                                         unsigned threads = 0) {
  validate_config(config);
  const std::size_t m = config.sizes.size();

  // Pooling weights are fixed by the size configuration; resolve them once.
  std::array<std::array<std::vector<double>, 3>, 5> loc_w;
  std::array<std::array<std::vector<double>, 3>, 3> sca_w;
  {
    std::vector<double> zeros(m, 0.0);
    for (std::size_t e = 0; e < 5; ++e) {
      const LocationKind kind = kLocationKinds[e];
      std::vector<double> nu_sq(m);
      for (std::size_t i = 0; i < m; ++i)
        nu_sq[i] = table.location_variance(kind, config.sizes[i]);
      for (PoolingType p : kReportPoolings)
        loc_w[e][pooling_index(p)] =
            pool_location(id_of(kind), zeros, config.sizes, nu_sq, p).weights;
    }
    for (std::size_t e = 0; e < 3; ++e) {
      const ScaleKind kind = kScaleKinds[e];
      std::vector<double> gamma(m), tau_sq(m);
      for (std::size_t i = 0; i < m; ++i) {
        gamma[i] = table.scale_gamma(kind, config.sizes[i]);
        tau_sq[i] = table.scale_variance(kind, config.sizes[i]);
      }
      for (PoolingType p : kReportPoolings)
        sca_w[e][pooling_index(p)] =
            pool_scale(id_of(kind), zeros, gamma, tau_sq, config.sizes, p).weights;
    }
  }

  const bool contaminated = config.contamination.has_value();
  const std::size_t target = contaminated ? config.contamination->sample_index - 1 : 0;
  const std::size_t target_obs = contaminated ? config.contamination->observation_index - 1 : 0;
  const double delta = contaminated ? config.contamination->delta : 0.0;

  const std::uint64_t nblocks = block_count(config.replications, kDefaultBlockSize);
  std::vector<detail::EfficiencyAcc> partials(nblocks);

  for_each_block(
      config.replications, kDefaultBlockSize, threads,
      [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
        detail::EfficiencyAcc& acc = partials[b];
        std::vector<std::vector<double>> data(m);
        for (std::size_t i = 0; i < m; ++i)
          data[i].resize(static_cast<std::size_t>(config.sizes[i]));
        std::array<std::vector<double>, 5> loc_est;
        std::array<std::vector<double>, 3> sca_est;
        for (auto& v : loc_est) v.resize(m);
        for (auto& v : sca_est) v.resize(m);

        auto dot = [&](const std::vector<double>& w, const std::vector<double>& est) {
          double s = 0.0;
          for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * est[i];
          return s;
        };

        for (std::uint64_t rep = lo; rep < hi; ++rep) {
          RandomStream stream(config.master_seed, rep);
          for (auto& subgroup : data)
            for (double& v : subgroup) v = stream.normal(config.mu0, config.sigma0);

          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t e = 0; e < 5; ++e)
              loc_est[e][i] = location_estimate(kLocationKinds[e], data[i]);
            for (std::size_t e = 0; e < 3; ++e)
              sca_est[e][i] = scale_estimate(kScaleKinds[e], data[i]);
          }

          // Clean-data BLUE baselines come from the same replication.
          acc.baseline_location.add(
              dot(loc_w[static_cast<std::size_t>(LocationKind::Mean)][2],
                  loc_est[static_cast<std::size_t>(LocationKind::Mean)]),
              config.mu0);
          acc.baseline_scale.add(dot(sca_w[static_cast<std::size_t>(ScaleKind::StdDev)][2],
                                     sca_est[static_cast<std::size_t>(ScaleKind::StdDev)]),
                                 config.sigma0);

          if (contaminated) {
            data[target][target_obs] += delta;
            for (std::size_t e = 0; e < 5; ++e)
              loc_est[e][target] = location_estimate(kLocationKinds[e], data[target]);
            for (std::size_t e = 0; e < 3; ++e)
              sca_est[e][target] = scale_estimate(kScaleKinds[e], data[target]);
          }

          for (std::size_t e = 0; e < 5; ++e)
            for (std::size_t p = 0; p < 3; ++p)
              acc.location[e][p].add(dot(loc_w[e][p], loc_est[e]), config.mu0);
          for (std::size_t e = 0; e < 3; ++e)
            for (std::size_t p = 0; p < 3; ++p)
              acc.scale[e][p].add(dot(sca_w[e][p], sca_est[e]), config.sigma0);
        }
      });

  const detail::EfficiencyAcc total = reduce_pairwise(
      std::span<detail::EfficiencyAcc>(partials),
      [](detail::EfficiencyAcc& a, const detail::EfficiencyAcc& b) { a.merge(b); });

  EfficiencyReport report;
  report.sizes = config.sizes;
  report.mu0 = config.mu0;
  report.sigma0 = config.sigma0;
  report.replications = config.replications;
  report.master_seed = config.master_seed;
  report.contaminated = contaminated;
  report.baseline_location_mse =
      total.baseline_location.sq_err / static_cast<double>(config.replications);
  report.baseline_scale_mse =
      total.baseline_scale.sq_err / static_cast<double>(config.replications);
  for (std::size_t e = 0; e < 5; ++e)
    for (std::size_t p = 0; p < 3; ++p)
      report.location[e][p] =
          detail::finish_cell(total.location[e][p], config.mu0, report.baseline_location_mse);
  for (std::size_t e = 0; e < 3; ++e)
    for (std::size_t p = 0; p < 3; ++p)
      report.scale[e][p] =
          detail::finish_cell(total.scale[e][p], config.sigma0, report.baseline_scale_mse);
  return report;
}

// ---------------------------------------------------------------------------
// Run-length studies.

struct RunLengthSummary {
  double arl = 0.0;
  double sdrl = 0.0;
  double prl = 0.0;
  double skewness = 0.0;
  double percentile = 99.0;
  std::uint64_t censored_count = 0;
  std::uint64_t replications = 0;
};

// Linear-interpolation quantile (h = p/100 * (n-1) between order statistics).
inline double interpolated_percentile(std::vector<double> values, double percentile) {
  if (values.empty()) throw invalid_input("percentile of empty sample");
  if (!(percentile >= 0.0 && percentile <= 100.0))
    throw invalid_input("percentile must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const double h = percentile / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// Mean, (n-1)-denominator standard deviation, interpolated percentile, and
// moment skewness g1 = m3/m2^{3/2} (0 for constant input). Censored-at-cap
// run lengths participate at their cap value and are counted.
inline RunLengthSummary summarize_run_lengths(std::span<const double> rls,
                                              std::span<const std::uint8_t> censored,
                                              double percentile) {
  if (rls.empty()) throw invalid_input("summarize_run_lengths: empty input");
  if (!censored.empty() && censored.size() != rls.size())
    throw invalid_input("summarize_run_lengths: censored flags length mismatch");

  RunLengthSummary s;
  s.replications = rls.size();
  s.percentile = percentile;
  for (std::uint8_t c : censored) s.censored_count += c ? 1 : 0;

  const double n = static_cast<double>(rls.size());
  double sum = 0.0;
  for (double v : rls) sum += v;
  const double mean = sum / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : rls) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;

  s.arl = mean;
  s.sdrl = rls.size() > 1 ? std::sqrt(m2 * n / (n - 1.0)) : 0.0;
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.prl = interpolated_percentile(std::vector<double>(rls.begin(), rls.end()), percentile);
  return s;
}

// One geometric run length with success probability p, truncated at cap.
// p <= 0 (limits too wide to ever signal) censors immediately.
inline double draw_geometric_capped(RandomStream& stream, double p, double cap, bool& censored) {
  if (!(p > 0.0)) {
    censored = true;
    return cap;
  }
  if (p >= 1.0) {
    censored = false;
    return 1.0;
  }
  const double u = stream.uniform_pos();
  double k = std::ceil(std::log(u) / std::log1p(-p));
  if (k < 1.0) k = 1.0;
  if (k > cap) {
    censored = true;
    return cap;
  }
  censored = false;
  return k;
}

enum class RlEngine {
  // Draw RL ~ Geometric(p) with p the analytic per-subgroup signal
  // probability of the realized limits; distributionally identical to
  // simulating Phase II subgroup by subgroup under the model.
  Geometric,
  // Simulate each Phase-II subgroup explicitly; retained for
  // cross-validation on small runs.
  Subgroup,
};

// Run-length distribution of the chart built from freshly simulated Phase-I
// data in every replication. Pooling D is excluded from run-length studies.
inline RunLengthSummary run_length_study(const ScenarioConfig& plan, Method method,
                                         PoolingType pooling, const FactorTable& table,
                                         int n_k, std::uint64_t rl_cap = 10'000'000,
                                         RlEngine engine = RlEngine::Geometric,
                                         double percentile = 99.0, unsigned threads = 0) {
  validate_config(plan);
  if (pooling == PoolingType::D)
    throw invalid_input("run_length_study: pooling types A, B, C only");
  if (n_k < 1) throw invalid_input("run_length_study: n_k must be >= 1");
  if (rl_cap < 1) throw invalid_input("run_length_study: rl_cap must be >= 1");

  const std::size_t m = plan.sizes.size();
  const LocationKind loc = location_kind(method);
  const ScaleKind sca = scale_kind(method);

  std::vector<double> nu_sq(m), gamma(m), tau_sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    nu_sq[i] = table.location_variance(loc, plan.sizes[i]);
    gamma[i] = table.scale_gamma(sca, plan.sizes[i]);
    tau_sq[i] = table.scale_variance(sca, plan.sizes[i]);
  }
  const std::vector<double> loc_weights =
      pool_location(id_of(loc), std::vector<double>(m, 0.0), plan.sizes, nu_sq, pooling).weights;
  const std::vector<double> sca_weights =
      pool_scale(id_of(sca), std::vector<double>(m, 0.0), gamma, tau_sq, plan.sizes, pooling)
          .weights;

  const bool contaminated = plan.contamination.has_value();
  const std::size_t target = contaminated ? plan.contamination->sample_index - 1 : 0;
  const std::size_t target_obs = contaminated ? plan.contamination->observation_index - 1 : 0;
  const double delta = contaminated ? plan.contamination->delta : 0.0;
  const double cap = static_cast<double>(rl_cap);
  const double root_nk = std::sqrt(static_cast<double>(n_k));

  std::vector<double> rls(plan.replications);
  std::vector<std::uint8_t> cens(plan.replications);

  for_each_block(
      plan.replications, kDefaultBlockSize, threads,
      [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        std::vector<std::vector<double>> data(m);
        for (std::size_t i = 0; i < m; ++i)
          data[i].resize(static_cast<std::size_t>(plan.sizes[i]));
        std::vector<double> loc_est(m), sca_est(m);

        for (std::uint64_t rep = lo; rep < hi; ++rep) {
          RandomStream stream(plan.master_seed, rep);
          for (auto& subgroup : data)
            for (double& v : subgroup) v = stream.normal(plan.mu0, plan.sigma0);
          if (contaminated) data[target][target_obs] += delta;

          for (std::size_t i = 0; i < m; ++i) {
            loc_est[i] = location_estimate(loc, data[i]);
            sca_est[i] = scale_estimate(sca, data[i]);
          }
          double mu_hat = 0.0, sigma_hat = 0.0;
          for (std::size_t i = 0; i < m; ++i) {
            mu_hat += loc_weights[i] * loc_est[i];
            sigma_hat += sca_weights[i] * sca_est[i];
          }

          const double h = 3.0 * sigma_hat / root_nk;
          const ControlLimits limits{mu_hat - h, mu_hat, mu_hat + h, 3.0, n_k};

          bool censored = true;
          double rl = cap;
          if (engine == RlEngine::Geometric) {
            const double p = signal_probability(limits, plan.mu0, plan.sigma0, n_k);
            rl = draw_geometric_capped(stream, p, cap, censored);
          } else {
            for (std::uint64_t k = 1; k <= rl_cap; ++k) {
              double sum = 0.0;
              for (int j = 0; j < n_k; ++j) sum += stream.normal(plan.mu0, plan.sigma0);
              const double xbar = sum / static_cast<double>(n_k);
              if (xbar < limits.lcl || xbar > limits.ucl) {
                rl = static_cast<double>(k);
                censored = false;
                break;
              }
            }
          }
          rls[rep] = rl;
          cens[rep] = censored ? 1 : 0;
        }
      });

  return summarize_run_lengths(rls, cens, percentile);
}

}  // namespace rspc
