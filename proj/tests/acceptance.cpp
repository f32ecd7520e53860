// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Monte-Carlo factor tables are cached next to the binary so
// reruns are fast; delete the acceptance_*.json caches to force a rebuild.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rspc/charts.hpp"
#include "rspc/dataset.hpp"
#include "rspc/estimators.hpp"
#include "rspc/factors.hpp"
#include "rspc/pooling.hpp"
#include "rspc/rng.hpp"
#include "rspc/simulation.hpp"
#include "rspc/subgroup.hpp"

using namespace rspc;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s [%2d] %s%s%s\n", pass ? "PASS" : "FAIL", id, title.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void report_skip(int id, const std::string& title, const std::string& reason) {
  std::printf("SKIP [%2d] %s -- %s\n", id, title.c_str(), reason.c_str());
  std::fflush(stdout);
}

template <typename Fn>
void guarded(int id, const std::string& title, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, false, title, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr std::uint64_t kTableSeed = 20250809;

// Shared 1e6-replication table over the sizes the studies touch.
const FactorTable& acceptance_table() {
  static const FactorTable table = [] {
    const std::filesystem::path cache = "acceptance_factors_1e6.json";
    if (std::filesystem::exists(cache)) {
      try {
        FactorTable t = load_table(cache);
        if (t.master_seed() == kTableSeed && t.replications() == 1'000'000 &&
            t.size() == 8 * 16)
          return t;
      } catch (const std::exception&) {
      }
    }
    std::fprintf(stderr, "[acceptance] building 1e6-rep factor table (n=2..17)...\n");
    FactorTable t = build_table(kAllEstimators, 2, 17, 1'000'000, kTableSeed);
    save_table(t, cache);
    return t;
  }();
  return table;
}

// Focused 1e7-replication cells for the pooled-variance counterexamples.
const FactorTable& counterexample_table() {
  static const FactorTable table = [] {
    const std::filesystem::path cache = "acceptance_factors_1e7_n45.json";
    if (std::filesystem::exists(cache)) {
      try {
        FactorTable t = load_table(cache);
        if (t.master_seed() == kTableSeed && t.replications() == 10'000'000) return t;
      } catch (const std::exception&) {
      }
    }
    std::fprintf(stderr, "[acceptance] building 1e7-rep factor cells (median/mad, n=4,5)...\n");
    const EstimatorId ids[] = {EstimatorId::Median, EstimatorId::Mad};
    FactorTable t = build_table(ids, 4, 5, 10'000'000, kTableSeed);
    save_table(t, cache);
    return t;
  }();
  return table;
}

std::vector<int> plan_sizes(int a, int b, int c) {
  std::vector<int> sizes;
  for (int i = 0; i < 5; ++i) sizes.push_back(a);
  for (int i = 0; i < 5; ++i) sizes.push_back(b);
  for (int i = 0; i < 5; ++i) sizes.push_back(c);
  return sizes;
}

ScenarioConfig plan_config(std::vector<int> sizes, std::uint64_t reps, std::uint64_t seed,
                           bool contaminated) {
  ScenarioConfig c;
  c.sizes = std::move(sizes);
  c.mu0 = 100.0;
  c.sigma0 = 5.0;
  c.replications = reps;
  c.master_seed = seed;
  if (contaminated)
    c.contamination =
        ContaminationSpec{c.sizes.size(), static_cast<std::size_t>(c.sizes.back()), 100.0};
  return c;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const std::string title = "c4 closed form and Monte-Carlo agreement, n = 2..30";
  bool pass = std::fabs(c4(2) - std::sqrt(2.0 / 3.141592653589793238462643)) < 1e-9 &&
              std::fabs(c4(5) - 0.9399856030) < 1e-9;
  double worst = 0.0;
  for (int n = 2; n <= 30 && pass; ++n) {
    const std::uint64_t reps = 1'000'000;
    const auto mc = simulate_standard_moments(EstimatorId::StdDev, n, reps, 1000 + n);
    const double se = std::sqrt(mc.var_std / static_cast<double>(reps));
    const double dev = std::fabs(mc.gamma - c4(n)) / se;
    worst = std::max(worst, dev);
    if (dev > 4.0) pass = false;
  }
  report(1, pass, title, "worst |mc - c4|/se = " + fmt(worst));
}

void criterion2() {
  const std::string title = "pooled-variance counterexamples at sizes (4,5), 1e7-rep factors";
  const FactorTable& t = counterexample_table();
  const std::vector<int> sizes{4, 5};
  const std::vector<double> zeros{0.0, 0.0};

  const std::vector<double> nu{t.location_variance(LocationKind::Median, 4),
                               t.location_variance(LocationKind::Median, 5)};
  const double med_a =
      pool_location(EstimatorId::Median, zeros, sizes, nu, PoolingType::A).theoretical_var_factor;
  const double med_b =
      pool_location(EstimatorId::Median, zeros, sizes, nu, PoolingType::B).theoretical_var_factor;

  const std::vector<double> g{t.scale_gamma(ScaleKind::Mad, 4), t.scale_gamma(ScaleKind::Mad, 5)};
  const std::vector<double> tau{t.scale_variance(ScaleKind::Mad, 4),
                                t.scale_variance(ScaleKind::Mad, 5)};
  const double mad_a =
      pool_scale(EstimatorId::Mad, zeros, g, tau, sizes, PoolingType::A).theoretical_var_factor;
  const double mad_b =
      pool_scale(EstimatorId::Mad, zeros, g, tau, sizes, PoolingType::B).theoretical_var_factor;

  const bool pass = med_a < med_b && std::fabs(med_a - 0.146) < 5e-4 &&
                    std::fabs(med_b - 0.147) < 5e-4 && mad_a < mad_b &&
                    std::fabs(mad_a - 0.167) < 5e-4 && std::fabs(mad_b - 0.168) < 5e-4;
  report(2, pass, title,
         "median A/B = " + fmt(med_a) + "/" + fmt(med_b) + " (want 0.146/0.147), mad A/B = " +
             fmt(mad_a) + "/" + fmt(mad_b) + " (want 0.167/0.168)");
}

const EfficiencyReport& clean_scenario_a_report() {
  static const EfficiencyReport r = [] {
    ScenarioConfig config;
    config.sizes = {3, 10, 17};
    config.mu0 = 100.0;
    config.sigma0 = 10.0;
    config.replications = 100'000;
    config.master_seed = 301;
    return efficiency_study(config, acceptance_table());
  }();
  return r;
}

void criterion3() {
  const std::string title = "clean relative efficiency, sizes (3,10,17), 1e5 replications";
  const EfficiencyReport& r = clean_scenario_a_report();
  const double med = r.cell(LocationKind::Median, PoolingType::C).re_percent;
  const double hl1 = r.cell(LocationKind::HL1, PoolingType::C).re_percent;
  const double sha = r.cell(ScaleKind::Shamos, PoolingType::C).re_percent;
  const double madre = r.cell(ScaleKind::Mad, PoolingType::C).re_percent;
  const bool pass = std::fabs(med - 68.44) <= 1.0 && std::fabs(hl1 - 94.32) <= 1.0 &&
                    std::fabs(sha - 80.65) <= 1.5 && std::fabs(madre - 38.98) <= 1.0;
  report(3, pass, title,
         "RE(median,C) = " + fmt(med) + " (68.44), RE(hl1,C) = " + fmt(hl1) +
             " (94.32), RE(shamos,C) = " + fmt(sha) + " (80.65), RE(mad,C) = " + fmt(madre) +
             " (38.98)");
}

const EfficiencyReport& contaminated_scenario_d_report() {
  static const EfficiencyReport r = [] {
    ScenarioConfig config;
    config.sizes = {9, 10, 11};
    config.mu0 = 100.0;
    config.sigma0 = 10.0;
    config.replications = 100'000;
    config.master_seed = 304;
    config.contamination = ContaminationSpec{2, 10, 100.0};
    return efficiency_study(config, acceptance_table());
  }();
  return r;
}

void criterion4() {
  const std::string title = "contaminated relative efficiency, sizes (9,10,11), 1e5 replications";
  const EfficiencyReport& r = contaminated_scenario_d_report();
  const double mean_re = r.cell(LocationKind::Mean, PoolingType::C).re_percent;
  const double sd_re = r.cell(ScaleKind::StdDev, PoolingType::C).re_percent;
  const double hl1_re = r.cell(LocationKind::HL1, PoolingType::C).re_percent;
  const bool pass = std::fabs(mean_re - 23.07) <= 0.5 && std::fabs(sd_re - 2.88) <= 0.3 &&
                    std::fabs(hl1_re - 79.72) <= 1.0;
  report(4, pass, title,
         "RE(mean,C) = " + fmt(mean_re) + " (23.07), RE(sd,C) = " + fmt(sd_re) +
             " (2.88), RE(hl1,C) = " + fmt(hl1_re) + " (79.72)");
}

void criterion5() {
  const std::string title = "clean run lengths at 2e4 replications, n_k = 10";
  const FactorTable& t = acceptance_table();
  const std::uint64_t reps = 20'000;

  const auto plan5 = plan_config(plan_sizes(10, 10, 10), reps, 501, false);
  const double arl5 = run_length_study(plan5, Method::I, PoolingType::C, t, 10).arl;

  const auto plan3 = plan_config(plan_sizes(7, 10, 13), reps, 503, false);
  const double arl3 = run_length_study(plan3, Method::III, PoolingType::C, t, 10).arl;

  const auto plan1 = plan_config(plan_sizes(3, 10, 17), reps, 505, false);
  const double arl1 = run_length_study(plan1, Method::I, PoolingType::C, t, 10).arl;

  const bool pass = std::fabs(arl5 - 368.7) <= 25.0 && std::fabs(arl3 - 383.7) <= 30.0 &&
                    std::fabs(arl1 - 366.8) <= 25.0;
  report(5, pass, title,
         "plan5/I/C = " + fmt(arl5) + " (368.7 +- 25), plan3/III/C = " + fmt(arl3) +
             " (383.7 +- 30), plan1/I/C = " + fmt(arl1) + " (366.8 +- 25)");
}

void criterion6() {
  const std::string title = "contaminated run-length contrast, plan 5, cap 1e7";
  const FactorTable& t = acceptance_table();
  const std::uint64_t reps = 20'000;
  const auto plan = plan_config(plan_sizes(10, 10, 10), reps, 601, true);

  const RunLengthSummary m1 = run_length_study(plan, Method::I, PoolingType::C, t, 10);
  const RunLengthSummary m3 = run_length_study(plan, Method::III, PoolingType::C, t, 10);

  const bool censored_ok = m1.censored_count < reps / 100 && m3.censored_count < reps / 100;
  const bool pass = m1.arl > 5000.0 && m3.arl >= 400.0 && m3.arl <= 560.0 && censored_ok;
  report(6, pass, title,
         "Method-I ARL = " + fmt(m1.arl) + " (> 5000; reference value 15165.5), censored " +
             std::to_string(m1.censored_count) + "/" + std::to_string(reps) +
             "; Method-III ARL = " + fmt(m3.arl) + " (in [400, 560], reference 473.9), censored " +
             std::to_string(m3.censored_count));
}

void criterion7() {
  const std::string title = "known-limits geometric oracle, 1e6 draws";
  const int n_k = 10;
  const double mu0 = 100.0, sigma0 = 5.0;
  const double half = 3.0 * sigma0 / std::sqrt(static_cast<double>(n_k));
  const ControlLimits limits{mu0 - half, mu0, mu0 + half, 3.0, n_k};
  const double p = signal_probability(limits, mu0, sigma0, n_k);

  const std::uint64_t n = 1'000'000;
  std::vector<double> rls(n);
  std::vector<std::uint8_t> cens(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    RandomStream stream(700, i);
    bool c = false;
    rls[i] = draw_geometric_capped(stream, p, 1e7, c);
    cens[i] = c;
  }
  const RunLengthSummary s = summarize_run_lengths(rls, cens, 99.0);
  const double se = s.sdrl / std::sqrt(static_cast<double>(n));
  const bool pass = std::fabs(s.arl - 1.0 / p) <= 3.0 * se && s.censored_count == 0;
  report(7, pass, title,
         "ARL = " + fmt(s.arl) + ", 1/p = " + fmt(1.0 / p) + ", 3*se = " + fmt(3.0 * se));
}

std::optional<std::filesystem::path> piston_rings_path() {
  if (const char* env = std::getenv("PISTON_RINGS_CSV")) {
    if (std::filesystem::exists(env)) return std::filesystem::path(env);
    return std::nullopt;
  }
  if (const char* dir = std::getenv("RSPC_DATA_DIR")) {
    const std::filesystem::path p = std::filesystem::path(dir) / "piston_rings.csv";
    if (std::filesystem::exists(p)) return p;
  }
  if (std::filesystem::exists("piston_rings.csv"))
    return std::filesystem::path("piston_rings.csv");
  return std::nullopt;
}

void criterion8() {
  const std::string title = "piston-rings control limits, n_k = 5, pooling C";
  const auto path = piston_rings_path();
  if (!path) {
    report_skip(8, title,
                "dataset not present; place the piston-ring diameters as "
                "data/piston_rings.csv (see data/README.md) or set PISTON_RINGS_CSV");
    return;
  }
  const auto data = load_dataset_csv(*path);
  const std::vector<int> expected_sizes{5, 3, 5, 5, 5, 4, 4, 5, 4, 5, 5, 5, 3,
                                        5, 3, 5, 4, 5, 5, 3, 5, 5, 5, 5, 5};
  bool schema_ok = data.size() == expected_sizes.size();
  std::size_t total = 0;
  for (std::size_t i = 0; schema_ok && i < data.size(); ++i) {
    schema_ok = data[i].n() == static_cast<std::size_t>(expected_sizes[i]);
    total += data[i].n();
  }
  if (!schema_ok || total != 113) {
    report(8, false, title, "file present but does not match the 25-subgroup/113-value schema");
    return;
  }

  const FactorTable& t = acceptance_table();
  const ControlLimits l1 = control_limits(phase1_estimate(data, Method::I, PoolingType::C, t), 5);
  const ControlLimits l2 = control_limits(phase1_estimate(data, Method::II, PoolingType::C, t), 5);
  const ControlLimits l3 =
      control_limits(phase1_estimate(data, Method::III, PoolingType::C, t), 5);

  auto within = [](const ControlLimits& l, double lcl, double cl, double ucl, double tol) {
    return std::fabs(l.lcl - lcl) <= tol && std::fabs(l.cl - cl) <= tol &&
           std::fabs(l.ucl - ucl) <= tol;
  };
  const bool pass = within(l1, 73.98693, 74.00075, 74.01457, 5e-4) &&
                    within(l2, 73.98650, 74.00139, 74.01629, 1e-3) &&
                    within(l3, 73.98644, 74.00072, 74.01499, 1e-3);
  report(8, pass, title,
         "I: " + fmt(l1.lcl) + "/" + fmt(l1.cl) + "/" + fmt(l1.ucl) + ", II: " + fmt(l2.lcl) +
             "/" + fmt(l2.cl) + "/" + fmt(l2.ucl) + ", III: " + fmt(l3.lcl) + "/" + fmt(l3.cl) +
             "/" + fmt(l3.ucl));
}

void criterion9() {
  const std::string title = "property suites (weights, BLUE optimality, equivariance, determinism)";
  const FactorTable& t = acceptance_table();
  std::string failure;

  // Weight identities over random factor configurations.
  {
    RandomStream stream(901, 0);
    for (int trial = 0; trial < 1000 && failure.empty(); ++trial) {
      const std::size_t m = 1 + stream.next_u64() % 10;
      std::vector<int> sizes(m);
      std::vector<double> nu(m), gamma(m), tau(m), zeros(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        sizes[i] = 2 + static_cast<int>(stream.next_u64() % 16);
        nu[i] = 0.01 + 2.0 * stream.uniform();
        gamma[i] = 0.3 + 1.2 * stream.uniform();
        tau[i] = 0.005 + stream.uniform();
      }
      for (PoolingType p : kWeightedPoolings) {
        const auto loc = pool_location(EstimatorId::Median, zeros, sizes, nu, p);
        double wsum = 0.0;
        for (double w : loc.weights) wsum += w;
        if (std::fabs(wsum - 1.0) > 1e-12) failure = "location weight sum off at 1e-12";
        const auto sca = pool_scale(EstimatorId::Mad, zeros, gamma, tau, sizes, p);
        double wg = 0.0;
        for (std::size_t i = 0; i < m; ++i) wg += sca.weights[i] * gamma[i];
        if (std::fabs(wg - 1.0) > 1e-12) failure = "scale weight-gamma sum off at 1e-12";
      }
    }
  }

  // Theoretical BLUE optimality over 1000 random size configurations with
  // real table factors, every estimator.
  if (failure.empty()) {
    RandomStream stream(902, 0);
    for (int trial = 0; trial < 1000 && failure.empty(); ++trial) {
      const std::size_t m = 1 + stream.next_u64() % 10;
      std::vector<int> sizes(m);
      std::vector<double> zeros(m, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        sizes[i] = 2 + static_cast<int>(stream.next_u64() % 16);
      for (LocationKind k : kLocationKinds) {
        std::vector<double> nu(m);
        for (std::size_t i = 0; i < m; ++i) nu[i] = t.location_variance(k, sizes[i]);
        double v[3];
        for (PoolingType p : kWeightedPoolings)
          v[pooling_index(p)] =
              pool_location(id_of(k), zeros, sizes, nu, p).theoretical_var_factor;
        if (v[2] > v[0] * (1 + 1e-12) || v[2] > v[1] * (1 + 1e-12))
          failure = "location BLUE not optimal";
      }
      for (ScaleKind k : kScaleKinds) {
        std::vector<double> g(m), tau(m);
        for (std::size_t i = 0; i < m; ++i) {
          g[i] = t.scale_gamma(k, sizes[i]);
          tau[i] = t.scale_variance(k, sizes[i]);
        }
        double v[3];
        for (PoolingType p : kWeightedPoolings)
          v[pooling_index(p)] =
              pool_scale(id_of(k), zeros, g, tau, sizes, p).theoretical_var_factor;
        if (v[2] > v[0] * (1 + 1e-12) || v[2] > v[1] * (1 + 1e-12))
          failure = "scale BLUE not optimal";
      }
    }
  }

  // Affine equivariance of the full chart pipeline.
  if (failure.empty()) {
    RandomStream stream(903, 0);
    std::vector<Subgroup> data;
    // Total observation count stays within the tabulated range so the
    // pooled-data MAD (type D) can resolve its global factor.
    const int sizes[] = {3, 4, 4, 5};
    for (int i = 0; i < 4; ++i) {
      std::vector<double> values(static_cast<std::size_t>(sizes[i]));
      for (double& v : values) v = stream.normal(10.0, 2.0);
      data.push_back(make_subgroup("g" + std::to_string(i), std::move(values)));
    }
    const double a = 3.5, b = 1.75;
    std::vector<Subgroup> mapped = data;
    for (Subgroup& s : mapped)
      for (double& v : s.values) v = a + b * v;
    for (Method m : kAllMethods) {
      std::vector<PoolingType> poolings{PoolingType::A, PoolingType::B, PoolingType::C};
      if (m != Method::III) poolings.push_back(PoolingType::D);
      for (PoolingType p : poolings) {
        const ControlLimits base = control_limits(phase1_estimate(data, m, p, t), 5);
        const ControlLimits moved = control_limits(phase1_estimate(mapped, m, p, t), 5);
        const double scale = std::max(std::fabs(moved.ucl), 1.0);
        if (std::fabs(moved.lcl - (a + b * base.lcl)) > 1e-10 * scale ||
            std::fabs(moved.cl - (a + b * base.cl)) > 1e-10 * scale ||
            std::fabs(moved.ucl - (a + b * base.ucl)) > 1e-10 * scale)
          failure = "affine equivariance broken";
      }
    }
  }

  // Worker-count independence, bit for bit.
  if (failure.empty()) {
    ScenarioConfig config;
    config.sizes = {3, 5, 8};
    config.mu0 = 50.0;
    config.sigma0 = 2.0;
    config.replications = 20'000;
    config.master_seed = 904;
    const EfficiencyReport r1 = efficiency_study(config, t, 1);
    const EfficiencyReport r4 = efficiency_study(config, t, 4);
    for (LocationKind k : kLocationKinds)
      for (PoolingType p : kWeightedPoolings)
        if (r1.cell(k, p).mse != r4.cell(k, p).mse ||
            r1.cell(k, p).variance != r4.cell(k, p).variance)
          failure = "efficiency study depends on worker count";
    const auto plan = plan_config(plan_sizes(5, 5, 5), 5'000, 905, false);
    const auto s1 = run_length_study(plan, Method::I, PoolingType::C, t, 10, 10'000'000,
                                     RlEngine::Geometric, 99.0, 1);
    const auto s4 = run_length_study(plan, Method::I, PoolingType::C, t, 10, 10'000'000,
                                     RlEngine::Geometric, 99.0, 4);
    if (s1.arl != s4.arl || s1.sdrl != s4.sdrl || s1.prl != s4.prl)
      failure = "run-length study depends on worker count";
  }

  // mse = variance + bias^2 in every cell of both study reports.
  if (failure.empty()) {
    for (const EfficiencyReport* r : {&clean_scenario_a_report(), &contaminated_scenario_d_report()}) {
      for (LocationKind k : kLocationKinds)
        for (PoolingType p : kWeightedPoolings) {
          const EfficiencyCell& c = r->cell(k, p);
          if (std::fabs(c.mse - (c.variance + c.bias * c.bias)) >
              1e-9 * std::max(1.0, std::fabs(c.mse)))
            failure = "mse identity broken in a location cell";
        }
      for (ScaleKind k : kScaleKinds)
        for (PoolingType p : kWeightedPoolings) {
          const EfficiencyCell& c = r->cell(k, p);
          if (std::fabs(c.mse - (c.variance + c.bias * c.bias)) >
              1e-9 * std::max(1.0, std::fabs(c.mse)))
            failure = "mse identity broken in a scale cell";
        }
    }
  }

  report(9, failure.empty(), title, failure);
}

void criterion10() {
  const std::string title = "sensitivity sweep: classical UCL range exceeds robust ranges";
  const FactorTable& t = acceptance_table();

  std::vector<Subgroup> data;
  const auto path = piston_rings_path();
  std::string source;
  if (path) {
    data = load_dataset_csv(*path);
    source = "piston-rings data";
  } else {
    const int sizes[] = {5, 3, 5, 5, 5, 4, 4, 5, 4, 5, 5, 5, 3, 5, 3, 5, 4, 5, 5, 3, 5, 5, 5, 5, 5};
    RandomStream stream(1001, 0);
    for (int i = 0; i < 25; ++i) {
      std::vector<double> values(static_cast<std::size_t>(sizes[i]));
      for (double& v : values) v = stream.normal(74.0, 0.01);
      data.push_back(make_subgroup("s" + std::to_string(i + 1), std::move(values)));
    }
    source = "synthetic 25-subgroup data at N(74, 0.01^2)";
  }

  bool pass = true;
  std::string detail = source;
  for (ContaminationMode mode : {ContaminationMode::Append, ContaminationMode::Replace}) {
    SweepSpec spec;
    spec.delta_start = 73.0;
    spec.delta_stop = 74.0;
    spec.delta_step = 0.1;
    spec.mode = mode;
    spec.sample_index = 1;
    spec.observation_index = 0;  // last, for replace mode
    spec.n_k = 5;
    const SensitivityResult r = sensitivity_sweep(data, spec, t);
    double range[3];
    for (std::size_t mi = 0; mi < 3; ++mi) {
      double lo = r.limits[mi][0].ucl, hi = r.limits[mi][0].ucl;
      for (const ControlLimits& l : r.limits[mi]) {
        lo = std::min(lo, l.ucl);
        hi = std::max(hi, l.ucl);
      }
      range[mi] = hi - lo;
    }
    pass = pass && range[0] > range[1] && range[0] > range[2];
    detail += std::string("; ") + (mode == ContaminationMode::Append ? "append" : "replace") +
              " UCL ranges I/II/III = " + fmt(range[0]) + "/" + fmt(range[1]) + "/" +
              fmt(range[2]);
  }
  report(10, pass, title, detail);
}

}  // namespace

int main() {
  guarded(1, "c4 closed form and Monte-Carlo agreement", criterion1);
  guarded(2, "pooled-variance counterexamples", criterion2);
  guarded(3, "clean relative efficiency", criterion3);
  guarded(4, "contaminated relative efficiency", criterion4);
  guarded(5, "clean run lengths", criterion5);
  guarded(6, "contaminated run-length contrast", criterion6);
  guarded(7, "known-limits geometric oracle", criterion7);
  guarded(8, "piston-rings control limits", criterion8);
  guarded(9, "property suites", criterion9);
  guarded(10, "sensitivity sweep ordering", criterion10);

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed (skips reported above, if any)\n");
  return 0;
}
