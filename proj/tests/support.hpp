#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "rspc/factors.hpp"
#include "rspc/rng.hpp"
#include "rspc/subgroup.hpp"

namespace rspc::test {

inline bool rel_close(double a, double b, double tol) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
  return std::fabs(a - b) <= tol * scale;
}

inline constexpr std::uint64_t kTestTableSeed = 1234567;
inline constexpr std::uint64_t kTestTableReps = 1'000'000;
inline constexpr int kTestTableNMax = 30;

// Shared Monte-Carlo factor table for the test suites: all eight estimators,
// n in [2, 30], 1e6 replications. Built once and cached on disk in the test
// working directory; the content is deterministic, so a cached copy is
// indistinguishable from a rebuild.
inline const FactorTable& test_table() {
  static const FactorTable table = [] {
    const std::filesystem::path cache = "rspc_test_factors_1e6.json";
    if (std::filesystem::exists(cache)) {
      try {
        FactorTable t = load_table(cache);
        if (t.master_seed() == kTestTableSeed && t.replications() == kTestTableReps &&
            t.size() == 8 * (kTestTableNMax - 1))
          return t;
      } catch (const std::exception&) {
        // fall through to rebuild
      }
    }
    std::fprintf(stderr, "[support] building shared factor table (n=2..%d, 1e6 reps)...\n",
                 kTestTableNMax);
    FactorTable t = build_table(kAllEstimators, 2, kTestTableNMax, kTestTableReps,
                                kTestTableSeed);
    save_table(t, cache);
    return t;
  }();
  return table;
}

// Fixed synthetic dataset of ragged subgroups for chart-level tests.
inline std::vector<Subgroup> synthetic_subgroups(std::size_t m, double mu, double sigma,
                                                 std::uint64_t seed, int n_min = 3,
                                                 int n_max = 8) {
  std::vector<Subgroup> out;
  RandomStream stream(seed, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const int n = n_min + static_cast<int>(stream.next_u64() %
                                           static_cast<std::uint64_t>(n_max - n_min + 1));
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = stream.normal(mu, sigma);
    out.push_back(make_subgroup("s" + std::to_string(i + 1), std::move(values)));
  }
  return out;
}

}  // namespace rspc::test
