#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "rspc/factors.hpp"
#include "support.hpp"

using namespace rspc;
using Catch::Approx;
using rspc::test::rel_close;
using rspc::test::test_table;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("c4 closed form") {
  CHECK(c4(2) == Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
  CHECK(c4(5) == Approx(0.9399856030).epsilon(1e-9));
  CHECK(c4(1'000'000) == Approx(1.0).margin(1e-6));
  CHECK_THROWS_AS(c4(1), invalid_input);

  double prev = 0.0;
  for (int n = 2; n <= 100; ++n) {
    const double v = c4(n);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("simulated median variance matches the known small-n constants") {
  // Reference values: Var(median) = 1.1930/4 at n=4 and 1.4339/5 at n=5.
  const auto m4 = simulate_standard_moments(EstimatorId::Median, 4, 400'000, 9001);
  const auto m5 = simulate_standard_moments(EstimatorId::Median, 5, 400'000, 9002);
  CHECK(m4.var_std == Approx(0.29825).margin(2e-3));
  CHECK(m5.var_std == Approx(0.28678).margin(2e-3));
}

TEST_CASE("simulated StdDev moments agree with the analytic c4 curve") {
  for (int n : {2, 5, 12, 30}) {
    const std::uint64_t reps = 200'000;
    const auto mc = simulate_standard_moments(EstimatorId::StdDev, n, reps, 4242 + n);
    const double se = std::sqrt(mc.var_std / static_cast<double>(reps));
    CHECK(std::fabs(mc.gamma - c4(n)) <= 4.0 * se);
  }
}

TEST_CASE("simulate_standard_moments preconditions and determinism") {
  CHECK_THROWS_AS(simulate_standard_moments(EstimatorId::Mad, 5, 9'999, 1), invalid_input);
  CHECK_THROWS_AS(simulate_standard_moments(EstimatorId::HL1, 1, 10'000, 1), invalid_input);
  CHECK_THROWS_AS(simulate_standard_moments(EstimatorId::Shamos, 1, 10'000, 1), invalid_input);

  const auto a = simulate_standard_moments(EstimatorId::Shamos, 6, 20'000, 7, 0.0, 1.0, 1);
  const auto b = simulate_standard_moments(EstimatorId::Shamos, 6, 20'000, 7, 0.0, 1.0, 3);
  CHECK(a.gamma == b.gamma);  // bit-identical across worker counts
  CHECK(a.var_std == b.var_std);
}

TEST_CASE("scale expectation scales with sigma and ignores location") {
  // Same replication seeds at (0,1) and (100,10): E[estimator]/sigma must match.
  for (EstimatorId id : {EstimatorId::Mad, EstimatorId::Shamos, EstimatorId::StdDev}) {
    const auto std01 = simulate_standard_moments(id, 7, 50'000, 555);
    const auto shifted = simulate_standard_moments(id, 7, 50'000, 555, 100.0, 10.0);
    CHECK(rel_close(shifted.gamma / 10.0, std01.gamma, 1e-10));
  }
}

TEST_CASE("MAD unbiasing factor tends to one") {
  const auto m = simulate_standard_moments(EstimatorId::Mad, 500, 10'000, 31);
  CHECK(m.gamma == Approx(1.0).margin(0.01));
}

TEST_CASE("shared factor table: shape and entry invariants") {
  const FactorTable& t = test_table();
  CHECK(t.size() == 8 * 29);  // 5 location + 3 scale estimators, n in [2, 30]
  for (EstimatorId id : kAllEstimators) {
    for (int n = 2; n <= 30; ++n) {
      const FactorEntry& e = t.at(id, n);
      CHECK(e.var_std > 0.0);
      if (is_location(id))
        CHECK(e.gamma == 0.0);
      else
        CHECK(e.gamma > 0.0);
    }
  }
  // Analytic entries for the closed-form estimators.
  CHECK(t.at(EstimatorId::Mean, 4).var_std == Approx(0.25).epsilon(1e-15));
  CHECK(t.at(EstimatorId::StdDev, 5).gamma == Approx(c4(5)).epsilon(1e-15));
  CHECK(unbiasing_factor(t, ScaleKind::StdDev, 5) == Approx(0.9399856030).epsilon(1e-9));
  CHECK(unbiasing_factor(t, ScaleKind::Mad, 5) == t.at(EstimatorId::Mad, 5).gamma);
}

TEST_CASE("var_std decreases in n (sawtooth allowed for median and MAD)") {
  const FactorTable& t = test_table();
  for (EstimatorId id : {EstimatorId::Mean, EstimatorId::HL1, EstimatorId::HL2,
                         EstimatorId::HL3, EstimatorId::StdDev, EstimatorId::Shamos}) {
    for (int n = 5; n < 30; ++n)
      CHECK(t.at(id, n + 1).var_std < t.at(id, n).var_std);
  }
  for (EstimatorId id : {EstimatorId::Median, EstimatorId::Mad}) {
    for (int n = 5; n + 2 <= 30; ++n)
      CHECK(t.at(id, n + 2).var_std < t.at(id, n).var_std);
  }
}

TEST_CASE("unbiased-estimator self-consistency of the table") {
  // Fresh draws with an unrelated seed: E[raw]/gamma_table stays within
  // combined Monte-Carlo error of 1.
  const FactorTable& t = test_table();
  for (auto [id, kind] : {std::pair{EstimatorId::Mad, ScaleKind::Mad},
                          std::pair{EstimatorId::Shamos, ScaleKind::Shamos}}) {
    for (int n : {4, 9, 16}) {
      const std::uint64_t reps = 200'000;
      const auto fresh = simulate_standard_moments(id, n, reps, 86420 + n);
      const double gamma = t.scale_gamma(kind, n);
      const double se = std::sqrt(fresh.var_std / static_cast<double>(reps) +
                                  t.scale_variance(kind, n) /
                                      static_cast<double>(t.replications()));
      CHECK(std::fabs(fresh.gamma / gamma - 1.0) <= 4.0 * se / gamma);
    }
  }
}

TEST_CASE("shamos unbiasing factor at n=5 matches the frozen oracle value") {
  // 1.1012341 came from a 1e7-replication run of simulate_standard_moments
  // (seed 424242, se 1.5e-4) and serves as a regression constant.
  const FactorTable& t = test_table();
  const double tau2 = t.scale_variance(ScaleKind::Shamos, 5);
  const double se = std::sqrt(tau2 / static_cast<double>(t.replications()) + tau2 / 1e7);
  CHECK(std::fabs(t.scale_gamma(ScaleKind::Shamos, 5) - 1.1012341) <= 4.0 * se);
}

TEST_CASE("table lookup failures name the missing pair") {
  const FactorTable& t = test_table();
  try {
    (void)t.at(EstimatorId::Mad, 31);
    FAIL("expected table_incomplete");
  } catch (const table_incomplete& e) {
    CHECK(e.estimator() == "mad");
    CHECK(e.n() == 31);
    CHECK(std::string(e.what()).find("mad") != std::string::npos);
    CHECK(std::string(e.what()).find("31") != std::string::npos);
  }
}

TEST_CASE("build_table argument validation") {
  const EstimatorId ids[] = {EstimatorId::Mean};
  CHECK_THROWS_AS(build_table(ids, 1, 5, 10'000, 1), invalid_input);
  CHECK_THROWS_AS(build_table(ids, 5, 3, 10'000, 1), invalid_input);
  CHECK_THROWS_AS(build_table(ids, 2, 5, 100, 1), invalid_input);
  CHECK_THROWS_AS(build_table({}, 2, 5, 10'000, 1), invalid_input);
}

TEST_CASE("persistence round-trips bit-exactly and deterministically") {
  const EstimatorId ids[] = {EstimatorId::Mean, EstimatorId::Mad};
  const FactorTable t = build_table(ids, 2, 6, 10'000, 2024);
  const std::filesystem::path p1 = "factors_roundtrip_1.json";
  const std::filesystem::path p2 = "factors_roundtrip_2.json";
  save_table(t, p1);
  const FactorTable back = load_table(p1);
  CHECK(back.version() == t.version());
  CHECK(back.master_seed() == t.master_seed());
  CHECK(back.replications() == t.replications());
  REQUIRE(back.size() == t.size());
  for (const FactorEntry& e : t.sorted_entries()) {
    const FactorEntry& r = back.at(e.estimator, e.n);
    CHECK(r.gamma == e.gamma);      // bitwise
    CHECK(r.var_std == e.var_std);  // bitwise
    CHECK(r.source == e.source);
  }
  save_table(back, p2);
  CHECK(slurp(p1) == slurp(p2));

  // Rebuilding from the same seed reproduces the same bytes.
  const FactorTable again = build_table(ids, 2, 6, 10'000, 2024);
  save_table(again, p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("load rejects corrupted tables") {
  const EstimatorId ids[] = {EstimatorId::Mad};
  const FactorTable t = build_table(ids, 15, 19, 10'000, 77);
  const std::filesystem::path good = "factors_tamper_base.json";
  save_table(t, good);
  const std::string original = slurp(good);

  SECTION("version mismatch") {
    std::string text = original;
    const auto pos = text.find("\"version\": \"1\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 14, "\"version\": \"9\"");
    write_file_atomic("factors_tamper_version.json", text);
    CHECK_THROWS_AS(load_table("factors_tamper_version.json"), io_error);
  }

  SECTION("checksum mismatch") {
    std::string text = original;
    const auto pos = text.find("\"gamma\": 0.");
    REQUIRE(pos != std::string::npos);
    text[pos + 12] = text[pos + 12] == '5' ? '6' : '5';
    write_file_atomic("factors_tamper_checksum.json", text);
    CHECK_THROWS_AS(load_table("factors_tamper_checksum.json"), io_error);
  }

  SECTION("gap in the tabulated range") {
    // Drop (mad, 17) and restamp the checksum so only completeness can fail.
    FactorTable holed(t.version(), t.master_seed(), t.replications());
    for (const FactorEntry& e : t.sorted_entries())
      if (e.n != 17) holed.insert(e);
    save_table(holed, "factors_tamper_hole.json");
    try {
      (void)load_table("factors_tamper_hole.json");
      FAIL("expected table_incomplete");
    } catch (const table_incomplete& e) {
      CHECK(e.estimator() == "mad");
      CHECK(e.n() == 17);
    }
  }

  SECTION("unreadable path") {
    CHECK_THROWS_AS(load_table("no_such_directory/табличка.json"), io_error);
  }

  SECTION("not json at all") {
    write_file_atomic("factors_tamper_garbage.json", "sample_id,value\np1,74.0\n");
    CHECK_THROWS_AS(load_table("factors_tamper_garbage.json"), io_error);
  }
}
