#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "rspc/errors.hpp"
#include "rspc/estimators.hpp"
#include "rspc/parallel.hpp"
#include "rspc/rng.hpp"
#include "rspc/subgroup.hpp"

namespace rspc {

inline constexpr const char* kFactorTableVersion = "1";

// Unbiasing factor of the sample standard deviation under normality,
// c4(n) = sqrt(2/(n-1)) * Gamma(n/2) / Gamma((n-1)/2), evaluated through
// log-gamma so large n cannot overflow.
inline double c4(int n) {
  if (n < 2) throw invalid_input("c4: need n >= 2");
  const double half_n = 0.5 * static_cast<double>(n);
  return std::sqrt(2.0 / (n - 1)) * std::exp(std::lgamma(half_n) - std::lgamma(half_n - 0.5));
}

enum class FactorSource { Analytic, MonteCarlo };

// Standardized moments of one raw estimator at one sample size under the
// standard normal: gamma = E[estimator], var_std = Var[estimator]. Location
// estimators store gamma = 0 exactly (their expectation by symmetry); only
// var_std (nu^2) is consumed for them. Scale estimators store the unbiasing
// factor gamma (c4/c5/c6) and tau^2.
struct FactorEntry {
  EstimatorId estimator;
  int n = 0;
  double gamma = 0.0;
  double var_std = 0.0;
  FactorSource source = FactorSource::MonteCarlo;
};

struct StandardMoments {
  double gamma = 0.0;
  double var_std = 0.0;
};

namespace detail {

// Streaming mean/M2 accumulator with a deterministic merge (Chan's update).
struct MomentAcc {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const MomentAcc& o) noexcept {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    count += o.count;
  }

  double variance_sample() const noexcept {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
};

// One Monte-Carlo pass at sample size n evaluating every requested estimator
// on the same simulated subgroups. Streams are derived from (seed, rep), so
// the result for an estimator does not depend on which other estimators were
// requested alongside it, nor on the worker count.
inline std::vector<MomentAcc> simulate_moment_pass(std::span<const EstimatorId> estimators,
                                                   int n, std::uint64_t replications,
                                                   std::uint64_t seed, double mu, double sigma,
                                                   unsigned threads) {
  const std::uint64_t nblocks = block_count(replications, kDefaultBlockSize);
  std::vector<std::vector<MomentAcc>> partials(
      nblocks, std::vector<MomentAcc>(estimators.size()));

  for_each_block(replications, kDefaultBlockSize, threads,
                 [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
                   std::vector<MomentAcc>& acc = partials[b];
                   std::vector<double> x(static_cast<std::size_t>(n));
                   for (std::uint64_t rep = lo; rep < hi; ++rep) {
                     RandomStream stream(seed, rep);
                     for (double& v : x) v = stream.normal(mu, sigma);
                     for (std::size_t e = 0; e < estimators.size(); ++e)
                       acc[e].add(estimate(estimators[e], x));
                   }
                 });

  return reduce_pairwise(std::span<std::vector<MomentAcc>>(partials),
                         [](std::vector<MomentAcc>& a, const std::vector<MomentAcc>& b) {
                           for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
                         });
}

}  // namespace detail

// Empirical mean and variance of a raw estimator over `replications`
// independent normal subgroups of size n. Deterministic given the seed;
// worker-count independent. mu/sigma default to the standard normal.
inline StandardMoments simulate_standard_moments(EstimatorId estimator, int n,
                                                 std::uint64_t replications, std::uint64_t seed,
                                                 double mu = 0.0, double sigma = 1.0,
                                                 unsigned threads = 0) {
  if (replications < 10'000)
    throw invalid_input("simulate_standard_moments: need at least 1e4 replications");
  const int min_n = is_location(estimator) && estimator != EstimatorId::HL1 ? 1 : 2;
  if (n < min_n)
    throw invalid_input(std::string("simulate_standard_moments: n too small for ") +
                        name(estimator));
  const EstimatorId ids[] = {estimator};
  const auto acc = detail::simulate_moment_pass(ids, n, replications, seed, mu, sigma, threads);
  return StandardMoments{acc[0].mean, acc[0].variance_sample()};
}

// Immutable map (estimator, n) -> FactorEntry with provenance. Lookup of a
// missing entry fails loudly.
class FactorTable {
 public:
  FactorTable() = default;
  FactorTable(std::string version, std::uint64_t master_seed, std::uint64_t replications)
      : version_(std::move(version)), master_seed_(master_seed), replications_(replications) {}

  const std::string& version() const noexcept { return version_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t replications() const noexcept { return replications_; }

  void insert(const FactorEntry& e) { entries_[key(e.estimator, e.n)] = e; }

  bool contains(EstimatorId estimator, int n) const {
    return entries_.count(key(estimator, n)) != 0;
  }

  const FactorEntry& at(EstimatorId estimator, int n) const {
    const auto it = entries_.find(key(estimator, n));
    if (it == entries_.end()) throw table_incomplete(name(estimator), n);
    return it->second;
  }

  // nu^2: variance of a location estimator under N(0,1).
  double location_variance(LocationKind k, int n) const { return at(id_of(k), n).var_std; }
  // gamma and tau^2 of a raw scale estimator under N(0,1).
  double scale_gamma(ScaleKind k, int n) const { return at(id_of(k), n).gamma; }
  double scale_variance(ScaleKind k, int n) const { return at(id_of(k), n).var_std; }

  std::vector<FactorEntry> sorted_entries() const {
    std::vector<FactorEntry> out;
    out.reserve(entries_.size());
    for (const auto& [k, e] : entries_) out.push_back(e);
    return out;
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  static std::pair<int, int> key(EstimatorId estimator, int n) {
    return {static_cast<int>(estimator), n};
  }

  std::string version_ = kFactorTableVersion;
  std::uint64_t master_seed_ = 0;
  std::uint64_t replications_ = 0;
  std::map<std::pair<int, int>, FactorEntry> entries_;
};

// gamma_n for a scale estimator: analytic c4 for the standard deviation,
// Monte-Carlo c5/c6 from the table for MAD/Shamos.
inline double unbiasing_factor(const FactorTable& table, ScaleKind kind, int n) {
  if (kind == ScaleKind::StdDev) return c4(n);
  return table.scale_gamma(kind, n);
}

// Builds entries for every requested estimator over n in [n_min, n_max].
// Mean and StdDev moments are analytic; the rest come from one shared
// Monte-Carlo pass per sample size (seed derived from (master_seed, n)).
inline FactorTable build_table(std::span<const EstimatorId> estimators, int n_min, int n_max,
                               std::uint64_t replications, std::uint64_t master_seed,
                               unsigned threads = 0) {
  if (n_min < 2 || n_max < n_min) throw invalid_input("build_table: need 2 <= n_min <= n_max");
  if (estimators.empty()) throw invalid_input("build_table: no estimators requested");
  if (replications < 10'000) throw invalid_input("build_table: need at least 1e4 replications");

  FactorTable table(kFactorTableVersion, master_seed, replications);

  std::vector<EstimatorId> mc;
  for (EstimatorId id : estimators)
    if (id != EstimatorId::Mean && id != EstimatorId::StdDev) mc.push_back(id);

  for (int n = n_min; n <= n_max; ++n) {
    for (EstimatorId id : estimators) {
      if (id == EstimatorId::Mean)
        table.insert({id, n, 0.0, 1.0 / n, FactorSource::Analytic});
      else if (id == EstimatorId::StdDev)
        table.insert({id, n, c4(n), 1.0 - c4(n) * c4(n), FactorSource::Analytic});
    }
    if (mc.empty()) continue;
    const auto acc = detail::simulate_moment_pass(mc, n, replications,
                                                  derive_seed(master_seed, static_cast<std::uint64_t>(n)),
                                                  0.0, 1.0, threads);
    for (std::size_t e = 0; e < mc.size(); ++e) {
      const double gamma = is_location(mc[e]) ? 0.0 : acc[e].mean;
      table.insert({mc[e], n, gamma, acc[e].variance_sample(), FactorSource::MonteCarlo});
    }
  }
  return table;
}

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::string entry_canonical_line(const FactorEntry& e) {
  std::string line = name(e.estimator);
  line += '|';
  line += std::to_string(e.n);
  line += '|';
  line += format_g17(e.gamma);
  line += '|';
  line += format_g17(e.var_std);
  line += '|';
  line += e.source == FactorSource::Analytic ? "analytic" : "monte_carlo";
  line += '\n';
  return line;
}

inline std::string table_checksum(const FactorTable& table) {
  std::string canon;
  for (const FactorEntry& e : table.sorted_entries()) canon += entry_canonical_line(e);
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

}  // namespace detail

// Write-temp-then-rename; the temp name carries the pid so concurrent
// processes racing on the same target (e.g. a shared cache) cannot clobber
// each other's half-written files.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw io_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw io_error("cannot move " + tmp.string() + " to " + path.string());
}

// JSON persistence. Numbers carry 17 significant digits so entries round-trip
// bit-exactly; entries are emitted in a fixed order so identical tables
// serialize to identical bytes.
inline void save_table(const FactorTable& table, const std::filesystem::path& path) {
  std::string out;
  out += "{\n";
  out += "  \"version\": \"" + table.version() + "\",\n";
  out += "  \"master_seed\": " + std::to_string(table.master_seed()) + ",\n";
  out += "  \"replications\": " + std::to_string(table.replications()) + ",\n";
  out += "  \"checksum\": \"" + detail::table_checksum(table) + "\",\n";
  out += "  \"entries\": [\n";
  const auto entries = table.sorted_entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const FactorEntry& e = entries[i];
    out += "    {\"estimator\": \"";
    out += name(e.estimator);
    out += "\", \"n\": " + std::to_string(e.n);
    out += ", \"gamma\": " + detail::format_g17(e.gamma);
    out += ", \"var_std\": " + detail::format_g17(e.var_std);
    out += ", \"source\": \"";
    out += e.source == FactorSource::Analytic ? "analytic" : "monte_carlo";
    out += "\"}";
    out += i + 1 < entries.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  write_file_atomic(path, out);
}

inline FactorTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open factor table: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("invalid factor table JSON in " + path.string() + ": " + e.what());
  }

  try {
    const std::string version = doc.at("version").get<std::string>();
    if (version != kFactorTableVersion)
      throw io_error("factor table version mismatch in " + path.string() + ": have '" +
                     version + "', expected '" + kFactorTableVersion + "'");
    FactorTable table(version, doc.at("master_seed").get<std::uint64_t>(),
                      doc.at("replications").get<std::uint64_t>());
    for (const auto& je : doc.at("entries")) {
      FactorEntry e;
      e.estimator = parse_estimator(je.at("estimator").get<std::string>());
      e.n = je.at("n").get<int>();
      e.gamma = je.at("gamma").get<double>();
      e.var_std = je.at("var_std").get<double>();
      const std::string source = je.at("source").get<std::string>();
      if (source != "analytic" && source != "monte_carlo")
        throw io_error("unknown factor source '" + source + "' in " + path.string());
      e.source = source == "analytic" ? FactorSource::Analytic : FactorSource::MonteCarlo;
      table.insert(e);
    }

    if (doc.contains("checksum")) {
      const std::string want = doc.at("checksum").get<std::string>();
      const std::string have = detail::table_checksum(table);
      if (want != have)
        throw io_error("factor table checksum mismatch in " + path.string() + ": file says " +
                       want + ", entries hash to " + have);
    }

    // Completeness: each estimator must cover a gap-free range of n.
    for (EstimatorId id : kAllEstimators) {
      std::vector<int> ns;
      for (const FactorEntry& e : table.sorted_entries())
        if (e.estimator == id) ns.push_back(e.n);
      for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] != ns[i - 1] + 1) throw table_incomplete(name(id), ns[i - 1] + 1);
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed factor table " + path.string() + ": " + e.what());
  }
}

}  // namespace rspc
