#pragma once

#include <cctype>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rspc/charts.hpp"
#include "rspc/errors.hpp"
#include "rspc/simulation.hpp"

namespace rspc {

// Run-length campaign: one plan evaluated over a method x pooling grid.
struct ArlRunConfig {
  ScenarioConfig scenario;
  std::vector<Method> methods{Method::I, Method::II, Method::III};
  std::vector<PoolingType> poolings{PoolingType::A, PoolingType::B, PoolingType::C};
  int n_k = 10;
  std::uint64_t rl_cap = 10'000'000;
  double percentile = 99.0;
  RlEngine engine = RlEngine::Geometric;
};

namespace detail {

inline std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_double_field(const std::string& value, const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw io_error("config field '" + field + "': '" + value + "' is not a number");
  return v;
}

inline std::uint64_t parse_u64_field(const std::string& value, const std::string& field) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    throw io_error("config field '" + field + "': '" + value + "' is not a count");
  return v;
}

struct KvConfig {
  std::vector<std::pair<std::string, std::string>> items;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : items)
      if (k == key) return &v;
    return nullptr;
  }
};

inline KvConfig parse_kv(const std::string& text, const std::string& origin) {
  KvConfig out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw io_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    out.items.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace detail

// Scenario configuration, accepted as JSON or as key = value lines.
//
//   sizes = 3,10,17            mu0 = 100       sigma0 = 10
//   replications = 100000      seed = 42
//   contamination_sample = 2   contamination_observation = 10
//   contamination_delta = 100
//
// JSON uses the same field names with contamination nested as
// {"sample_index":2,"observation_index":10,"delta":100}.
inline ScenarioConfig parse_scenario_config(const std::string& text,
                                            const std::string& origin = "<config>") {
  ScenarioConfig config;

  std::size_t first = text.find_first_not_of(" \t\r\n");
  const bool is_json = first != std::string::npos && text[first] == '{';

  if (is_json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw io_error(origin + ": invalid JSON: " + e.what());
    }
    try {
      for (const auto& [key, value] : doc.items()) {
        if (key == "sizes")
          config.sizes = value.get<std::vector<int>>();
        else if (key == "mu0")
          config.mu0 = value.get<double>();
        else if (key == "sigma0")
          config.sigma0 = value.get<double>();
        else if (key == "replications")
          config.replications = value.get<std::uint64_t>();
        else if (key == "seed" || key == "master_seed")
          config.master_seed = value.get<std::uint64_t>();
        else if (key == "contamination") {
          ContaminationSpec spec;
          spec.sample_index = value.at("sample_index").get<std::size_t>();
          spec.observation_index = value.at("observation_index").get<std::size_t>();
          spec.delta = value.at("delta").get<double>();
          config.contamination = spec;
        } else if (key == "methods" || key == "poolings" || key == "nk" ||
                   key == "rl_cap" || key == "percentile" || key == "engine") {
          // run-length grid fields, handled by parse_arl_config
        } else {
          throw io_error(origin + ": unknown config field '" + key + "'");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw io_error(origin + ": bad config field: " + std::string(e.what()));
    }
  } else {
    const detail::KvConfig kv = detail::parse_kv(text, origin);
    std::optional<std::size_t> csample, cobs;
    std::optional<double> cdelta;
    for (const auto& [key, value] : kv.items) {
      if (key == "sizes") {
        config.sizes.clear();
        for (const std::string& item : detail::split_list(value))
          config.sizes.push_back(
              static_cast<int>(detail::parse_u64_field(item, "sizes")));
      } else if (key == "mu0")
        config.mu0 = detail::parse_double_field(value, key);
      else if (key == "sigma0")
        config.sigma0 = detail::parse_double_field(value, key);
      else if (key == "replications")
        config.replications = detail::parse_u64_field(value, key);
      else if (key == "seed" || key == "master_seed")
        config.master_seed = detail::parse_u64_field(value, key);
      else if (key == "contamination_sample")
        csample = detail::parse_u64_field(value, key);
      else if (key == "contamination_observation")
        cobs = detail::parse_u64_field(value, key);
      else if (key == "contamination_delta")
        cdelta = detail::parse_double_field(value, key);
      else if (key == "methods" || key == "poolings" || key == "nk" || key == "rl_cap" ||
               key == "percentile" || key == "engine") {
        // run-length grid fields, handled by parse_arl_config
      } else
        throw io_error(origin + ": unknown config field '" + key + "'");
    }
    if (csample || cobs || cdelta) {
      if (!(csample && cobs && cdelta))
        throw io_error(origin +
                       ": contamination needs sample, observation, and delta together");
      config.contamination = ContaminationSpec{*csample, *cobs, *cdelta};
    }
  }

  validate_config(config);
  return config;
}

inline ArlRunConfig parse_arl_config(const std::string& text,
                                     const std::string& origin = "<config>") {
  ArlRunConfig run;
  run.scenario = parse_scenario_config(text, origin);

  auto apply = [&](const std::string& key, const std::string& value) {
    if (key == "methods") {
      run.methods.clear();
      for (const std::string& item : detail::split_list(value))
        run.methods.push_back(parse_method(item));
    } else if (key == "poolings") {
      run.poolings.clear();
      for (const std::string& item : detail::split_list(value))
        run.poolings.push_back(parse_pooling(item));
    } else if (key == "nk") {
      run.n_k = static_cast<int>(detail::parse_u64_field(value, key));
    } else if (key == "rl_cap") {
      run.rl_cap = detail::parse_u64_field(value, key);
    } else if (key == "percentile") {
      run.percentile = detail::parse_double_field(value, key);
    } else if (key == "engine") {
      if (value == "geometric")
        run.engine = RlEngine::Geometric;
      else if (value == "subgroup")
        run.engine = RlEngine::Subgroup;
      else
        throw io_error(origin + ": engine must be 'geometric' or 'subgroup', got '" +
                       value + "'");
    }
  };

  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc = nlohmann::json::parse(text);
    for (const auto& [key, value] : doc.items()) {
      if (key == "methods" || key == "poolings") {
        std::string joined;
        for (const auto& item : value) {
          if (!joined.empty()) joined += ',';
          joined += item.get<std::string>();
        }
        apply(key, joined);
      } else if (key == "nk" || key == "rl_cap") {
        apply(key, std::to_string(value.get<std::uint64_t>()));
      } else if (key == "percentile") {
        apply(key, detail::format_g17(value.get<double>()));
      } else if (key == "engine") {
        apply(key, value.get<std::string>());
      }
    }
  } else {
    for (const auto& [key, value] : detail::parse_kv(text, origin).items)
      apply(key, value);
  }

  if (run.methods.empty()) throw io_error(origin + ": methods must be nonempty");
  if (run.poolings.empty()) throw io_error(origin + ": poolings must be nonempty");
  for (PoolingType p : run.poolings)
    if (p == PoolingType::D)
      throw io_error(origin + ": run-length studies cover pooling types A, B, C");
  if (run.n_k < 1) throw io_error(origin + ": nk must be >= 1");
  if (!(run.percentile >= 0.0 && run.percentile <= 100.0))
    throw io_error(origin + ": percentile must be in [0, 100]");
  return run;
}

// ---------------------------------------------------------------------------
// Report emission. JSON carries full precision; CSV mirrors the report
// tables with statistic-major rows.

inline nlohmann::json efficiency_cell_json(const EfficiencyCell& c) {
  return {{"variance", c.variance},
          {"bias", c.bias},
          {"mse", c.mse},
          {"re_percent", c.re_percent}};
}

inline std::string efficiency_report_json(const EfficiencyReport& r) {
  nlohmann::json doc;
  doc["sizes"] = r.sizes;
  doc["mu0"] = r.mu0;
  doc["sigma0"] = r.sigma0;
  doc["replications"] = r.replications;
  doc["master_seed"] = r.master_seed;
  doc["contaminated"] = r.contaminated;
  doc["baseline"] = {{"location_mse", r.baseline_location_mse},
                     {"scale_mse", r.baseline_scale_mse}};
  for (LocationKind k : kLocationKinds)
    for (PoolingType p : kReportPoolings)
      doc["location"][name(k)][name(p)] = efficiency_cell_json(r.cell(k, p));
  for (ScaleKind k : kScaleKinds)
    for (PoolingType p : kReportPoolings)
      doc["scale"][name(k)][name(p)] = efficiency_cell_json(r.cell(k, p));
  return doc.dump(2) + "\n";
}

inline std::string efficiency_report_csv(const EfficiencyReport& r) {
  std::string out = "statistic,pooling,mean,median,hl1,hl2,hl3,sd,mad,shamos\n";
  const char* stats[] = {"variance", "bias", "mse", "re_percent"};
  for (int si = 0; si < 4; ++si) {
    for (PoolingType p : kReportPoolings) {
      out += stats[si];
      out += ',';
      out += name(p);
      auto append = [&](const EfficiencyCell& c) {
        const double v = si == 0   ? c.variance
                         : si == 1 ? c.bias
                         : si == 2 ? c.mse
                                   : c.re_percent;
        out += ',';
        out += detail::format_g6(v);
      };
      for (LocationKind k : kLocationKinds) append(r.cell(k, p));
      for (ScaleKind k : kScaleKinds) append(r.cell(k, p));
      out += '\n';
    }
  }
  return out;
}

struct ArlCell {
  Method method = Method::I;
  PoolingType pooling = PoolingType::A;
  RunLengthSummary summary;
};

inline std::string arl_grid_json(const ArlRunConfig& config, std::span<const ArlCell> cells) {
  nlohmann::json doc;
  doc["sizes"] = config.scenario.sizes;
  doc["mu0"] = config.scenario.mu0;
  doc["sigma0"] = config.scenario.sigma0;
  doc["replications"] = config.scenario.replications;
  doc["master_seed"] = config.scenario.master_seed;
  doc["contaminated"] = config.scenario.contamination.has_value();
  doc["n_k"] = config.n_k;
  doc["rl_cap"] = config.rl_cap;
  doc["percentile"] = config.percentile;
  doc["engine"] = config.engine == RlEngine::Geometric ? "geometric" : "subgroup";
  doc["cells"] = nlohmann::json::array();
  for (const ArlCell& c : cells) {
    doc["cells"].push_back({{"method", name(c.method)},
                            {"pooling", name(c.pooling)},
                            {"arl", c.summary.arl},
                            {"sdrl", c.summary.sdrl},
                            {"prl", c.summary.prl},
                            {"skewness", c.summary.skewness},
                            {"censored_count", c.summary.censored_count}});
  }
  return doc.dump(2) + "\n";
}

inline std::string arl_grid_csv(const ArlRunConfig& config, std::span<const ArlCell> cells) {
  std::string out = "metric";
  for (const ArlCell& c : cells) {
    out += ',';
    out += name(c.method);
    out += '_';
    out += name(c.pooling);
  }
  out += '\n';
  const std::string prl_label = "prl" + detail::format_g6(config.percentile);
  const char* metrics[] = {"arl", "sdrl", nullptr, "skewness", "censored_count"};
  for (int mi = 0; mi < 5; ++mi) {
    out += metrics[mi] ? metrics[mi] : prl_label.c_str();
    for (const ArlCell& c : cells) {
      out += ',';
      switch (mi) {
        case 0: out += detail::format_g6(c.summary.arl); break;
        case 1: out += detail::format_g6(c.summary.sdrl); break;
        case 2: out += detail::format_g6(c.summary.prl); break;
        case 3: out += detail::format_g6(c.summary.skewness); break;
        default: out += std::to_string(c.summary.censored_count); break;
      }
    }
    out += '\n';
  }
  return out;
}

inline std::string limits_json(const PhaseIEstimate& est, const ControlLimits& l) {
  nlohmann::json doc;
  doc["method"] = name(est.method);
  doc["pooling"] = name(est.pooling);
  doc["m"] = est.m;
  doc["sizes"] = est.sizes;
  doc["factor_version"] = est.factor_version;
  doc["mu_hat"] = est.mu_hat;
  doc["sigma_hat"] = est.sigma_hat;
  doc["g"] = l.g;
  doc["n_k"] = l.n_k;
  doc["lcl"] = l.lcl;
  doc["cl"] = l.cl;
  doc["ucl"] = l.ucl;
  return doc.dump(2) + "\n";
}

inline std::string limits_csv(const PhaseIEstimate& est, const ControlLimits& l) {
  std::string out = "method,pooling,nk,g,lcl,cl,ucl,mu_hat,sigma_hat\n";
  out += name(est.method);
  out += ',';
  out += name(est.pooling);
  out += ',' + std::to_string(l.n_k);
  out += ',' + detail::format_g6(l.g);
  out += ',' + detail::format_g17(l.lcl);
  out += ',' + detail::format_g17(l.cl);
  out += ',' + detail::format_g17(l.ucl);
  out += ',' + detail::format_g17(est.mu_hat);
  out += ',' + detail::format_g17(est.sigma_hat);
  out += '\n';
  return out;
}

inline std::string sensitivity_csv(const SensitivityResult& r) {
  std::string out = "delta,method,lcl,cl,ucl\n";
  for (std::size_t mi = 0; mi < r.methods.size(); ++mi)
    for (std::size_t di = 0; di < r.deltas.size(); ++di) {
      const ControlLimits& l = r.limits[mi][di];
      out += detail::format_g6(r.deltas[di]);
      out += ',';
      out += name(r.methods[mi]);
      out += ',' + detail::format_g17(l.lcl);
      out += ',' + detail::format_g17(l.cl);
      out += ',' + detail::format_g17(l.ucl);
      out += '\n';
    }
  return out;
}

}  // namespace rspc
