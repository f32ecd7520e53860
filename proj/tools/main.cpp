// rspc: robust Xbar control charts from Phase-I subgroups of unequal sizes.
//
// Subcommands: factors, limits, simulate-re, simulate-arl, sensitivity.
// Exit codes: 0 success, 2 usage error, 3 data error, 4 missing factor entry.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rspc/charts.hpp"
#include "rspc/dataset.hpp"
#include "rspc/estimators.hpp"
#include "rspc/factors.hpp"
#include "rspc/report_io.hpp"
#include "rspc/simulation.hpp"
#include "rspc/svg.hpp"

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rspc::io_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

rspc::FactorTable load_factors_or_die(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SPC_FACTORS")) path = env;
  }
  if (path.empty())
    throw usage_error("no factor table: pass --factors PATH or set SPC_FACTORS");
  return rspc::load_table(path);
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    rspc::write_file_atomic(out_path, content);
}

// ---------------------------------------------------------------------------

struct FactorsArgs {
  std::string estimators = "mean,median,hl1,hl2,hl3,sd,mad,shamos";
  int n_min = 2;
  int n_max = 30;
  std::uint64_t reps = 1'000'000;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;
};

void run_factors(const FactorsArgs& args) {
  if (args.n_min < 2) throw usage_error("--n-min must be >= 2");
  if (args.n_max < args.n_min) throw usage_error("--n-max must be >= --n-min");
  if (args.reps < 10'000) throw usage_error("--reps must be >= 10000");

  std::vector<rspc::EstimatorId> ids;
  for (const std::string& item : rspc::detail::split_list(args.estimators)) {
    try {
      ids.push_back(rspc::parse_estimator(item));
    } catch (const rspc::invalid_input& e) {
      throw usage_error(e.what());
    }
  }

  std::cerr << "building factor table: n=" << args.n_min << ".." << args.n_max
            << ", replications=" << args.reps << ", seed=" << args.seed << "\n";
  const rspc::FactorTable table =
      rspc::build_table(ids, args.n_min, args.n_max, args.reps, args.seed, args.threads);
  rspc::save_table(table, args.out);
  for (const rspc::FactorEntry& e : table.sorted_entries())
    std::cout << name(e.estimator) << " n=" << e.n << " gamma=" << e.gamma
              << " var_std=" << e.var_std << " source="
              << (e.source == rspc::FactorSource::Analytic ? "analytic" : "monte_carlo")
              << "\n";
  std::cerr << "wrote " << table.size() << " entries to " << args.out << "\n";
}

// ---------------------------------------------------------------------------

struct LimitsArgs {
  std::string data;
  std::string method = "I";
  std::string pooling = "C";
  int n_k = 0;
  double g = 3.0;
  std::string factors;
  std::string format = "json";
  std::string out;
};

void run_limits(const LimitsArgs& args) {
  rspc::Method method;
  rspc::PoolingType pooling;
  try {
    method = rspc::parse_method(args.method);
    pooling = rspc::parse_pooling(args.pooling);
  } catch (const rspc::invalid_input& e) {
    throw usage_error(e.what());
  }
  if (args.n_k < 1) throw usage_error("--nk must be >= 1");
  if (!(args.g > 0)) throw usage_error("--g must be positive");
  if (args.format != "json" && args.format != "csv" && args.format != "svg")
    throw usage_error("--format must be json, csv, or svg");
  if (pooling == rspc::PoolingType::D && method == rspc::Method::III)
    throw usage_error("pooling D is not defined for the Shamos scale (Method III)");

  const auto data = rspc::load_dataset_csv(args.data);
  const rspc::FactorTable table = load_factors_or_die(args.factors);
  const rspc::PhaseIEstimate est = rspc::phase1_estimate(data, method, pooling, table);
  const rspc::ControlLimits limits = rspc::control_limits(est, args.n_k, args.g);

  if (args.format == "json") {
    emit(rspc::limits_json(est, limits), args.out);
  } else if (args.format == "csv") {
    emit(rspc::limits_csv(est, limits), args.out);
  } else {
    std::vector<double> means;
    means.reserve(data.size());
    for (const rspc::Subgroup& s : data) means.push_back(rspc::mean(s.values));
    emit(rspc::svg_xbar_chart(means, limits,
                              "Xbar chart (Method-" + std::string(name(method)) +
                                  ", pooling " + name(pooling) + ")"),
         args.out);
  }
}

// ---------------------------------------------------------------------------

struct SimArgs {
  std::string config;
  std::string out;
  std::string factors;
  unsigned threads = 0;
};

void run_simulate_re(const SimArgs& args) {
  const rspc::ScenarioConfig config =
      rspc::parse_scenario_config(read_text_file(args.config), args.config);
  const rspc::FactorTable table = load_factors_or_die(args.factors);
  std::cerr << "efficiency study: " << config.replications << " replications, seed "
            << config.master_seed << (config.contamination ? ", contaminated" : ", clean")
            << "\n";
  const rspc::EfficiencyReport report = rspc::efficiency_study(config, table, args.threads);
  rspc::write_file_atomic(args.out + ".json", rspc::efficiency_report_json(report));
  rspc::write_file_atomic(args.out + ".csv", rspc::efficiency_report_csv(report));
  std::cerr << "wrote " << args.out << ".json and " << args.out << ".csv\n";
}

void run_simulate_arl(const SimArgs& args) {
  const rspc::ArlRunConfig run =
      rspc::parse_arl_config(read_text_file(args.config), args.config);
  const rspc::FactorTable table = load_factors_or_die(args.factors);
  std::vector<rspc::ArlCell> cells;
  for (rspc::Method m : run.methods) {
    for (rspc::PoolingType p : run.poolings) {
      std::cerr << "run-length study: method " << name(m) << ", pooling " << name(p)
                << ", " << run.scenario.replications << " replications, seed "
                << run.scenario.master_seed << "\n";
      rspc::ArlCell cell;
      cell.method = m;
      cell.pooling = p;
      cell.summary = rspc::run_length_study(run.scenario, m, p, table, run.n_k, run.rl_cap,
                                            run.engine, run.percentile, args.threads);
      std::cerr << "  arl=" << cell.summary.arl << " sdrl=" << cell.summary.sdrl
                << " censored=" << cell.summary.censored_count << "\n";
      cells.push_back(cell);
    }
  }
  rspc::write_file_atomic(args.out + ".json", rspc::arl_grid_json(run, cells));
  rspc::write_file_atomic(args.out + ".csv", rspc::arl_grid_csv(run, cells));
  std::cerr << "wrote " << args.out << ".json and " << args.out << ".csv\n";
}

// ---------------------------------------------------------------------------

struct SensitivityArgs {
  std::string data;
  double delta_start = 0.0;
  double delta_stop = 0.0;
  double delta_step = 0.1;
  std::size_t sample = 1;
  std::size_t obs = 0;
  std::string mode = "append";
  std::string methods = "I,II,III";
  std::string pooling = "C";
  int n_k = 0;
  double g = 3.0;
  std::string factors;
  std::string out;
  std::string svg;
};

void run_sensitivity(const SensitivityArgs& args) {
  rspc::SweepSpec spec;
  spec.delta_start = args.delta_start;
  spec.delta_stop = args.delta_stop;
  spec.delta_step = args.delta_step;
  spec.sample_index = args.sample;
  spec.observation_index = args.obs;
  spec.n_k = args.n_k;
  spec.g = args.g;
  if (args.mode == "append")
    spec.mode = rspc::ContaminationMode::Append;
  else if (args.mode == "replace")
    spec.mode = rspc::ContaminationMode::Replace;
  else
    throw usage_error("--mode must be append or replace");
  spec.methods.clear();
  try {
    for (const std::string& item : rspc::detail::split_list(args.methods))
      spec.methods.push_back(rspc::parse_method(item));
    spec.pooling = rspc::parse_pooling(args.pooling);
  } catch (const rspc::invalid_input& e) {
    throw usage_error(e.what());
  }
  if (spec.n_k < 1) throw usage_error("--nk must be >= 1");
  if (spec.pooling == rspc::PoolingType::D)
    for (rspc::Method m : spec.methods)
      if (m == rspc::Method::III)
        throw usage_error("pooling D is not defined for the Shamos scale (Method III)");
  if (!(spec.delta_step > 0)) throw usage_error("--delta-step must be positive");
  if (spec.delta_start > spec.delta_stop)
    throw usage_error("--delta-start must be <= --delta-stop");

  const auto data = rspc::load_dataset_csv(args.data);
  const rspc::FactorTable table = load_factors_or_die(args.factors);
  const rspc::SensitivityResult result = rspc::sensitivity_sweep(data, spec, table);
  emit(rspc::sensitivity_csv(result), args.out);
  if (!args.svg.empty())
    rspc::write_file_atomic(args.svg,
                            rspc::svg_sensitivity(result, "Control limits vs contamination"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust Xbar control charts for subgroups of unequal sizes"};
  app.require_subcommand(1);

  FactorsArgs factors_args;
  CLI::App* factors = app.add_subcommand(
      "factors", "build and persist a table of estimator unbiasing factors and variances");
  factors->add_option("--estimators", factors_args.estimators,
                      "comma list: mean,median,hl1,hl2,hl3,sd,mad,shamos");
  factors->add_option("--n-min", factors_args.n_min, "smallest subgroup size (>= 2)");
  factors->add_option("--n-max", factors_args.n_max, "largest subgroup size");
  factors->add_option("--reps", factors_args.reps, "Monte-Carlo replications per size");
  factors->add_option("--seed", factors_args.seed, "master seed");
  factors->add_option("--out", factors_args.out, "output JSON path")->required();
  factors->add_option("--threads", factors_args.threads, "worker threads (0 = auto)");
  factors->callback([&] { run_factors(factors_args); });

  LimitsArgs limits_args;
  CLI::App* limits = app.add_subcommand(
      "limits", "estimate Phase-I parameters from a dataset and print control limits");
  limits->add_option("--data", limits_args.data, "dataset CSV (sample_id,value)")->required();
  limits->add_option("--method", limits_args.method,
                     "I (mean/sd), II (median/mad), III (hl/shamos)");
  limits->add_option("--pooling", limits_args.pooling, "A, B, C, or D");
  limits->add_option("--nk", limits_args.n_k, "Phase-II subgroup size")->required();
  limits->add_option("--g", limits_args.g, "limit multiplier (default 3)");
  limits->add_option("--factors", limits_args.factors,
                     "factor table JSON (default: SPC_FACTORS)");
  limits->add_option("--format", limits_args.format, "json, csv, or svg");
  limits->add_option("--out", limits_args.out, "write here instead of stdout");
  limits->callback([&] { run_limits(limits_args); });

  SimArgs re_args;
  CLI::App* sim_re = app.add_subcommand(
      "simulate-re", "relative-efficiency study of all estimator/pooling combinations");
  sim_re->add_option("--config", re_args.config, "scenario config (JSON or key=value)")
      ->required();
  sim_re->add_option("--out", re_args.out, "output stem; writes .json and .csv")->required();
  sim_re->add_option("--factors", re_args.factors, "factor table JSON (default: SPC_FACTORS)");
  sim_re->add_option("--threads", re_args.threads, "worker threads (0 = auto)");
  sim_re->callback([&] { run_simulate_re(re_args); });

  SimArgs arl_args;
  CLI::App* sim_arl =
      app.add_subcommand("simulate-arl", "run-length study over a method x pooling grid");
  sim_arl->add_option("--config", arl_args.config, "plan config (JSON or key=value)")
      ->required();
  sim_arl->add_option("--out", arl_args.out, "output stem; writes .json and .csv")
      ->required();
  sim_arl->add_option("--factors", arl_args.factors,
                      "factor table JSON (default: SPC_FACTORS)");
  sim_arl->add_option("--threads", arl_args.threads, "worker threads (0 = auto)");
  sim_arl->callback([&] { run_simulate_arl(arl_args); });

  SensitivityArgs sens_args;
  CLI::App* sens = app.add_subcommand(
      "sensitivity", "sweep one contaminated observation over a delta grid");
  sens->add_option("--data", sens_args.data, "dataset CSV (sample_id,value)")->required();
  sens->add_option("--delta-start", sens_args.delta_start, "grid start")->required();
  sens->add_option("--delta-stop", sens_args.delta_stop, "grid stop")->required();
  sens->add_option("--delta-step", sens_args.delta_step, "grid step (> 0)");
  sens->add_option("--sample", sens_args.sample, "1-based target subgroup (default 1)");
  sens->add_option("--obs", sens_args.obs,
                   "1-based observation for --mode replace (0 = last)");
  sens->add_option("--mode", sens_args.mode,
                   "append: delta becomes a new observation; replace: delta is added to "
                   "an existing one");
  sens->add_option("--methods", sens_args.methods, "comma list of I,II,III");
  sens->add_option("--pooling", sens_args.pooling, "A, B, C, or D");
  sens->add_option("--nk", sens_args.n_k, "Phase-II subgroup size")->required();
  sens->add_option("--g", sens_args.g, "limit multiplier (default 3)");
  sens->add_option("--factors", sens_args.factors,
                   "factor table JSON (default: SPC_FACTORS)");
  sens->add_option("--out", sens_args.out, "CSV output path (default stdout)");
  sens->add_option("--svg", sens_args.svg, "also render the limit curves as SVG");
  sens->callback([&] { run_sensitivity(sens_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const rspc::table_incomplete& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const rspc::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rspc::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
