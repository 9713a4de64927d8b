// Command-line front end: generate, simulate, estimate, sweep, oracle.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "lrucluster/analytics.hpp"
#include "lrucluster/cache.hpp"
#include "lrucluster/experiment.hpp"
#include "lrucluster/oracle.hpp"
#include "lrucluster/trace_io.hpp"
#include "lrucluster/traffic.hpp"

using namespace lrucluster;

namespace {

const char* const kConfigKeys[] = {
    "gamma_list",     "capacity_list", "theta_list",     "replications", "sim_time",
    "sim_time_cap",   "sizing_threshold", "model",       "rho_alpha",    "rho_sigma",
    "rho_point",      "lifespan_alpha", "lifespan_sigma", "lifespan_point", "shape",
    "rel_tol",        "abs_tol",       "max_depth",      "tail_mass_cut", "threads",
    "with_exact"};

struct Common {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "flat key = value configuration file");
  cmd->add_option("--seed", common.seed, "base RNG seed");
  cmd->add_option("--out", common.out, "output path (default stdout)");
  for (const char* key : kConfigKeys) {
    cmd->add_option_function<std::string>(
        std::string("--") + key, [&common, key](const std::string& v) { common.overrides[key] = v; },
        "configuration key " + std::string(key));
  }
}

ExperimentConfig load_config(const Common& common) {
  ExperimentConfig config =
      common.config_path ? ExperimentConfig::from_file(*common.config_path) : ExperimentConfig{};
  for (const auto& [key, value] : common.overrides) config.set(key, value);
  if (common.seed) config.seed = *common.seed;
  if (common.out) config.output_path = *common.out;
  return config;
}

/// Output stream for `path`; "-" means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

double first_gamma(const ExperimentConfig& config) {
  if (config.gamma_list.empty()) throw ConfigError("gamma_list is empty");
  return config.gamma_list.front();
}

RequestTrace trace_from_config(const ExperimentConfig& config) {
  const double gamma = first_gamma(config);
  const double length = config.simulation_time_for(gamma);
  RequestTrace trace = generate_trace(gamma, config.model, TimeWindow{0.0, length}, config.seed);
  const auto& d = trace.diagnostics;
  std::fprintf(stderr,
               "trace: %zu requests, margin %.6g, documents sampled %llu, without requests %llu, "
               "outliving margin %llu\n",
               trace.events.size(), d.margin, static_cast<unsigned long long>(d.documents_sampled),
               static_cast<unsigned long long>(d.documents_without_requests),
               static_cast<unsigned long long>(d.documents_outliving_margin));
  return trace;
}

int run_generate(const Common& common) {
  const ExperimentConfig config = load_config(common);
  const RequestTrace trace = trace_from_config(config);
  Output out(config.output_path);
  write_trace_csv(trace, out.stream());
  return 0;
}

int run_simulate(const Common& common, const std::optional<std::string>& trace_path,
                 const std::string& policy, const std::vector<double>& ttl_list) {
  const ExperimentConfig config = load_config(common);
  const RequestTrace trace = trace_path ? read_trace_csv(*trace_path) : trace_from_config(config);
  std::vector<std::pair<std::size_t, SimStats>> rows;
  if (policy == "lru") {
    if (config.capacity_list.empty() && config.theta_list.empty()) {
      throw ConfigError("simulate: capacity_list or theta_list is required for lru");
    }
    const double gamma = trace_path ? trace.gamma : first_gamma(config);
    if (!config.theta_list.empty() && !(gamma > 0.0)) {
      throw ConfigError("simulate: theta_list needs gamma_list for an imported trace");
    }
    for (auto c : config.capacities_for(gamma)) rows.emplace_back(c, lru_process(trace, c));
  } else if (policy == "ttl") {
    if (ttl_list.empty()) throw ConfigError("simulate: --ttl is required for ttl");
    Output out(config.output_path);
    out.stream() << "eviction_time,total_requests,misses,hit_ratio\n";
    for (double t : ttl_list) {
      const SimStats s = ttl_process(trace, t);
      out.stream() << t << ',' << s.total_requests << ',' << s.misses << ',' << s.hit_ratio()
                   << '\n';
    }
    return 0;
  } else {
    throw ConfigError("simulate: policy must be lru or ttl");
  }
  Output out(config.output_path);
  write_stats_csv(rows, out.stream());
  return 0;
}

int run_estimate(const Common& common) {
  ExperimentConfig config = load_config(common);
  if (config.capacity_list.empty() && config.theta_list.empty()) {
    throw ConfigError("estimate: capacity_list or theta_list is required");
  }
  if (config.gamma_list.empty()) throw ConfigError("estimate: gamma_list is required");
  const MissModel model = MissModel::from_intensity(config.model, config.quadrature);
  std::vector<Estimate> rows;
  for (double gamma : config.gamma_list) {
    for (auto c : config.capacities_for(gamma)) {
      Estimate e = estimate(model, gamma, c, config.with_exact);
      if (e.clamped) {
        std::fprintf(stderr, "note: hit ratio clamped to [0, 1] at gamma %g, C %zu\n", gamma, c);
      }
      rows.push_back(e);
    }
  }
  Output out(config.output_path);
  write_estimate_csv(rows, out.stream());
  return 0;
}

int run_sweep_verb(const Common& common) {
  const ExperimentConfig config = load_config(common);
  const auto rows = run_sweep(config);
  Output out(config.output_path);
  write_sweep_csv(rows, out.stream());
  int failures = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failures;
      std::fprintf(stderr, "cell gamma %g, C %zu failed: %s\n", r.gamma, r.capacity,
                   r.error.c_str());
    }
    if (r.clamped) std::fprintf(stderr, "note: clamped hit ratio at gamma %g, C %zu\n", r.gamma, r.capacity);
  }
  return failures == 0 ? 0 : 1;
}

int run_oracle(const Common& common, const std::vector<double>& t_list, std::uint64_t samples,
               std::optional<std::size_t> exit_capacity, std::uint64_t exit_reps, bool randomize) {
  ExperimentConfig config = load_config(common);
  if (randomize) config.seed = (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
  std::ostringstream text;
  text << "seed " << config.seed << "\n";
  std::string csv = "check,estimate,std_error,n_samples,target,z_score\n";
  bool ok = true;
  for (double t : t_list) {
    const OracleReport r = mc_ttl_misses(config.model, t, samples, config.seed, config.quadrature);
    const std::string label = "ttl_misses t=" + std::to_string(t);
    print_report(text, label.c_str(), r);
    csv += label + ',' + std::to_string(r.estimate) + ',' + std::to_string(r.std_error) + ',' +
           std::to_string(r.n_samples) + ',' + std::to_string(r.target) + ',' +
           std::to_string(r.z_score) + '\n';
    ok = ok && std::abs(r.z_score) <= 4.0;
  }
  if (exit_capacity) {
    const double gamma = first_gamma(config);
    const ExitTimeReport r = mc_exit_time_law(gamma, config.model, *exit_capacity, 0.0, exit_reps,
                                              config.seed, config.quadrature);
    text << "exit_time C=" << *exit_capacity << " gamma=" << gamma << "  KS " << r.ks_statistic
         << "  p " << r.p_value << "  n " << r.n_samples << "  censored " << r.n_censored
         << (r.excessive_censoring ? "  EXCESSIVE CENSORING" : "") << "\n";
    ok = ok && r.p_value >= 0.01 && !r.excessive_censoring;
  }
  std::cout << text.str();
  if (common.out) {
    Output out(*common.out);
    out.stream() << csv;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LRU/TTL cache simulation and first-order hit-ratio analytics"};
  app.require_subcommand(1);

  Common common;
  auto* generate = app.add_subcommand("generate", "sample a request trace and write it as CSV");
  add_common(generate, common);

  auto* simulate = app.add_subcommand("simulate", "replay a trace through LRU or TTL caches");
  add_common(simulate, common);
  std::optional<std::string> trace_path;
  std::string policy = "lru";
  std::vector<double> ttl_list;
  simulate->add_option("--trace", trace_path, "trace CSV (generated from the config if absent)");
  simulate->add_option("--policy", policy, "lru or ttl")->check(CLI::IsMember({"lru", "ttl"}));
  simulate->add_option("--ttl", ttl_list, "eviction times for the ttl policy")->delimiter(',');

  auto* est = app.add_subcommand("estimate", "zero-order, first-order and exact hit ratios");
  add_common(est, common);

  auto* sweep = app.add_subcommand("sweep", "simulation against analytics over a grid");
  add_common(sweep, common);

  auto* oracle = app.add_subcommand("oracle", "Monte-Carlo validation of the analytics");
  add_common(oracle, common);
  std::vector<double> t_list{0.01, 0.1, 1.0};
  std::uint64_t samples = 100000;
  std::optional<std::size_t> exit_capacity;
  std::uint64_t exit_reps = 10000;
  bool randomize = false;
  oracle->add_option("--t", t_list, "TTL eviction times to check")->delimiter(',');
  oracle->add_option("--samples", samples, "documents per TTL check")->check(CLI::Range(1000ULL, ~0ULL));
  oracle->add_option("--exit_capacity", exit_capacity, "also test the exit-time law at this C");
  oracle->add_option("--exit_reps", exit_reps, "start points for the exit-time test");
  oracle->add_flag("--randomize", randomize, "draw a fresh seed instead of the configured one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return run_generate(common);
    if (*simulate) return run_simulate(common, trace_path, policy, ttl_list);
    if (*est) return run_estimate(common);
    if (*sweep) return run_sweep_verb(common);
    if (*oracle) return run_oracle(common, t_list, samples, exit_capacity, exit_reps, randomize);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
