#include "lrucluster/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "lrucluster/oracle.hpp"
#include "lrucluster/traffic.hpp"

namespace lrucluster {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": not a non-negative integer: '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

ShapeFunction read_shape_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("shape: cannot open '" + path + "'");
  std::vector<double> nodes;
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '.')) continue;
    const auto parts = split_list(line);
    if (parts.size() != 2) throw ConfigError("shape: expected 'v,f' rows in '" + path + "'");
    nodes.push_back(parse_double("shape", parts[0]));
    values.push_back(parse_double("shape", parts[1]));
  }
  try {
    return ShapeFunction(std::move(nodes), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("shape: ") + e.what());
  }
}

MarkLaw make_law(const char* name, std::optional<double> point, double alpha, double sigma) {
  try {
    if (point) return MarkLaw::point(*point);
    return MarkLaw::lomax(alpha, sigma);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  }
}

/// Runs tasks 0..n-1 on `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

CanonicalIntensity default_box_model() {
  return CanonicalIntensity::box(MarkLaw::lomax(1.9, 22.5), MarkLaw::lomax(1.7, 0.07));
}

ShapeFunction exponential_shape(std::size_t n_nodes) {
  return ShapeFunction::tabulate([](double v) { return std::exp(-v); }, -std::log(1e-7), n_nodes);
}

// ------------------------------------------------------------------ config

void ExperimentConfig::rebuild_model() {
  const MarkLaw rho = make_law("rho", rho_point_, rho_alpha_, rho_sigma_);
  const MarkLaw life = make_law("lifespan", lifespan_point_, lifespan_alpha_, lifespan_sigma_);
  if (kind_ == "box") {
    model = CanonicalIntensity::box(rho, life);
  } else {
    model = CanonicalIntensity::scale_family(
        rho, life, shape_ == "exponential" ? exponential_shape() : read_shape_file(shape_));
  }
}

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "gamma_list") {
    gamma_list.clear();
    for (const auto& item : split_list(value)) gamma_list.push_back(parse_double(key, item));
  } else if (key == "capacity_list") {
    capacity_list.clear();
    for (const auto& item : split_list(value)) {
      if (const auto dots = item.find(".."); dots != std::string::npos) {
        const auto lo = parse_unsigned(key, trim(item.substr(0, dots)));
        const auto hi = parse_unsigned(key, trim(item.substr(dots + 2)));
        if (lo > hi) throw ConfigError(key + ": empty range '" + item + "'");
        for (auto c = lo; c <= hi; ++c) capacity_list.push_back(c);
      } else {
        capacity_list.push_back(parse_unsigned(key, item));
      }
    }
  } else if (key == "theta_list") {
    theta_list.clear();
    for (const auto& item : split_list(value)) theta_list.push_back(parse_double(key, item));
  } else if (key == "replications") {
    replications = parse_unsigned(key, value);
  } else if (key == "seed") {
    seed = parse_unsigned(key, value);
  } else if (key == "sim_time") {
    if (value == "auto") {
      sim_time.reset();
    } else {
      sim_time = parse_double(key, value);
    }
  } else if (key == "sim_time_cap") {
    sim_time_cap = parse_double(key, value);
  } else if (key == "sizing_threshold") {
    sizing_threshold = parse_double(key, value);
  } else if (key == "model") {
    if (value != "box" && value != "scale_family") {
      throw ConfigError("model: expected box or scale_family, got '" + value + "'");
    }
    kind_ = value;
    rebuild_model();
  } else if (key == "rho_alpha" || key == "rho_sigma" || key == "lifespan_alpha" ||
             key == "lifespan_sigma") {
    const double v = parse_double(key, value);
    (key == "rho_alpha"        ? rho_alpha_
     : key == "rho_sigma"      ? rho_sigma_
     : key == "lifespan_alpha" ? lifespan_alpha_
                               : lifespan_sigma_) = v;
    (key.starts_with("rho") ? rho_point_ : lifespan_point_).reset();
    rebuild_model();
  } else if (key == "rho_point") {
    rho_point_ = parse_double(key, value);
    rebuild_model();
  } else if (key == "lifespan_point") {
    lifespan_point_ = parse_double(key, value);
    rebuild_model();
  } else if (key == "shape") {
    shape_ = value;
    rebuild_model();
  } else if (key == "rel_tol") {
    quadrature.rel_tol = parse_double(key, value);
  } else if (key == "abs_tol") {
    quadrature.abs_tol = parse_double(key, value);
  } else if (key == "max_depth") {
    quadrature.max_depth = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "tail_mass_cut") {
    quadrature.tail_mass_cut = parse_double(key, value);
  } else if (key == "output_path") {
    output_path = value;
  } else if (key == "threads") {
    threads = static_cast<unsigned>(parse_unsigned(key, value));
  } else if (key == "with_exact") {
    with_exact = parse_bool(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    config.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

void ExperimentConfig::validate() const {
  if (gamma_list.empty()) throw ConfigError("gamma_list is empty");
  for (double g : gamma_list) {
    if (!(g > 0.0)) throw ConfigError("gamma_list entries must be positive");
  }
  if (capacity_list.empty() == theta_list.empty()) {
    throw ConfigError("exactly one of capacity_list and theta_list must be given");
  }
  for (auto c : capacity_list) {
    if (c == 0) throw ConfigError("capacity_list entries must be >= 1");
  }
  for (double th : theta_list) {
    if (!(th > 0.0)) throw ConfigError("theta_list entries must be positive");
  }
  if (replications == 0) throw ConfigError("replications must be >= 1");
  if (sim_time && !(*sim_time > 0.0)) throw ConfigError("sim_time must be positive");
  if (!(sim_time_cap > 0.0)) throw ConfigError("sim_time_cap must be positive");
  if (!(sizing_threshold > 0.0)) throw ConfigError("sizing_threshold must be positive");
  try {
    quadrature.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> ExperimentConfig::capacities_for(double gamma) const {
  std::vector<std::size_t> out = capacity_list;
  for (double th : theta_list) {
    const auto c = static_cast<std::size_t>(std::llround(gamma * th));
    if (c == 0) throw ConfigError("theta " + format_double(th) + " gives capacity 0 at gamma " +
                                  format_double(gamma));
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ExperimentConfig::simulation_time_for(double gamma) const {
  if (sim_time) return *sim_time;
  return std::min(size_simulation_time(model, gamma, sizing_threshold, quadrature).value,
                  sim_time_cap);
}

// ------------------------------------------------------------------ sizing

double stable_law_constant(const LomaxParams& lifespan) {
  const double a = lifespan.alpha();
  if (!(a > 1.0 && a < 2.0)) {
    throw std::invalid_argument("stable_law_constant needs a tail index in (1, 2)");
  }
  const double base = std::tgamma(2.0 - a) * std::abs(std::cos(std::numbers::pi * a / 2.0)) /
                      (a - 1.0);
  return lifespan.sigma() * std::pow(base, 1.0 / a);
}

SimTimeSizing size_simulation_time(const CanonicalIntensity& model, double gamma,
                                   double threshold, const QuadratureConfig& q) {
  if (model.kind != IntensityKind::Box) {
    throw std::invalid_argument("simulation-time sizing needs a Box model");
  }
  const LomaxParams* life = model.lifespan_law.as_lomax();
  if (life == nullptr) throw std::invalid_argument("simulation-time sizing needs a Lomax lifespan");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  const double a = life->alpha();
  const double k = stable_law_constant(*life);
  const double mu0 = single_miss_floor(BoxModelSpec{model.rho_law, model.lifespan_law}, q).value;
  const double n_needed = std::pow(k / threshold, a / (a - 1.0));
  SimTimeSizing out;
  out.stable_term = n_needed / (gamma * mu0);
  out.coverage_term = 10.0 * life->upper_quantile(q.tail_mass_cut);
  out.value = std::max(out.stable_term, out.coverage_term);
  return out;
}

// ------------------------------------------------------------------- sweep

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  const MissModel analytic = MissModel::from_intensity(config.model, config.quadrature);

  struct GammaPlan {
    double gamma;
    std::vector<std::size_t> capacities;
    double sim_time;
    std::size_t first_row;
  };
  std::vector<GammaPlan> plans;
  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < config.gamma_list.size(); ++g) {
    GammaPlan plan{config.gamma_list[g], config.capacities_for(config.gamma_list[g]), 0.0,
                   rows.size()};
    std::string sizing_error;
    try {
      plan.sim_time = config.simulation_time_for(plan.gamma);
    } catch (const std::exception& e) {
      sizing_error = e.what();
    }
    for (auto c : plan.capacities) {
      SweepRow row;
      row.gamma = plan.gamma;
      row.capacity = c;
      row.theta = static_cast<double>(c) / plan.gamma;
      row.n_reps = config.replications;
      row.sim_time = plan.sim_time;
      row.error = sizing_error;
      rows.push_back(row);
    }
    plans.push_back(std::move(plan));
  }

  // hits[row][rep]
  std::vector<std::vector<double>> hits(rows.size(),
                                        std::vector<double>(config.replications, std::nan("")));
  std::mutex error_mutex;
  struct Task {
    std::size_t plan;
    std::size_t rep;
  };
  std::vector<Task> sim_tasks;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    if (!rows[plans[p].first_row].error.empty()) continue;
    for (std::size_t r = 0; r < config.replications; ++r) sim_tasks.push_back({p, r});
  }

  auto simulate = [&](std::size_t i) {
    const auto [p, r] = sim_tasks[i];
    const GammaPlan& plan = plans[p];
    try {
      const std::uint64_t seed = derive_seed(derive_seed(config.seed, p), r);
      const RequestTrace trace =
          generate_trace(plan.gamma, config.model, TimeWindow{0.0, plan.sim_time}, seed);
      const LruMissCurve curve = lru_miss_curve(trace, plan.capacities.back());
      for (std::size_t k = 0; k < plan.capacities.size(); ++k) {
        hits[plan.first_row + k][r] = curve.hit_ratio(plan.capacities[k]);
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(error_mutex);
      for (std::size_t k = 0; k < plan.capacities.size(); ++k) {
        rows[plan.first_row + k].error = std::string("simulation: ") + e.what();
      }
    }
  };
  auto evaluate = [&](std::size_t i) {
    SweepRow& row = rows[i];
    try {
      const Estimate est = estimate(analytic, row.gamma, row.capacity, config.with_exact);
      row.zero_hit = est.zero_order_hit;
      row.first_hit = est.first_order_hit;
      row.exact_hit = est.exact_hit;
      row.char_time = est.char_time;
      row.e_term = est.e_term;
      row.clamped = est.clamped;
    } catch (const std::exception& e) {
      std::lock_guard lock(error_mutex);
      row.zero_hit = row.first_hit = row.char_time = row.e_term = std::nan("");
      if (row.error.empty()) row.error = std::string("analytics: ") + e.what();
    }
  };

  const std::size_t n_sim = sim_tasks.size();
  parallel_for(n_sim + rows.size(), config.threads, [&](std::size_t i) {
    if (i < n_sim) {
      simulate(i);
    } else {
      evaluate(i - n_sim);
    }
  });

  for (std::size_t i = 0; i < rows.size(); ++i) {
    RunningStats stats;
    for (double h : hits[i]) {
      if (!std::isnan(h)) stats.push(h);
    }
    rows[i].emp_hit = stats.count() ? stats.mean() : std::nan("");
    rows[i].emp_stderr = stats.count() ? stats.std_error() : std::nan("");
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.gamma != b.gamma ? a.gamma < b.gamma : a.capacity < b.capacity;
  });
  return rows;
}

// --------------------------------------------------------------------- CSV

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "gamma,C,theta,emp_hit,emp_stderr,zero_hit,first_hit,exact_hit,char_time,e_term,n_reps,"
         "sim_time\n";
  for (const auto& r : rows) {
    out << format_double(r.gamma) << ',' << r.capacity << ',' << format_double(r.theta) << ','
        << format_double(r.emp_hit) << ',' << format_double(r.emp_stderr) << ','
        << format_double(r.zero_hit) << ',' << format_double(r.first_hit) << ','
        << (r.exact_hit ? format_double(*r.exact_hit) : "") << ',' << format_double(r.char_time)
        << ',' << format_double(r.e_term) << ',' << r.n_reps << ',' << format_double(r.sim_time)
        << '\n';
  }
}

void write_estimate_csv(const std::vector<Estimate>& rows, std::ostream& out) {
  out << "gamma,C,theta,char_time,m_char,e_term,zero_order_hit,first_order_hit,exact_hit\n";
  for (const auto& r : rows) {
    out << format_double(r.gamma) << ',' << r.capacity << ',' << format_double(r.theta) << ','
        << format_double(r.char_time) << ',' << format_double(r.m_at_char) << ','
        << format_double(r.e_term) << ',' << format_double(r.zero_order_hit) << ','
        << format_double(r.first_order_hit) << ','
        << (r.exact_hit ? format_double(*r.exact_hit) : "") << '\n';
  }
}

void write_stats_csv(const std::vector<std::pair<std::size_t, SimStats>>& rows,
                     std::ostream& out) {
  out << "capacity,total_requests,misses,hit_ratio\n";
  for (const auto& [capacity, stats] : rows) {
    out << capacity << ',' << stats.total_requests << ',' << stats.misses << ','
        << format_double(stats.hit_ratio()) << '\n';
  }
}

}  // namespace lrucluster
