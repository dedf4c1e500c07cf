#include "wiretap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wiretap/errors.hpp"
#include "wiretap/numeric.hpp"

namespace wiretap {

namespace {

const std::vector<std::string> kKnownPolicies = {"optimal", "uniform", "water-filling"};

std::vector<double> numbers_from(const std::string& path, const ConfigLine& line,
                                 int expected = -1) {
  std::istringstream in(line.value);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) {
    throw ParseError(path, line.number, "malformed number in `" + line.value + "`");
  }
  if (expected >= 0 && static_cast<int>(values.size()) != expected) {
    throw ParseError(path, line.number, "expected " + std::to_string(expected) +
                                            " values, got " + std::to_string(values.size()));
  }
  return values;
}

double single_number(const std::string& path, const ConfigLine& line) {
  return numbers_from(path, line, 1)[0];
}

GridSpec grid_from(const std::string& path, const ConfigLine& line) {
  const std::vector<double> v = numbers_from(path, line, 3);
  GridSpec grid;
  grid.min = v[0];
  grid.max = v[1];
  grid.steps = static_cast<int>(v[2]);
  if (static_cast<double>(grid.steps) != v[2]) {
    throw ParseError(path, line.number, "grid steps must be an integer");
  }
  return grid;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_grid(const GridSpec& grid, const char* name) {
  if (grid.steps < 1 || !(grid.min >= 0.0) || !(grid.max >= grid.min) ||
      (grid.steps > 1 && !(grid.max > grid.min))) {
    throw std::invalid_argument(std::string("experiment config: bad ") + name +
                                " (want min >= 0, max >= min, steps >= 1)");
  }
}

double grid_point(const GridSpec& grid, int i) {
  if (grid.steps == 1) return grid.min;
  return grid.min + (grid.max - grid.min) * static_cast<double>(i) / (grid.steps - 1);
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig config;
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<std::string> policies;
  bool policies_given = false;
  int policies_line = 0;

  for (const ConfigLine& line : read_config_lines(path)) {
    if (line.key == "distribution") {
      if (line.value == "rayleigh-unit") {
        config.distribution = RayleighUnit{};
      } else {
        std::filesystem::path descriptor(line.value);
        if (descriptor.is_relative()) descriptor = base / descriptor;
        config.distribution = parse_distribution(descriptor.string());
      }
      config.distribution_text = serialize_distribution(config.distribution);
    } else if (line.key == "snr_db") {
      config.snr_db = numbers_from(path, line);
    } else if (line.key == "policies") {
      policies_given = true;
      policies_line = line.number;
      std::istringstream in(line.value);
      std::string name;
      while (in >> name) policies.push_back(name);
    } else if (line.key == "samples") {
      config.mc_samples = static_cast<Eigen::Index>(single_number(path, line));
    } else if (line.key == "seed") {
      config.seed = static_cast<std::uint64_t>(single_number(path, line));
    } else if (line.key == "rtol") {
      config.rtol = single_number(path, line);
    } else if (line.key == "workers") {
      config.workers = static_cast<int>(single_number(path, line));
    } else if (line.key == "out") {
      config.out = line.value;
    } else if (line.key == "budget") {
      config.budget = single_number(path, line);
    } else if (line.key == "g1_grid") {
      config.g1_grid = grid_from(path, line);
    } else if (line.key == "g2_grid") {
      config.g2_grid = grid_from(path, line);
    } else {
      throw ParseError(path, line.number, "unknown key `" + line.key + "`");
    }
  }

  // An absent policies key means "all of them"; an explicitly empty one is a
  // mistake worth flagging. Either way normalize to canonical order with
  // duplicates dropped.
  if (!policies_given) {
    policies = kKnownPolicies;
  } else if (policies.empty()) {
    throw ParseError(path, policies_line, "policies needs at least one name");
  }
  for (const std::string& known : kKnownPolicies) {
    if (std::find(policies.begin(), policies.end(), known) != policies.end()) {
      config.policies.push_back(known);
    }
  }
  for (const std::string& name : policies) {
    if (std::find(kKnownPolicies.begin(), kKnownPolicies.end(), name) ==
        kKnownPolicies.end()) {
      throw ParseError(path, 0, "unknown policy `" + name + "`");
    }
  }
  return config;
}

void validate(const ExperimentConfig& config) {
  validate(config.distribution);
  for (const std::string& name : config.policies) {
    if (std::find(kKnownPolicies.begin(), kKnownPolicies.end(), name) ==
        kKnownPolicies.end()) {
      throw std::invalid_argument("experiment config: unknown policy `" + name + "`");
    }
  }
  for (std::size_t i = 1; i < config.snr_db.size(); ++i) {
    if (!(config.snr_db[i] > config.snr_db[i - 1])) {
      throw std::invalid_argument("experiment config: snr_db must be strictly increasing");
    }
  }
  if (!std::holds_alternative<FiniteMass>(config.distribution) && config.mc_samples < 1000) {
    throw std::invalid_argument(
        "experiment config: sampled distributions need samples >= 1000");
  }
  if (!(config.rtol > 0.0)) throw std::invalid_argument("experiment config: rtol must be > 0");
  if (config.workers < 1) throw std::invalid_argument("experiment config: workers must be >= 1");
  if (!(config.budget > 0.0) || !std::isfinite(config.budget)) {
    throw std::invalid_argument("experiment config: budget must be positive and finite");
  }
  check_grid(config.g1_grid, "g1_grid");
  check_grid(config.g2_grid, "g2_grid");
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  // Worker count and output path are execution details, not experiment
  // identity; everything else that shapes the numbers goes into the hash.
  std::string canon = "distribution:\n" + config.distribution_text;
  canon += "snr_db:";
  for (double v : config.snr_db) canon += " " + format_full(v);
  canon += "\npolicies:";
  for (const std::string& p : config.policies) canon += " " + p;
  canon += "\nsamples: " + std::to_string(config.mc_samples);
  canon += "\nseed: " + std::to_string(config.seed);
  canon += "\nrtol: " + format_full(config.rtol);
  canon += "\nbudget: " + format_full(config.budget);
  canon += "\ng1_grid: " + format_full(config.g1_grid.min) + " " +
           format_full(config.g1_grid.max) + " " + std::to_string(config.g1_grid.steps);
  canon += "\ng2_grid: " + format_full(config.g2_grid.min) + " " +
           format_full(config.g2_grid.max) + " " + std::to_string(config.g2_grid.steps);
  canon += "\n";
  return fnv1a64(canon);
}

namespace {

std::vector<CurveRow> sweep_point(const ExperimentConfig& config, std::size_t idx) {
  const double snr = config.snr_db[idx];
  const double budget = std::pow(10.0, snr / 10.0);
  // Per-point seed from the counter stream: decorrelates SNR points while
  // keeping every draw a pure function of (config seed, point index).
  const std::uint64_t point_seed = splitmix64_at(config.seed, idx);
  const SampleSet samples = draw_sample_set(config.distribution, config.mc_samples, point_seed);

  std::vector<CurveRow> rows;
  for (const std::string& policy : config.policies) {
    CurveRow row;
    row.snr_db = snr;
    row.policy = policy;
    if (policy == "optimal") {
      const SecrecyCapacityResult cap = secrecy_capacity(samples, budget, config.rtol);
      row.rate = cap.estimate.rate;
      row.error = cap.estimate.error;
      if (!cap.no_secrecy) {
        row.has_lambda = true;
        row.lambda = cap.lambda.lambda;
        row.avg_power_residual = cap.lambda.residual;
      }
    } else if (policy == "uniform") {
      try {
        const SecrecyRateEstimate est =
            ergodic_rate(samples, calibrate_uniform(samples, budget));
        row.rate = est.rate;
        row.error = est.error;
      } catch (const InfeasibleSecrecy&) {
        // No secrecy possible: report the rate-0 row, not an error.
      }
    } else {  // water-filling
      try {
        const LambdaSolution sol = calibrate_water_filling(samples, budget, config.rtol);
        const SecrecyRateEstimate est = ergodic_rate(samples, WaterFillingPolicy{sol.lambda});
        row.rate = est.rate;
        row.error = est.error;
        row.has_lambda = true;
        row.lambda = sol.lambda;
        row.avg_power_residual = sol.residual;
      } catch (const InfeasibleSecrecy&) {
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<CurveRow> run_capacity_sweep(const ExperimentConfig& config) {
  validate(config);
  if (config.snr_db.empty()) {
    throw std::invalid_argument("run_capacity_sweep: config needs snr_db points");
  }
  if (config.policies.empty()) {
    throw std::invalid_argument("run_capacity_sweep: config needs at least one policy");
  }

  const std::size_t points = config.snr_db.size();
  std::vector<std::vector<CurveRow>> slots(points);
  std::vector<std::exception_ptr> errors(points);

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(points)));
  if (workers == 1) {
    for (std::size_t idx = 0; idx < points; ++idx) {
      try {
        slots[idx] = sweep_point(config, idx);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> cursor{0};
    auto drain = [&]() {
      for (;;) {
        const std::size_t idx = cursor.fetch_add(1);
        if (idx >= points) return;
        try {
          slots[idx] = sweep_point(config, idx);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }

  // Deterministic error behavior: the lowest-index failure wins.
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  std::vector<CurveRow> rows;
  for (std::vector<CurveRow>& slot : slots) {
    rows.insert(rows.end(), slot.begin(), slot.end());
  }
  if (!config.out.empty()) {
    write_with_metadata(config.out, curve_csv(rows), config_hash(config), config.seed,
                        config.mc_samples);
  }
  return rows;
}

std::vector<SurfaceRow> run_allocation_surface(const ExperimentConfig& config) {
  validate(config);
  const SampleSet samples =
      draw_sample_set(config.distribution, config.mc_samples, config.seed);

  bool no_secrecy = !(transmission_mass(samples) > 0.0);
  double lambda = 0.0;
  if (!no_secrecy) lambda = solve_lambda(samples, config.budget, config.rtol).lambda;

  std::vector<SurfaceRow> rows;
  rows.reserve(static_cast<std::size_t>(config.g1_grid.steps) *
               static_cast<std::size_t>(config.g2_grid.steps));
  for (int i = 0; i < config.g1_grid.steps; ++i) {
    for (int j = 0; j < config.g2_grid.steps; ++j) {
      SurfaceRow row;
      row.g1 = grid_point(config.g1_grid, i);
      row.g2 = grid_point(config.g2_grid, j);
      row.power = no_secrecy ? 0.0 : kkt_power(ChannelState{row.g1, row.g2}, lambda);
      rows.push_back(row);
    }
  }
  if (!config.out.empty()) {
    write_with_metadata(config.out, surface_csv(rows), config_hash(config), config.seed,
                        config.mc_samples);
  }
  return rows;
}

AllocationReport run_allocation_table(const ExperimentConfig& config) {
  validate(config);
  const SampleSet samples =
      draw_sample_set(config.distribution, config.mc_samples, config.seed);

  AllocationReport report;
  report.no_secrecy = !(transmission_mass(samples) > 0.0);
  Eigen::ArrayXd powers = Eigen::ArrayXd::Zero(samples.size());
  if (!report.no_secrecy) {
    report.lambda = solve_lambda(samples, config.budget, config.rtol);
    const KktPolicy policy{report.lambda.lambda};
    report.rate = ergodic_rate(samples, policy);
    powers = policy_powers(policy, samples);
  }

  report.rows.reserve(static_cast<std::size_t>(samples.size()));
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    AllocationRow row;
    row.g1 = samples.g1[i];
    row.g2 = samples.g2[i];
    row.weight = samples.weights[i];
    row.power = powers[i];
    row.rate = instantaneous_rate(samples.state(i), powers[i]);
    report.rows.push_back(row);
  }
  if (!config.out.empty()) {
    write_with_metadata(config.out, allocation_csv(report.rows), config_hash(config),
                        config.seed, config.mc_samples);
  }
  return report;
}

DmcAnalysis run_dmc_analysis(const std::vector<DmcWiretap>& channels,
                             const DmcAnalysisOptions& options) {
  if (channels.empty()) throw std::invalid_argument("run_dmc_analysis: no channels");
  if (options.mode != "degraded" && options.mode != "general" && options.mode != "parallel") {
    throw std::invalid_argument("run_dmc_analysis: mode must be degraded|general|parallel");
  }

  const bool single = options.mode != "parallel";
  const std::size_t count = single ? 1 : channels.size();

  DmcAnalysis analysis;
  for (std::size_t i = 0; i < count; ++i) {
    const DmcWiretap& channel = channels[i];
    DmcSubreport sub;
    const DegradednessWitness forward =
        check_degraded(channel, DegradedDirection::kForward, options.tol);
    const DegradednessWitness reverse =
        check_degraded(channel, DegradedDirection::kReverse, options.tol);
    sub.forward_residual = forward.residual;
    sub.reverse_residual = reverse.residual;
    sub.tag = forward.feasible ? DegradedTag::kForward
              : reverse.feasible ? DegradedTag::kReverse
                                 : DegradedTag::kGeneral;

    if (options.mode == "degraded" || (options.mode == "parallel" && sub.tag == DegradedTag::kForward)) {
      // Throws PreconditionViolation in degraded mode when infeasible.
      const DegradedCapacity cap = dmc_secrecy_capacity_degraded(channel, options.tol);
      sub.value = cap.capacity;
      sub.input = cap.input;
    } else if (options.mode == "general" ||
               (options.mode == "parallel" && sub.tag == DegradedTag::kGeneral)) {
      const int u_card =
          options.u_card > 0 ? options.u_card : static_cast<int>(channel.input_size());
      const GeneralCapacity cap = dmc_secrecy_capacity_general(channel, u_card, options.grid);
      sub.value = cap.lower_bound;
      sub.input = cap.input;
      sub.is_lower_bound = true;
    }
    // Reverse-degraded subchannels in parallel mode contribute exactly 0.
    analysis.subreports.push_back(std::move(sub));
  }

  for (const DmcSubreport& sub : analysis.subreports) {
    analysis.total += sub.value;
    analysis.total_is_lower_bound = analysis.total_is_lower_bound || sub.is_lower_bound;
  }
  return analysis;
}

}  // namespace wiretap
