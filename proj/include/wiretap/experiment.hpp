#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/dmc.hpp"
#include "wiretap/io.hpp"
#include "wiretap/power.hpp"
#include "wiretap/rate.hpp"

namespace wiretap {

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int steps = 0;
};

/// A declarative experiment: a config file plus CLI overrides resolve into
/// one of these, and the hash of its defining fields (not of execution
/// details like worker count or output path) identifies the run.
struct ExperimentConfig {
  FadingDistribution distribution = RayleighUnit{};
  std::string distribution_text = "kind = rayleigh-unit\n";
  std::vector<double> snr_db;
  std::vector<std::string> policies;  // subset of optimal|uniform|water-filling
  Eigen::Index mc_samples = 100000;
  std::uint64_t seed = 0;
  double rtol = 1e-8;
  int workers = 1;
  std::string out;     // output path; empty writes CSV to stdout, no sidecar
  double budget = 1.0; // surface and allocation-table budget
  GridSpec g1_grid{0.0, 5.0, 51};
  GridSpec g2_grid{0.0, 5.0, 51};
};

/// Reads `key = value` lines ('#' comments). Keys: distribution (keyword
/// rayleigh-unit or a descriptor path resolved relative to the config file),
/// snr_db, policies, samples, seed, rtol, workers, out, budget, g1_grid,
/// g2_grid (min max steps). An absent policies key selects all three
/// policies. Unknown keys throw ParseError.
ExperimentConfig load_experiment_config(const std::string& path);

/// Structural checks shared by all runners: policies known and non-empty
/// where required, snr_db strictly increasing, samples >= 1000 for sampled
/// distributions, rtol > 0, workers >= 1, budget > 0, grids well-formed.
/// Throws std::invalid_argument.
void validate(const ExperimentConfig& config);

/// Hash of the experiment-defining fields (distribution content, snr grid,
/// policies, samples, seed, rtol, budget, gain grids). Worker count and
/// output path deliberately excluded.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Ergodic secrecy-rate curves versus SNR. Per SNR point: draws one shared
/// sample set (point seed derived from config seed via the counter stream),
/// maps SNR to the average-power budget P = 10^(snr/10), and evaluates every
/// requested policy on the same samples. Infeasible-secrecy points become
/// rate-0 rows rather than errors; convergence failures propagate. Points
/// are distributed over `workers` threads; row order and every byte of the
/// CSV are independent of the worker count. Writes CSV + sidecar when
/// config.out is set, and always returns the rows.
std::vector<CurveRow> run_capacity_sweep(const ExperimentConfig& config);

/// Optimal power allocation P(g1, g2) over the configured gain grids at the
/// configured budget: solves the multiplier once on the distribution's
/// sample set, then tabulates kkt_power on the grid. A zero-mass
/// transmission set yields the all-zero surface.
std::vector<SurfaceRow> run_allocation_surface(const ExperimentConfig& config);

struct AllocationReport {
  bool no_secrecy = false;
  LambdaSolution lambda;
  SecrecyRateEstimate rate;
  std::vector<AllocationRow> rows;
};

/// Solves the multiplier at the configured budget and tabulates the
/// per-state allocation of the drawn sample set.
AllocationReport run_allocation_table(const ExperimentConfig& config);

struct DmcAnalysisOptions {
  std::string mode = "parallel";  // degraded | general | parallel
  int u_card = 0;                 // 0: use the subchannel input size
  int grid = 16;
  double tol = 1e-9;
};

struct DmcSubreport {
  DegradedTag tag = DegradedTag::kGeneral;
  double forward_residual = 0.0;
  double reverse_residual = 0.0;
  double value = 0.0;          // capacity, lower bound, or exact 0 (reverse)
  bool is_lower_bound = false;
  InputDistribution input;     // empty pux for reverse-degraded entries
};

struct DmcAnalysis {
  std::vector<DmcSubreport> subreports;
  double total = 0.0;
  bool total_is_lower_bound = false;
};

/// Analyzes parsed wiretap channels. Mode "degraded" and "general" inspect
/// the first channel only (degraded throws PreconditionViolation when the
/// forward factorization is infeasible); "parallel" classifies every
/// subchannel and sums their contributions.
DmcAnalysis run_dmc_analysis(const std::vector<DmcWiretap>& channels,
                             const DmcAnalysisOptions& options);

}  // namespace wiretap
