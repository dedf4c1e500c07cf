#pragma once

#include <Eigen/Core>

#include "wiretap/channel.hpp"
#include "wiretap/power.hpp"

namespace wiretap {

/// Instantaneous secrecy rate in bits per channel use at power p >= 0:
/// max(0, log2(1 + p*g1) - log2(1 + p*g2)), evaluated with log1p for
/// stability at small arguments. Positive iff p > 0 and g1 > g2.
double instantaneous_rate(const ChannelState& state, double p);

struct SecrecyRateEstimate {
  double rate = 0.0;   // bits per channel use
  double error = 0.0;  // Monte Carlo standard error; 0 for exact sets
  SampleProvenance provenance = FiniteMassExact{};
};

/// Weighted average of per-state instantaneous rates under `policy`.
/// Monte Carlo sets report the standard error
/// sqrt(max(0, E[r^2] - E[r]^2) / (n - 1)); exact sets report 0.
SecrecyRateEstimate ergodic_rate(const SampleSet& samples, const PowerPolicy& policy);

struct SecrecyCapacityResult {
  SecrecyRateEstimate estimate;
  LambdaSolution lambda;
  bool no_secrecy = false;  // transmission set had zero mass; rate is 0
};

/// Ergodic secrecy capacity of the sample set under average power `budget`:
/// calibrates the optimal multiplier and evaluates the ergodic rate of the
/// resulting policy. A zero-mass transmission set is not an error here — it
/// yields rate 0 with the no_secrecy marker set.
SecrecyCapacityResult secrecy_capacity(const SampleSet& samples, double budget,
                                       double rtol = 1e-8);

struct BruteForceResult {
  double rate = 0.0;
  TabulatedPolicy policy;
  double spent = 0.0;  // achieved average power
};

/// Reference optimizer for desk-scale problems: maximizes the weighted
/// secrecy rate over per-state powers subject to E[P] <= budget, by grid
/// coordinate ascent refined in three stages (each x10 finer around the
/// incumbent). The move set includes pairwise budget transfers between
/// states — the edge directions of the constraint polytope — so the ascent
/// cannot stall on the budget face; with the concave objective this pins the
/// global optimum to grid resolution. Scope-guarded: more than 8 states
/// throws OracleScopeExceeded, grid < 100 throws std::invalid_argument.
BruteForceResult brute_force_allocate(const SampleSet& samples, double budget,
                                      int grid = 1000);

}  // namespace wiretap
