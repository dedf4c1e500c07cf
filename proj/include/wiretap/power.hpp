#pragma once

#include <Eigen/Core>

#include <optional>
#include <variant>

#include "wiretap/channel.hpp"

namespace wiretap {

/// Closed-form secrecy-optimal power for one state at multiplier lambda > 0
/// (rates in bits, so the multiplier always appears as lambda*ln2):
///   - g2 == 0: water-filling, P = 1/(lambda*ln2) - 1/g1 when lambda*ln2 < g1,
///     else 0 (evaluated symbolically, no limits of the general branch);
///   - g2 > 0, g1 > g2, lambda*ln2 < g1 - g2: with a = 1/g1, b = 1/g2,
///     P = 1/2 * sqrt((b - a) * (4/(lambda*ln2) - a + b)) - (a + b)/2,
///     the positive root of the stationarity condition;
///   - otherwise 0 (transmitting cannot pay for its power).
/// Tiny negative round-off (within 1e-12 of zero) is clamped to 0.
double kkt_power(const ChannelState& state, double lambda);

/// Classical water-filling against the legitimate channel only:
/// P = max(0, 1/(lambda*ln2) - 1/g1). Shares its evaluation path with the
/// g2 == 0 branch of kkt_power, so the two agree bit-for-bit there.
double water_filling_power(const ChannelState& state, double lambda);

/// Secrecy-aware power policies. Uniform spreads a fixed level over the
/// transmission set and stays silent elsewhere; tabulated policies pin an
/// explicit power to each index of one particular sample set.
struct KktPolicy {
  double lambda = 0.0;
};
struct UniformPolicy {
  double level = 0.0;
};
struct WaterFillingPolicy {
  double lambda = 0.0;
};
struct TabulatedPolicy {
  Eigen::ArrayXd powers;
};

using PowerPolicy = std::variant<KktPolicy, UniformPolicy, WaterFillingPolicy, TabulatedPolicy>;

/// Power the policy assigns to `state`. Tabulated policies require the
/// state's index within their sample set; passing none (or an out-of-range
/// index, or a table holding a negative/non-finite entry) throws
/// std::invalid_argument.
double policy_power(const PowerPolicy& policy, const ChannelState& state,
                    std::optional<Eigen::Index> index = std::nullopt);

/// Per-state powers of `policy` over the whole sample set.
Eigen::ArrayXd policy_powers(const PowerPolicy& policy, const SampleSet& samples);

/// Weighted average power E[P] of the policy over the sample set
/// (pairwise-summed).
double average_power(const SampleSet& samples, const PowerPolicy& policy);

/// Result of calibrating a multiplier against a long-term power budget.
struct LambdaSolution {
  double lambda = 0.0;
  double achieved_avg_power = 0.0;
  int iterations = 0;
  double residual = 0.0;  // achieved_avg_power - budget
};

/// Finds lambda such that the average kkt_power over `samples` meets
/// `budget` (> 0). Bisection on the monotone map lambda -> E[P]: the upper
/// end starts at max over transmission-set states of (g1 - g2)/ln2 (average
/// power exactly 0 there) and the lower end is found by repeated halving.
/// The bracket is then narrowed until it is one representable step wide, so
/// the returned multiplier is as sharp as doubles allow; the success
/// contract is |residual| <= rtol * budget within max_iterations total
/// evaluations, else ConvergenceFailure. Throws InfeasibleSecrecy when no
/// positive-weight state lies in the transmission set. As budget grows the
/// solution lambda decays toward 0; the downward bracket extension handles
/// this without any special casing.
LambdaSolution solve_lambda(const SampleSet& samples, double budget,
                            double rtol = 1e-8, int max_iterations = 200);

/// Uniform level spending `budget` on average: level = budget / mass(A).
/// Throws InfeasibleSecrecy when the transmission set has zero mass.
UniformPolicy calibrate_uniform(const SampleSet& samples, double budget);

/// Water-filling multiplier spending `budget` on average over states with
/// g1 > 0 (same bisection machinery as solve_lambda). Throws
/// InfeasibleSecrecy when every state has g1 == 0.
LambdaSolution calibrate_water_filling(const SampleSet& samples, double budget,
                                       double rtol = 1e-8, int max_iterations = 200);

}  // namespace wiretap
