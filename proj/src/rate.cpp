#include "wiretap/rate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/numeric.hpp"

namespace wiretap {

double instantaneous_rate(const ChannelState& state, double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("instantaneous_rate: power must be finite and nonnegative");
  }
  validate(state);
  const double rate =
      (std::log1p(p * state.g1) - std::log1p(p * state.g2)) / std::numbers::ln2;
  return rate > 0.0 ? rate : 0.0;
}

SecrecyRateEstimate ergodic_rate(const SampleSet& samples, const PowerPolicy& policy) {
  const Eigen::Index n = samples.size();
  if (n == 0) throw std::invalid_argument("ergodic_rate: empty sample set");

  Eigen::ArrayXd per_state(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    per_state[i] = instantaneous_rate(samples.state(i), policy_power(policy, samples.state(i), i));
  }

  SecrecyRateEstimate estimate;
  estimate.provenance = samples.provenance;
  estimate.rate = pairwise_sum(samples.weights * per_state);
  if (!samples.is_exact() && n > 1) {
    const double second_moment = pairwise_sum(samples.weights * per_state.square());
    const double variance = std::max(0.0, second_moment - estimate.rate * estimate.rate);
    estimate.error = std::sqrt(variance / static_cast<double>(n - 1));
  }
  return estimate;
}

SecrecyCapacityResult secrecy_capacity(const SampleSet& samples, double budget,
                                       double rtol) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("secrecy_capacity: budget must be positive and finite");
  }
  SecrecyCapacityResult result;
  if (!(transmission_mass(samples) > 0.0)) {
    // The eavesdropper is at least as strong in every reachable state:
    // capacity is 0 and there is no multiplier to report.
    result.no_secrecy = true;
    return result;
  }
  result.lambda = solve_lambda(samples, budget, rtol);
  result.estimate = ergodic_rate(samples, KktPolicy{result.lambda.lambda});
  return result;
}

namespace {

// Largest additional power state i may take without breaking the budget.
double headroom(const Eigen::ArrayXd& weights, double budget, double spent,
                Eigen::Index i) {
  return (budget - spent) / weights[i];
}

}  // namespace

BruteForceResult brute_force_allocate(const SampleSet& samples, double budget, int grid) {
  const Eigen::Index n = samples.size();
  if (n == 0) throw std::invalid_argument("brute_force_allocate: empty sample set");
  if (n > 8) {
    throw OracleScopeExceeded("brute_force_allocate: certified for at most 8 states, got " +
                              std::to_string(n));
  }
  if (grid < 100) throw std::invalid_argument("brute_force_allocate: grid must be >= 100");
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("brute_force_allocate: budget must be positive and finite");
  }

  const Eigen::ArrayXd& w = samples.weights;
  auto rate_at = [&](Eigen::Index i, double p) {
    return instantaneous_rate(samples.state(i), p);
  };

  Eigen::ArrayXd power = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd contribution = Eigen::ArrayXd::Zero(n);  // w[i] * rate_i(power[i])
  constexpr double kMinGain = 1e-15;

  // Three refinement stages; spans (per-state power windows and the transfer
  // window, in budget units) shrink x10 each stage around the incumbent.
  for (int stage = 0; stage < 3; ++stage) {
    const double shrink = std::pow(10.0, -stage);
    bool improved = true;
    for (int pass = 0; pass < 200 && improved; ++pass) {
      improved = false;
      double spent = pairwise_sum(w * power);

      // Single-coordinate line searches within the budget headroom.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!(w[i] > 0.0)) continue;
        const double span = shrink * budget / w[i];
        const double cap = power[i] + headroom(w, budget, spent, i);
        const double lo = std::max(0.0, power[i] - 0.5 * span);
        const double hi = std::min(cap, stage == 0 ? span : power[i] + 0.5 * span);
        if (!(hi > lo)) continue;
        const double base = rate_at(i, power[i]);
        double best_p = power[i];
        double best_gain = kMinGain;
        for (int k = 0; k <= grid; ++k) {
          const double p = lo + (hi - lo) * static_cast<double>(k) / grid;
          const double gain = w[i] * (rate_at(i, p) - base);
          if (gain > best_gain) {
            best_gain = gain;
            best_p = p;
          }
        }
        if (best_gain > kMinGain) {
          spent += w[i] * (best_p - power[i]);
          power[i] = best_p;
          contribution[i] = w[i] * rate_at(i, best_p);
          improved = true;
        }
      }

      // Pairwise budget transfers: move delta (budget units) from j to i.
      // These are the edge directions of {P >= 0, E[P] <= budget}, so the
      // ascent cannot stall on the budget face.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!(w[i] > 0.0)) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i || !(w[j] > 0.0) || !(power[j] > 0.0)) continue;
          const double window = std::min(w[j] * power[j], shrink * budget);
          if (!(window > 0.0)) continue;
          double best_delta = 0.0;
          double best_gain = kMinGain;
          for (int k = 1; k <= grid; ++k) {
            const double delta = window * static_cast<double>(k) / grid;
            const double pi = power[i] + delta / w[i];
            const double pj = power[j] - delta / w[j];
            if (pj < 0.0) break;
            const double gain = w[i] * rate_at(i, pi) + w[j] * rate_at(j, pj) -
                                contribution[i] - contribution[j];
            if (gain > best_gain) {
              best_gain = gain;
              best_delta = delta;
            }
          }
          if (best_gain > kMinGain) {
            power[i] += best_delta / w[i];
            power[j] = std::max(0.0, power[j] - best_delta / w[j]);
            contribution[i] = w[i] * rate_at(i, power[i]);
            contribution[j] = w[j] * rate_at(j, power[j]);
            improved = true;
          }
        }
      }
    }
  }

  BruteForceResult result;
  result.policy = TabulatedPolicy{power};
  result.rate = ergodic_rate(samples, result.policy).rate;
  result.spent = pairwise_sum(w * power);
  return result;
}

}  // namespace wiretap
