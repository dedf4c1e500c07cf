#include "wiretap/power.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "wiretap/errors.hpp"
#include "wiretap/numeric.hpp"

namespace wiretap {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive_lambda(double lambda, const char* who) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(std::string(who) +
                                ": multiplier must be positive and finite");
  }
}

// Water-filling level for a single receiver. Shared verbatim between
// water_filling_power and the g2 == 0 branch of kkt_power so that the two
// agree bit-for-bit on eavesdropper-free states.
double wf_branch(double g1, double lambda) {
  const double t = lambda * std::numbers::ln2;
  if (!(t < g1)) return 0.0;
  return 1.0 / t - 1.0 / g1;
}

}  // namespace

double kkt_power(const ChannelState& state, double lambda) {
  require_positive_lambda(lambda, "kkt_power");
  validate(state);
  if (state.g2 == 0.0) return wf_branch(state.g1, lambda);

  const double t = lambda * std::numbers::ln2;
  if (!(state.g1 > state.g2) || !(t < state.g1 - state.g2)) return 0.0;

  // Positive root of P^2 + (a+b)P + (ab - (b-a)/t) = 0, algebraically
  // 1/2*sqrt((b-a)(4/t + b - a)) - (a+b)/2, but evaluated through the
  // product-of-roots form -2c/((a+b) + sqrt(D)) which avoids the
  // cancellation the textbook form suffers as g2 -> 0.
  const double a = 1.0 / state.g1;
  const double b = 1.0 / state.g2;
  const double c = a * b - (b - a) / t;
  const double discriminant = (b - a) * (b - a + 4.0 / t);
  double p = -2.0 * c / ((a + b) + std::sqrt(discriminant));

  if (p <= 0.0) {
    // Only round-off at the activation threshold lands here; the exact root
    // is positive whenever the threshold test passes.
    assert(p > -1e-12 * (1.0 + a + b));
    return 0.0;
  }
  assert(std::abs((state.g1 / (1.0 + p * state.g1) - state.g2 / (1.0 + p * state.g2)) /
                      std::numbers::ln2 -
                  lambda) <= 1e-9 * std::max(1.0, lambda));
  return p;
}

double water_filling_power(const ChannelState& state, double lambda) {
  require_positive_lambda(lambda, "water_filling_power");
  validate(state);
  return wf_branch(state.g1, lambda);
}

double policy_power(const PowerPolicy& policy, const ChannelState& state,
                    std::optional<Eigen::Index> index) {
  return std::visit(
      Overloaded{
          [&](const KktPolicy& p) { return kkt_power(state, p.lambda); },
          [&](const UniformPolicy& p) {
            if (!(p.level >= 0.0) || !std::isfinite(p.level)) {
              throw std::invalid_argument(
                  "policy_power: uniform level must be finite and nonnegative");
            }
            validate(state);
            return in_transmission_set(state) ? p.level : 0.0;
          },
          [&](const WaterFillingPolicy& p) { return water_filling_power(state, p.lambda); },
          [&](const TabulatedPolicy& p) {
            if (!index || *index < 0 || *index >= p.powers.size()) {
              throw std::invalid_argument(
                  "policy_power: tabulated policies need a valid sample index");
            }
            const double value = p.powers[*index];
            if (!(value >= 0.0) || !std::isfinite(value)) {
              throw std::invalid_argument("policy_power: tabulated power at index " +
                                          std::to_string(*index) +
                                          " is negative or non-finite");
            }
            return value;
          },
      },
      policy);
}

Eigen::ArrayXd policy_powers(const PowerPolicy& policy, const SampleSet& samples) {
  const Eigen::Index n = samples.size();
  Eigen::ArrayXd powers(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    powers[i] = policy_power(policy, samples.state(i), i);
  }
  return powers;
}

double average_power(const SampleSet& samples, const PowerPolicy& policy) {
  const Eigen::ArrayXd weighted = samples.weights * policy_powers(policy, samples);
  return pairwise_sum(weighted);
}

namespace {

// States that can receive power under a policy family, pre-filtered so the
// bisection's inner loop touches no dead states. Keeping the filter and
// summation order identical between solve_lambda and calibrate_water_filling
// makes the two solvers bit-identical on g2 == 0 sets.
struct ActiveStates {
  std::vector<double> g1;
  std::vector<double> g2;
  std::vector<double> w;
};

template <typename PowerFn>
double active_average(const ActiveStates& act, double lambda, PowerFn&& power_of) {
  const auto n = static_cast<Eigen::Index>(act.g1.size());
  Eigen::ArrayXd weighted(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    weighted[i] = act.w[k] * power_of(act.g1[k], act.g2[k], lambda);
  }
  return pairwise_sum(weighted);
}

// Bisection on the nonincreasing map lambda -> E[P]. lambda_hi must satisfy
// E[P](lambda_hi) == 0; the lower end is found by halving, then the bracket
// is narrowed until it is one representable step wide (or the evaluation
// budget runs out). Every E[P] evaluation counts as one iteration.
template <typename PowerFn>
LambdaSolution bisect_budget(const ActiveStates& act, double lambda_hi, double budget,
                             double rtol, int max_iterations, PowerFn&& power_of,
                             const char* who) {
  int evals = 0;
  auto avg = [&](double lambda) {
    ++evals;
    return active_average(act, lambda, power_of);
  };

  double hi = lambda_hi;
  double hi_avg = 0.0;
  double lo = 0.5 * lambda_hi;
  double lo_avg = avg(lo);
  while (lo_avg < budget) {
    hi = lo;
    hi_avg = lo_avg;
    lo *= 0.5;
    if (evals >= max_iterations || lo < std::numeric_limits<double>::min()) {
      throw ConvergenceFailure(std::string(who) + ": could not bracket budget " +
                               std::to_string(budget) + " within " +
                               std::to_string(max_iterations) + " evaluations");
    }
    lo_avg = avg(lo);
  }

  // Invariant: avg(lo) >= budget >= avg(hi).
  while (evals < max_iterations) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo) || !(mid < hi)) break;  // bracket exhausted
    const double mid_avg = avg(mid);
    if (mid_avg >= budget) {
      lo = mid;
      lo_avg = mid_avg;
    } else {
      hi = mid;
      hi_avg = mid_avg;
    }
  }

  LambdaSolution out;
  if (std::abs(lo_avg - budget) <= std::abs(hi_avg - budget)) {
    out.lambda = lo;
    out.achieved_avg_power = lo_avg;
  } else {
    out.lambda = hi;
    out.achieved_avg_power = hi_avg;
  }
  out.iterations = evals;
  out.residual = out.achieved_avg_power - budget;
  if (!(std::abs(out.residual) <= rtol * budget)) {
    throw ConvergenceFailure(std::string(who) + ": residual " +
                             std::to_string(out.residual) + " exceeds rtol*budget after " +
                             std::to_string(evals) + " evaluations");
  }
  return out;
}

void require_budget_args(double budget, double rtol, int max_iterations, const char* who) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument(std::string(who) + ": budget must be positive and finite");
  }
  if (!(rtol > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": rtol must be positive");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument(std::string(who) + ": max_iterations must be >= 1");
  }
}

}  // namespace

LambdaSolution solve_lambda(const SampleSet& samples, double budget, double rtol,
                            int max_iterations) {
  require_budget_args(budget, rtol, max_iterations, "solve_lambda");

  ActiveStates act;
  double lambda_hi = 0.0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const ChannelState state = samples.state(i);
    validate(state);
    if (!(samples.weights[i] > 0.0) || !in_transmission_set(state)) continue;
    act.g1.push_back(state.g1);
    act.g2.push_back(state.g2);
    act.w.push_back(samples.weights[i]);
    lambda_hi = std::max(lambda_hi, (state.g1 - state.g2) / std::numbers::ln2);
  }
  if (act.g1.empty()) {
    throw InfeasibleSecrecy(
        "solve_lambda: no positive-weight state lies in the transmission set");
  }

  return bisect_budget(
      act, lambda_hi, budget, rtol, max_iterations,
      [](double g1, double g2, double lambda) {
        return kkt_power(ChannelState{g1, g2}, lambda);
      },
      "solve_lambda");
}

UniformPolicy calibrate_uniform(const SampleSet& samples, double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("calibrate_uniform: budget must be positive and finite");
  }
  const double mass = transmission_mass(samples);
  if (!(mass > 0.0)) {
    throw InfeasibleSecrecy("calibrate_uniform: transmission set has zero mass");
  }
  return UniformPolicy{budget / mass};
}

LambdaSolution calibrate_water_filling(const SampleSet& samples, double budget, double rtol,
                                       int max_iterations) {
  require_budget_args(budget, rtol, max_iterations, "calibrate_water_filling");

  ActiveStates act;
  double lambda_hi = 0.0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const ChannelState state = samples.state(i);
    validate(state);
    if (!(samples.weights[i] > 0.0) || !(state.g1 > 0.0)) continue;
    act.g1.push_back(state.g1);
    act.g2.push_back(0.0);
    act.w.push_back(samples.weights[i]);
    lambda_hi = std::max(lambda_hi, (state.g1 - 0.0) / std::numbers::ln2);
  }
  if (act.g1.empty()) {
    throw InfeasibleSecrecy("calibrate_water_filling: every state has g1 == 0");
  }

  return bisect_budget(
      act, lambda_hi, budget, rtol, max_iterations,
      [](double g1, double, double lambda) { return wf_branch(g1, lambda); },
      "calibrate_water_filling");
}

}  // namespace wiretap
