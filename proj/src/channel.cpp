#include "wiretap/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/numeric.hpp"

namespace wiretap {

void validate(const ChannelState& state) {
  if (!std::isfinite(state.g1) || !std::isfinite(state.g2) || state.g1 < 0.0 ||
      state.g2 < 0.0) {
    throw InvalidState("channel state gains must be finite and nonnegative, got g1=" +
                       std::to_string(state.g1) + " g2=" + std::to_string(state.g2));
  }
}

namespace {

void validate_finite_mass(const FiniteMass& mass) {
  const Eigen::Index n = mass.g1.size();
  if (n == 0) throw InvalidDistribution("finite-mass law has no states");
  if (mass.g2.size() != n || mass.prob.size() != n) {
    throw InvalidDistribution("finite-mass arrays must share one length");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    validate(ChannelState{mass.g1[i], mass.g2[i]});
    if (!std::isfinite(mass.prob[i]) || mass.prob[i] < 0.0) {
      throw InvalidDistribution("finite-mass probability " + std::to_string(i) +
                                " is negative or non-finite");
    }
  }
  const double total = pairwise_sum(mass.prob);
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidDistribution("finite-mass probabilities sum to " + std::to_string(total) +
                              ", expected 1 within 1e-12");
  }
}

}  // namespace

void validate(const FadingDistribution& dist) {
  if (const auto* mass = std::get_if<FiniteMass>(&dist)) validate_finite_mass(*mass);
  if (const auto* external = std::get_if<ExternalSampler>(&dist)) {
    if (!external->draw) throw InvalidDistribution("external sampler has no draw function");
  }
}

SampleSet draw_sample_set(const FadingDistribution& dist, Eigen::Index n,
                          std::uint64_t seed) {
  validate(dist);
  if (const auto* mass = std::get_if<FiniteMass>(&dist)) {
    SampleSet set;
    set.g1 = mass->g1;
    set.g2 = mass->g2;
    set.weights = mass->prob;
    set.provenance = FiniteMassExact{};
    return set;
  }

  if (n < 1) throw std::invalid_argument("draw_sample_set: need n >= 1 draws");
  SampleSet set;
  set.g1.resize(n);
  set.g2.resize(n);
  set.weights = Eigen::ArrayXd::Constant(n, 1.0 / static_cast<double>(n));

  if (std::holds_alternative<RayleighUnit>(dist)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      // Exp(1) gains via inverse CDF; -log1p(-u) is exact for u near 0.
      const auto base = static_cast<std::uint64_t>(2 * i);
      set.g1[i] = -std::log1p(-uniform01_at(seed, base));
      set.g2[i] = -std::log1p(-uniform01_at(seed, base + 1));
    }
    set.provenance = MonteCarlo{seed, n, "rayleigh-unit"};
    return set;
  }

  const auto& external = std::get<ExternalSampler>(dist);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ChannelState state = external.draw(seed, i);
    validate(state);
    set.g1[i] = state.g1;
    set.g2[i] = state.g2;
  }
  set.provenance = MonteCarlo{seed, n, external.id};
  return set;
}

double transmission_mass(const SampleSet& samples) {
  const Eigen::ArrayXd masked = (samples.g1 > samples.g2).select(samples.weights, 0.0);
  return pairwise_sum(masked);
}

}  // namespace wiretap
