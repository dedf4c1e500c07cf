#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

namespace wiretap {

/// One fading realization in normalized form: g1 is the legitimate receiver's
/// channel gain divided by its noise power, g2 the eavesdropper's. Secret
/// communication is possible in a state only when g1 > g2 strictly.
struct ChannelState {
  double g1 = 0.0;
  double g2 = 0.0;
};

/// Throws InvalidState unless both gains are finite and nonnegative.
void validate(const ChannelState& state);

/// True iff the state lies in the transmission set {g1 > g2} (strict).
inline bool in_transmission_set(const ChannelState& state) {
  return state.g1 > state.g2;
}

/// Finitely supported joint gain law: state i has gains (g1[i], g2[i]) and
/// probability prob[i]. Probabilities must be nonnegative and sum to one
/// within 1e-12.
struct FiniteMass {
  Eigen::ArrayXd g1;
  Eigen::ArrayXd g2;
  Eigen::ArrayXd prob;
};

/// Independent Rayleigh fading with unit channel variance and unit noise at
/// both receivers, so each normalized gain is Exp(1).
struct RayleighUnit {};

/// Escape hatch for gain laws the library does not model natively. `draw`
/// must be a pure function of (seed, index) so sampling stays deterministic
/// and prefix-stable; `id` names the sampler in provenance and metadata.
/// Samplers constructed from descriptor files carry the canonical descriptor
/// text so they can be re-serialized.
struct ExternalSampler {
  std::string id;
  std::function<ChannelState(std::uint64_t seed, Eigen::Index index)> draw;
  std::string descriptor;
};

using FadingDistribution = std::variant<FiniteMass, RayleighUnit, ExternalSampler>;

/// Throws InvalidDistribution if a FiniteMass member is empty, has negative
/// or non-finite entries, or probabilities that do not sum to one within
/// 1e-12. Other variants are structurally valid.
void validate(const FadingDistribution& dist);

struct FiniteMassExact {};

struct MonteCarlo {
  std::uint64_t seed = 0;
  Eigen::Index draws = 0;
  std::string rule;  // sampler id, e.g. "rayleigh-unit"
};

using SampleProvenance = std::variant<FiniteMassExact, MonteCarlo>;

/// A weighted set of channel states, the common currency of every estimator.
/// For finite-mass laws it is the law itself (weights = probabilities,
/// expectations exact); for sampled laws, weights are 1/n and expectations
/// are Monte Carlo estimates. Weights are nonnegative and sum to one.
struct SampleSet {
  Eigen::ArrayXd g1;
  Eigen::ArrayXd g2;
  Eigen::ArrayXd weights;
  SampleProvenance provenance = FiniteMassExact{};

  Eigen::Index size() const { return g1.size(); }
  ChannelState state(Eigen::Index i) const { return {g1[i], g2[i]}; }
  bool is_exact() const { return std::holds_alternative<FiniteMassExact>(provenance); }
};

/// Materializes a sample set from a distribution. Finite-mass laws are copied
/// verbatim (n is ignored); sampled laws draw n >= 1 states from the
/// counter-based stream for `seed`, giving each weight 1/n. Rayleigh gains
/// use g = -log1p(-u) per receiver, consuming two stream slots per state.
SampleSet draw_sample_set(const FadingDistribution& dist, Eigen::Index n,
                          std::uint64_t seed);

/// Probability mass the sample set assigns to the transmission set.
double transmission_mass(const SampleSet& samples);

}  // namespace wiretap
