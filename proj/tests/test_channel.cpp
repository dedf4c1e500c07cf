#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/numeric.hpp"

using namespace wiretap;

namespace {

FiniteMass two_state_mass() {
  FiniteMass mass;
  mass.g1.resize(2);
  mass.g2.resize(2);
  mass.prob.resize(2);
  mass.g1 << 3.0, 1.0;
  mass.g2 << 1.0, 3.0;
  mass.prob << 0.5, 0.5;
  return mass;
}

// Kolmogorov-Smirnov distance against the Exp(1) CDF.
double ks_distance_exp1(Eigen::ArrayXd samples) {
  std::sort(samples.data(), samples.data() + samples.size());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double cdf = -std::expm1(-samples[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("channel state validation") {
  CHECK_NOTHROW(validate(ChannelState{0.0, 0.0}));
  CHECK_NOTHROW(validate(ChannelState{2.5, 0.1}));
  CHECK_THROWS_AS(validate(ChannelState{-1.0, 0.0}), InvalidState);
  CHECK_THROWS_AS(validate(ChannelState{1.0, -0.5}), InvalidState);
  CHECK_THROWS_AS(validate(ChannelState{std::nan(""), 0.0}), InvalidState);
  CHECK_THROWS_AS(validate(ChannelState{1.0, std::numeric_limits<double>::infinity()}),
                  InvalidState);
}

TEST_CASE("transmission set is strict") {
  CHECK(in_transmission_set(ChannelState{2.0, 1.0}));
  CHECK_FALSE(in_transmission_set(ChannelState{1.0, 1.0}));
  CHECK_FALSE(in_transmission_set(ChannelState{1.0, 2.0}));
  CHECK(in_transmission_set(ChannelState{1.0 + 1e-15, 1.0}));
}

TEST_CASE("finite-mass sets copy verbatim and are exact") {
  const FadingDistribution dist = two_state_mass();
  const SampleSet set = draw_sample_set(dist, 99, 7);  // n ignored for mass laws
  REQUIRE(set.size() == 2);
  CHECK(set.g1[0] == 3.0);
  CHECK(set.g2[1] == 3.0);
  CHECK(set.weights[0] == 0.5);
  CHECK(set.is_exact());
  CHECK(transmission_mass(set) == 0.5);
}

TEST_CASE("finite-mass validation rejects bad laws") {
  FiniteMass mass = two_state_mass();
  mass.prob << 0.5, 0.6;
  CHECK_THROWS_AS(draw_sample_set(FadingDistribution{mass}, 1, 0), InvalidDistribution);

  mass = two_state_mass();
  mass.prob << -0.1, 1.1;
  CHECK_THROWS_AS(draw_sample_set(FadingDistribution{mass}, 1, 0), InvalidDistribution);

  mass = two_state_mass();
  mass.g1[0] = -1.0;
  CHECK_THROWS_AS(draw_sample_set(FadingDistribution{mass}, 1, 0), InvalidState);

  mass = two_state_mass();
  mass.prob.resize(1);
  mass.prob << 1.0;
  CHECK_THROWS_AS(draw_sample_set(FadingDistribution{mass}, 1, 0), InvalidDistribution);

  CHECK_THROWS_AS(draw_sample_set(FadingDistribution{FiniteMass{}}, 1, 0),
                  InvalidDistribution);
}

TEST_CASE("rayleigh-unit draws are Exp(1) and weighted 1/n") {
  const Eigen::Index n = 100000;
  for (const std::uint64_t seed : {1ULL, 42ULL, 12345ULL}) {
    const SampleSet set = draw_sample_set(RayleighUnit{}, n, seed);
    REQUIRE(set.size() == n);
    CHECK(set.weights[0] == doctest::Approx(1.0 / n));
    CHECK_FALSE(set.is_exact());
    CHECK((set.g1 >= 0.0).all());
    CHECK((set.g2 >= 0.0).all());
    // KS(0.001) critical value at n=1e5 is ~0.0062; 0.01 leaves headroom.
    CHECK(ks_distance_exp1(set.g1) < 0.01);
    CHECK(ks_distance_exp1(set.g2) < 0.01);
    const auto* mc = std::get_if<MonteCarlo>(&set.provenance);
    REQUIRE(mc != nullptr);
    CHECK(mc->seed == seed);
    CHECK(mc->draws == n);
    CHECK(mc->rule == "rayleigh-unit");
  }
}

TEST_CASE("sampling is prefix-stable and seed-sensitive") {
  const SampleSet big = draw_sample_set(RayleighUnit{}, 1000, 99);
  const SampleSet small = draw_sample_set(RayleighUnit{}, 500, 99);
  for (Eigen::Index i = 0; i < 500; ++i) {
    CHECK(big.g1[i] == small.g1[i]);
    CHECK(big.g2[i] == small.g2[i]);
  }
  const SampleSet other = draw_sample_set(RayleighUnit{}, 500, 100);
  CHECK((small.g1 != other.g1).any());
}

TEST_CASE("monte-carlo draws need n >= 1") {
  CHECK_THROWS_AS(draw_sample_set(RayleighUnit{}, 0, 1), std::invalid_argument);
}

TEST_CASE("external samplers are validated and recorded") {
  ExternalSampler sampler;
  sampler.id = "toy";
  sampler.draw = [](std::uint64_t seed, Eigen::Index index) {
    return ChannelState{static_cast<double>(index + 1), uniform01_at(seed, index)};
  };
  const SampleSet set = draw_sample_set(FadingDistribution{sampler}, 4, 5);
  CHECK(set.g1[3] == 4.0);
  const auto* mc = std::get_if<MonteCarlo>(&set.provenance);
  REQUIRE(mc != nullptr);
  CHECK(mc->rule == "toy");

  ExternalSampler bad;
  bad.id = "bad";
  bad.draw = [](std::uint64_t, Eigen::Index) { return ChannelState{-1.0, 0.0}; };
  CHECK_THROWS_AS(draw_sample_set(FadingDistribution{bad}, 2, 5), InvalidState);

  ExternalSampler missing;
  missing.id = "no-draw";
  CHECK_THROWS_AS(draw_sample_set(FadingDistribution{missing}, 2, 5), InvalidDistribution);
}

TEST_CASE("pairwise summation is chunk-independent by construction") {
  Eigen::ArrayXd values(1001);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values[i] = std::sin(static_cast<double>(i)) * 1e-3;
  }
  const double total = pairwise_sum(values);
  CHECK(total == pairwise_sum(values));  // deterministic
  CHECK(total == doctest::Approx(values.sum()).epsilon(1e-12));
}

}  // TEST_SUITE
