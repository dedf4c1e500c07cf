#include <cmath>
#include <random>

#include "doctest.h"
#include "wiretap/dmc.hpp"
#include "wiretap/errors.hpp"

using namespace wiretap;

namespace {

Eigen::MatrixXd bsc(double p) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0 - p, p, p, 1.0 - p;
  return m;
}

DmcWiretap make(const Eigen::MatrixXd& py, const Eigen::MatrixXd& pz) {
  DmcWiretap ch;
  ch.py_given_x = py;
  ch.pz_given_x = pz;
  return ch;
}

// Forward-degraded reference pair used throughout: a BSC(0.1) main channel
// whose eavesdropper sees a further BSC(0.2), i.e. BSC(0.26) overall.
DmcWiretap bsc_pair() { return make(bsc(0.1), bsc(0.26)); }

constexpr double kBscPairCapacity = 0.3577507789033367;  // h2(0.26) - h2(0.1)

Eigen::MatrixXd random_stochastic(std::mt19937_64& rng, Eigen::Index rows,
                                  Eigen::Index cols) {
  std::uniform_real_distribution<double> entry(0.05, 0.95);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = entry(rng);
      sum += m(r, c);
    }
    m.row(r) /= sum;
  }
  return m;
}

double secrecy_objective(const DmcWiretap& ch, const Eigen::VectorXd& px) {
  return mutual_information(px, ch.py_given_x) -
         mutual_information(px, ch.pz_given_x);
}

}  // namespace

TEST_SUITE("dmc") {

TEST_CASE("mutual information matches worked examples") {
  const Eigen::VectorXd uniform2 = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(mutual_information(uniform2, Eigen::MatrixXd::Identity(2, 2)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Eigen::MatrixXd flat(2, 2);
  flat << 0.5, 0.5, 0.5, 0.5;
  CHECK(mutual_information(uniform2, flat) == 0.0);

  // 1 - h2(0.1) for the uniform input on a BSC(0.1).
  CHECK(mutual_information(uniform2, bsc(0.1)) ==
        doctest::Approx(0.5310044064107188).epsilon(1e-12));

  // Deterministic but non-square: 3 inputs, 2 outputs.
  Eigen::MatrixXd det(3, 2);
  det << 1, 0, 0, 1, 1, 0;
  Eigen::VectorXd px(3);
  px << 0.25, 0.5, 0.25;
  CHECK(mutual_information(px, det) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mutual information rejects malformed inputs") {
  const Eigen::VectorXd uniform2 = Eigen::VectorXd::Constant(2, 0.5);
  CHECK_THROWS_AS(mutual_information(Eigen::VectorXd::Constant(3, 1.0 / 3),
                                     bsc(0.1)),
                  std::invalid_argument);
  Eigen::VectorXd negative(2);
  negative << 1.2, -0.2;
  CHECK_THROWS_AS(mutual_information(negative, bsc(0.1)), std::invalid_argument);
  Eigen::MatrixXd short_rows(2, 2);
  short_rows << 0.5, 0.4, 0.5, 0.5;
  CHECK_THROWS_AS(mutual_information(uniform2, short_rows), InvalidDistribution);
}

TEST_CASE("channel validation enforces stochastic rows and matching inputs") {
  CHECK_NOTHROW(validate(bsc_pair()));
  DmcWiretap bad = bsc_pair();
  bad.pz_given_x(0, 0) = 0.8;  // row sums to 0.9
  CHECK_THROWS_AS(validate(bad), InvalidDistribution);
  std::mt19937_64 rng(1);
  DmcWiretap mismatch = make(bsc(0.1), random_stochastic(rng, 3, 2));
  CHECK_THROWS_AS(validate(mismatch), InvalidDistribution);
}

TEST_CASE("degradedness check recovers the cascade witness") {
  const DegradednessWitness fwd =
      check_degraded(bsc_pair(), DegradedDirection::kForward);
  REQUIRE(fwd.feasible);
  CHECK(fwd.residual <= 1e-9);
  // BSC(0.1) is invertible, so the factor is unique: BSC(0.2).
  CHECK(fwd.witness(0, 0) == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(fwd.witness(1, 0) == doctest::Approx(0.2).epsilon(1e-6));

  const DegradednessWitness self =
      check_degraded(make(bsc(0.1), bsc(0.1)), DegradedDirection::kForward);
  REQUIRE(self.feasible);
  CHECK(self.witness.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-6));

  // Eavesdropper strictly better: forward factorization must fail.
  const DegradednessWitness none = check_degraded(
      make(bsc(0.4), Eigen::MatrixXd::Identity(2, 2)), DegradedDirection::kForward);
  CHECK_FALSE(none.feasible);
  CHECK(none.residual > 1e-3);

  // The BSC pair is not reverse-degraded (the inverse factor is signed).
  const DegradednessWitness rev =
      check_degraded(bsc_pair(), DegradedDirection::kReverse);
  CHECK_FALSE(rev.feasible);
}

TEST_CASE("degraded witnesses respect data processing") {
  std::mt19937_64 rng(61);
  const Eigen::MatrixXd w = random_stochastic(rng, 2, 3);
  const Eigen::MatrixXd q = random_stochastic(rng, 3, 2);
  const DmcWiretap ch = make(w, w * q);
  const DegradednessWitness fwd = check_degraded(ch, DegradedDirection::kForward);
  REQUIRE(fwd.feasible);
  // The eavesdropper's information never exceeds the legitimate receiver's;
  // 100x the feasibility tolerance absorbs the witness-residual amplification.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd px(2);
    px[0] = u(rng);
    px[1] = 1.0 - px[0];
    CHECK(mutual_information(px, ch.pz_given_x) <=
          mutual_information(px, ch.py_given_x) + 100.0 * 1e-9);
  }
}

TEST_CASE("degraded secrecy capacity matches the binary closed form") {
  const DegradedCapacity cap = dmc_secrecy_capacity_degraded(bsc_pair());
  CHECK(cap.capacity == doctest::Approx(kBscPairCapacity).epsilon(1e-7));
  REQUIRE(cap.input.pux.rows() == 1);
  CHECK(cap.input.pux(0, 0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(cap.input.pux(0, 1) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_NOTHROW(validate(cap.input));

  // Perfect main channel, useless eavesdropper channel: one full bit.
  Eigen::MatrixXd constant(2, 2);
  constant << 1.0, 0.0, 1.0, 0.0;
  const DegradedCapacity full =
      dmc_secrecy_capacity_degraded(make(Eigen::MatrixXd::Identity(2, 2), constant));
  CHECK(full.capacity == doctest::Approx(1.0).epsilon(1e-9));

  // Identical outputs leak everything: capacity zero.
  const DegradedCapacity zero =
      dmc_secrecy_capacity_degraded(make(bsc(0.2), bsc(0.2)));
  CHECK(zero.capacity <= 1e-9);

  CHECK_THROWS_AS(dmc_secrecy_capacity_degraded(make(bsc(0.26), bsc(0.1))),
                  PreconditionViolation);
}

TEST_CASE("degraded objective is concave along the binary simplex") {
  const DmcWiretap ch = bsc_pair();
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd a(2), b(2);
    a[0] = u(rng);
    a[1] = 1.0 - a[0];
    b[0] = u(rng);
    b[1] = 1.0 - b[0];
    const Eigen::VectorXd mid = 0.5 * (a + b);
    CHECK(secrecy_objective(ch, mid) + 1e-9 >=
          0.5 * (secrecy_objective(ch, a) + secrecy_objective(ch, b)));
  }
}

TEST_CASE("capacity is invariant under output and input relabeling") {
  const DegradedCapacity base = dmc_secrecy_capacity_degraded(bsc_pair());

  DmcWiretap y_swapped = bsc_pair();
  y_swapped.py_given_x.col(0).swap(y_swapped.py_given_x.col(1));
  const DegradedCapacity yperm = dmc_secrecy_capacity_degraded(y_swapped);
  CHECK(std::abs(yperm.capacity - base.capacity) <= 1e-12);

  DmcWiretap x_swapped = bsc_pair();
  x_swapped.py_given_x.row(0).swap(x_swapped.py_given_x.row(1));
  x_swapped.pz_given_x.row(0).swap(x_swapped.pz_given_x.row(1));
  const DegradedCapacity xperm = dmc_secrecy_capacity_degraded(x_swapped);
  CHECK(std::abs(xperm.capacity - base.capacity) <= 1e-12);
}

TEST_CASE("general scanner brackets the degraded value") {
  const GeneralCapacity scan = dmc_secrecy_capacity_general(bsc_pair(), 2, 32);
  CHECK(scan.lower_bound <= kBscPairCapacity + 1e-9);
  CHECK(scan.lower_bound >= kBscPairCapacity - 2.0 / 32.0);
  CHECK(scan.points_scanned > 0);
  CHECK_NOTHROW(validate(scan.input));
}

TEST_CASE("general scanner returns zero when nothing is hidden") {
  for (int u_card = 1; u_card <= 3; ++u_card) {
    const GeneralCapacity scan =
        dmc_secrecy_capacity_general(make(bsc(0.2), bsc(0.2)), u_card, 8);
    CHECK(scan.lower_bound <= 1e-12);
    CHECK(scan.lower_bound >= 0.0);
  }
  // Reverse-degraded: the eavesdropper is uniformly stronger.
  const GeneralCapacity rev = dmc_secrecy_capacity_general(
      make(bsc(0.4), Eigen::MatrixXd::Identity(2, 2)), 2, 16);
  CHECK(rev.lower_bound <= 1e-9);
}

TEST_CASE("general scanner enforces its scope") {
  std::mt19937_64 rng(71);
  const DmcWiretap wide =
      make(random_stochastic(rng, 4, 2), random_stochastic(rng, 4, 2));
  CHECK_THROWS_AS(dmc_secrecy_capacity_general(wide, 2, 8), OracleScopeExceeded);
  CHECK_THROWS_AS(dmc_secrecy_capacity_general(bsc_pair(), 5, 8),
                  OracleScopeExceeded);
  CHECK_THROWS_AS(dmc_secrecy_capacity_general(bsc_pair(), 2, 33),
                  OracleScopeExceeded);
  // Within the per-parameter caps but combinatorially explosive.
  const DmcWiretap ternary =
      make(random_stochastic(rng, 3, 3), random_stochastic(rng, 3, 3));
  CHECK_THROWS_AS(dmc_secrecy_capacity_general(ternary, 4, 32),
                  OracleScopeExceeded);
  CHECK_THROWS_AS(dmc_secrecy_capacity_general(bsc_pair(), 0, 8),
                  std::invalid_argument);
}

TEST_CASE("classification distinguishes the three regimes") {
  CHECK(classify_degradedness(bsc_pair()) == DegradedTag::kForward);
  CHECK(classify_degradedness(make(bsc(0.26), bsc(0.1))) == DegradedTag::kReverse);

  // Incomparable pair: a binary-input erasure-like main channel against a
  // BSC eavesdropper admits neither factorization.
  Eigen::MatrixXd erasure(2, 3);
  erasure << 0.7, 0.3, 0.0, 0.0, 0.3, 0.7;
  const DmcWiretap incomparable = make(erasure, bsc(0.1));
  CHECK(classify_degradedness(incomparable) == DegradedTag::kGeneral);
  CHECK_FALSE(check_degraded(incomparable, DegradedDirection::kForward).feasible);
  CHECK_FALSE(check_degraded(incomparable, DegradedDirection::kReverse).feasible);

  const GeneralCapacity lb = dmc_secrecy_capacity_general(incomparable, 2, 16);
  CHECK(lb.lower_bound >= 0.0);
  CHECK(lb.lower_bound <= 1.0);
}

TEST_CASE("parallel capacity adds per-subchannel values") {
  ParallelWiretap both;
  both.subchannels = {bsc_pair(), bsc_pair()};
  both.tags = {DegradedTag::kForward, DegradedTag::kForward};
  const double two = parallel_secrecy_capacity(both);
  CHECK(two == doctest::Approx(2.0 * kBscPairCapacity).epsilon(1e-6));

  ParallelWiretap singles;
  singles.subchannels = {bsc_pair()};
  singles.tags = {DegradedTag::kForward};
  const double one = parallel_secrecy_capacity(singles);
  CHECK(std::abs(two - 2.0 * one) <= 1e-12);

  ParallelWiretap mixed;
  mixed.subchannels = {bsc_pair(), make(bsc(0.26), bsc(0.1))};
  mixed.tags = {DegradedTag::kForward, DegradedTag::kReverse};
  CHECK(parallel_secrecy_capacity(mixed) ==
        doctest::Approx(kBscPairCapacity).epsilon(1e-6));

  ParallelWiretap leaky;
  leaky.subchannels = {make(bsc(0.2), bsc(0.2))};
  leaky.tags = {DegradedTag::kForward};
  CHECK(parallel_secrecy_capacity(leaky) <= 1e-9);
}

TEST_CASE("parallel capacity validates its inputs") {
  CHECK_THROWS_AS(parallel_secrecy_capacity(ParallelWiretap{}),
                  std::invalid_argument);
  ParallelWiretap mismatched;
  mismatched.subchannels = {bsc_pair()};
  CHECK_THROWS_AS(parallel_secrecy_capacity(mismatched), std::invalid_argument);
}

TEST_CASE("input distribution validation") {
  InputDistribution ok;
  ok.pux.resize(2, 2);
  ok.pux << 0.25, 0.25, 0.25, 0.25;
  CHECK_NOTHROW(validate(ok));
  CHECK(ok.pu()[0] == doctest::Approx(0.5));
  CHECK(ok.px()[1] == doctest::Approx(0.5));

  InputDistribution bad = ok;
  bad.pux(0, 0) = 0.5;  // sums to 1.25
  CHECK_THROWS_AS(validate(bad), InvalidDistribution);
  bad.pux(0, 0) = -0.25;
  CHECK_THROWS_AS(validate(bad), InvalidDistribution);
}

}  // TEST_SUITE
