#pragma once

#include <Eigen/Core>

#include <vector>

#include "wiretap/channel.hpp"

namespace wiretap {

/// Discrete memoryless wiretap channel: row-stochastic transition matrices
/// from the common input X to the legitimate output Y and the eavesdropper
/// output Z. Rows must sum to one within 1e-12.
struct DmcWiretap {
  Eigen::MatrixXd py_given_x;  // |X| x |Y|
  Eigen::MatrixXd pz_given_x;  // |X| x |Z|

  Eigen::Index input_size() const { return py_given_x.rows(); }
};

/// Throws InvalidDistribution on shape mismatch, entries outside [0, 1], or
/// rows not summing to one within 1e-12.
void validate(const DmcWiretap& channel);

/// Mutual information I(X;Y) in bits for input law px and a row-stochastic
/// channel matrix, with the 0*log 0 := 0 convention.
double mutual_information(const Eigen::VectorXd& px, const Eigen::MatrixXd& channel);

enum class DegradedDirection {
  kForward,  // is Z a stochastic degradation of Y? (X -> Y -> Z)
  kReverse,  // is Y a stochastic degradation of Z? (X -> Z -> Y)
};

/// Outcome of testing whether one output is a stochastic degradation of the
/// other: feasible means a row-stochastic Q was found with
/// ||AQ - B||_inf <= tol, and `witness` holds the best Q either way.
struct DegradednessWitness {
  bool feasible = false;
  Eigen::MatrixXd witness;
  double residual = 0.0;
  int iterations = 0;
};

/// Least-squares feasibility test for the degradation factorization, solved
/// by projected gradient descent with the fixed step 1/L (L the curvature of
/// the quadratic) and row-wise simplex projection, up to 1e4 iterations.
DegradednessWitness check_degraded(const DmcWiretap& channel, DegradedDirection direction,
                                   double tol = 1e-9);

/// Input distribution over an auxiliary U and the channel input X, stored as
/// the joint p(u, x) = p(u) * p(x|u). Degraded-channel optima need no
/// auxiliary and use a single row.
struct InputDistribution {
  Eigen::MatrixXd pux;  // |U| x |X|, entries sum to one

  Eigen::VectorXd pu() const { return pux.rowwise().sum(); }
  Eigen::VectorXd px() const { return pux.colwise().sum().transpose(); }
};

/// Throws InvalidDistribution unless the joint entries are nonnegative and
/// sum to one within 1e-12.
void validate(const InputDistribution& input);

struct DegradedCapacity {
  double capacity = 0.0;  // bits per channel use
  InputDistribution input;
  int iterations = 0;
};

/// Secrecy capacity of a forward-degraded channel:
/// max_px I(X;Y) - I(X;Z), concave in px for degraded pairs. Projected
/// gradient ascent with backtracking plus a gradient-only spectral polish,
/// targeting a linear-maximization (Frank-Wolfe) gap of 1e-9. Throws
/// PreconditionViolation if the channel is not forward-degraded at `tol`.
/// For |X| <= 3 the operative certificate is an exhaustive 1/64-resolution
/// input grid: the result must reach grid max - 1e-6 (after a restart from
/// the grid argmax if needed) or ConvergenceFailure is thrown. For larger
/// alphabets a gap above tolerance at the iteration cap (5000) is the
/// failure condition.
DegradedCapacity dmc_secrecy_capacity_degraded(const DmcWiretap& channel,
                                               double tol = 1e-9);

struct GeneralCapacity {
  double lower_bound = 0.0;  // bits per channel use; grid lower bound
  InputDistribution input;
  Eigen::Index points_scanned = 0;
};

/// Grid scan of the general (non-degraded) secrecy-rate expression
/// max over p(u), p(x|u) of I(U;Y) - I(U;Z): enumerates every composition of
/// `grid` over the simplexes for p(u) and each row p(x|u), lexicographically,
/// keeping the first maximizer. Exhaustive but exponential, hence
/// scope-guarded: |X| > 3, u_card > 4, or grid > 32 throws
/// OracleScopeExceeded. The result is a lower bound on the true capacity.
GeneralCapacity dmc_secrecy_capacity_general(const DmcWiretap& channel, int u_card,
                                             int grid = 16);

enum class DegradedTag { kForward, kReverse, kGeneral };

/// Classifies a channel: forward-degraded if the forward factorization is
/// feasible, else reverse-degraded if that one is, else general.
DegradedTag classify_degradedness(const DmcWiretap& channel, double tol = 1e-9);

/// Parallel wiretap channel: independent subchannels used jointly, with
/// per-subchannel degradedness tags (must be consistent with check_degraded).
struct ParallelWiretap {
  std::vector<DmcWiretap> subchannels;
  std::vector<DegradedTag> tags;
};

struct ParallelOptions {
  double tol = 1e-9;
  int u_card = 0;   // 0: use the subchannel input size
  int grid = 16;    // general-scanner resolution
};

/// Secrecy capacity of the parallel channel: the sum of per-subchannel
/// values. Forward-degraded subchannels contribute their degraded capacity,
/// reverse-degraded ones contribute exactly 0 (the eavesdropper is the
/// stronger receiver everywhere), and general ones contribute the grid
/// scanner's lower bound — making the total a lower bound whenever a general
/// subchannel is present.
double parallel_secrecy_capacity(const ParallelWiretap& parallel,
                                 const ParallelOptions& options = {});

}  // namespace wiretap
