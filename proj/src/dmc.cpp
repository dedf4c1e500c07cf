#include "wiretap/dmc.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wiretap/errors.hpp"
#include "wiretap/numeric.hpp"

namespace wiretap {

namespace {

void validate_stochastic(const Eigen::MatrixXd& m, const char* name, double tol) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw InvalidDistribution(std::string(name) + " matrix is empty");
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0 + tol) {
        throw InvalidDistribution(std::string(name) + " entry (" + std::to_string(r) +
                                  "," + std::to_string(c) + ") outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw InvalidDistribution(std::string(name) + " row " + std::to_string(r) +
                                " sums to " + std::to_string(sum) +
                                ", expected 1 within tolerance");
    }
  }
}

}  // namespace

void validate(const DmcWiretap& channel) {
  validate_stochastic(channel.py_given_x, "p(y|x)", 1e-12);
  validate_stochastic(channel.pz_given_x, "p(z|x)", 1e-12);
  if (channel.py_given_x.rows() != channel.pz_given_x.rows()) {
    throw InvalidDistribution("p(y|x) and p(z|x) disagree on the input alphabet size");
  }
}

void validate(const InputDistribution& input) {
  if (input.pux.size() == 0) throw InvalidDistribution("input distribution is empty");
  double sum = 0.0;
  for (Eigen::Index u = 0; u < input.pux.rows(); ++u) {
    for (Eigen::Index x = 0; x < input.pux.cols(); ++x) {
      const double v = input.pux(u, x);
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidDistribution("input distribution has a negative entry");
      }
      sum += v;
    }
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidDistribution("input distribution sums to " + std::to_string(sum) +
                              ", expected 1 within 1e-12");
  }
}

double mutual_information(const Eigen::VectorXd& px, const Eigen::MatrixXd& channel) {
  if (px.size() != channel.rows()) {
    throw std::invalid_argument("mutual_information: px length must match channel rows");
  }
  for (Eigen::Index x = 0; x < px.size(); ++x) {
    if (!std::isfinite(px[x]) || px[x] < -1e-12) {
      throw std::invalid_argument("mutual_information: px has a negative entry");
    }
  }
  validate_stochastic(channel, "channel", 1e-9);

  const Eigen::VectorXd py = channel.transpose() * px;
  double bits = 0.0;
  for (Eigen::Index x = 0; x < px.size(); ++x) {
    if (!(px[x] > 0.0)) continue;  // 0 * log 0 := 0
    for (Eigen::Index y = 0; y < channel.cols(); ++y) {
      const double w = channel(x, y);
      if (!(w > 0.0)) continue;
      bits += px[x] * w * std::log2(w / py[y]);
    }
  }
  return bits > 0.0 ? bits : 0.0;
}

DegradednessWitness check_degraded(const DmcWiretap& channel, DegradedDirection direction,
                                   double tol) {
  validate(channel);
  if (!(tol > 0.0)) throw std::invalid_argument("check_degraded: tol must be positive");

  // Feasibility of A * Q = B over row-stochastic Q, as the least-squares
  // program min ||AQ - B||_F^2, solved by projected gradient with the fixed
  // step 1/L, L = 2 * lambda_max(A^T A).
  const Eigen::MatrixXd& a =
      direction == DegradedDirection::kForward ? channel.py_given_x : channel.pz_given_x;
  const Eigen::MatrixXd& b =
      direction == DegradedDirection::kForward ? channel.pz_given_x : channel.py_given_x;

  const Eigen::Index rows = a.cols();
  const Eigen::Index cols = b.cols();
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(rows, cols, 1.0 / static_cast<double>(cols));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(a.transpose() * a);
  const double curvature = 2.0 * eigs.eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(curvature, 1e-12);

  DegradednessWitness result;
  constexpr int kMaxIterations = 10000;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const Eigen::MatrixXd gap = a * q - b;
    if (gap.cwiseAbs().maxCoeff() <= tol) break;

    const Eigen::MatrixXd grad = 2.0 * a.transpose() * gap;
    Eigen::MatrixXd next = q - step * grad;
    for (Eigen::Index r = 0; r < rows; ++r) {
      next.row(r) = project_to_simplex(next.row(r).transpose()).transpose();
    }
    if ((next - q).cwiseAbs().maxCoeff() < 1e-16) break;  // projection fixed point
    q = next;
  }

  result.witness = q;
  result.residual = (a * q - b).cwiseAbs().maxCoeff();
  result.feasible = result.residual <= tol;
  result.iterations = it;
  return result;
}

namespace {

// d/dpx_a of I(X;Y) - I(X;Z) in bits, up to an additive constant that is
// irrelevant on the simplex: D(W_a || py) - D(V_a || pz).
Eigen::VectorXd secrecy_gradient(const Eigen::VectorXd& px, const Eigen::MatrixXd& w,
                                 const Eigen::MatrixXd& v) {
  const Eigen::VectorXd py = (w.transpose() * px).cwiseMax(1e-300);
  const Eigen::VectorXd pz = (v.transpose() * px).cwiseMax(1e-300);
  Eigen::VectorXd grad(px.size());
  for (Eigen::Index x = 0; x < px.size(); ++x) {
    double d = 0.0;
    for (Eigen::Index y = 0; y < w.cols(); ++y) {
      if (w(x, y) > 0.0) d += w(x, y) * std::log2(w(x, y) / py[y]);
    }
    for (Eigen::Index z = 0; z < v.cols(); ++z) {
      if (v(x, z) > 0.0) d -= v(x, z) * std::log2(v(x, z) / pz[z]);
    }
    grad[x] = d;
  }
  return grad;
}

struct AscentOutcome {
  Eigen::VectorXd px;
  double value = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

// Projected gradient ascent with Armijo backtracking on the concave
// (for forward-degraded channels) objective I(X;Y) - I(X;Z). The
// Frank-Wolfe gap max_a grad_a - <px, grad> upper-bounds the suboptimality.
// Value-based backtracking stalls once objective differences sink below the
// evaluation noise floor (leaving a gap near sqrt(eps) * curvature), so a
// second, gradient-only phase with spectral (Barzilai-Borwein) steps keeps
// contracting toward the simplex fixed point; the best-gap iterate is
// returned, whose value is within `gap` of the optimum by concavity.
AscentOutcome ascend(const Eigen::MatrixXd& w, const Eigen::MatrixXd& v,
                     Eigen::VectorXd px, double gap_tol, int max_iterations) {
  auto objective = [&](const Eigen::VectorXd& p) {
    return mutual_information(p, w) - mutual_information(p, v);
  };

  AscentOutcome out;
  out.value = objective(px);
  for (; out.iterations < max_iterations; ++out.iterations) {
    const Eigen::VectorXd grad = secrecy_gradient(px, w, v);
    out.gap = grad.maxCoeff() - px.dot(grad);
    if (out.gap <= gap_tol) break;

    bool stepped = false;
    for (double t = 1.0; t >= 1e-18; t *= 0.5) {
      const Eigen::VectorXd candidate = project_to_simplex(px + t * grad);
      const double predicted = grad.dot(candidate - px);
      if (!(predicted > 0.0)) break;  // projection fixed point
      const double candidate_value = objective(candidate);
      if (candidate_value >= out.value + 1e-4 * predicted) {
        px = candidate;
        out.value = candidate_value;
        stepped = true;
        break;
      }
    }
    if (!stepped) break;  // objective noise floor; polish below
  }

  Eigen::VectorXd best_px = px;
  double best_gap = out.gap;
  Eigen::VectorXd prev_px, prev_grad;
  double step = 1.0;
  for (; out.iterations < max_iterations && best_gap > gap_tol; ++out.iterations) {
    const Eigen::VectorXd grad = secrecy_gradient(px, w, v);
    const double gap = grad.maxCoeff() - px.dot(grad);
    if (gap < best_gap) {
      best_gap = gap;
      best_px = px;
    }
    if (best_gap <= gap_tol) break;
    if (prev_px.size() > 0) {
      const Eigen::VectorXd dx = px - prev_px;
      const Eigen::VectorXd dg = grad - prev_grad;
      const double curvature = -dx.dot(dg);  // >= 0 along concave objectives
      if (curvature > 0.0 && dx.squaredNorm() > 0.0) {
        step = std::min(1e8, std::max(1e-8, dx.squaredNorm() / curvature));
      }
    }
    prev_px = px;
    prev_grad = grad;
    px = project_to_simplex(px + step * grad);
    if ((px - prev_px).lpNorm<Eigen::Infinity>() == 0.0) break;  // fixed point
  }
  out.px = best_px;
  out.gap = best_gap;
  out.value = objective(best_px);
  return out;
}

// Enumerates integer compositions of `total` into `dim` nonnegative parts in
// lexicographic order.
void for_each_composition(int total, int dim,
                          const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> parts(static_cast<std::size_t>(dim), 0);
  std::function<void(int, int)> recurse = [&](int pos, int remaining) {
    if (pos == dim - 1) {
      parts[static_cast<std::size_t>(pos)] = remaining;
      fn(parts);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      parts[static_cast<std::size_t>(pos)] = v;
      recurse(pos + 1, remaining - v);
    }
  };
  recurse(0, total);
}

struct GridScan {
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd argmax;
};

// Exhaustive 1/resolution-grid maximum of the no-auxiliary objective.
GridScan scan_input_grid(const Eigen::MatrixXd& w, const Eigen::MatrixXd& v,
                         int resolution) {
  GridScan scan;
  const int nx = static_cast<int>(w.rows());
  for_each_composition(resolution, nx, [&](const std::vector<int>& parts) {
    Eigen::VectorXd px(nx);
    for (int x = 0; x < nx; ++x) {
      px[x] = static_cast<double>(parts[static_cast<std::size_t>(x)]) / resolution;
    }
    const double value = mutual_information(px, w) - mutual_information(px, v);
    if (value > scan.best) {
      scan.best = value;
      scan.argmax = px;
    }
  });
  return scan;
}

}  // namespace

DegradedCapacity dmc_secrecy_capacity_degraded(const DmcWiretap& channel, double tol) {
  const DegradednessWitness forward = check_degraded(channel, DegradedDirection::kForward, tol);
  if (!forward.feasible) {
    throw PreconditionViolation(
        "dmc_secrecy_capacity_degraded: channel is not forward-degraded "
        "(factorization residual " +
        std::to_string(forward.residual) + ")");
  }

  const Eigen::MatrixXd& w = channel.py_given_x;
  const Eigen::MatrixXd& v = channel.pz_given_x;
  const Eigen::Index nx = channel.input_size();
  constexpr double kGapTol = 1e-9;
  constexpr int kMaxIterations = 5000;
  constexpr int kGridResolution = 64;
  constexpr double kGridSlack = 1e-6;

  AscentOutcome out = ascend(
      w, v, Eigen::VectorXd::Constant(nx, 1.0 / static_cast<double>(nx)), kGapTol,
      kMaxIterations);

  if (nx <= 3) {
    // The exhaustive grid is the operative certificate here: restart from its
    // argmax when the ascent landed below it, and fail only if the result
    // still cannot match the grid.
    const GridScan scan = scan_input_grid(w, v, kGridResolution);
    if (out.value < scan.best - kGridSlack) {
      const AscentOutcome retry = ascend(w, v, scan.argmax, kGapTol, kMaxIterations);
      if (retry.value > out.value) out = retry;
    }
    if (out.value < scan.best - kGridSlack) {
      throw ConvergenceFailure(
          "dmc_secrecy_capacity_degraded: ascent value " + std::to_string(out.value) +
          " bits fell below the certification grid maximum " + std::to_string(scan.best));
    }
  } else if (out.gap > kGapTol) {
    // No grid certificate at this alphabet size; the duality gap must close.
    throw ConvergenceFailure(
        "dmc_secrecy_capacity_degraded: duality gap " + std::to_string(out.gap) +
        " after " + std::to_string(out.iterations) + " iterations; best value " +
        std::to_string(out.value) + " bits");
  }

  DegradedCapacity result;
  result.capacity = out.value;
  result.input.pux = out.px.transpose();  // single auxiliary letter
  result.iterations = out.iterations;
  return result;
}

GeneralCapacity dmc_secrecy_capacity_general(const DmcWiretap& channel, int u_card,
                                             int grid) {
  validate(channel);
  const int nx = static_cast<int>(channel.input_size());
  if (u_card < 1) throw std::invalid_argument("dmc_secrecy_capacity_general: u_card >= 1");
  if (grid < 1) throw std::invalid_argument("dmc_secrecy_capacity_general: grid >= 1");
  if (nx > 3 || u_card > 4 || grid > 32) {
    throw OracleScopeExceeded(
        "dmc_secrecy_capacity_general: certified for |X| <= 3, u_card <= 4, grid <= 32");
  }

  // Work estimate: compositions(grid, u_card) * compositions(grid, nx)^u_card.
  auto compositions = [](int total, int dim) {
    double count = 1.0;
    for (int k = 1; k < dim; ++k) count *= static_cast<double>(total + k) / k;
    return count;
  };
  const double leaves =
      compositions(grid, u_card) * std::pow(compositions(grid, nx), u_card);
  if (leaves > 2e7) {
    throw OracleScopeExceeded(
        "dmc_secrecy_capacity_general: grid enumeration would visit " +
        std::to_string(leaves) + " points; lower u_card or grid");
  }

  const Eigen::MatrixXd& w = channel.py_given_x;
  const Eigen::MatrixXd& v = channel.pz_given_x;

  GeneralCapacity result;
  result.lower_bound = -std::numeric_limits<double>::infinity();

  // Row choices p(x|u) on the grid, pre-listed in lexicographic order.
  std::vector<Eigen::VectorXd> row_choices;
  for_each_composition(grid, nx, [&](const std::vector<int>& parts) {
    Eigen::VectorXd row(nx);
    for (int x = 0; x < nx; ++x) {
      row[x] = static_cast<double>(parts[static_cast<std::size_t>(x)]) / grid;
    }
    row_choices.push_back(row);
  });

  Eigen::MatrixXd pxu(u_card, nx);
  Eigen::Index scanned = 0;

  // p(u) outermost, then each row of p(x|u), all lexicographic: combined with
  // the strict improvement test, the lexicographically first maximizer wins.
  for_each_composition(grid, u_card, [&](const std::vector<int>& parts) {
    Eigen::VectorXd pu(u_card);
    for (int u = 0; u < u_card; ++u) {
      pu[u] = static_cast<double>(parts[static_cast<std::size_t>(u)]) / grid;
    }
    std::function<void(int)> choose_row = [&](int u) {
      if (u == u_card) {
        const Eigen::MatrixXd t = pxu * w;  // p(y|u)
        const Eigen::MatrixXd s = pxu * v;  // p(z|u)
        const double value = mutual_information(pu, t) - mutual_information(pu, s);
        ++scanned;
        if (value > result.lower_bound) {
          result.lower_bound = value;
          Eigen::MatrixXd joint = pxu;
          for (int r = 0; r < u_card; ++r) joint.row(r) *= pu[r];
          result.input.pux = joint;
        }
        return;
      }
      for (std::size_t r = 0; r < row_choices.size(); ++r) {
        pxu.row(u) = row_choices[r].transpose();
        choose_row(u + 1);
      }
    };
    choose_row(0);
  });

  result.points_scanned = scanned;
  return result;
}

DegradedTag classify_degradedness(const DmcWiretap& channel, double tol) {
  if (check_degraded(channel, DegradedDirection::kForward, tol).feasible) {
    return DegradedTag::kForward;
  }
  if (check_degraded(channel, DegradedDirection::kReverse, tol).feasible) {
    return DegradedTag::kReverse;
  }
  return DegradedTag::kGeneral;
}

double parallel_secrecy_capacity(const ParallelWiretap& parallel,
                                 const ParallelOptions& options) {
  if (parallel.subchannels.empty()) {
    throw std::invalid_argument("parallel_secrecy_capacity: no subchannels");
  }
  if (parallel.tags.size() != parallel.subchannels.size()) {
    throw std::invalid_argument("parallel_secrecy_capacity: one tag per subchannel required");
  }

  // Independent subchannels compose additively; reverse-degraded ones
  // contribute exactly 0 without touching a solver.
  double total = 0.0;
  for (std::size_t i = 0; i < parallel.subchannels.size(); ++i) {
    const DmcWiretap& sub = parallel.subchannels[i];
    switch (parallel.tags[i]) {
      case DegradedTag::kForward:
        total += dmc_secrecy_capacity_degraded(sub, options.tol).capacity;
        break;
      case DegradedTag::kReverse:
        break;
      case DegradedTag::kGeneral: {
        const int u_card =
            options.u_card > 0 ? options.u_card : static_cast<int>(sub.input_size());
        total += dmc_secrecy_capacity_general(sub, u_card, options.grid).lower_bound;
        break;
      }
    }
  }
  return total;
}

}  // namespace wiretap
