#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace wiretap {

/// Fixed-order pairwise (cascade) summation. Deterministic for a given
/// length and O(log n) rounding-error growth; every statistical reduction in
/// the library goes through this so results do not depend on how work was
/// chunked across threads.
inline double pairwise_sum(const double* data, Eigen::Index n) {
  if (n <= 32) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const Eigen::Index half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const Eigen::ArrayXd& values) {
  return pairwise_sum(values.data(), values.size());
}

/// splitmix64 evaluated in counter mode: output i of a stream is a pure
/// function of (seed, i). Streams are prefix-stable (drawing n samples then
/// extending to m > n leaves the first n untouched) and independent of any
/// thread partitioning.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) with 53 random bits, from the counter stream.
inline double uniform01_at(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(splitmix64_at(seed, index) >> 11) * 0x1.0p-53;
}

/// Euclidean projection onto the probability simplex {q >= 0, sum q = 1}.
inline Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

}  // namespace wiretap
