#pragma once

#include <stdexcept>
#include <string>

namespace wiretap {

/// A channel state carried a negative or non-finite gain.
class InvalidState : public std::runtime_error {
 public:
  explicit InvalidState(const std::string& what) : std::runtime_error(what) {}
};

/// A distribution violated its normalization or support invariants
/// (probabilities negative, weights not summing to one, malformed rows).
class InvalidDistribution : public std::runtime_error {
 public:
  explicit InvalidDistribution(const std::string& what) : std::runtime_error(what) {}
};

/// The transmission set {g1 > g2} carries no probability mass, so no power
/// allocation can achieve a positive secrecy rate and calibration is undefined.
class InfeasibleSecrecy : public std::runtime_error {
 public:
  explicit InfeasibleSecrecy(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver exhausted its iteration budget before reaching tolerance.
class ConvergenceFailure : public std::runtime_error {
 public:
  explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A desk-scale reference solver was asked for a problem size outside the
/// range it is certified for.
class OracleScopeExceeded : public std::runtime_error {
 public:
  explicit OracleScopeExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was invoked on inputs that violate its stated precondition
/// (e.g. asking for a degraded-channel capacity on a non-degraded channel).
class PreconditionViolation : public std::runtime_error {
 public:
  explicit PreconditionViolation(const std::string& what) : std::runtime_error(what) {}
};

/// A config, descriptor, or matrix file could not be parsed. Carries the
/// offending path and 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

}  // namespace wiretap
