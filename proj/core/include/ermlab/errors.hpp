#pragma once

#include <stdexcept>
#include <string>

namespace ermlab {

/// Base for every error the lab raises on purpose.
class ErmlabError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public ErmlabError {
public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : ErmlabError("dimension mismatch: expected " + std::to_string(expected) +
                    ", got " + std::to_string(got)) {}
};

/// Iterative projection failed to certify the requested tolerance.
class NonConvergence : public ErmlabError {
public:
  NonConvergence(std::size_t iterations, double residual)
      : ErmlabError("solver did not converge after " +
                    std::to_string(iterations) +
                    " iterations (residual " + std::to_string(residual) + ")"),
        iterations(iterations), residual(residual) {}
  std::size_t iterations;
  double residual;
};

class UnboundedClass : public ErmlabError {
public:
  explicit UnboundedClass(const std::string& what)
      : ErmlabError("class is unbounded: " + what) {}
};

/// The class kind only exists at the design; no population semantics.
class EvaluationUnavailable : public ErmlabError {
public:
  explicit EvaluationUnavailable(const std::string& kind)
      : ErmlabError("population evaluation unavailable for class kind '" +
                    kind + "'") {}
};

class NotAMember : public ErmlabError {
public:
  explicit NotAMember(double violation)
      : ErmlabError("candidate is not a class member (violation " +
                    std::to_string(violation) + ")"),
        violation(violation) {}
  double violation;
};

/// The entropy curve never crosses the balancing curve on the search interval.
class NoCrossing : public ErmlabError {
public:
  using ErmlabError::ErmlabError;
};

class AsymmetricNoise : public ErmlabError {
public:
  explicit AsymmetricNoise(const std::string& kind)
      : ErmlabError("noise model '" + kind +
                    "' is not symmetric under negation") {}
};

class InterpolatorSamplingUnavailable : public ErmlabError {
public:
  explicit InterpolatorSamplingUnavailable(const std::string& kind)
      : ErmlabError("interpolator sampling unavailable for class kind '" +
                    kind + "'") {}
};

class NonPositiveValue : public ErmlabError {
public:
  using ErmlabError::ErmlabError;
};

class ConfigInvalid : public ErmlabError {
public:
  ConfigInvalid(const std::string& field, const std::string& reason)
      : ErmlabError("invalid config field '" + field + "': " + reason),
        field(field), reason(reason) {}
  std::string field;
  std::string reason;
};

class IoFailure : public ErmlabError {
public:
  explicit IoFailure(const std::string& path, const std::string& detail)
      : ErmlabError("I/O failure on '" + path + "': " + detail), path(path) {}
  std::string path;
};

class FieldTooLarge : public ErmlabError {
public:
  using ErmlabError::ErmlabError;
};

/// More than the allowed fraction of replicates aborted.
class SolverFailureThreshold : public ErmlabError {
public:
  SolverFailureThreshold(std::size_t failed, std::size_t total)
      : ErmlabError(std::to_string(failed) + " of " + std::to_string(total) +
                    " replicates aborted (limit is 1%)"),
        failed(failed), total(total) {}
  std::size_t failed;
  std::size_t total;
};

}  // namespace ermlab
