#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kickjt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One or more parameters violate their documented range.
class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(std::vector<std::string> fields, const std::string& detail);
  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

class PoleProximityError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

class EigFailureError : public Error {
 public:
  EigFailureError(const std::string& what, double worst_residual)
      : Error(what), worst_residual_(worst_residual) {}
  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

class StepUnderflowError : public Error {
 public:
  StepUnderflowError(const std::string& what, double lambda)
      : Error(what), lambda_(lambda) {}
  /// Coupling at which continuation stalled.
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class TruncationLossError : public Error {
 public:
  TruncationLossError(const std::string& what, double loss) : Error(what), loss_(loss) {}
  double loss() const noexcept { return loss_; }

 private:
  double loss_;
};

class GridTooSmallError : public Error {
 public:
  using Error::Error;
};

/// Configuration file could not be parsed or validated.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0) : Error(what), line_(line) {}
  /// 1-based line number in the config file, 0 when not tied to a line.
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace kickjt
