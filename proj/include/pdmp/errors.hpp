#pragma once

#include <stdexcept>
#include <string>

namespace pdmp {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The contraction condition L*L_w + alpha/lambda < 1 (or lambda > max(0, alpha)) fails.
class ContractivityError : public Error {
 public:
  using Error::Error;
};

/// A model violates a hard structural requirement (negative density, point outside X, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// An iterative method exceeded its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Union support of an FM problem is larger than the configured cap.
class SupportCapError : public Error {
 public:
  using Error::Error;
};

/// Probability mass escaped the truncated grid beyond the allowed defect.
class DefectError : public Error {
 public:
  DefectError(const std::string& what, double defect) : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// A fit or estimate could not be formed from the available data.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdmp
