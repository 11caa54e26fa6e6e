#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace riskbound {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or vector shapes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A structural hypothesis failed (reducible matrix, invalid chain, ...).
class StructureError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a formula (log of a nonpositive
/// number, negative entry where positivity is required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Value too large to represent (exp overflow of a cost entry).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its cap before reaching tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A Gram matrix is singular or indefinite. Carries the indices of the
/// feature columns found to be linearly dependent on earlier ones.
class RankError : public Error {
 public:
  RankError(const std::string& what, std::vector<std::size_t> dependent)
      : Error(what), dependent_(std::move(dependent)) {}
  const std::vector<std::size_t>& dependent_columns() const noexcept {
    return dependent_;
  }

 private:
  std::vector<std::size_t> dependent_;
};

/// Malformed input document. The message starts with the JSON path of the
/// offending field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskbound
