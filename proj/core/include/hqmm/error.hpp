#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hqmm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not line up (non-square, mismatched n, wrong block count).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A stacked matrix whose row count is not a multiple of the block size.
class PartitionError : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

/// A value violates a structural constraint (trace preservation, stochasticity,
/// density-matrix validity, ...).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Bad argument outside of any matrix shape (e.g. a symbol >= s, h <= 0).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioned solve, NaN/Inf loss, or similar floating point breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An observation whose probability under the current state fell below the
/// underflow floor. Carries the (0-based) step and symbol, and the sequence
/// index when raised from a batch computation.
class ZeroProbabilityError : public Error {
 public:
  static constexpr std::size_t kNoSequence = static_cast<std::size_t>(-1);

  ZeroProbabilityError(std::size_t step, std::size_t symbol, double probability,
                       std::size_t sequence = kNoSequence, std::string context = {});

  std::size_t step() const noexcept { return step_; }
  std::size_t symbol() const noexcept { return symbol_; }
  double probability() const noexcept { return probability_; }
  std::size_t sequence() const noexcept { return sequence_; }

  const std::string& context() const noexcept { return context_; }

  ZeroProbabilityError with_sequence(std::size_t sequence) const {
    return ZeroProbabilityError(step_, symbol_, probability_, sequence, context_);
  }
  /// Same error with an extra location prefix (e.g. "epoch 3, batch 1").
  ZeroProbabilityError with_context(std::string context) const {
    return ZeroProbabilityError(step_, symbol_, probability_, sequence_, std::move(context));
  }

 private:
  std::size_t step_;
  std::size_t symbol_;
  double probability_;
  std::size_t sequence_;
  std::string context_;
};

}  // namespace hqmm
