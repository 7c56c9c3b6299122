#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmc {

/// Base class for all domain errors raised by this library. Input problems
/// (parsing, validation) and statistical degeneracies both derive from it so
/// callers can distinguish them from programmer errors (std::invalid_argument
/// and friends).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No records where at least one is required.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

/// A label or prediction value outside {0,1}.
class BadValue : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. Carries the 1-based line number (the header is
/// line 1).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Header row absent, misnamed, or structurally wrong (e.g. a named column
/// is missing).
class MissingHeader : public Error {
 public:
  using Error::Error;
};

/// A statistic with a 0/0 form, e.g. the F-measure when TP=FP=FN=0.
class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

/// The variance formula's denominator vanishes (zero true positives).
class InfiniteVariance : public Error {
 public:
  using Error::Error;
};

/// Var(f1 - f2) is zero within tolerance; the z-statistic is undefined.
class DegenerateDifference : public Error {
 public:
  using Error::Error;
};

/// Every Monte-Carlo draw was excluded for infinite variance.
class NoRetainedReps : public Error {
 public:
  using Error::Error;
};

/// A train/test split that leaves a part empty or the training set without
/// both classes.
class SplitError : public Error {
 public:
  using Error::Error;
};

}  // namespace fmc
