#pragma once

#include <stdexcept>
#include <string>

namespace reserving {

// Base of all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid input data or arguments (CLI exit code 2).
struct DataError : Error {
  using Error::Error;
};

// Numerical failure during fitting (CLI exit code 3 under --strict).
struct NumericalError : Error {
  using Error::Error;
};

// --- triangle ---
struct EmptyInput : DataError {
  EmptyInput() : DataError("empty input: no triangle rows found") {}
};
struct NonNumericCell : DataError {
  explicit NonNumericCell(const std::string& what) : DataError(what) {}
};
struct NonPositivePayment : DataError {
  explicit NonPositivePayment(const std::string& what) : DataError(what) {}
};
struct RaggedShape : DataError {
  explicit RaggedShape(const std::string& what) : DataError(what) {}
};

// --- fuzzy numbers ---
struct ZeroSpreadQuery : DataError {
  ZeroSpreadQuery()
      : DataError("membership query on a sloped branch with zero spread") {}
};
struct HOutOfRange : DataError {
  HOutOfRange() : DataError("h-level must lie in [0,1]") {}
};
struct PiOutOfRange : DataError {
  PiOutOfRange() : DataError("risk aversion pi must lie in [0,1]") {}
};
struct EmptySequence : DataError {
  EmptySequence() : DataError("cannot aggregate an empty sequence of fuzzy numbers") {}
};

// --- fitting ---
struct Singular : NumericalError {
  explicit Singular(const std::string& what) : NumericalError(what) {}
};
struct NotConverged : NumericalError {
  explicit NotConverged(const std::string& what) : NumericalError(what) {}
};
struct ZeroVariance : NumericalError {
  ZeroVariance() : NumericalError("dispersion statistics are all equal; test undefined") {}
};
struct DegreesOfFreedomExhausted : DataError {
  DegreesOfFreedomExhausted() : DataError("residual adjustment requires n > p") {}
};
struct DegenerateVariance : NumericalError {
  DegenerateVariance() : NumericalError("FSST is zero; goodness of fit undefined") {}
};
struct NonPositiveLeftChannel : DataError {
  explicit NonPositiveLeftChannel(const std::string& what) : DataError(what) {}
};
struct NothingToPredict : DataError {
  NothingToPredict() : DataError("no unobserved cells to predict (k = 1)") {}
};

}  // namespace reserving
