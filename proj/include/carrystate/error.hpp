#pragma once

#include <stdexcept>
#include <string>

namespace cs {

enum class ErrorCode {
  Usage,
  InvalidArgument,
  UnknownFamily,
  ShapeMismatch,
  UnsupportedBasis,
  NonSymmetricBoundary,
  NonFiniteInput,
  StatsMissing,
  BandIncompatible,
  ConfigHashMismatch,
  ZeroBandEnergy,
  ZeroSymbol,
  DomainError,
  EnumerationCap,
  MissingCalibration,
  MissingObservation,
  EmptySamples,
  MagicMismatch,
  VersionMismatch,
  TruncatedPayload,
  SchemaViolation,
  MissingDataset,
  RankMismatch,
  IndexOutOfRange,
  IoFailure,
  NumericFailure,
};

const char* error_name(ErrorCode code);

/// Process exit code for a module error: 1 usage, 2 data, 3 numeric.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace cs
