#include "carrystate/error.hpp"

namespace cs {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnsupportedBasis: return "UnsupportedBasis";
    case ErrorCode::NonSymmetricBoundary: return "NonSymmetricBoundary";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::StatsMissing: return "StatsMissing";
    case ErrorCode::BandIncompatible: return "BandIncompatible";
    case ErrorCode::ConfigHashMismatch: return "ConfigHashMismatch";
    case ErrorCode::ZeroBandEnergy: return "ZeroBandEnergy";
    case ErrorCode::ZeroSymbol: return "ZeroSymbol";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EnumerationCap: return "EnumerationCap";
    case ErrorCode::MissingCalibration: return "MissingCalibration";
    case ErrorCode::MissingObservation: return "MissingObservation";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::MagicMismatch: return "MagicMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::MissingDataset: return "MissingDataset";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownFamily:
      return 1;
    case ErrorCode::NonFiniteInput:
    case ErrorCode::ZeroBandEnergy:
    case ErrorCode::ZeroSymbol:
    case ErrorCode::DomainError:
    case ErrorCode::NumericFailure:
      return 3;
    default:
      return 2;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cs
