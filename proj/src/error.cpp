#include "intan/error.hpp"

namespace intan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::GapInSeries: return "GapInSeries";
    case ErrorCode::OrphanReturns: return "OrphanReturns";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::MalformedSic: return "MalformedSic";
    case ErrorCode::NoUsableFit: return "NoUsableFit";
    case ErrorCode::InsufficientUniverse: return "InsufficientUniverse";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::MissingVariable: return "MissingVariable";
    case ErrorCode::WindowUncovered: return "WindowUncovered";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidConfig:
    case ErrorCode::SchemaMismatch:
      return ErrorCategory::Validation;
    case ErrorCode::LengthMismatch:
    case ErrorCode::TooFewObservations:
    case ErrorCode::RankDeficient:
    case ErrorCode::ZeroVariance:
    case ErrorCode::NoUsableFit:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace intan
