#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace intan {

enum class ErrorCode {
  FileUnreadable,
  SchemaMismatch,
  EmptyInput,
  InvalidRecord,
  DuplicateKey,
  GapInSeries,
  OrphanReturns,
  LengthMismatch,
  TooFewObservations,
  RankDeficient,
  ZeroVariance,
  MalformedSic,
  NoUsableFit,
  InsufficientUniverse,
  EmptyCell,
  WindowMismatch,
  MissingVariable,
  WindowUncovered,
  InvalidSpec,
  InvalidConfig,
};

// Broad failure class, used to pick process exit codes.
enum class ErrorCategory { Validation, Data, Numeric };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace intan
