#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linkreg {

enum class ErrorCode {
  // ingestion
  MalformedRow,
  DuplicateTimestamp,
  NonPositiveInterval,
  IrregularInterval,
  NegativeSpeed,
  NotALineString,
  TooFewPoints,
  CoordinateOutOfRange,
  EmptyIntersection,
  MissingDependent,
  DuplicateName,
  // features
  EmptyInput,
  MissingHour,
  UnknownKind,
  // regression
  RankDeficient,
  TooFewRows,
  NumericalInstability,
  EmptyDesign,
  MissingFeature,
  UnknownFeature,
  InvalidInput,
  NotBayesian,
  UnknownSolver,
  // events
  UnknownTarget,
  // evaluation
  LengthMismatch,
  Empty,
  // plumbing
  InvalidArgument,
  UnknownDataset,
  UnknownModel,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` is stable and is what the
/// service and CLI report; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace linkreg
