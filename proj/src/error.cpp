#include "linkreg/error.hpp"

namespace linkreg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::NonPositiveInterval: return "NonPositiveInterval";
    case ErrorCode::IrregularInterval: return "IrregularInterval";
    case ErrorCode::NegativeSpeed: return "NegativeSpeed";
    case ErrorCode::NotALineString: return "NotALineString";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::MissingDependent: return "MissingDependent";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingHour: return "MissingHour";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NumericalInstability: return "NumericalInstability";
    case ErrorCode::EmptyDesign: return "EmptyDesign";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotBayesian: return "NotBayesian";
    case ErrorCode::UnknownSolver: return "UnknownSolver";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace linkreg
