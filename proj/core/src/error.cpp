#include "gardener/error.hpp"

namespace gardener {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CorruptContainer: return "CorruptContainer";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::NonContiguousBlocks: return "NonContiguousBlocks";
    case ErrorCode::NoBlocksFound: return "NoBlocksFound";
    case ErrorCode::BlockNotFound: return "BlockNotFound";
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidBinCount: return "InvalidBinCount";
    case ErrorCode::NonFiniteWeight: return "NonFiniteWeight";
    case ErrorCode::DegenerateMagnitude: return "DegenerateMagnitude";
    case ErrorCode::DegenerateKurtosis: return "DegenerateKurtosis";
    case ErrorCode::NormalizationUndefined: return "NormalizationUndefined";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::FullModelPrune: return "FullModelPrune";
    case ErrorCode::UnknownCriterion: return "UnknownCriterion";
    case ErrorCode::IncompleteOracle: return "IncompleteOracle";
    case ErrorCode::PlanConflict: return "PlanConflict";
    case ErrorCode::DuplicateOracleRow: return "DuplicateOracleRow";
    case ErrorCode::NoBaseline: return "NoBaseline";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InternalInvariant: return "InternalInvariant";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace gardener
