#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gardener {

enum class ErrorCode {
  // tensor_store
  ParseError,
  CorruptContainer,
  UnsupportedDtype,
  IoError,
  // block_partition
  InvalidPattern,
  NonContiguousBlocks,
  NoBlocksFound,
  BlockNotFound,
  EmptyBlock,
  // stats
  EmptyInput,
  InvalidBinCount,
  NonFiniteWeight,
  DegenerateMagnitude,
  DegenerateKurtosis,
  NormalizationUndefined,
  // ranking / pruner
  InvalidRatio,
  EmptySelection,
  FullModelPrune,
  UnknownCriterion,
  IncompleteOracle,
  PlanConflict,
  // oracle_compare
  DuplicateOracleRow,
  NoBaseline,
  ShapeError,
  // general
  InvalidArgument,
  InvalidConfig,
  InternalInvariant,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library. The code is stable and is what
/// callers (and the CLI exit-code mapping) should branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace gardener
