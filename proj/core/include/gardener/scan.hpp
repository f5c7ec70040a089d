#pragma once

// Model-level scoring: walks a partitioned checkpoint and computes every
// per-block statistic the ranking criteria need.
//
// Pass 1 reads each block once (tensor by tensor into one block buffer) and
// produces moments, the block range and the block-relative histogram.
// A second read is made only when a shared-range histogram is required:
// global binning, or either mutual-information criterion, both of which
// need the range over all blocks before any value can be binned.

#include <optional>
#include <vector>

#include "gardener/block_partition.hpp"
#include "gardener/ranking.hpp"
#include "gardener/stats.hpp"
#include "gardener/tensor_store.hpp"

namespace gardener {

enum class BinningMode { PerBlock, Global };

std::string_view binning_name(BinningMode m) noexcept;
BinningMode parse_binning(std::string_view name);

struct ScoringParams {
  int bins = 256;
  BinningMode binning = BinningMode::PerBlock;
  LogBase log_base = LogBase::Nat;
};

struct BlockScan {
  int id = 0;
  BasicStats stats;
  /// Histogram behind entropy_number / entropy_value (per-block or global range).
  Histogram histogram;
  double entropy_number = 0.0;                // nats
  std::optional<double> entropy_value;        // empty: all-zero block
  std::optional<double> mi_number;            // nats, when computed
  std::optional<double> mi_value;             // empty also when magnitude degenerate
};

struct ModelScan {
  ScoringParams params;
  ValueRange global_range;
  std::vector<BlockScan> blocks;
  bool has_mutual_information = false;
  int passes = 1;
};

ModelScan scan_model(const BlockModel& model, const Checkpoint& ckpt, const ScoringParams& params,
                     bool with_mutual_information);

bool needs_mutual_information(Criterion c) noexcept;

/// Raw score of one block for a weight criterion, in the configured log base.
/// Throws DegenerateKurtosis / DegenerateMagnitude where undefined.
double criterion_score(const ModelScan& scan, const BlockScan& block, Criterion c);

ScoreTable score_from_scan(const ModelScan& scan, Criterion c, std::optional<PruneDirection> direction = {});

/// Score every block under one weight criterion. Random and External are
/// rejected with InvalidArgument.
ScoreTable score_blocks(const BlockModel& model, const Checkpoint& ckpt, Criterion c, const ScoringParams& params,
                        std::optional<PruneDirection> direction = {});

}  // namespace gardener
