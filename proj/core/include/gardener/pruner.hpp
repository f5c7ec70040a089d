#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gardener/block_partition.hpp"
#include "gardener/ranking.hpp"
#include "gardener/tensor_store.hpp"

namespace gardener {

struct PruningPlan {
  std::vector<int> remove;  // ascending block ids
  /// old name -> new name for every tensor of a surviving block (identity included)
  std::vector<std::pair<std::string, std::string>> rename;
  std::vector<std::string> drop;
  int kept_blocks = 0;
};

/// Surviving blocks are renumbered contiguously from the pattern's native
/// index base, preserving order. Errors: BlockNotFound, EmptySelection,
/// FullModelPrune.
PruningPlan make_plan(const BlockModel& model, const std::vector<int>& remove);
PruningPlan make_plan(const BlockModel& model, const PruneSet& set);

/// Provenance recorded into the pruned checkpoint's metadata.
struct PlanProvenance {
  std::string criterion;
  double ratio = 0.0;
  std::string tool_version;
};

/// New checkpoint with dropped tensors removed and survivors renamed; tensor
/// bytes are shared, never copied or altered. Residual tensors pass through.
/// Metadata gains "gardener.*" keys describing the plan. Errors: PlanConflict
/// when a planned tensor is missing or two tensors would share a name.
Checkpoint apply_plan(const Checkpoint& ckpt, const PruningPlan& plan, const PlanProvenance& provenance = {});

struct CostConfig {
  double base_flops = 0.0;       // outside the blocks
  double per_block_flops = 0.0;
  double bytes_per_param = 4.0;
};

/// Least-squares line through (kept block count, flops) points. Needs at
/// least two distinct block counts.
CostConfig fit_cost_config(const std::vector<std::pair<int, double>>& points, double bytes_per_param = 4.0);

struct CostEstimate {
  std::uint64_t params_before = 0;
  std::uint64_t params_after = 0;
  double flops_before = 0.0;
  double flops_after = 0.0;
  double size_bytes_before = 0.0;
  double size_bytes_after = 0.0;
};

/// Throws InvalidConfig when any config value is negative or non-finite.
CostEstimate estimate_cost(const BlockModel& model, const std::vector<int>& remove, const CostConfig& cfg);

}  // namespace gardener
