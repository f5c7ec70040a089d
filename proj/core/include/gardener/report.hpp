#pragma once

// Configuration and machine-readable outputs (JSON / CSV) shared by the
// command-line tool. All JSON is emitted with a stable key order and
// two-space indentation so that parse-and-re-emit is byte-identical.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gardener/block_partition.hpp"
#include "gardener/oracle_compare.hpp"
#include "gardener/pruner.hpp"
#include "gardener/ranking.hpp"
#include "gardener/scan.hpp"

namespace gardener {

std::string_view tool_version() noexcept;

inline constexpr std::string_view kAnalysisSchema = "gardener.analysis/1";

struct ToolConfig {
  BlockPattern pattern;
  ScoringParams scoring;
  std::map<Criterion, PruneDirection> directions;  // overrides of default_direction
  std::optional<CostConfig> cost;
  std::uint64_t seed = 0;

  PruneDirection direction_for(Criterion c) const;
};

/// Keys: bins, log_base ("e" | "2"), binning ("block" | "global"),
/// block_pattern, index_base, directions {criterion: "lowest"|"highest"},
/// cost {base_flops, per_block_flops, bytes_per_param}, seed. Unknown keys
/// and ill-typed values throw InvalidConfig. Absent keys keep `base`.
ToolConfig parse_config_json(std::string_view text, ToolConfig base = {});
ToolConfig load_config(const std::filesystem::path& path, ToolConfig base = {});
CostConfig parse_cost_config_json(std::string_view text);

/// Effective configuration as a JSON object (embedded in every report).
std::string config_json(const ToolConfig& cfg);

struct AnalysisReport {
  std::string checkpoint;
  ToolConfig config;
  BlockModel model;
  ModelScan scan;
  std::vector<ScoreTable> tables;
  /// Criteria that could not be scored on this model (e.g. zero variance).
  std::vector<std::pair<Criterion, std::string>> unavailable;
};

AnalysisReport analyze(const Checkpoint& ckpt, const BlockModel& model, const std::vector<Criterion>& criteria,
                       const ToolConfig& cfg, std::string checkpoint_label);

std::string report_json(const AnalysisReport& report);
/// One row per block: block_id, params, then raw/normalized/rank per criterion.
std::string report_scores_csv(const AnalysisReport& report);
/// block_id,bin,lo,hi,count,magnitude for every histogram bin.
std::string report_histogram_csv(const AnalysisReport& report);

std::string inspect_json(const BlockModel& model, const Checkpoint& ckpt);
std::string inspect_text(const BlockModel& model, const Checkpoint& ckpt);

std::string score_table_json(const ScoreTable& table);
std::string score_table_csv(const ScoreTable& table);
std::string score_table_text(const ScoreTable& table);

std::string plan_json(const PruningPlan& plan, const PruneSet& set, const std::optional<CostEstimate>& cost);

std::string comparison_json(const std::vector<RankComparison>& comparisons, const OracleTable& oracle,
                            const ToolConfig& cfg);
/// Mirrors the oracle ranking table: block, drop, oracle rank, then one
/// rank column per criterion.
std::string comparison_csv(const std::vector<RankComparison>& comparisons);

/// Score table and/or prune selection produced by `rank`.
std::string selection_json(const std::optional<ScoreTable>& table, const std::optional<PruneSet>& set,
                           const ToolConfig& cfg);

/// One selection of a pruning schedule. Accuracy columns are filled only
/// from measurements supplied by the user.
struct CurveRow {
  double ratio = 0.0;
  int removed_count = 0;
  std::string criterion;
  std::vector<int> blocks;
  std::optional<double> single_block_drop_sum;  // sum of the oracle drops of `blocks`
  std::optional<double> measured_war;
  std::optional<double> delta;                   // baseline - measured_war
};

/// ratio,removed_count,criterion,selected_blocks,single_block_drop_sum,measured_war,delta
/// with blocks space separated and absent values left empty.
std::string curve_csv(const std::vector<CurveRow>& rows);

/// Re-serializes JSON text in the canonical emitted form.
std::string canonical_json(std::string_view text);

}  // namespace gardener
