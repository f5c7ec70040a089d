#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gardener {

enum class Criterion {
  EntropyNumber,
  EntropyValue,
  MiNumber,
  MiValue,
  Mean,
  Variance,
  Std,
  L1,
  L2,
  Max,
  Kurtosis,
  Random,
  External,
};

enum class PruneDirection { LowestFirst, HighestFirst };

std::string_view criterion_name(Criterion c) noexcept;
/// Accepts canonical names plus the presets "entropy" / "information_entropy"
/// (entropy_number), "mutual_information" (mi_value) and "sensitivity"
/// (external). Throws UnknownCriterion.
Criterion parse_criterion(std::string_view name);
std::string_view direction_name(PruneDirection d) noexcept;
/// "lowest" / "highest" (with or without a "_first" suffix).
PruneDirection parse_direction(std::string_view name);

/// Kurtosis removes its highest-scored blocks first; everything else its lowest.
PruneDirection default_direction(Criterion c) noexcept;

/// The eleven criteria computable from weights alone, in report order.
const std::vector<Criterion>& weight_criteria();

/// Per-block scores for one criterion. Vectors are indexed by block_id - 1.
/// rank 1 is the most important block, rank L the first one pruned.
struct ScoreTable {
  Criterion criterion = Criterion::EntropyNumber;
  PruneDirection direction = PruneDirection::LowestFirst;
  std::vector<double> raw;
  std::vector<double> normalized;
  std::vector<int> rank;

  int num_blocks() const noexcept { return static_cast<int>(raw.size()); }
  /// Block ids in the order they would be pruned.
  std::vector<int> pruning_order() const;
};

/// Normalizes and ranks raw scores. Equal scores prune the deeper block
/// (larger id) first. Errors: NormalizationUndefined (< 2 blocks),
/// InvalidArgument (NaN score).
ScoreTable make_score_table(Criterion criterion, std::vector<double> raw, PruneDirection direction);
ScoreTable make_score_table(Criterion criterion, std::vector<double> raw);

struct PruneSet {
  std::vector<int> block_ids;  // ascending
  double ratio = 0.0;
  std::string criterion;
  std::optional<std::uint64_t> seed;
};

/// floor(ratio * L). Errors: InvalidRatio (ratio outside (0, 1)),
/// EmptySelection (count 0), FullModelPrune (count L).
int prune_count(double ratio, int num_blocks);

/// One-shot selection of the floor(ratio * L) blocks with the largest rank numbers.
PruneSet gardener_select(const ScoreTable& table, double ratio);
PruneSet gardener_select_count(const ScoreTable& table, int count);

/// xorshift64* seeded through splitmix64. The sequence is fixed by the
/// algorithm, so selections are identical on every platform.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) noexcept;
  std::uint64_t next() noexcept;
  /// Uniform in [0, bound) by rejection (no modulo bias). bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// Partial Fisher-Yates over [1..L]: for i < n, swap slot i with slot
/// i + below(L - i); the first n slots, sorted, are the selection.
PruneSet random_select(int num_blocks, double ratio, std::uint64_t seed);
PruneSet random_select_count(int num_blocks, int count, std::uint64_t seed);

/// Ranks blocks by oracle accuracy drop: largest drop -> rank 1. Throws
/// IncompleteOracle when any of 1..L is missing.
ScoreTable external_rank(const std::map<int, double>& drops, int num_blocks);

}  // namespace gardener
