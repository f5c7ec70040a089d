#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gardener/ranking.hpp"

namespace gardener {

struct OracleEntry {
  double war = 0.0;   // accuracy after removing this block alone (percent)
  double drop = 0.0;  // baseline_war - war
};

/// Single-block removal results. Drops are derived, never ingested.
struct OracleTable {
  double baseline_war = 0.0;
  std::map<int, OracleEntry> per_block;

  std::map<int, double> drops() const;
};

/// CSV with header `block_id,war`; the row with block_id 0 is the unpruned
/// baseline. Errors: ParseError, DuplicateOracleRow, NoBaseline.
OracleTable parse_oracle_csv(std::string_view text);
OracleTable load_oracle(const std::filesystem::path& path);

/// 1-based ascending ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rho on average ranks: 1 - 6 sum d^2 / (n (n^2 - 1)) when tie-free,
/// Pearson correlation of the average ranks otherwise. NaN when either side
/// is constant. Throws ShapeError on length mismatch or n < 2.
double spearman(std::span<const double> a, std::span<const double> b);

/// Kendall tau-b over all pairs (equals tau-a without ties). NaN when either
/// side is constant. Throws ShapeError like spearman.
double kendall(std::span<const double> a, std::span<const double> b);

struct RankRow {
  int block = 0;
  double score = 0.0;
  int criterion_rank = 0;
  double oracle_drop = 0.0;
  int oracle_rank = 0;
};

struct RankComparison {
  std::string criterion;
  double spearman_rho = 0.0;
  double kendall_tau = 0.0;
  std::map<int, double> top_k_most;   // k -> |agreement among the k most important| / k
  std::map<int, double> top_k_least;  // same over the k least important
  std::vector<RankRow> rank_table;
};

/// Coefficients use average ranks of the importance implied by each table
/// (so ties are handled); top-k overlaps use the tie-broken ranks. Errors:
/// ShapeError (oracle has blocks beyond L), IncompleteOracle, InvalidArgument
/// (k outside 1..L).
RankComparison compare(const ScoreTable& criterion, const OracleTable& oracle, const std::vector<int>& ks);

}  // namespace gardener
