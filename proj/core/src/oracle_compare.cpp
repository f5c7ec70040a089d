#include "gardener/oracle_compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "gardener/csv.hpp"
#include "gardener/error.hpp"
#include "gardener/fileio.hpp"

namespace gardener {

std::map<int, double> OracleTable::drops() const {
  std::map<int, double> out;
  for (const auto& [b, e] : per_block) out.emplace(b, e.drop);
  return out;
}

OracleTable parse_oracle_csv(std::string_view text) {
  const CsvTable csv = parse_csv(text);
  const int id_col = csv.column("block_id");
  const int war_col = csv.column("war");
  if (id_col < 0 || war_col < 0) fail(ErrorCode::ParseError, "oracle CSV needs a header with block_id and war");

  std::map<long long, double> wars;
  for (const auto& row : csv.rows) {
    if (row.size() != csv.header.size()) fail(ErrorCode::ParseError, "oracle CSV row has the wrong number of fields");
    const long long id = parse_integer(row[static_cast<std::size_t>(id_col)], "oracle block_id");
    const double war = parse_double(row[static_cast<std::size_t>(war_col)], "oracle war");
    if (id < 0) fail(ErrorCode::ParseError, "oracle block_id must be >= 0");
    if (!wars.emplace(id, war).second) {
      fail(ErrorCode::DuplicateOracleRow, "block " + std::to_string(id) + " appears more than once");
    }
  }
  auto base = wars.find(0);
  if (base == wars.end()) fail(ErrorCode::NoBaseline, "oracle CSV has no baseline row (block_id 0)");

  OracleTable table;
  table.baseline_war = base->second;
  for (const auto& [id, war] : wars) {
    if (id == 0) continue;
    table.per_block.emplace(static_cast<int>(id), OracleEntry{war, table.baseline_war - war});
  }
  return table;
}

OracleTable load_oracle(const std::filesystem::path& path) { return parse_oracle_csv(read_text_file(path)); }

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::ShapeError, "rank vectors differ in length (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) fail(ErrorCode::ShapeError, "rank correlation needs at least two entries");
}

bool has_ties(std::span<const double> ranks) {
  std::vector<double> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  if (!has_ties(ra) && !has_ties(rb)) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
  }
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return cov / std::sqrt(va * vb);
}

double kendall(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0 && db == 0.0) {
        ++ties_a;
        ++ties_b;
      } else if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0) == (db > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double pairs = static_cast<double>(a.size()) * static_cast<double>(a.size() - 1) / 2.0;
  const double denom = std::sqrt((pairs - static_cast<double>(ties_a)) * (pairs - static_cast<double>(ties_b)));
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(concordant - discordant) / denom;
}

namespace {

// Larger value = more important, regardless of the table's prune direction.
std::vector<double> importance(const ScoreTable& t) {
  std::vector<double> v = t.raw;
  if (t.direction == PruneDirection::HighestFirst) {
    for (double& x : v) x = -x;
  }
  return v;
}

double overlap(const std::vector<int>& rank_a, const std::vector<int>& rank_b, int k, bool most) {
  const int n = static_cast<int>(rank_a.size());
  auto selected = [&](int r) { return most ? r <= k : r > n - k; };
  int shared = 0;
  for (std::size_t i = 0; i < rank_a.size(); ++i) {
    if (selected(rank_a[i]) && selected(rank_b[i])) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(k);
}

}  // namespace

RankComparison compare(const ScoreTable& criterion, const OracleTable& oracle, const std::vector<int>& ks) {
  const int n = criterion.num_blocks();
  if (!oracle.per_block.empty() && oracle.per_block.rbegin()->first > n) {
    fail(ErrorCode::ShapeError, "oracle covers block " + std::to_string(oracle.per_block.rbegin()->first) +
                                    " but the criterion table has " + std::to_string(n) + " blocks");
  }
  const ScoreTable oracle_table = external_rank(oracle.drops(), n);

  RankComparison out;
  out.criterion = std::string(criterion_name(criterion.criterion));
  const auto ia = importance(criterion);
  const auto ib = importance(oracle_table);
  out.spearman_rho = spearman(ia, ib);
  out.kendall_tau = kendall(ia, ib);
  for (int k : ks) {
    if (k < 1 || k > n) {
      fail(ErrorCode::InvalidArgument, "top-k size " + std::to_string(k) + " outside 1.." + std::to_string(n));
    }
    out.top_k_most[k] = overlap(criterion.rank, oracle_table.rank, k, true);
    out.top_k_least[k] = overlap(criterion.rank, oracle_table.rank, k, false);
  }
  for (int b = 1; b <= n; ++b) {
    const auto i = static_cast<std::size_t>(b - 1);
    out.rank_table.push_back({b, criterion.raw[i], criterion.rank[i], oracle_table.raw[i], oracle_table.rank[i]});
  }
  return out;
}

}  // namespace gardener
