#include "gardener/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gardener/error.hpp"
#include "gardener/stats.hpp"

namespace gardener {

std::string_view criterion_name(Criterion c) noexcept {
  switch (c) {
    case Criterion::EntropyNumber: return "entropy_number";
    case Criterion::EntropyValue: return "entropy_value";
    case Criterion::MiNumber: return "mi_number";
    case Criterion::MiValue: return "mi_value";
    case Criterion::Mean: return "mean";
    case Criterion::Variance: return "variance";
    case Criterion::Std: return "std";
    case Criterion::L1: return "l1";
    case Criterion::L2: return "l2";
    case Criterion::Max: return "max";
    case Criterion::Kurtosis: return "kurtosis";
    case Criterion::Random: return "random";
    case Criterion::External: return "external";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  static const std::map<std::string_view, Criterion> kNames = {
      {"entropy_number", Criterion::EntropyNumber},
      {"entropy", Criterion::EntropyNumber},
      {"information_entropy", Criterion::EntropyNumber},
      {"entropy_value", Criterion::EntropyValue},
      {"mi_number", Criterion::MiNumber},
      {"mi_value", Criterion::MiValue},
      {"mutual_information", Criterion::MiValue},
      {"mean", Criterion::Mean},
      {"variance", Criterion::Variance},
      {"std", Criterion::Std},
      {"l1", Criterion::L1},
      {"l2", Criterion::L2},
      {"max", Criterion::Max},
      {"kurtosis", Criterion::Kurtosis},
      {"random", Criterion::Random},
      {"external", Criterion::External},
      {"sensitivity", Criterion::External},
  };
  auto it = kNames.find(name);
  if (it == kNames.end()) fail(ErrorCode::UnknownCriterion, "unknown criterion '" + std::string(name) + "'");
  return it->second;
}

std::string_view direction_name(PruneDirection d) noexcept {
  return d == PruneDirection::LowestFirst ? "lowest_first" : "highest_first";
}

PruneDirection parse_direction(std::string_view name) {
  if (name == "lowest" || name == "lowest_first") return PruneDirection::LowestFirst;
  if (name == "highest" || name == "highest_first") return PruneDirection::HighestFirst;
  fail(ErrorCode::InvalidArgument, "prune direction must be 'lowest' or 'highest', got '" + std::string(name) + "'");
}

PruneDirection default_direction(Criterion c) noexcept {
  return c == Criterion::Kurtosis ? PruneDirection::HighestFirst : PruneDirection::LowestFirst;
}

const std::vector<Criterion>& weight_criteria() {
  static const std::vector<Criterion> kAll = {
      Criterion::EntropyNumber, Criterion::EntropyValue, Criterion::MiNumber, Criterion::MiValue,
      Criterion::Mean,          Criterion::Variance,     Criterion::Std,      Criterion::L1,
      Criterion::L2,            Criterion::Max,          Criterion::Kurtosis,
  };
  return kAll;
}

// ---------------------------------------------------------------------------

std::vector<int> ScoreTable::pruning_order() const {
  std::vector<int> order(raw.size());
  std::iota(order.begin(), order.end(), 1);
  const bool lowest = direction == PruneDirection::LowestFirst;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = raw[static_cast<std::size_t>(a - 1)];
    const double sb = raw[static_cast<std::size_t>(b - 1)];
    if (sa != sb) return lowest ? sa < sb : sa > sb;
    return a > b;
  });
  return order;
}

ScoreTable make_score_table(Criterion criterion, std::vector<double> raw, PruneDirection direction) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::isnan(raw[i])) {
      fail(ErrorCode::InvalidArgument, std::string(criterion_name(criterion)) + " score of block " +
                                           std::to_string(i + 1) + " is NaN");
    }
  }
  ScoreTable t;
  t.criterion = criterion;
  t.direction = direction;
  t.normalized = minmax_normalize(raw);
  t.raw = std::move(raw);
  const int num_blocks = t.num_blocks();
  t.rank.assign(t.raw.size(), 0);
  const auto order = t.pruning_order();
  for (int pos = 0; pos < num_blocks; ++pos) {
    t.rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)] - 1)] = num_blocks - pos;
  }
  return t;
}

ScoreTable make_score_table(Criterion criterion, std::vector<double> raw) {
  return make_score_table(criterion, std::move(raw), default_direction(criterion));
}

// ---------------------------------------------------------------------------

int prune_count(double ratio, int num_blocks) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    fail(ErrorCode::InvalidRatio, "pruning ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  const auto count = static_cast<int>(std::floor(ratio * static_cast<double>(num_blocks)));
  if (count <= 0) {
    fail(ErrorCode::EmptySelection, "floor(" + std::to_string(ratio) + " * " + std::to_string(num_blocks) +
                                        ") = 0 blocks to prune");
  }
  if (count >= num_blocks) fail(ErrorCode::FullModelPrune, "refusing to prune every block");
  return count;
}

namespace {

void check_count(int count, int num_blocks) {
  if (count <= 0) fail(ErrorCode::EmptySelection, "prune count must be at least 1");
  if (count >= num_blocks) fail(ErrorCode::FullModelPrune, "refusing to prune every block");
}

}  // namespace

PruneSet gardener_select_count(const ScoreTable& table, int count) {
  check_count(count, table.num_blocks());
  auto order = table.pruning_order();
  order.resize(static_cast<std::size_t>(count));
  std::sort(order.begin(), order.end());
  PruneSet s;
  s.block_ids = std::move(order);
  s.ratio = static_cast<double>(count) / static_cast<double>(table.num_blocks());
  s.criterion = std::string(criterion_name(table.criterion));
  return s;
}

PruneSet gardener_select(const ScoreTable& table, double ratio) {
  PruneSet s = gardener_select_count(table, prune_count(ratio, table.num_blocks()));
  s.ratio = ratio;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Xorshift64Star::Xorshift64Star(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
}

std::uint64_t Xorshift64Star::next() noexcept {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1Dull;
}

std::uint64_t Xorshift64Star::below(std::uint64_t bound) noexcept {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % bound;
  }
}

PruneSet random_select_count(int num_blocks, int count, std::uint64_t seed) {
  check_count(count, num_blocks);
  std::vector<int> ids(static_cast<std::size_t>(num_blocks));
  std::iota(ids.begin(), ids.end(), 1);
  Xorshift64Star rng(seed);
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(count));
  std::sort(ids.begin(), ids.end());
  PruneSet s;
  s.block_ids = std::move(ids);
  s.ratio = static_cast<double>(count) / static_cast<double>(num_blocks);
  s.criterion = "random";
  s.seed = seed;
  return s;
}

PruneSet random_select(int num_blocks, double ratio, std::uint64_t seed) {
  PruneSet s = random_select_count(num_blocks, prune_count(ratio, num_blocks), seed);
  s.ratio = ratio;
  return s;
}

ScoreTable external_rank(const std::map<int, double>& drops, int num_blocks) {
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(std::max(num_blocks, 0)));
  for (int b = 1; b <= num_blocks; ++b) {
    auto it = drops.find(b);
    if (it == drops.end()) fail(ErrorCode::IncompleteOracle, "oracle has no entry for block " + std::to_string(b));
    raw.push_back(it->second);
  }
  for (const auto& [b, _] : drops) {
    if (b < 1 || b > num_blocks) {
      fail(ErrorCode::IncompleteOracle, "oracle block " + std::to_string(b) + " is outside 1.." +
                                            std::to_string(num_blocks));
    }
  }
  return make_score_table(Criterion::External, std::move(raw), PruneDirection::LowestFirst);
}

}  // namespace gardener
