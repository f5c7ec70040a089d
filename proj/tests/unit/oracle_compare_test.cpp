#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gardener/error.hpp"
#include "gardener/oracle_compare.hpp"
#include "published.hpp"

namespace gardener {
namespace {

namespace td = testdata;

template <class Fn>
ErrorCode code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::InternalInvariant;
}

std::vector<double> as_doubles(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

TEST(OracleTable, ParsesSingleBlockResults) {
  const OracleTable t = parse_oracle_csv(td::single_block_oracle_csv());
  EXPECT_DOUBLE_EQ(t.baseline_war, 91.78);
  ASSERT_EQ(t.per_block.size(), 12u);
  EXPECT_DOUBLE_EQ(t.per_block.at(1).war, 46.73);
  EXPECT_NEAR(t.per_block.at(1).drop, 45.05, 1e-9);
  EXPECT_NEAR(t.drops().at(12), 0.49, 1e-9);
}

TEST(OracleTable, ToleratesWhitespaceAndBlankLines) {
  const OracleTable t = parse_oracle_csv("block_id, war\r\n0, 90\n\n2,80\n1 ,85\n");
  EXPECT_DOUBLE_EQ(t.per_block.at(2).drop, 10.0);
  EXPECT_DOUBLE_EQ(t.per_block.at(1).drop, 5.0);
}

TEST(OracleTable, Errors) {
  EXPECT_EQ(code_of([] { parse_oracle_csv("block_id,war\n0,90\n1,80\n1,81\n"); }), ErrorCode::DuplicateOracleRow);
  EXPECT_EQ(code_of([] { parse_oracle_csv("block_id,war\n1,80\n"); }), ErrorCode::NoBaseline);
  EXPECT_EQ(code_of([] { parse_oracle_csv("block,war\n0,80\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_oracle_csv("block_id,war\n0,abc\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_oracle_csv("block_id,war\n0,80,1\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_oracle_csv("block_id,war\n-1,80\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_oracle_csv(""); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { load_oracle("/nonexistent/oracle.csv"); }), ErrorCode::IoError);
}

TEST(RankCorrelation, AverageRanks) {
  const std::vector<double> v = {10, 20, 20, 5};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(RankCorrelation, FrozenTieCase) {
  // tests/oracles/derive_expected.py
  const auto a = as_doubles({1, 2, 2, 3, 5, 5});
  const auto b = as_doubles({2, 1, 3, 3, 4, 6});
  EXPECT_NEAR(spearman(a, b), 0.8508410434878083, 1e-12);
  EXPECT_NEAR(kendall(a, b), 0.7412493166611012, 1e-12);
}

TEST(RankCorrelation, PerfectAndReversed) {
  const auto a = as_doubles({1, 2, 3, 4, 5});
  const auto r = as_doubles({5, 4, 3, 2, 1});
  EXPECT_DOUBLE_EQ(spearman(a, a), 1.0);
  EXPECT_DOUBLE_EQ(kendall(a, a), 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, r), -1.0);
  EXPECT_DOUBLE_EQ(kendall(a, r), -1.0);
}

TEST(RankCorrelation, ConstantSideIsNaN) {
  const auto a = as_doubles({1, 2, 3});
  const auto c = as_doubles({7, 7, 7});
  EXPECT_TRUE(std::isnan(spearman(a, c)));
  EXPECT_TRUE(std::isnan(kendall(c, a)));
}

TEST(RankCorrelation, ShapeErrors) {
  const auto a = as_doubles({1, 2, 3});
  const auto b = as_doubles({1, 2});
  const auto one = as_doubles({1});
  EXPECT_EQ(code_of([&] { spearman(a, b); }), ErrorCode::ShapeError);
  EXPECT_EQ(code_of([&] { kendall(a, b); }), ErrorCode::ShapeError);
  EXPECT_EQ(code_of([&] { spearman(one, one); }), ErrorCode::ShapeError);
}

double naive_spearman(const std::vector<int>& p, const std::vector<int>& q) {
  const double n = static_cast<double>(p.size());
  double d2 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) d2 += (p[i] - q[i]) * (p[i] - q[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1));
}

double naive_kendall(const std::vector<int>& p, const std::vector<int>& q) {
  int concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const int s = (p[i] - p[j]) * (q[i] - q[j]);
      (s > 0 ? concordant : discordant)++;
    }
  }
  return static_cast<double>(concordant - discordant) / (concordant + discordant);
}

TEST(RankCorrelation, MatchesPairCountingOnPermutations) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 5;
    std::vector<int> p(static_cast<std::size_t>(n)), q(p.size());
    std::iota(p.begin(), p.end(), 1);
    std::iota(q.begin(), q.end(), 1);
    std::shuffle(p.begin(), p.end(), rng);
    std::shuffle(q.begin(), q.end(), rng);
    const std::vector<double> a(p.begin(), p.end()), b(q.begin(), q.end());
    ASSERT_NEAR(spearman(a, b), naive_spearman(p, q), 1e-12);
    ASSERT_NEAR(kendall(a, b), naive_kendall(p, q), 1e-12);
    ASSERT_NEAR(spearman(a, b), spearman(b, a), 1e-15);
  }
}

TEST(RankCorrelation, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(10), b(10), ea(10);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = nd(rng);
      b[i] = nd(rng);
      ea[i] = std::exp(a[i]);
    }
    ASSERT_NEAR(spearman(a, b), spearman(ea, b), 1e-12);
    ASSERT_NEAR(kendall(a, b), kendall(ea, b), 1e-12);
  }
}

TEST(Compare, EntropyAgainstSensitivity) {
  const OracleTable oracle = parse_oracle_csv(td::single_block_oracle_csv());
  const ScoreTable entropy = td::published_score_table(Criterion::EntropyNumber);
  const RankComparison c = compare(entropy, oracle, {1, 3, 5});
  // tests/oracles/derive_expected.py
  EXPECT_NEAR(c.spearman_rho, 0.7552447552447552, 1e-12);
  EXPECT_NEAR(c.kendall_tau, 0.6666666666666666, 1e-12);
  ASSERT_EQ(c.rank_table.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(c.rank_table[i].block, static_cast<int>(i) + 1);
    EXPECT_EQ(c.rank_table[i].oracle_rank, td::kSensitivityRank[i]);
    EXPECT_EQ(c.rank_table[i].criterion_rank, td::kEntropyRank[i]);
  }
  EXPECT_EQ(c.criterion, "entropy_number");
  EXPECT_DOUBLE_EQ(c.top_k_most.at(1), 1.0);  // block 1 is the most important for both
  for (const auto& [k, v] : c.top_k_least) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Compare, SelfComparisonIsPerfect) {
  const OracleTable oracle = parse_oracle_csv(td::single_block_oracle_csv());
  const ScoreTable sens = external_rank(oracle.drops(), 12);
  const RankComparison c = compare(sens, oracle, {1, 6, 12});
  EXPECT_DOUBLE_EQ(c.spearman_rho, 1.0);
  EXPECT_DOUBLE_EQ(c.kendall_tau, 1.0);
  for (const auto& [k, v] : c.top_k_most) EXPECT_DOUBLE_EQ(v, 1.0);
  for (const auto& [k, v] : c.top_k_least) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Compare, HighestFirstCriterionUsesImportanceOrder) {
  const OracleTable oracle = parse_oracle_csv(td::single_block_oracle_csv());
  std::vector<double> raw;
  for (int r : td::kSensitivityRank) raw.push_back(r);  // larger means less important under highest_first
  const ScoreTable t = make_score_table(Criterion::Kurtosis, raw);
  EXPECT_DOUBLE_EQ(compare(t, oracle, {1}).spearman_rho, 1.0);
}

TEST(Compare, Errors) {
  const OracleTable oracle = parse_oracle_csv(td::single_block_oracle_csv());
  const ScoreTable entropy = td::published_score_table(Criterion::EntropyNumber);
  EXPECT_EQ(code_of([&] { compare(entropy, oracle, {0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { compare(entropy, oracle, {13}); }), ErrorCode::InvalidArgument);
  OracleTable partial = oracle;
  partial.per_block.erase(4);
  EXPECT_EQ(code_of([&] { compare(entropy, partial, {1}); }), ErrorCode::IncompleteOracle);
  OracleTable extra = oracle;
  extra.per_block[13] = {90.0, 1.78};
  EXPECT_EQ(code_of([&] { compare(entropy, extra, {1}); }), ErrorCode::ShapeError);
}

}  // namespace
}  // namespace gardener
