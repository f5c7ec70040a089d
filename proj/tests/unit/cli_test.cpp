#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "gardener/block_partition.hpp"
#include "gardener/fileio.hpp"
#include "gardener/report.hpp"
#include "gardener/tensor_store.hpp"
#include "published.hpp"

namespace gardener {
namespace {

using nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "gardener");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("GARDENER_CONFIG");
    vit = testing::save(testing::synthetic_vit(testing::miniature_spec()), dir, "vit.safetensors");
    entropy = testing::save(testing::distinct_value_checkpoint(testing::published_entropy_counts()), dir,
                            "entropy.safetensors");
    oracle = dir / "oracle.csv";
    write(oracle, testdata::single_block_oracle_csv());
    scores = dir / "scores.csv";
    write(scores, testdata::published_scores_csv());
    measured = dir / "measured.csv";
    write(measured, testdata::multi_block_measured_csv());
  }
  void TearDown() override { unsetenv("GARDENER_CONFIG"); }

  testing::TempDir dir;
  std::filesystem::path vit, entropy, oracle, scores, measured;
};

TEST_F(CliTest, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
  EXPECT_NE(run({"--help"}).out.find("prune"), std::string::npos);
  const Result v = run({"--version"});
  EXPECT_EQ(v.code, cli::kOk);
  EXPECT_EQ(v.out, std::string(tool_version()) + "\n");
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
}

TEST_F(CliTest, InspectCountsBlocks) {
  const Result r = run({"inspect", vit});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out.rfind("L=12\n", 0), 0u);
  const Result j = run({"inspect", vit, "--json", "-"});
  EXPECT_EQ(json::parse(j.out)["model"]["num_blocks"], 12);
}

TEST_F(CliTest, InspectWithWrongPatternEchoesIt) {
  const Result r = run({"--block-pattern", R"(layers\.(\d+)\.)", "inspect", vit});
  EXPECT_EQ(r.code, cli::kInput);
  EXPECT_NE(r.err.find(R"(layers\.(\d+)\.)"), std::string::npos);
  EXPECT_EQ(run({"--block-pattern", "blocks", "inspect", vit}).code, cli::kUsage);
}

TEST_F(CliTest, CorruptOrMissingCheckpoint) {
  const auto bad = dir / "bad.safetensors";
  write(bad, std::string("\xff\xff\xff\xff\xff\xff\xff\x7f{}", 10));
  EXPECT_EQ(run({"inspect", bad}).code, cli::kInput);
  EXPECT_EQ(run({"inspect", dir / "missing.safetensors"}).code, cli::kInput);
}

TEST_F(CliTest, AnalyzeJsonRoundTrips) {
  const auto path = dir / "report.json";
  const Result r = run({"--bins", "32", "analyze", vit, "--json", path});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("L=12"), std::string::npos);
  const std::string text = read_text_file(path);
  EXPECT_EQ(canonical_json(text), text);
  const json j = json::parse(text);
  EXPECT_EQ(j["config"]["bins"], 32);
  EXPECT_EQ(j["criteria"].size(), 11u);
}

TEST_F(CliTest, AnalyzeCsvToStdout) {
  const Result r = run({"analyze", entropy, "--criteria", "entropy,l1", "--csv", "-"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out.rfind("block_id,params,entropy_number_raw", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 13);
  EXPECT_EQ(run({"analyze", entropy, "--criteria", "entropyy"}).code, cli::kUsage);
  EXPECT_EQ(run({"--bins", "0", "analyze", entropy}).code, cli::kUsage);
}

TEST_F(CliTest, PruneByRatio) {
  const auto out = dir / "pruned.safetensors";
  const Result r = run({"prune", entropy, "--criterion", "entropy_number", "--ratio", "0.25", "--out", out});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("removed (3): 10 11 12"), std::string::npos);
  EXPECT_NE(r.out.find("blocks: 12 -> 9"), std::string::npos);
  const Checkpoint pruned = read_checkpoint(out);
  EXPECT_EQ(partition_blocks(pruned, {}).num_blocks(), 9);
  EXPECT_EQ(pruned.metadata().at("gardener.removed_blocks"), "10,11,12");
  EXPECT_EQ(pruned.metadata().at("gardener.criterion"), "entropy_number");
}

TEST_F(CliTest, PruneExplicitBlocksWithPlan) {
  const auto out = dir / "p12.safetensors";
  const auto cost = dir / "cost.json";
  write(cost, R"({"base_flops": 16.18, "per_block_flops": 13.64})");
  const Result r =
      run({"prune", vit, "--blocks", "12", "--out", out, "--plan-json", "-", "--cost-config", cost});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json plan = json::parse(r.out);
  EXPECT_EQ(plan["criterion"], "explicit");
  EXPECT_EQ(plan["removed_blocks"], json({12}));
  EXPECT_NEAR(plan["cost"]["flops_after"].get<double>(), 16.18 + 13.64 * 11, 1e-9);
  const Checkpoint src = read_checkpoint(vit);
  const Checkpoint pruned = read_checkpoint(out);
  for (const auto& ti : pruned.tensors()) EXPECT_EQ(pruned.bytes(ti.name), src.bytes(ti.name)) << ti.name;
}

TEST_F(CliTest, PruneNearlyEverything) {
  const auto out = dir / "one.safetensors";
  const Result r = run({"prune", entropy, "--criterion", "l2", "--ratio", "0.999", "--out", out});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("removed (11)"), std::string::npos);
  EXPECT_EQ(partition_blocks(read_checkpoint(out), {}).num_blocks(), 1);
}

TEST_F(CliTest, PruneUsageErrors) {
  const auto out = dir / "x.safetensors";
  EXPECT_EQ(run({"prune", vit, "--blocks", "13", "--out", out}).code, cli::kUsage);
  EXPECT_EQ(run({"prune", vit, "--criterion", "l1", "--ratio", "1.0", "--out", out}).code, cli::kUsage);
  EXPECT_EQ(run({"prune", vit, "--criterion", "l1", "--ratio", "0.05", "--out", out}).code, cli::kUsage);
  EXPECT_EQ(run({"prune", vit, "--criterion", "l1", "--count", "12", "--out", out}).code, cli::kUsage);
  EXPECT_EQ(run({"prune", vit, "--criterion", "l1", "--out", out}).code, cli::kUsage);
  EXPECT_EQ(run({"prune", vit, "--out", out}).code, cli::kUsage);
  EXPECT_EQ(run({"prune", vit, "--blocks", "1"}).code, cli::kUsage);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST_F(CliTest, RankFromScores) {
  const Result r = run({"rank", "--scores", scores, "--criterion", "entropy", "--ratio", "3/12"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("remove (3): 10 11 12"), std::string::npos);
  const Result j = run({"rank", "--scores", scores, "--criterion", "l1", "--count", "2", "--json", "-"});
  ASSERT_EQ(j.code, cli::kOk) << j.err;
  EXPECT_EQ(json::parse(j.out)["selection"]["count"], 2);
}

TEST_F(CliTest, RankSensitivityAndRandom) {
  const Result s = run({"rank", "--scores", scores, "--criterion", "sensitivity", "--oracle", oracle, "--count", "3"});
  ASSERT_EQ(s.code, cli::kOk) << s.err;
  const Result a = run({"rank", "--scores", scores, "--criterion", "random", "--ratio", "0.25", "--seed", "42"});
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  EXPECT_NE(a.out.find("remove (3): 3 11 12"), std::string::npos);
  EXPECT_EQ(run({"rank", "--scores", scores, "--criterion", "random", "--csv", "-"}).code, cli::kUsage);
}

TEST_F(CliTest, RankErrors) {
  EXPECT_EQ(run({"rank", "--scores", scores, "--criterion", "nope", "--ratio", "0.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"rank", "--scores", scores, "--criterion", "l1", "--ratio", "1.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"rank", "--scores", scores, "--criterion", "entropy_value"}).code, cli::kUsage);
  EXPECT_EQ(run({"rank", "--scores", scores, "--criterion", "sensitivity"}).code, cli::kUsage);
  EXPECT_EQ(run({"rank", "--scores", scores}).code, cli::kUsage);
  EXPECT_EQ(run({"rank", vit, "--scores", scores, "--criterion", "l1"}).code, cli::kUsage);
}

TEST_F(CliTest, CompareScoresWithOracle) {
  const Result r = run({"compare", "--oracle", oracle, "--scores", scores, "--criteria", "entropy", "--json", "-"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["comparisons"][0]["spearman_rho"].get<double>(), 0.7552447552447552, 1e-12);
  const Result all = run({"compare", "--oracle", oracle, "--scores", scores});
  ASSERT_EQ(all.code, cli::kOk) << all.err;
  EXPECT_EQ(std::count(all.out.begin(), all.out.end(), '\n'), 8);
  const Result csv = run({"compare", "--oracle", oracle, "--checkpoint", vit, "--criteria", "l1,l2", "--csv", "-"});
  ASSERT_EQ(csv.code, cli::kOk) << csv.err;
  EXPECT_EQ(csv.out.rfind("block_id,drop,oracle_rank,l1_rank,l2_rank\n", 0), 0u);
}

TEST_F(CliTest, CompareErrors) {
  EXPECT_EQ(run({"compare", "--scores", scores}).code, cli::kUsage);
  EXPECT_EQ(run({"compare", "--oracle", oracle}).code, cli::kUsage);
  EXPECT_EQ(run({"compare", "--oracle", oracle, "--scores", scores, "--k", "13"}).code, cli::kUsage);
  const auto dup = dir / "dup.csv";
  write(dup, "block_id,war\n0,90\n1,80\n1,81\n");
  EXPECT_EQ(run({"compare", "--oracle", dup, "--scores", scores}).code, cli::kInput);
}

TEST_F(CliTest, CurveReproducesEntropySchedule) {
  const Result r = run({"curve", "--scores", scores, "--measured", measured, "--criteria", "entropy_number"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::map<int, std::vector<int>> published;
  for (const auto& s : testdata::published_selections()) {
    if (s.criterion == Criterion::EntropyNumber) published[s.removed] = s.blocks;
  }
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  bool saw_seven = false;
  while (std::getline(lines, line)) {
    ++rows;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    while (f.size() < 7) f.emplace_back();
    const int n = std::stoi(f[1]);
    if (published.count(n)) {
      std::string expect;
      for (int b : published[n]) expect += (expect.empty() ? "" : " ") + std::to_string(b);
      EXPECT_EQ(f[3], expect) << n;
    }
    if (n == 7) {
      saw_seven = true;
      EXPECT_NEAR(std::stod(f[5]), 79.90, 1e-9);
      EXPECT_NEAR(std::stod(f[6]), 11.88, 1e-9);
    }
  }
  EXPECT_EQ(rows, 11);
  EXPECT_TRUE(saw_seven);
}

TEST_F(CliTest, CurveWithOracleAndRandom) {
  const auto path = dir / "curve.csv";
  const Result r = run({"curve", "--scores", scores, "--oracle", oracle, "--criteria", "sensitivity,random",
                        "--ratios", "1/12,0.5", "--seed", "42", "--csv", path});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const std::string text = read_text_file(path);
  EXPECT_NE(text.find("0.5,6,random,"), std::string::npos);
  EXPECT_NE(text.find("0.08333333333333333,1,external,12,"), std::string::npos);
}

TEST_F(CliTest, CurveErrors) {
  EXPECT_EQ(run({"curve", "--scores", scores}).code, cli::kUsage);
  EXPECT_EQ(run({"curve", "--scores", scores, "--criteria", ""}).code, cli::kUsage);
  EXPECT_EQ(run({"curve", "--scores", scores, "--criteria", "l1", "--ratios", "0"}).code, cli::kUsage);
  const auto dup = dir / "dup.csv";
  write(dup, "criterion,removed_count,war\nl1,3,80\nl1,3,81\n");
  EXPECT_EQ(run({"curve", "--scores", scores, "--criteria", "l1", "--measured", dup}).code, cli::kInput);
}

TEST_F(CliTest, ConfigPrecedence) {
  const auto env_cfg = dir / "env.json";
  const auto file_cfg = dir / "file.json";
  write(env_cfg, R"({"bins": 8, "seed": 5})");
  write(file_cfg, R"({"bins": 16})");
  setenv("GARDENER_CONFIG", env_cfg.c_str(), 1);
  auto config_of = [&](std::vector<std::string> pre) {
    pre.insert(pre.end(), {"analyze", vit.string(), "--criteria", "l1", "--json", "-"});
    const Result r = run(pre);
    EXPECT_EQ(r.code, cli::kOk) << r.err;
    return json::parse(r.out)["config"];
  };
  EXPECT_EQ(config_of({})["bins"], 8);
  EXPECT_EQ(config_of({"--config", file_cfg.string()})["bins"], 16);
  EXPECT_EQ(config_of({"--config", file_cfg.string()})["seed"], 5);
  EXPECT_EQ(config_of({"--config", file_cfg.string(), "--bins", "4"})["bins"], 4);
  const auto bad = dir / "bad.json";
  write(bad, R"({"bins": "many"})");
  EXPECT_EQ(run({"--config", bad, "inspect", vit}).code, cli::kInput);
}

}  // namespace
}  // namespace gardener
