#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gardener/block_partition.hpp"
#include "gardener/csv.hpp"
#include "gardener/error.hpp"
#include "gardener/fileio.hpp"
#include "gardener/oracle_compare.hpp"
#include "gardener/pruner.hpp"
#include "gardener/ranking.hpp"
#include "gardener/report.hpp"
#include "gardener/scan.hpp"
#include "gardener/tensor_store.hpp"

namespace gardener::cli {

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::string> pattern;
  std::optional<int> index_base;
  std::optional<int> bins;
  std::optional<std::string> binning;
  std::optional<std::string> log_base;
};

struct Selection {
  std::string criterion;
  std::optional<std::string> ratio;
  std::optional<int> count;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> direction;
  std::string oracle;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidRatio:
    case ErrorCode::EmptySelection:
    case ErrorCode::FullModelPrune:
    case ErrorCode::UnknownCriterion:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidBinCount:
    case ErrorCode::InvalidPattern:
    case ErrorCode::BlockNotFound: return kUsage;
    case ErrorCode::InternalInvariant: return kInternal;
    default: return kInput;
  }
}

ToolConfig effective_config(const GlobalFlags& g) {
  ToolConfig cfg;
  if (const char* env = std::getenv("GARDENER_CONFIG"); env != nullptr && *env != '\0') cfg = load_config(env, cfg);
  if (!g.config.empty()) cfg = load_config(g.config, cfg);
  if (g.pattern) cfg.pattern.regex = *g.pattern;
  if (g.index_base) cfg.pattern.index_base = *g.index_base;
  if (g.bins) {
    if (*g.bins < 1) fail(ErrorCode::InvalidBinCount, "--bins must be >= 1");
    cfg.scoring.bins = *g.bins;
  }
  if (g.binning) cfg.scoring.binning = parse_binning(*g.binning);
  if (g.log_base) {
    if (*g.log_base == "e") {
      cfg.scoring.log_base = LogBase::Nat;
    } else if (*g.log_base == "2") {
      cfg.scoring.log_base = LogBase::Bit;
    } else {
      fail(ErrorCode::InvalidArgument, "--log-base must be 'e' or '2'");
    }
  }
  return cfg;
}

// "0.25", "3/12"
double parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_double(text, "ratio");
  const double num = parse_double(text.substr(0, slash), "ratio numerator");
  const double den = parse_double(text.substr(slash + 1), "ratio denominator");
  if (den == 0.0) fail(ErrorCode::InvalidRatio, "ratio denominator is zero");
  return num / den;
}

void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path == "-") {
    out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

std::vector<Criterion> parse_criteria_list(const std::vector<std::string>& names) {
  std::vector<Criterion> out;
  for (const auto& n : names) {
    if (n == "all") {
      for (Criterion c : weight_criteria()) out.push_back(c);
    } else {
      out.push_back(parse_criterion(n));
    }
  }
  std::vector<Criterion> unique;
  for (Criterion c : out) {
    if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
  }
  return unique;
}

std::string join_ints(const std::vector<int>& v, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

// Precomputed per-block scores: a CSV with a block_id column and one column
// per criterion, named either after the criterion or `<criterion>_raw`.
struct ScoreFile {
  int num_blocks = 0;
  std::map<Criterion, std::vector<double>> raw;
  std::vector<Criterion> order;
};

ScoreFile load_score_file(const std::string& path) {
  const CsvTable csv = parse_csv(read_text_file(path));
  const int id_col = csv.column("block_id");
  if (id_col < 0) fail(ErrorCode::ParseError, path + ": missing block_id column");
  ScoreFile f;
  f.num_blocks = static_cast<int>(csv.rows.size());
  std::vector<int> ids;
  for (const auto& row : csv.rows) {
    const auto id = parse_integer(row.at(static_cast<std::size_t>(id_col)), "block_id");
    if (id < 1 || id > f.num_blocks) {
      fail(ErrorCode::ParseError, path + ": block ids must be 1.." + std::to_string(f.num_blocks));
    }
    ids.push_back(static_cast<int>(id));
  }
  if (std::set<int>(ids.begin(), ids.end()).size() != ids.size()) {
    fail(ErrorCode::ParseError, path + ": duplicate block_id");
  }
  for (std::size_t col = 0; col < csv.header.size(); ++col) {
    std::string name = csv.header[col];
    if (static_cast<int>(col) == id_col) continue;
    if (name.size() > 4 && name.ends_with("_raw")) name.resize(name.size() - 4);
    Criterion c;
    try {
      c = parse_criterion(name);
    } catch (const Error&) {
      continue;  // params, *_normalized, *_rank, ...
    }
    if (c == Criterion::Random || f.raw.count(c)) continue;
    std::vector<double> values(static_cast<std::size_t>(f.num_blocks));
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      values[static_cast<std::size_t>(ids[r] - 1)] = parse_double(csv.rows[r].at(col), csv.header[col]);
    }
    f.raw[c] = std::move(values);
    f.order.push_back(c);
  }
  return f;
}

struct Source {
  std::optional<Checkpoint> ckpt;
  std::optional<BlockModel> model;
  std::optional<ScoreFile> scores;
  std::optional<OracleTable> oracle;
  std::optional<ModelScan> scan;

  int num_blocks() const {
    if (model) return model->num_blocks();
    if (scores) return scores->num_blocks;
    if (oracle && !oracle->per_block.empty()) return oracle->per_block.rbegin()->first;
    fail(ErrorCode::InvalidArgument, "no checkpoint, score file or oracle to take the block count from");
  }
};

Source open_source(const std::string& checkpoint, const std::string& scores, const std::string& oracle,
                   const ToolConfig& cfg) {
  if (!checkpoint.empty() && !scores.empty()) {
    fail(ErrorCode::InvalidArgument, "give either a checkpoint or --scores, not both");
  }
  Source s;
  if (!checkpoint.empty()) {
    s.ckpt = read_checkpoint(checkpoint);
    s.model = partition_blocks(*s.ckpt, cfg.pattern);
  }
  if (!scores.empty()) s.scores = load_score_file(scores);
  if (!oracle.empty()) s.oracle = load_oracle(oracle);
  return s;
}

// Table for one non-random criterion from whatever source is available.
ScoreTable table_for(Source& src, Criterion c, const ToolConfig& cfg) {
  if (c == Criterion::Random) fail(ErrorCode::InvalidArgument, "random has no score table");
  if (c == Criterion::External) {
    if (!src.oracle) fail(ErrorCode::InvalidArgument, "criterion 'external' needs --oracle");
    return external_rank(src.oracle->drops(), src.num_blocks());
  }
  if (src.scores) {
    auto it = src.scores->raw.find(c);
    if (it == src.scores->raw.end()) {
      fail(ErrorCode::InvalidArgument, "score file has no column for '" + std::string(criterion_name(c)) + "'");
    }
    return make_score_table(c, it->second, cfg.direction_for(c));
  }
  if (!src.model) fail(ErrorCode::InvalidArgument, "a checkpoint or --scores is required");
  if (!src.scan || (needs_mutual_information(c) && !src.scan->has_mutual_information)) {
    src.scan = scan_model(*src.model, *src.ckpt, cfg.scoring, needs_mutual_information(c));
  }
  return score_from_scan(*src.scan, c, cfg.direction_for(c));
}

void add_selection_flags(CLI::App* cmd, Selection& sel, bool criterion_required) {
  auto* crit = cmd->add_option("--criterion", sel.criterion, "Ranking criterion (entropy_number, l1, random, ...)");
  if (criterion_required) crit->required();
  auto* ratio = cmd->add_option("--ratio", sel.ratio, "Pruning ratio r in (0,1); a fraction like 3/12 is accepted");
  cmd->add_option("--count", sel.count, "Number of blocks to remove (bypasses the ratio)")->excludes(ratio);
  cmd->add_option("--seed", sel.seed, "Seed for the random baseline");
  cmd->add_option("--direction", sel.direction, "Override the prune direction: lowest | highest");
  cmd->add_option("--oracle", sel.oracle, "Oracle CSV (block_id,war) for the 'sensitivity' criterion");
}

std::optional<PruneSet> select_blocks(Source& src, const Selection& sel, ToolConfig& cfg,
                                      std::optional<ScoreTable>& table) {
  const Criterion c = parse_criterion(sel.criterion);
  if (sel.direction) cfg.directions[c] = parse_direction(*sel.direction);
  if (sel.seed) cfg.seed = *sel.seed;
  const int num_blocks = src.num_blocks();
  if (c != Criterion::Random) table = table_for(src, c, cfg);
  if (!sel.ratio && !sel.count) return std::nullopt;
  const int count = sel.count ? *sel.count : prune_count(parse_ratio(*sel.ratio), num_blocks);
  PruneSet set = c == Criterion::Random ? random_select_count(num_blocks, count, cfg.seed)
                                        : gardener_select_count(*table, count);
  if (sel.ratio) set.ratio = parse_ratio(*sel.ratio);
  return set;
}

// ---------------------------------------------------------------------------

int cmd_inspect(const GlobalFlags& g, const std::string& path, const std::string& json, std::ostream& out) {
  const ToolConfig cfg = effective_config(g);
  const Checkpoint ckpt = read_checkpoint(path);
  const BlockModel model = partition_blocks(ckpt, cfg.pattern);
  if (json != "-") out << inspect_text(model, ckpt);
  if (!json.empty()) emit(json, inspect_json(model, ckpt), out);
  return kOk;
}

struct AnalyzeFlags {
  std::string checkpoint;
  std::vector<std::string> criteria{"all"};
  std::string json;
  std::string csv;
  std::string histograms;
};

int cmd_analyze(const GlobalFlags& g, const AnalyzeFlags& f, std::ostream& out, std::ostream& err) {
  const ToolConfig cfg = effective_config(g);
  const auto criteria = parse_criteria_list(f.criteria);
  if (criteria.empty()) fail(ErrorCode::InvalidArgument, "no criteria given");
  const Checkpoint ckpt = read_checkpoint(f.checkpoint);
  const BlockModel model = partition_blocks(ckpt, cfg.pattern);
  const AnalysisReport report = analyze(ckpt, model, criteria, cfg, f.checkpoint);
  for (const auto& [c, why] : report.unavailable) err << "warning: " << criterion_name(c) << " unavailable: " << why << "\n";
  if (!f.json.empty()) emit(f.json, report_json(report), out);
  if (!f.csv.empty()) emit(f.csv, report_scores_csv(report), out);
  if (!f.histograms.empty()) emit(f.histograms, report_histogram_csv(report), out);
  if (f.json != "-" && f.csv != "-" && f.histograms != "-") {
    out << "L=" << model.num_blocks() << " params=" << model.total_params() << " passes=" << report.scan.passes
        << "\n";
    for (const auto& t : report.tables) {
      out << criterion_name(t.criterion) << " (" << direction_name(t.direction)
          << ") prune order: " << join_ints(t.pruning_order()) << "\n";
    }
  }
  return kOk;
}

struct RankFlags {
  std::string checkpoint;
  std::string scores;
  Selection sel;
  std::string json;
  std::string csv;
};

int cmd_rank(const GlobalFlags& g, const RankFlags& f, std::ostream& out) {
  ToolConfig cfg = effective_config(g);
  Source src = open_source(f.checkpoint, f.scores, f.sel.oracle, cfg);
  std::optional<ScoreTable> table;
  const auto set = select_blocks(src, f.sel, cfg, table);
  if (!f.json.empty()) emit(f.json, selection_json(table, set, cfg), out);
  if (!f.csv.empty()) {
    if (!table) fail(ErrorCode::InvalidArgument, "random has no score table to write as CSV");
    emit(f.csv, score_table_csv(*table), out);
  }
  if (f.json != "-" && f.csv != "-") {
    if (table) out << score_table_text(*table);
    if (set) out << "remove (" << set->block_ids.size() << "): " << join_ints(set->block_ids) << "\n";
  }
  return kOk;
}

struct PruneFlags {
  std::string checkpoint;
  Selection sel;
  std::vector<int> blocks;
  std::string out;
  std::string plan_json;
  std::string cost_config;
};

int cmd_prune(const GlobalFlags& g, const PruneFlags& f, std::ostream& out) {
  ToolConfig cfg = effective_config(g);
  Source src = open_source(f.checkpoint, "", f.sel.oracle, cfg);
  const BlockModel& model = *src.model;
  PruneSet set;
  if (!f.blocks.empty()) {
    if (!f.sel.criterion.empty()) fail(ErrorCode::InvalidArgument, "--blocks and --criterion are exclusive");
    set.block_ids = f.blocks;
    std::sort(set.block_ids.begin(), set.block_ids.end());
    set.block_ids.erase(std::unique(set.block_ids.begin(), set.block_ids.end()), set.block_ids.end());
    set.criterion = "explicit";
    set.ratio = static_cast<double>(set.block_ids.size()) / static_cast<double>(model.num_blocks());
  } else {
    if (f.sel.criterion.empty()) fail(ErrorCode::InvalidArgument, "give --blocks or --criterion");
    if (!f.sel.ratio && !f.sel.count) fail(ErrorCode::InvalidArgument, "--criterion needs --ratio or --count");
    std::optional<ScoreTable> table;
    set = *select_blocks(src, f.sel, cfg, table);
  }
  const PruningPlan plan = make_plan(model, set);
  std::optional<CostConfig> cost_cfg = cfg.cost;
  if (!f.cost_config.empty()) cost_cfg = parse_cost_config_json(read_text_file(f.cost_config));
  std::optional<CostEstimate> cost;
  if (cost_cfg) cost = estimate_cost(model, plan.remove, *cost_cfg);

  const Checkpoint pruned = apply_plan(*src.ckpt, plan, {set.criterion, set.ratio, std::string(tool_version())});
  write_checkpoint(pruned, f.out);
  if (!f.plan_json.empty()) emit(f.plan_json, plan_json(plan, set, cost), out);
  if (f.plan_json != "-") {
    out << "removed (" << plan.remove.size() << "): " << join_ints(plan.remove) << "\n";
    out << "blocks: " << model.num_blocks() << " -> " << plan.kept_blocks << "\n";
    out << "params: " << model.total_params() << " -> " << pruned.total_elements() << "\n";
    if (cost) {
      out << "flops: " << format_double(cost->flops_before) << " -> " << format_double(cost->flops_after) << "\n";
    }
    out << "wrote " << f.out << "\n";
  }
  return kOk;
}

struct CompareFlags {
  std::string oracle;
  std::string checkpoint;
  std::string scores;
  std::vector<std::string> criteria;
  std::vector<int> ks{1, 3, 5};
  std::string json;
  std::string csv;
};

int cmd_compare(const GlobalFlags& g, const CompareFlags& f, std::ostream& out, std::ostream& err) {
  const ToolConfig cfg = effective_config(g);
  if (f.checkpoint.empty() && f.scores.empty()) fail(ErrorCode::InvalidArgument, "give a checkpoint or --scores");
  Source src = open_source(f.checkpoint, f.scores, f.oracle, cfg);
  std::vector<Criterion> criteria;
  if (!f.criteria.empty()) {
    criteria = parse_criteria_list(f.criteria);
  } else if (src.scores) {
    criteria = src.scores->order;
  } else {
    criteria = weight_criteria();
  }
  std::vector<RankComparison> results;
  for (Criterion c : criteria) {
    if (c == Criterion::Random || c == Criterion::External) {
      fail(ErrorCode::InvalidArgument, "cannot compare '" + std::string(criterion_name(c)) + "' with the oracle");
    }
    try {
      results.push_back(compare(table_for(src, c, cfg), *src.oracle, f.ks));
    } catch (const Error& e) {
      const bool degenerate = e.code() == ErrorCode::DegenerateKurtosis || e.code() == ErrorCode::DegenerateMagnitude;
      if (!degenerate || !f.criteria.empty()) throw;
      err << "warning: " << criterion_name(c) << " unavailable: " << e.what() << "\n";
    }
  }
  if (results.empty()) fail(ErrorCode::InvalidArgument, "no criteria to compare");
  if (!f.json.empty()) emit(f.json, comparison_json(results, *src.oracle, cfg), out);
  if (!f.csv.empty()) emit(f.csv, comparison_csv(results), out);
  if (f.json != "-" && f.csv != "-") {
    for (const auto& r : results) {
      out << r.criterion << ": spearman=" << format_double(r.spearman_rho) << " kendall=" << format_double(r.kendall_tau);
      for (const auto& [k, v] : r.top_k_least) out << " least@" << k << "=" << format_double(v);
      out << "\n";
    }
  }
  return kOk;
}

struct CurveFlags {
  std::string checkpoint;
  std::string scores;
  std::string oracle;
  std::string measured;
  std::vector<std::string> criteria;
  std::vector<std::string> ratios;
  std::optional<std::uint64_t> seed;
  std::string csv;
};

// criterion,removed_count,war; a row with removed_count 0 is the baseline.
struct Measurements {
  std::optional<double> baseline;
  std::map<std::pair<Criterion, int>, double> war;
};

Measurements load_measurements(const std::string& path) {
  const CsvTable csv = parse_csv(read_text_file(path));
  const int c_col = csv.column("criterion");
  const int n_col = csv.column("removed_count");
  const int w_col = csv.column("war");
  if (c_col < 0 || n_col < 0 || w_col < 0) {
    fail(ErrorCode::ParseError, path + ": header must contain criterion,removed_count,war");
  }
  Measurements m;
  for (const auto& row : csv.rows) {
    const auto n = parse_integer(row.at(static_cast<std::size_t>(n_col)), "removed_count");
    const double war = parse_double(row.at(static_cast<std::size_t>(w_col)), "war");
    if (n == 0) {
      m.baseline = war;
      continue;
    }
    const Criterion c = parse_criterion(row.at(static_cast<std::size_t>(c_col)));
    if (!m.war.emplace(std::make_pair(c, static_cast<int>(n)), war).second) {
      fail(ErrorCode::DuplicateOracleRow, path + ": duplicate measurement for " + row.at(static_cast<std::size_t>(c_col)) +
                                              " at " + std::to_string(n) + " blocks");
    }
  }
  return m;
}

int cmd_curve(const GlobalFlags& g, const CurveFlags& f, std::ostream& out) {
  ToolConfig cfg = effective_config(g);
  if (f.seed) cfg.seed = *f.seed;
  const auto criteria = parse_criteria_list(f.criteria);
  if (criteria.empty()) fail(ErrorCode::InvalidArgument, "no criteria given");
  Source src = open_source(f.checkpoint, f.scores, f.oracle, cfg);
  const int num_blocks = src.num_blocks();
  std::optional<Measurements> measured;
  if (!f.measured.empty()) measured = load_measurements(f.measured);
  std::optional<double> baseline;
  if (measured && measured->baseline) {
    baseline = measured->baseline;
  } else if (src.oracle) {
    baseline = src.oracle->baseline_war;
  }

  std::vector<double> ratios;
  for (const auto& r : f.ratios) ratios.push_back(parse_ratio(r));
  if (ratios.empty()) {
    for (int k = 1; k < num_blocks; ++k) ratios.push_back(static_cast<double>(k) / num_blocks);
  }

  std::map<Criterion, ScoreTable> tables;
  for (Criterion c : criteria) {
    if (c != Criterion::Random) tables.emplace(c, table_for(src, c, cfg));
  }
  std::vector<CurveRow> rows;
  for (double ratio : ratios) {
    const int count = prune_count(ratio, num_blocks);
    for (Criterion c : criteria) {
      const PruneSet set = c == Criterion::Random ? random_select_count(num_blocks, count, cfg.seed)
                                                  : gardener_select_count(tables.at(c), count);
      CurveRow row;
      row.ratio = ratio;
      row.removed_count = count;
      row.criterion = std::string(criterion_name(c));
      row.blocks = set.block_ids;
      if (src.oracle) {
        const auto drops = src.oracle->drops();
        double sum = 0.0;
        bool complete = true;
        for (int b : row.blocks) {
          auto it = drops.find(b);
          if (it == drops.end()) {
            complete = false;
            break;
          }
          sum += it->second;
        }
        if (complete) row.single_block_drop_sum = sum;
      }
      if (measured) {
        auto it = measured->war.find({c, count});
        if (it != measured->war.end()) {
          row.measured_war = it->second;
          if (baseline) row.delta = *baseline - it->second;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  const std::string text = curve_csv(rows);
  if (f.csv.empty() || f.csv == "-") {
    out << text;
  } else {
    write_file_atomic(f.csv, text);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-free block pruning for transformer checkpoints", "gardener"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "JSON config file (defaults to $GARDENER_CONFIG)");
  app.add_option("--block-pattern", g.pattern, "Regex with one capture group locating the block index");
  app.add_option("--index-base", g.index_base, "Block numbering used by the checkpoint (0 or 1)");
  app.add_option("--bins", g.bins, "Histogram bin count K");
  app.add_option("--binning", g.binning, "Histogram range: block | global");
  app.add_option("--log-base", g.log_base, "Logarithm base for entropies: e | 2");

  std::string inspect_path;
  std::string inspect_json_path;
  auto* inspect = app.add_subcommand("inspect", "Show the block partition of a checkpoint");
  inspect->add_option("checkpoint", inspect_path)->required();
  inspect->add_option("--json", inspect_json_path, "Write the model summary as JSON ('-' for stdout)");

  AnalyzeFlags af;
  auto* analyze_cmd = app.add_subcommand("analyze", "Score every block under the requested criteria");
  analyze_cmd->add_option("checkpoint", af.checkpoint)->required();
  analyze_cmd->add_option("--criteria", af.criteria, "Comma separated criteria or 'all'")->delimiter(',');
  analyze_cmd->add_option("--json", af.json, "Analysis report JSON");
  analyze_cmd->add_option("--csv", af.csv, "Per-block score CSV");
  analyze_cmd->add_option("--histograms", af.histograms, "Per-block histogram CSV");

  RankFlags rf;
  auto* rank = app.add_subcommand("rank", "Rank blocks under one criterion and select blocks to remove");
  rank->add_option("checkpoint", rf.checkpoint);
  rank->add_option("--scores", rf.scores, "Per-block score CSV instead of a checkpoint");
  add_selection_flags(rank, rf.sel, true);
  rank->add_option("--json", rf.json, "Score table and selection as JSON");
  rank->add_option("--csv", rf.csv, "Score table as CSV");

  PruneFlags pf;
  auto* prune = app.add_subcommand("prune", "Remove blocks and write the pruned checkpoint");
  prune->add_option("checkpoint", pf.checkpoint)->required();
  add_selection_flags(prune, pf.sel, false);
  prune->add_option("--blocks", pf.blocks, "Explicit block ids to remove, e.g. 10,11,12")->delimiter(',');
  prune->add_option("--out", pf.out, "Output checkpoint path")->required();
  prune->add_option("--plan-json", pf.plan_json, "Write the pruning plan as JSON");
  prune->add_option("--cost-config", pf.cost_config, "JSON cost model: base_flops, per_block_flops, bytes_per_param");

  CompareFlags cf;
  auto* compare_cmd = app.add_subcommand("compare", "Compare criterion rankings with an oracle table");
  compare_cmd->add_option("--oracle", cf.oracle, "Oracle CSV: block_id,war (block 0 = baseline)")->required();
  compare_cmd->add_option("--checkpoint", cf.checkpoint, "Checkpoint to score");
  compare_cmd->add_option("--scores", cf.scores, "Per-block score CSV");
  compare_cmd->add_option("--criteria", cf.criteria, "Comma separated criteria or 'all'")->delimiter(',');
  compare_cmd->add_option("--k", cf.ks, "Top-k sizes, e.g. 1,3,5")->delimiter(',');
  compare_cmd->add_option("--json", cf.json, "Comparison report JSON");
  compare_cmd->add_option("--csv", cf.csv, "Ranking table CSV");

  CurveFlags vf;
  auto* curve = app.add_subcommand("curve", "Selection schedule over a range of pruning ratios");
  curve->add_option("--checkpoint", vf.checkpoint, "Checkpoint to score");
  curve->add_option("--scores", vf.scores, "Per-block score CSV");
  curve->add_option("--oracle", vf.oracle, "Oracle CSV for 'sensitivity' and drop sums");
  curve->add_option("--measured", vf.measured, "Measured accuracy CSV: criterion,removed_count,war");
  curve->add_option("--criteria", vf.criteria, "Comma separated criteria")->delimiter(',')->required();
  curve->add_option("--ratios", vf.ratios, "Comma separated ratios, e.g. 1/12,3/12,0.5")->delimiter(',');
  curve->add_option("--seed", vf.seed, "Seed for the random baseline");
  curve->add_option("--csv", vf.csv, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'gardener --help' for usage\n";
    return kUsage;
  }

  try {
    if (*inspect) return cmd_inspect(g, inspect_path, inspect_json_path, out);
    if (*analyze_cmd) return cmd_analyze(g, af, out, err);
    if (*rank) return cmd_rank(g, rf, out);
    if (*prune) return cmd_prune(g, pf, out);
    if (*compare_cmd) return cmd_compare(g, cf, out, err);
    if (*curve) return cmd_curve(g, vf, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace gardener::cli
