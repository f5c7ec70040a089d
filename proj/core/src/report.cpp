#include "gardener/report.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gardener/csv.hpp"
#include "gardener/error.hpp"
#include "gardener/fileio.hpp"

#ifndef GARDENER_VERSION
#define GARDENER_VERSION "0.0.0"
#endif

namespace gardener {

using ordered_json = nlohmann::ordered_json;

std::string_view tool_version() noexcept { return GARDENER_VERSION; }

PruneDirection ToolConfig::direction_for(Criterion c) const {
  auto it = directions.find(c);
  return it == directions.end() ? default_direction(c) : it->second;
}

// ---------------------------------------------------------------------------
// Config

namespace {

[[noreturn]] void bad_config(const std::string& msg) { fail(ErrorCode::InvalidConfig, msg); }

double config_number(const ordered_json& v, const std::string& key) {
  if (!v.is_number()) bad_config("'" + key + "' must be a number");
  return v.get<double>();
}

std::string config_string(const ordered_json& v, const std::string& key) {
  if (!v.is_string()) bad_config("'" + key + "' must be a string");
  return v.get<std::string>();
}

CostConfig cost_from_json(const ordered_json& obj) {
  if (!obj.is_object()) bad_config("cost config must be an object");
  CostConfig cfg;
  for (const auto& [k, v] : obj.items()) {
    if (k == "base_flops") {
      cfg.base_flops = config_number(v, k);
    } else if (k == "per_block_flops") {
      cfg.per_block_flops = config_number(v, k);
    } else if (k == "bytes_per_param") {
      cfg.bytes_per_param = config_number(v, k);
    } else {
      bad_config("unknown cost config key '" + k + "'");
    }
  }
  for (double x : {cfg.base_flops, cfg.per_block_flops, cfg.bytes_per_param}) {
    if (!std::isfinite(x) || x < 0.0) bad_config("cost config values must be finite and >= 0");
  }
  return cfg;
}

ordered_json parse_json_text(std::string_view text, ErrorCode code, const std::string& what) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    fail(code, what + " is not valid JSON: " + e.what());
  }
}

ordered_json config_object(const ToolConfig& cfg) {
  ordered_json j = ordered_json::object();
  j["bins"] = cfg.scoring.bins;
  j["log_base"] = cfg.scoring.log_base == LogBase::Nat ? "e" : "2";
  j["binning"] = std::string(binning_name(cfg.scoring.binning));
  j["block_pattern"] = cfg.pattern.regex;
  j["index_base"] = cfg.pattern.index_base;
  ordered_json dirs = ordered_json::object();
  for (Criterion c : weight_criteria()) dirs[std::string(criterion_name(c))] = direction_name(cfg.direction_for(c));
  j["directions"] = std::move(dirs);
  if (cfg.cost) {
    j["cost"] = {{"base_flops", cfg.cost->base_flops},
                 {"per_block_flops", cfg.cost->per_block_flops},
                 {"bytes_per_param", cfg.cost->bytes_per_param}};
  } else {
    j["cost"] = nullptr;
  }
  j["seed"] = cfg.seed;
  return j;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

ToolConfig parse_config_json(std::string_view text, ToolConfig cfg) {
  const ordered_json doc = parse_json_text(text, ErrorCode::InvalidConfig, "config");
  if (!doc.is_object()) bad_config("config must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (k == "bins") {
      if (!v.is_number_integer() || v.get<long long>() < 1) bad_config("'bins' must be a positive integer");
      cfg.scoring.bins = v.get<int>();
    } else if (k == "log_base") {
      const std::string s = v.is_number() ? std::to_string(v.get<int>()) : config_string(v, k);
      if (s == "e" || s == "nat") {
        cfg.scoring.log_base = LogBase::Nat;
      } else if (s == "2" || s == "bit") {
        cfg.scoring.log_base = LogBase::Bit;
      } else {
        bad_config("'log_base' must be \"e\" or \"2\"");
      }
    } else if (k == "binning") {
      try {
        cfg.scoring.binning = parse_binning(config_string(v, k));
      } catch (const Error& e) {
        bad_config(e.what());
      }
    } else if (k == "block_pattern") {
      cfg.pattern.regex = config_string(v, k);
    } else if (k == "index_base") {
      if (!v.is_number_integer()) bad_config("'index_base' must be 0 or 1");
      cfg.pattern.index_base = v.get<int>();
      if (cfg.pattern.index_base != 0 && cfg.pattern.index_base != 1) bad_config("'index_base' must be 0 or 1");
    } else if (k == "directions") {
      if (!v.is_object()) bad_config("'directions' must be an object");
      for (const auto& [name, dir] : v.items()) {
        try {
          cfg.directions[parse_criterion(name)] = parse_direction(config_string(dir, name));
        } catch (const Error& e) {
          bad_config(e.what());
        }
      }
    } else if (k == "cost") {
      cfg.cost = cost_from_json(v);
    } else if (k == "seed") {
      if (!v.is_number_unsigned()) bad_config("'seed' must be a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else {
      bad_config("unknown config key '" + k + "'");
    }
  }
  return cfg;
}

ToolConfig load_config(const std::filesystem::path& path, ToolConfig base) {
  return parse_config_json(read_text_file(path), std::move(base));
}

CostConfig parse_cost_config_json(std::string_view text) {
  return cost_from_json(parse_json_text(text, ErrorCode::InvalidConfig, "cost config"));
}

std::string config_json(const ToolConfig& cfg) { return config_object(cfg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Analysis

AnalysisReport analyze(const Checkpoint& ckpt, const BlockModel& model, const std::vector<Criterion>& criteria,
                       const ToolConfig& cfg, std::string checkpoint_label) {
  if (criteria.empty()) fail(ErrorCode::InvalidArgument, "no criteria requested");
  bool need_mi = false;
  for (Criterion c : criteria) {
    if (c == Criterion::Random || c == Criterion::External) {
      fail(ErrorCode::InvalidArgument,
           "criterion '" + std::string(criterion_name(c)) + "' is not computed from weights");
    }
    need_mi = need_mi || needs_mutual_information(c);
  }
  AnalysisReport r;
  r.checkpoint = std::move(checkpoint_label);
  r.config = cfg;
  r.model = model;
  r.scan = scan_model(model, ckpt, cfg.scoring, need_mi);
  std::set<Criterion> seen;
  for (Criterion c : criteria) {
    if (!seen.insert(c).second) continue;
    try {
      r.tables.push_back(score_from_scan(r.scan, c, cfg.direction_for(c)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateKurtosis && e.code() != ErrorCode::DegenerateMagnitude) throw;
      r.unavailable.emplace_back(c, e.what());
    }
  }
  return r;
}

namespace {

ordered_json model_object(const BlockModel& model) {
  ordered_json m = ordered_json::object();
  m["num_blocks"] = model.num_blocks();
  m["total_params"] = model.total_params();
  m["block_params"] = model.block_params();
  m["residual_params"] = model.residual_params;
  ordered_json blocks = ordered_json::array();
  for (const auto& b : model.blocks) {
    blocks.push_back({{"block_id", b.id}, {"params", b.param_count}, {"tensors", b.tensor_names}});
  }
  m["blocks"] = std::move(blocks);
  m["residual"] = model.residual;
  return m;
}

ordered_json table_object(const ScoreTable& t) {
  ordered_json j = ordered_json::object();
  j["criterion"] = std::string(criterion_name(t.criterion));
  j["direction"] = std::string(direction_name(t.direction));
  ordered_json scores = ordered_json::array();
  for (int b = 1; b <= t.num_blocks(); ++b) {
    const auto i = static_cast<std::size_t>(b - 1);
    scores.push_back({{"block_id", b}, {"raw", t.raw[i]}, {"normalized", t.normalized[i]}, {"rank", t.rank[i]}});
  }
  j["scores"] = std::move(scores);
  j["pruning_order"] = t.pruning_order();
  return j;
}

}  // namespace

std::string report_json(const AnalysisReport& r) {
  const LogBase base = r.scan.params.log_base;
  ordered_json j = ordered_json::object();
  j["schema"] = std::string(kAnalysisSchema);
  j["tool"] = {{"name", "gardener"}, {"version", std::string(tool_version())}};
  j["checkpoint"] = r.checkpoint;
  j["config"] = config_object(r.config);
  j["model"] = model_object(r.model);
  j["scan"] = {{"passes", r.scan.passes},
               {"global_range", {r.scan.global_range.lo, r.scan.global_range.hi}},
               {"mutual_information", r.scan.has_mutual_information}};

  ordered_json stats = ordered_json::array();
  for (const auto& b : r.scan.blocks) {
    ordered_json s = ordered_json::object();
    s["block_id"] = b.id;
    s["count"] = b.stats.count;
    s["mean_abs"] = b.stats.mean_abs;
    s["mean"] = b.stats.mean;
    s["variance"] = b.stats.variance;
    s["std"] = b.stats.std;
    s["l1"] = b.stats.l1;
    s["l2"] = b.stats.l2;
    s["max_abs"] = b.stats.max_abs;
    s["min"] = b.stats.min;
    s["max"] = b.stats.max;
    s["kurtosis"] = optional_number(b.stats.kurtosis);
    s["zero_count"] = b.stats.zero_count;
    s["entropy_number"] = from_nats(b.entropy_number, base);
    s["entropy_value"] = b.entropy_value ? ordered_json(from_nats(*b.entropy_value, base)) : ordered_json(nullptr);
    s["mi_number"] = b.mi_number ? ordered_json(from_nats(*b.mi_number, base)) : ordered_json(nullptr);
    s["mi_value"] = b.mi_value ? ordered_json(from_nats(*b.mi_value, base)) : ordered_json(nullptr);
    stats.push_back(std::move(s));
  }
  j["statistics"] = std::move(stats);

  ordered_json tables = ordered_json::array();
  for (const auto& t : r.tables) tables.push_back(table_object(t));
  j["criteria"] = std::move(tables);

  ordered_json unavailable = ordered_json::array();
  for (const auto& [c, why] : r.unavailable) {
    unavailable.push_back({{"criterion", std::string(criterion_name(c))}, {"reason", why}});
  }
  j["unavailable"] = std::move(unavailable);

  ordered_json hists = ordered_json::array();
  for (const auto& b : r.scan.blocks) {
    hists.push_back({{"block_id", b.id}, {"edges", b.histogram.edges}, {"counts", b.histogram.counts}});
  }
  j["histograms"] = std::move(hists);
  return j.dump(2) + "\n";
}

std::string report_scores_csv(const AnalysisReport& r) {
  std::ostringstream out;
  out << "block_id,params";
  for (const auto& t : r.tables) {
    const std::string name(criterion_name(t.criterion));
    out << ',' << name << "_raw," << name << "_normalized," << name << "_rank";
  }
  out << '\n';
  for (const auto& b : r.model.blocks) {
    const auto i = static_cast<std::size_t>(b.id - 1);
    out << b.id << ',' << b.param_count;
    for (const auto& t : r.tables) {
      out << ',' << format_double(t.raw[i]) << ',' << format_double(t.normalized[i]) << ',' << t.rank[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string report_histogram_csv(const AnalysisReport& r) {
  std::ostringstream out;
  out << "block_id,bin,lo,hi,count,magnitude\n";
  for (const auto& b : r.scan.blocks) {
    const Histogram& h = b.histogram;
    for (int i = 0; i < h.bins(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      out << b.id << ',' << i << ',' << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1]) << ','
          << h.counts[k] << ',' << format_double(h.magnitude[k]) << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// inspect / rank / prune / compare outputs

std::string inspect_json(const BlockModel& model, const Checkpoint& ckpt) {
  ordered_json j = ordered_json::object();
  j["tool"] = {{"name", "gardener"}, {"version", std::string(tool_version())}};
  j["pattern"] = {{"regex", model.pattern.regex}, {"index_base", model.pattern.index_base}};
  j["tensor_count"] = ckpt.size();
  j["checkpoint_params"] = ckpt.total_elements();
  j["model"] = model_object(model);
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : ckpt.metadata()) meta[k] = v;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

std::string inspect_text(const BlockModel& model, const Checkpoint& ckpt) {
  std::ostringstream out;
  out << "L=" << model.num_blocks() << "\n";
  out << "total_params=" << ckpt.total_elements() << " block_params=" << model.block_params()
      << " residual_params=" << model.residual_params << "\n";
  for (const auto& b : model.blocks) {
    out << "block " << b.id << ": " << b.param_count << " params, " << b.tensor_names.size() << " tensors\n";
    for (const auto& name : b.tensor_names) {
      const auto& ti = ckpt.info(name);
      out << "  " << name << " " << dtype_name(ti.dtype) << " [";
      for (std::size_t i = 0; i < ti.shape.size(); ++i) out << (i ? "," : "") << ti.shape[i];
      out << "]\n";
    }
  }
  out << "residual: " << model.residual.size() << " tensors\n";
  for (const auto& name : model.residual) out << "  " << name << "\n";
  return out.str();
}

std::string score_table_json(const ScoreTable& t) { return table_object(t).dump(2) + "\n"; }

std::string score_table_csv(const ScoreTable& t) {
  std::ostringstream out;
  out << "block_id,raw,normalized,rank\n";
  for (int b = 1; b <= t.num_blocks(); ++b) {
    const auto i = static_cast<std::size_t>(b - 1);
    out << b << ',' << format_double(t.raw[i]) << ',' << format_double(t.normalized[i]) << ',' << t.rank[i] << '\n';
  }
  return out.str();
}

std::string score_table_text(const ScoreTable& t) {
  std::ostringstream out;
  out << criterion_name(t.criterion) << " (" << direction_name(t.direction) << ")\n";
  out << std::left << std::setw(8) << "block" << std::setw(24) << "raw" << std::setw(14) << "normalized"
      << "rank\n";
  for (int b = 1; b <= t.num_blocks(); ++b) {
    const auto i = static_cast<std::size_t>(b - 1);
    out << std::left << std::setw(8) << b << std::setw(24) << format_double(t.raw[i]) << std::setw(14)
        << std::setprecision(4) << std::fixed << t.normalized[i] << std::defaultfloat << t.rank[i] << '\n';
  }
  return out.str();
}

std::string plan_json(const PruningPlan& plan, const PruneSet& set, const std::optional<CostEstimate>& cost) {
  ordered_json j = ordered_json::object();
  j["tool"] = {{"name", "gardener"}, {"version", std::string(tool_version())}};
  j["criterion"] = set.criterion;
  j["ratio"] = set.ratio;
  j["seed"] = set.seed ? ordered_json(*set.seed) : ordered_json(nullptr);
  j["removed_blocks"] = plan.remove;
  j["kept_blocks"] = plan.kept_blocks;
  ordered_json rename = ordered_json::array();
  for (const auto& [from, to] : plan.rename) rename.push_back({{"from", from}, {"to", to}});
  j["rename"] = std::move(rename);
  j["drop"] = plan.drop;
  if (cost) {
    j["cost"] = {{"params_before", cost->params_before},     {"params_after", cost->params_after},
                 {"flops_before", cost->flops_before},       {"flops_after", cost->flops_after},
                 {"size_bytes_before", cost->size_bytes_before}, {"size_bytes_after", cost->size_bytes_after}};
  } else {
    j["cost"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string comparison_json(const std::vector<RankComparison>& comparisons, const OracleTable& oracle,
                            const ToolConfig& cfg) {
  ordered_json j = ordered_json::object();
  j["tool"] = {{"name", "gardener"}, {"version", std::string(tool_version())}};
  j["config"] = config_object(cfg);
  ordered_json o = ordered_json::object();
  o["baseline_war"] = oracle.baseline_war;
  ordered_json blocks = ordered_json::array();
  for (const auto& [b, e] : oracle.per_block) blocks.push_back({{"block_id", b}, {"war", e.war}, {"drop", e.drop}});
  o["blocks"] = std::move(blocks);
  j["oracle"] = std::move(o);

  ordered_json list = ordered_json::array();
  for (const auto& c : comparisons) {
    ordered_json item = ordered_json::object();
    item["criterion"] = c.criterion;
    item["spearman_rho"] = c.spearman_rho;
    item["kendall_tau"] = c.kendall_tau;
    ordered_json most = ordered_json::object();
    for (const auto& [k, v] : c.top_k_most) most[std::to_string(k)] = v;
    ordered_json least = ordered_json::object();
    for (const auto& [k, v] : c.top_k_least) least[std::to_string(k)] = v;
    item["top_k_most_important"] = std::move(most);
    item["top_k_least_important"] = std::move(least);
    ordered_json rows = ordered_json::array();
    for (const auto& r : c.rank_table) {
      rows.push_back({{"block_id", r.block},
                      {"score", r.score},
                      {"criterion_rank", r.criterion_rank},
                      {"oracle_drop", r.oracle_drop},
                      {"oracle_rank", r.oracle_rank}});
    }
    item["rank_table"] = std::move(rows);
    list.push_back(std::move(item));
  }
  j["comparisons"] = std::move(list);
  return j.dump(2) + "\n";
}

std::string comparison_csv(const std::vector<RankComparison>& comparisons) {
  std::ostringstream out;
  out << "block_id,drop,oracle_rank";
  for (const auto& c : comparisons) out << ',' << c.criterion << "_rank";
  out << '\n';
  if (comparisons.empty()) return out.str();
  const auto& rows = comparisons.front().rank_table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].block << ',' << format_double(rows[i].oracle_drop) << ',' << rows[i].oracle_rank;
    for (const auto& c : comparisons) out << ',' << c.rank_table[i].criterion_rank;
    out << '\n';
  }
  return out.str();
}

std::string selection_json(const std::optional<ScoreTable>& table, const std::optional<PruneSet>& set,
                           const ToolConfig& cfg) {
  ordered_json j = ordered_json::object();
  j["tool"] = {{"name", "gardener"}, {"version", std::string(tool_version())}};
  j["config"] = config_object(cfg);
  j["table"] = table ? table_object(*table) : ordered_json(nullptr);
  if (set) {
    j["selection"] = {{"criterion", set->criterion},
                      {"ratio", set->ratio},
                      {"count", set->block_ids.size()},
                      {"seed", set->seed ? ordered_json(*set->seed) : ordered_json(nullptr)},
                      {"removed_blocks", set->block_ids}};
  } else {
    j["selection"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::ostringstream out;
  out << "ratio,removed_count,criterion,selected_blocks,single_block_drop_sum,measured_war,delta\n";
  for (const auto& r : rows) {
    out << format_double(r.ratio) << ',' << r.removed_count << ',' << csv_field(r.criterion) << ',';
    for (std::size_t i = 0; i < r.blocks.size(); ++i) out << (i ? " " : "") << r.blocks[i];
    out << ',' << opt(r.single_block_drop_sum) << ',' << opt(r.measured_war) << ',' << opt(r.delta) << '\n';
  }
  return out.str();
}

std::string canonical_json(std::string_view text) {
  return parse_json_text(text, ErrorCode::ParseError, "report").dump(2) + "\n";
}

}  // namespace gardener
